//! Shifted convolution sums and their shift-Ramanujan coefficients.
//!
//! `C(N, a) = sum_{n <= N} f(n) g(n+a)` is itself an arithmetic function of
//! the shift. This module evaluates it directly, through the truncated divisor
//! sum, and through the finite Ramanujan expansion, checks the truncation
//! error identity, applies the Möbius transform in the shift variable, and
//! extracts Carmichael coefficients both empirically and by exact
//! period-averaging over sparse supports.

use crate::arith::SieveTables;
use crate::error::{Error, Result};
use crate::ramanujan::ramanujan_sum;
use crate::scalar::Scalar;
use crate::transforms::{truncate, EratosthenesTransform, FiniteExpansion, TabulatedFunction};

/// How a correlation profile was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Direct,
    Truncated,
    Expansion,
}

impl std::fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrelationMethod::Direct => write!(f, "direct"),
            CorrelationMethod::Truncated => write!(f, "truncated"),
            CorrelationMethod::Expansion => write!(f, "expansion"),
        }
    }
}

/// Correlation values over a shift range, tagged with the method used.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile<T: Scalar> {
    pub n_limit: u64,
    pub shifts: Vec<u64>,
    pub values: Vec<T>,
    pub method: CorrelationMethod,
}

fn require_range<T: Scalar>(f: &TabulatedFunction<T>, needed: u64) -> Result<()> {
    if f.limit() < needed {
        return Err(Error::InsufficientRange {
            label: f.label().to_string(),
            limit: f.limit(),
            needed,
        });
    }
    Ok(())
}

/// `C_{f,g}(N, a) = sum_{n <= N} f(n) g(n + a)`, ascending `n`.
pub fn correlate<T: Scalar>(
    f: &TabulatedFunction<T>,
    g: &TabulatedFunction<T>,
    n_limit: u64,
    a: u64,
) -> Result<T> {
    require_range(f, n_limit)?;
    require_range(g, n_limit + a)?;
    let mut acc = T::zero();
    for n in 1..=n_limit {
        let fv = f.value(n);
        if fv.is_zero() {
            continue;
        }
        let gv = g.value(n + a);
        if gv.is_zero() {
            continue;
        }
        acc = acc + fv.clone() * gv.clone();
    }
    Ok(acc)
}

/// `C_{f,g_Q}(N, a)` with the divisor sum of `g` cut at `q <= cutoff`.
pub fn correlate_truncated<T: Scalar>(
    f: &TabulatedFunction<T>,
    gprime: &EratosthenesTransform<T>,
    n_limit: u64,
    a: u64,
    cutoff: u64,
) -> Result<T> {
    require_range(f, n_limit)?;
    let g_cut = truncate(gprime, cutoff, n_limit + a, "g_cut");
    correlate(f, &g_cut, n_limit, a)
}

/// Profile over a shift range, reusing one truncated table for all shifts.
pub fn profile_truncated<T: Scalar>(
    f: &TabulatedFunction<T>,
    gprime: &EratosthenesTransform<T>,
    n_limit: u64,
    shifts: &[u64],
    cutoff: u64,
) -> Result<CorrelationProfile<T>> {
    require_range(f, n_limit)?;
    let max_shift = shifts.iter().copied().max().unwrap_or(0);
    let g_cut = truncate(gprime, cutoff, n_limit + max_shift, "g_cut");
    let mut values = Vec::with_capacity(shifts.len());
    for &a in shifts {
        values.push(correlate(f, &g_cut, n_limit, a)?);
    }
    Ok(CorrelationProfile {
        n_limit,
        shifts: shifts.to_vec(),
        values,
        method: CorrelationMethod::Truncated,
    })
}

/// Direct-route companion of [`profile_truncated`].
pub fn profile_direct<T: Scalar>(
    f: &TabulatedFunction<T>,
    g: &TabulatedFunction<T>,
    n_limit: u64,
    shifts: &[u64],
) -> Result<CorrelationProfile<T>> {
    let mut values = Vec::with_capacity(shifts.len());
    for &a in shifts {
        values.push(correlate(f, g, n_limit, a)?);
    }
    Ok(CorrelationProfile {
        n_limit,
        shifts: shifts.to_vec(),
        values,
        method: CorrelationMethod::Direct,
    })
}

/// Expansion-route profile via [`correlate_via_expansion`].
pub fn profile_expansion<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    expansion: &FiniteExpansion<T>,
    n_limit: u64,
    shifts: &[u64],
) -> Result<CorrelationProfile<T>> {
    let mut values = Vec::with_capacity(shifts.len());
    for &a in shifts {
        values.push(correlate_via_expansion(tables, f, expansion, n_limit, a)?);
    }
    Ok(CorrelationProfile {
        n_limit,
        shifts: shifts.to_vec(),
        values,
        method: CorrelationMethod::Expansion,
    })
}

/// Both routes to the truncation error, plus the coarse bound.
///
/// `difference` is `C_{f,g}(N,a) - C_{f,g_N}(N,a)` computed as a difference of
/// correlations; `tail_sum` is the explicit sum over `N < q <= N + a` of
/// `g'(q) * sum_{n <= N, n = -a mod q} f(n)`. The two agree exactly in exact
/// mode. `bound = max|f| * max_{N<q<=N+a}|g'| * a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationError<T: Scalar> {
    pub difference: T,
    pub tail_sum: T,
    pub bound: T,
    pub holds: bool,
}

pub fn truncation_error<T: Scalar>(
    f: &TabulatedFunction<T>,
    gprime: &EratosthenesTransform<T>,
    n_limit: u64,
    a: u64,
) -> Result<TruncationError<T>> {
    require_range(f, n_limit)?;
    let full = correlate_truncated(f, gprime, n_limit, a, n_limit + a)?;
    let cut = correlate_truncated(f, gprime, n_limit, a, n_limit)?;
    let difference = full - cut;

    let mut tail_sum = T::zero();
    for q in (n_limit + 1)..=(n_limit + a) {
        let gq = gprime.prime_value(q);
        if gq.is_zero() {
            continue;
        }
        // n = -a mod q within 1..=N.
        let residue = (q - (a % q)) % q;
        let mut inner = T::zero();
        let mut n = if residue == 0 { q } else { residue };
        while n <= n_limit {
            inner = inner + f.value(n).clone();
            n += q;
        }
        tail_sum = tail_sum + gq * inner;
    }

    let mut max_f = T::zero();
    for n in 1..=n_limit {
        let v = f.value(n).abs();
        if v > max_f {
            max_f = v;
        }
    }
    let mut max_gp = T::zero();
    for q in (n_limit + 1)..=(n_limit + a) {
        let v = gprime.prime_value(q).abs();
        if v > max_gp {
            max_gp = v;
        }
    }
    let bound = max_f * max_gp * T::from_nat(a);
    let holds = difference.abs() <= bound;
    Ok(TruncationError {
        difference,
        tail_sum,
        bound,
        holds,
    })
}

/// The double sum `sum_{q <= Q} ghat(q) sum_{n <= N} f(n) c_q(n + a)`.
///
/// Equals the truncated correlation with `cutoff = Q`, exactly in exact mode.
pub fn correlate_via_expansion<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    expansion: &FiniteExpansion<T>,
    n_limit: u64,
    a: u64,
) -> Result<T> {
    require_range(f, n_limit)?;
    if tables.limit() < expansion.range_q() {
        return Err(Error::InsufficientRange {
            label: "sieve".to_string(),
            limit: tables.limit(),
            needed: expansion.range_q(),
        });
    }
    let mut acc = T::zero();
    for q in 1..=expansion.range_q() {
        let coeff = expansion.coefficient(q);
        if coeff.is_zero() {
            continue;
        }
        let mut inner = T::zero();
        for n in 1..=n_limit {
            let fv = f.value(n);
            if fv.is_zero() {
                continue;
            }
            let c = ramanujan_sum(tables, q, (n + a) as i64);
            if c != 0 {
                inner = inner + fv.clone() * T::from_int(c);
            }
        }
        acc = acc + coeff * inner;
    }
    Ok(acc)
}

/// Möbius transform of a correlation in the shift variable:
/// `C'(l) = sum_{t|l} C(t) mu(l/t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTransform<T: Scalar> {
    values: Vec<T>,
}

impl<T: Scalar> ShiftTransform<T> {
    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn value(&self, l: u64) -> &T {
        assert!(l >= 1 && l <= self.limit());
        &self.values[l as usize]
    }

    /// Inverse direction: `sum_{t|l} C'(t)` recovers `C(l)`.
    pub fn recompose(&self, tables: &SieveTables, l: u64) -> T {
        assert!(l >= 1 && l <= self.limit());
        let mut acc = T::zero();
        for t in tables.divisors(l).expect("l within sieve range") {
            acc = acc + self.values[t as usize].clone();
        }
        acc
    }
}

pub fn shift_eratosthenes<T: Scalar>(
    tables: &SieveTables,
    c: impl Fn(u64) -> T,
    l_max: u64,
) -> ShiftTransform<T> {
    assert!(l_max >= 1 && l_max <= tables.limit());
    let mut cached: Vec<T> = Vec::with_capacity(l_max as usize + 1);
    cached.push(T::zero());
    for t in 1..=l_max {
        cached.push(c(t));
    }
    let mut values = vec![T::zero(); l_max as usize + 1];
    for l in 1..=l_max {
        let mut acc = T::zero();
        for t in tables.divisors(l).expect("l within sieve range") {
            let mu = tables.mu(l / t);
            if mu != 0 {
                acc = acc + cached[t as usize].clone() * T::from_int(mu);
            }
        }
        values[l as usize] = acc;
    }
    ShiftTransform { values }
}

/// One row of the Delange-Hypothesis diagnostic for a truncated correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhPoint {
    pub d: u64,
    /// `2^omega(d) |C'(d)| / d`, the term added at this `d`.
    pub term: f64,
    /// Running partial sum through this `d`.
    pub partial: f64,
}

/// Running partial sums of `sum_d 2^omega(d) |C'_{f,g_N}(N,d)| / d`.
///
/// Purely a report: no convergence is asserted.
pub fn dh_diagnostic<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    gprime: &EratosthenesTransform<T>,
    n_limit: u64,
    cutoff: u64,
    d_max: u64,
) -> Result<Vec<DhPoint>> {
    require_range(f, n_limit)?;
    if d_max == 0 {
        return Ok(Vec::new());
    }
    let g_cut = truncate(gprime, cutoff, n_limit + d_max, "g_cut");
    let correlation: Vec<T> = {
        let mut v = Vec::with_capacity(d_max as usize + 1);
        v.push(T::zero());
        for t in 1..=d_max {
            v.push(correlate(f, &g_cut, n_limit, t)?);
        }
        v
    };
    let mut out = Vec::with_capacity(d_max as usize);
    let mut partial = 0.0f64;
    for d in 1..=d_max {
        let mut cprime = T::zero();
        for t in tables.divisors(d)? {
            let mu = tables.mu(d / t);
            if mu != 0 {
                cprime = cprime + correlation[t as usize].clone() * T::from_int(mu);
            }
        }
        let term = tables.two_pow_omega(d) as f64 * cprime.abs().to_f64_lossy() / d as f64;
        partial += term;
        out.push(DhPoint { d, term, partial });
    }
    Ok(out)
}

/// Finite-x Carmichael average `(1/phi(l)) (1/x) sum_{a <= x} C(a) c_l(a)`.
pub fn carmichael_coefficient_empirical<T: Scalar>(
    tables: &SieveTables,
    c: impl Fn(u64) -> T,
    l: u64,
    x: u64,
) -> T {
    assert!(l >= 1 && x >= 1);
    let mut acc = T::zero();
    for a in 1..=x {
        let cv = c(a);
        if cv.is_zero() {
            continue;
        }
        let r = ramanujan_sum(tables, l, a as i64);
        if r != 0 {
            acc = acc + cv * T::from_int(r);
        }
    }
    acc / T::from_nat(tables.phi(l) * x)
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        let r = x % y;
        x = y;
        y = r;
    }
    a / x * b
}

/// Exact Carmichael coefficient of a truncated correlation with sparse
/// support, by averaging over one full period.
///
/// The truncated correlation is periodic in the shift with period dividing
/// `L = lcm(support(g'), l)`, so the Cesàro limit in the Carmichael formula
/// equals the exact average over `a = 1..=L`. Fails when `L` exceeds
/// `lcm_budget`. Fairness holds structurally: `f` and `g'` are fixed and the
/// shift enters only through `n + a`.
pub fn carmichael_coefficient_exact<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    gprime: &EratosthenesTransform<T>,
    n_limit: u64,
    cutoff: u64,
    l: u64,
    lcm_budget: u64,
) -> Result<T> {
    require_range(f, n_limit)?;
    assert!(l >= 1 && l <= tables.limit());
    let support = gprime.support(cutoff);
    let mut period: u128 = l as u128;
    for &q in &support {
        period = lcm_u128(period, q as u128);
        if period > lcm_budget as u128 {
            return Err(Error::PeriodBudget {
                period,
                budget: lcm_budget,
            });
        }
    }
    let period = period as u64;
    let support_values: Vec<(u64, T)> = support
        .iter()
        .map(|&q| (q, gprime.prime_value(q)))
        .collect();
    // g_cut(m) = sum over support entries dividing m; it only sees m mod the
    // support period, so the correlation repeats with that inner period and
    // one cached cycle serves every shift in 1..=L.
    let g_cut = |m: u64| -> T {
        let mut acc = T::zero();
        for (q, v) in &support_values {
            if m % q == 0 {
                acc = acc + v.clone();
            }
        }
        acc
    };
    let inner_period = support
        .iter()
        .fold(1u64, |acc, &q| (lcm_u128(acc as u128, q as u128)) as u64);
    let mut corr_cycle = Vec::with_capacity(inner_period as usize);
    for a in 1..=inner_period {
        let mut corr = T::zero();
        for n in 1..=n_limit {
            let fv = f.value(n);
            if fv.is_zero() {
                continue;
            }
            let gv = g_cut(n + a);
            if gv.is_zero() {
                continue;
            }
            corr = corr + fv.clone() * gv;
        }
        corr_cycle.push(corr);
    }
    let mut acc = T::zero();
    for a in 1..=period {
        let r = ramanujan_sum(tables, l, a as i64);
        if r == 0 {
            continue;
        }
        let corr = &corr_cycle[((a - 1) % inner_period) as usize];
        if !corr.is_zero() {
            acc = acc + corr.clone() * T::from_int(r);
        }
    }
    Ok(acc / T::from_nat(tables.phi(l) * period))
}
