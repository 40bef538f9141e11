//! The 2k-twin-prime application at desk scale.
//!
//! Truncated von Mangoldt Ramanujan coefficients, the classical singular
//! series with an independent Euler-product oracle, direct
//! `C_{Lambda,Lambda}(N, 2k)` sieve sums, Chebyshev/PNT sanity ratios and the
//! gcd tail sums. Asymptotic claims are reported against pinned baselines,
//! never asserted as theorems.

use num_integer::Integer;

use crate::arith::SieveTables;
use crate::error::{Error, Result};
use crate::ramanujan::ramanujan_sum;
use crate::report::{DiagnosticsReport, VerdictStatus};

/// One truncated von Mangoldt Ramanujan coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaCoefficient {
    pub n_limit: u64,
    pub q: u64,
    /// `-sum_{d <= N, q|d} mu(d) log(d) / d`, ascending `d`.
    pub value: f64,
    /// The limiting shape `mu(q) / phi(q)`.
    pub reference: f64,
    /// `|value| * q / log^2 N` — the constant in the displayed `log^2 N / q`
    /// bound, reported for cross-N comparison.
    pub bound_constant: f64,
}

/// `LambdaHat_N(q)` with its reference value.
pub fn lambda_coefficient(tables: &SieveTables, n_limit: u64, q: u64) -> Result<LambdaCoefficient> {
    if q == 0 || q > n_limit {
        return Err(Error::OutOfRange {
            n: q,
            limit: n_limit,
        });
    }
    if n_limit > tables.limit() {
        return Err(Error::OutOfRange {
            n: n_limit,
            limit: tables.limit(),
        });
    }
    let mut acc = 0.0f64;
    let mut d = q;
    while d <= n_limit {
        let mu = tables.mu(d);
        if mu != 0 {
            acc += mu as f64 * (d as f64).ln() / d as f64;
        }
        d += q;
    }
    let mut value = -acc;
    if value == 0.0 {
        value = 0.0; // avoid -0 in reports
    }
    let reference = tables.mu(q) as f64 / tables.phi(q) as f64;
    let log_n = (n_limit as f64).ln();
    let bound_constant = if log_n > 0.0 {
        value.abs() * q as f64 / (log_n * log_n)
    } else {
        0.0
    };
    Ok(LambdaCoefficient {
        n_limit,
        q,
        value,
        reference,
        bound_constant,
    })
}

/// One row of the coefficient table: the scaled error `|value - reference| * q`
/// makes different `N` comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientRow {
    pub q: u64,
    pub value: f64,
    pub reference: f64,
    pub scaled_error: f64,
}

/// `LambdaHat_N(q)` against `mu(q)/phi(q)` for `q <= q_max`.
///
/// The reference approximation is only claimed for `q <= sqrt(N)`; larger
/// `q_max` still computes, the caller decides what to read into it.
pub fn coefficient_table(
    tables: &SieveTables,
    n_limit: u64,
    q_max: u64,
) -> Result<Vec<CoefficientRow>> {
    let mut rows = Vec::with_capacity(q_max as usize);
    for q in 1..=q_max {
        let c = lambda_coefficient(tables, n_limit, q)?;
        rows.push(CoefficientRow {
            q,
            value: c.value,
            reference: c.reference,
            scaled_error: (c.value - c.reference).abs() * q as f64,
        });
    }
    Ok(rows)
}

/// Partial singular series with its tail estimate and product oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSeriesValue {
    pub shift: u64,
    pub l_max: u64,
    /// `sum_{l <= l_max} mu^2(l) c_l(shift) / phi^2(l)`.
    pub partial: f64,
    /// `sum_{l_max < l <= 10 l_max} mu^2(l) gcd(shift, l) / phi^2(l)`,
    /// clamped to the sieve limit; uses `|c_l| <= gcd`.
    pub tail_estimate: f64,
    /// Independent Euler-product evaluation of the same constant.
    pub product_oracle: f64,
}

/// Euler-product route to the twin singular series:
/// `2 * prod_{p odd, p | shift} p/(p-1) * prod_{p odd, p not| shift} (1 - 1/(p-1)^2)`,
/// over the primes in the sieve.
pub fn euler_product_oracle(tables: &SieveTables, shift: u64) -> f64 {
    let mut acc = 2.0f64;
    for p in tables.primes() {
        if p == 2 {
            continue;
        }
        let pf = p as f64;
        if shift % p == 0 {
            acc *= pf / (pf - 1.0);
        } else {
            acc *= 1.0 - 1.0 / ((pf - 1.0) * (pf - 1.0));
        }
    }
    acc
}

/// `prod_{p | k, p > 2} (p - 1) / (p - 2)` — the factor relating `S(2k)` to
/// `S(2)`.
pub fn odd_prime_ratio_product(k: u64) -> f64 {
    let mut product = 1.0f64;
    let mut m = k;
    while m % 2 == 0 {
        m /= 2;
    }
    let mut p = 3u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            product *= (p as f64 - 1.0) / (p as f64 - 2.0);
        }
        p += 2;
    }
    if m > 1 {
        product *= (m as f64 - 1.0) / (m as f64 - 2.0);
    }
    product
}

/// The series route to `S(shift)` for an even shift, with tail estimate and
/// oracle attached.
pub fn singular_series(
    tables: &SieveTables,
    shift: u64,
    l_max: u64,
) -> Result<SingularSeriesValue> {
    if shift == 0 || shift % 2 != 0 {
        return Err(Error::OddShift(shift));
    }
    if l_max == 0 || l_max > tables.limit() {
        return Err(Error::OutOfRange {
            n: l_max,
            limit: tables.limit(),
        });
    }
    let mut partial = 0.0f64;
    for l in 1..=l_max {
        if tables.mu(l) == 0 {
            continue;
        }
        let phi = tables.phi(l) as f64;
        partial += ramanujan_sum(tables, l, shift as i64) as f64 / (phi * phi);
    }
    let tail_top = (10 * l_max).min(tables.limit());
    let mut tail_estimate = 0.0f64;
    for l in (l_max + 1)..=tail_top {
        if tables.mu(l) == 0 {
            continue;
        }
        let phi = tables.phi(l) as f64;
        tail_estimate += shift.gcd(&l) as f64 / (phi * phi);
    }
    Ok(SingularSeriesValue {
        shift,
        l_max,
        partial,
        tail_estimate,
        product_oracle: euler_product_oracle(tables, shift),
    })
}

/// `C_{Lambda,Lambda}(N, shift) = sum_{n <= N} Lambda(n) Lambda(n + shift)`,
/// ascending `n`.
pub fn hl_correlation(tables: &SieveTables, n_limit: u64, shift: u64) -> Result<f64> {
    if n_limit + shift > tables.limit() {
        return Err(Error::OutOfRange {
            n: n_limit + shift,
            limit: tables.limit(),
        });
    }
    let mut acc = 0.0f64;
    for n in 1..=n_limit {
        let a = tables.von_mangoldt(n)?;
        if a == 0.0 {
            continue;
        }
        let b = tables.von_mangoldt(n + shift)?;
        if b != 0.0 {
            acc += a * b;
        }
    }
    Ok(acc)
}

/// One row of the Hardy-Littlewood comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlRow {
    pub two_k: u64,
    pub correlation: f64,
    /// `S(2k) * N` from the series partial sum.
    pub prediction: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HlReport {
    pub n_limit: u64,
    pub l_max: u64,
    pub delta: f64,
    pub rows: Vec<HlRow>,
    /// Shifts outside the `log k / log N < 1 - delta` range; reported, never
    /// fatal.
    pub warnings: Vec<String>,
}

impl HlReport {
    pub fn to_report(&self) -> DiagnosticsReport {
        let mut report = DiagnosticsReport::new("twins");
        report.insert_metadata("N", self.n_limit.to_string());
        report.insert_metadata("l_max", self.l_max.to_string());
        report.insert_metadata("delta", self.delta.to_string());
        report.push_column("2k", self.rows.iter().map(|r| r.two_k as f64).collect());
        report.push_column(
            "correlation",
            self.rows.iter().map(|r| r.correlation).collect(),
        );
        report.push_column(
            "prediction",
            self.rows.iter().map(|r| r.prediction).collect(),
        );
        report.push_column("ratio", self.rows.iter().map(|r| r.ratio).collect());
        for w in &self.warnings {
            report.push_verdict("delta-range", VerdictStatus::ReportOnly, w.clone());
        }
        report
    }
}

/// Direct correlations against singular-series predictions for
/// `2k = 2*k_min ..= 2*k_max`.
pub fn hl_report(
    tables: &SieveTables,
    n_limit: u64,
    k_min: u64,
    k_max: u64,
    l_max: u64,
    delta: f64,
) -> Result<HlReport> {
    assert!(k_min >= 1 && k_min <= k_max);
    let mut rows = Vec::with_capacity((k_max - k_min + 1) as usize);
    let mut warnings = Vec::new();
    let log_n = (n_limit as f64).ln();
    for k in k_min..=k_max {
        if k >= 2 && (k as f64).ln() / log_n >= 1.0 - delta {
            warnings.push(format!(
                "k = {k}: log k / log N exceeds 1 - delta = {}",
                1.0 - delta
            ));
        }
        let shift = 2 * k;
        let correlation = hl_correlation(tables, n_limit, shift)?;
        let series = singular_series(tables, shift, l_max)?;
        let prediction = series.partial * n_limit as f64;
        rows.push(HlRow {
            two_k: shift,
            correlation,
            prediction,
            ratio: correlation / prediction,
        });
    }
    Ok(HlReport {
        n_limit,
        l_max,
        delta,
        rows,
        warnings,
    })
}

/// Chebyshev/PNT sanity: `psi(N) / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevCheck {
    pub n_limit: u64,
    pub theta_ratio: f64,
    /// `Some(ratio in [0.8, 1.2])` for `N >= 10^4`; below that the ratio is
    /// reported without a band.
    pub within_band: Option<bool>,
}

pub fn chebyshev_pnt_check(tables: &SieveTables, n_limit: u64) -> Result<ChebyshevCheck> {
    let theta_ratio = tables.psi(n_limit)? / n_limit as f64;
    let within_band = if n_limit >= 10_000 {
        Some((0.8..=1.2).contains(&theta_ratio))
    } else {
        None
    };
    Ok(ChebyshevCheck {
        n_limit,
        theta_ratio,
        within_band,
    })
}

/// The three gcd tail sums with their envelope ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcdTails {
    /// `sum_{l <= sqrt(N)} gcd(a, l) / l^2`.
    pub low: f64,
    /// `sum_{sqrt(N) < l <= N} gcd(a, l) / l^2`.
    pub mid: f64,
    /// `sum_{sqrt(N) < l <= N^2} log^2(l) gcd(a, l) / l^2`.
    pub high: f64,
    /// `low / log N` — compared against a pinned constant.
    pub low_envelope: f64,
    /// `mid * sqrt(N) / a^0.1`.
    pub mid_envelope: f64,
    /// `high * sqrt(N) / (a^0.1 log^2 N)`.
    pub high_envelope: f64,
}

fn divisors_by_trial(n: u64) -> Vec<u64> {
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            divs.push(d);
            if d != n / d {
                divs.push(n / d);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    divs
}

/// Evaluates the three bounded sums by grouping on `d = gcd(a, l)` through
/// `gcd(a, l) = sum_{d | gcd} phi(d)`, so each divisor of `a` contributes
/// zeta-like partial sums instead of per-`l` gcd calls.
pub fn gcd_tail_sums(shift: u64, n_limit: u64) -> Result<GcdTails> {
    if shift == 0 || shift % 2 != 0 {
        return Err(Error::OddShift(shift));
    }
    if n_limit < 4 {
        return Err(Error::OutOfRange {
            n: n_limit,
            limit: 4,
        });
    }
    let root = (n_limit as f64).sqrt().floor() as u64;
    let n_sq = n_limit * n_limit;
    let mut low = 0.0f64;
    let mut mid = 0.0f64;
    let mut high = 0.0f64;
    for d in divisors_by_trial(shift) {
        let phi_d = totient_by_trial(d) as f64;
        let weight = phi_d / (d * d) as f64;
        let log_d = (d as f64).ln();
        // m ranges for l = d*m in the three windows.
        let m_low = root / d;
        let m_mid = n_limit / d;
        let m_high = n_sq / d;
        let mut s2_low = 0.0f64;
        let mut s2_mid = 0.0f64;
        let mut s2 = 0.0f64;
        let mut s2l = 0.0f64;
        let mut s2ll = 0.0f64;
        let mut s2l_low = 0.0f64;
        let mut s2ll_low = 0.0f64;
        for m in 1..=m_high {
            let mf = m as f64;
            let inv = 1.0 / (mf * mf);
            let lg = mf.ln();
            s2 += inv;
            s2l += lg * inv;
            s2ll += lg * lg * inv;
            if m == m_low {
                s2_low = s2;
                s2l_low = s2l;
                s2ll_low = s2ll;
            }
            if m == m_mid {
                s2_mid = s2;
            }
        }
        if m_low == 0 {
            s2_low = 0.0;
            s2l_low = 0.0;
            s2ll_low = 0.0;
        }
        if m_mid == 0 {
            s2_mid = 0.0;
        }
        low += weight * s2_low;
        mid += weight * (s2_mid - s2_low);
        // log^2(d*m) = log^2 d + 2 log d log m + log^2 m over m in (root/d, N^2/d].
        high += weight
            * (log_d * log_d * (s2 - s2_low) + 2.0 * log_d * (s2l - s2l_low) + (s2ll - s2ll_low));
    }
    let log_n = (n_limit as f64).ln();
    let a_eps = (shift as f64).powf(0.1);
    let sqrt_n = (n_limit as f64).sqrt();
    Ok(GcdTails {
        low,
        mid,
        high,
        low_envelope: low / log_n,
        mid_envelope: mid * sqrt_n / a_eps,
        high_envelope: high * sqrt_n / (a_eps * log_n * log_n),
    })
}

fn totient_by_trial(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}
