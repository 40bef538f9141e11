//! Eratosthenes transforms, truncations and finite Ramanujan expansions.
//!
//! A tabulated `F` determines a unique `F' = F * mu` with
//! `F(n) = sum_{d|n} F'(d)`. Cutting the divisor sum at `q <= Q` gives the
//! truncation `g_Q`, whose finite Ramanujan expansion has coefficients
//! `ghat(l) = sum_{q <= Q, l|q} g'(q) / q`. In exact mode the expansion
//! reproduces the truncated divisor sum identically; the tests insist on it.

use crate::arith::SieveTables;
use crate::ramanujan::ramanujan_sum;
use crate::scalar::{Scalar, ValueMode};

/// An arithmetic function tabulated on `1..=limit`.
///
/// The numeric mode is the type parameter, so a table is uniformly exact or
/// uniformly real by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFunction<T: Scalar> {
    label: String,
    values: Vec<T>,
}

impl<T: Scalar> TabulatedFunction<T> {
    /// Tabulates `f` on `1..=limit`.
    pub fn from_fn(label: impl Into<String>, limit: u64, mut f: impl FnMut(u64) -> T) -> Self {
        assert!(limit >= 1, "tables cover at least n = 1");
        let mut values = Vec::with_capacity(limit as usize + 1);
        values.push(T::zero());
        for n in 1..=limit {
            values.push(f(n));
        }
        TabulatedFunction {
            label: label.into(),
            values,
        }
    }

    /// Wraps explicit values for `n = 1, 2, ...` in order.
    pub fn from_values(label: impl Into<String>, values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "tables cover at least n = 1");
        let mut padded = Vec::with_capacity(values.len() + 1);
        padded.push(T::zero());
        padded.extend(values);
        TabulatedFunction {
            label: label.into(),
            values: padded,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn value(&self, n: u64) -> &T {
        assert!(
            n >= 1 && n <= self.limit(),
            "argument {} outside table range 1..={}",
            n,
            self.limit()
        );
        &self.values[n as usize]
    }

    pub fn mode(&self) -> ValueMode {
        T::MODE
    }

    /// The constant function 1.
    pub fn ones(limit: u64) -> Self {
        Self::from_fn("one", limit, |_| T::one())
    }

    /// The Möbius function as a table.
    pub fn moebius(tables: &SieveTables, limit: u64) -> Self {
        assert!(limit <= tables.limit());
        Self::from_fn("mu", limit, |n| T::from_int(tables.mu(n)))
    }

    /// `phi(n) / n`.
    pub fn totient_ratio(tables: &SieveTables, limit: u64) -> Self {
        assert!(limit <= tables.limit());
        Self::from_fn("phi_over_n", limit, |n| {
            T::from_nat(tables.phi(n)) / T::from_nat(n)
        })
    }

    /// Largest normalized magnitude `|f(n)| / n^epsilon` over the table; a
    /// growth diagnostic, reported but never asserted.
    pub fn growth_diagnostic(&self, epsilon: f64) -> f64 {
        let mut max = 0.0f64;
        for n in 1..=self.limit() {
            let v = self.value(n).abs().to_f64_lossy() / (n as f64).powf(epsilon);
            if v > max {
                max = v;
            }
        }
        max
    }
}

impl TabulatedFunction<f64> {
    /// The von Mangoldt function as a real-mode table.
    pub fn von_mangoldt(tables: &SieveTables, limit: u64) -> Self {
        assert!(limit <= tables.limit());
        Self::from_fn("lambda", limit, |n| tables.von_mangoldt(n).unwrap())
    }
}

/// The Eratosthenes transform `F' = F * mu`, tabulated on `1..=limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct EratosthenesTransform<T: Scalar> {
    values: Vec<T>,
}

impl<T: Scalar> EratosthenesTransform<T> {
    /// Wraps explicit transform values for `d = 1, 2, ...`.
    pub fn from_values(values: Vec<T>) -> Self {
        assert!(!values.is_empty());
        let mut padded = Vec::with_capacity(values.len() + 1);
        padded.push(T::zero());
        padded.extend(values);
        EratosthenesTransform { values: padded }
    }

    /// Builds a transform of size `limit` from sparse `(d, value)` pairs;
    /// unlisted entries are zero.
    pub fn from_support(limit: u64, entries: &[(u64, T)]) -> Self {
        assert!(limit >= 1);
        let mut values = vec![T::zero(); limit as usize + 1];
        for (d, v) in entries {
            assert!(*d >= 1 && *d <= limit, "support entry {} out of range", d);
            values[*d as usize] = v.clone();
        }
        EratosthenesTransform { values }
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `F'(d)`; entries beyond the tabulated limit read as zero.
    pub fn prime_value(&self, d: u64) -> T {
        assert!(d >= 1, "transform entries start at d = 1");
        if d <= self.limit() {
            self.values[d as usize].clone()
        } else {
            T::zero()
        }
    }

    /// Indices with nonzero transform value, ascending, up to `cutoff`.
    pub fn support(&self, cutoff: u64) -> Vec<u64> {
        (1..=self.limit().min(cutoff))
            .filter(|&d| !self.values[d as usize].is_zero())
            .collect()
    }
}

/// `F'(d) = sum_{e|d} F(e) mu(d/e)` for every `d` up to the table limit.
pub fn eratosthenes_transform<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
) -> EratosthenesTransform<T> {
    let limit = f.limit();
    assert!(limit <= tables.limit(), "sieve too small for the table");
    let mut values = vec![T::zero(); limit as usize + 1];
    for e in 1..=limit {
        let fe = f.value(e);
        if fe.is_zero() {
            continue;
        }
        let mut m = e;
        while m <= limit {
            let mu = tables.mu(m / e);
            if mu != 0 {
                let term = fe.clone() * T::from_int(mu);
                values[m as usize] = values[m as usize].clone() + term;
            }
            m += e;
        }
    }
    EratosthenesTransform { values }
}

/// The truncated divisor sum `g_Q(m) = sum_{q|m, q <= cutoff} g'(q)`,
/// tabulated on `1..=domain_limit`.
///
/// The domain may exceed the transform's limit; divisors beyond the tabulated
/// transform contribute zero, exactly as divisors above the cutoff do.
pub fn truncate<T: Scalar>(
    gprime: &EratosthenesTransform<T>,
    cutoff: u64,
    domain_limit: u64,
    label: impl Into<String>,
) -> TabulatedFunction<T> {
    assert!(domain_limit >= 1);
    let mut values = vec![T::zero(); domain_limit as usize + 1];
    let top = cutoff.min(gprime.limit()).min(domain_limit);
    for q in 1..=top {
        let gq = &gprime.values[q as usize];
        if gq.is_zero() {
            continue;
        }
        let mut m = q;
        while m <= domain_limit {
            values[m as usize] = values[m as usize].clone() + gq.clone();
            m += q;
        }
    }
    values.remove(0);
    TabulatedFunction::from_values(label, values)
}

/// Recovers `F(n) = sum_{d|n} F'(d)` on `1..=domain_limit` (no truncation
/// inside the tabulated transform).
pub fn inverse_transform<T: Scalar>(
    fprime: &EratosthenesTransform<T>,
    domain_limit: u64,
    label: impl Into<String>,
) -> TabulatedFunction<T> {
    truncate(fprime, fprime.limit(), domain_limit, label)
}

/// Finite Ramanujan expansion: range `Q` and coefficients `ghat(l)`, `l <= Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteExpansion<T: Scalar> {
    coefficients: Vec<T>,
}

impl<T: Scalar> FiniteExpansion<T> {
    /// Wraps explicit coefficients for `l = 1, 2, ...`.
    pub fn from_coefficients(coefficients: Vec<T>) -> Self {
        assert!(!coefficients.is_empty());
        let mut padded = Vec::with_capacity(coefficients.len() + 1);
        padded.push(T::zero());
        padded.extend(coefficients);
        FiniteExpansion {
            coefficients: padded,
        }
    }

    pub fn range_q(&self) -> u64 {
        (self.coefficients.len() - 1) as u64
    }

    /// `ghat(l)`; reads as zero beyond the range.
    pub fn coefficient(&self, l: u64) -> T {
        assert!(l >= 1, "coefficients start at l = 1");
        if l <= self.range_q() {
            self.coefficients[l as usize].clone()
        } else {
            T::zero()
        }
    }
}

/// `ghat(l) = sum_{q <= range_q, l|q} g'(q) / q` for every `l <= range_q`.
pub fn finite_expansion<T: Scalar>(
    gprime: &EratosthenesTransform<T>,
    range_q: u64,
) -> FiniteExpansion<T> {
    assert!(range_q >= 1);
    let mut coefficients = vec![T::zero(); range_q as usize + 1];
    let top = range_q.min(gprime.limit());
    for q in 1..=top {
        let gq = &gprime.values[q as usize];
        if gq.is_zero() {
            continue;
        }
        let weighted = gq.clone() / T::from_nat(q);
        for l in 1..=range_q {
            if q % l == 0 {
                coefficients[l as usize] = coefficients[l as usize].clone() + weighted.clone();
            }
        }
    }
    FiniteExpansion { coefficients }
}

/// Evaluates the expansion at `m`: `sum_{l <= Q} ghat(l) c_l(m)`.
///
/// Exactly equal to `truncate(g', Q)` at `m` in exact mode.
pub fn evaluate_expansion<T: Scalar>(
    tables: &SieveTables,
    expansion: &FiniteExpansion<T>,
    m: u64,
) -> T {
    assert!(m >= 1);
    assert!(
        expansion.range_q() <= tables.limit(),
        "sieve too small for the expansion range"
    );
    let mut acc = T::zero();
    for l in 1..=expansion.range_q() {
        let coeff = &expansion.coefficients[l as usize];
        if coeff.is_zero() {
            continue;
        }
        let c = ramanujan_sum(tables, l, m as i64);
        if c != 0 {
            acc = acc + coeff.clone() * T::from_int(c);
        }
    }
    acc
}

/// Partial Wintner coefficient `sum_{d <= d_max, l|d} F'(d) / d`.
///
/// Callers track stabilization across increasing `d_max`; nothing here claims
/// the infinite series converges.
pub fn wintner_delange_coefficient<T: Scalar>(
    fprime: &EratosthenesTransform<T>,
    l: u64,
    d_max: u64,
) -> T {
    assert!(l >= 1);
    let mut acc = T::zero();
    let mut d = l;
    while d <= d_max.min(fprime.limit()) {
        let v = &fprime.values[d as usize];
        if !v.is_zero() {
            acc = acc + v.clone() / T::from_nat(d);
        }
        d += l;
    }
    acc
}

/// Partial sum of the Delange series `sum_{d <= d_max} 2^omega(d) |F'(d)| / d`.
pub fn dh_partial_sum<T: Scalar>(
    tables: &SieveTables,
    fprime: &EratosthenesTransform<T>,
    d_max: u64,
) -> f64 {
    let top = d_max.min(fprime.limit());
    assert!(top <= tables.limit(), "sieve too small for d_max");
    let mut acc = 0.0f64;
    for d in 1..=top {
        let v = &fprime.values[d as usize];
        if v.is_zero() {
            continue;
        }
        acc += tables.two_pow_omega(d) as f64 * v.abs().to_f64_lossy() / d as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    use crate::scalar::rational;

    fn tables() -> SieveTables {
        SieveTables::build(600).unwrap()
    }

    fn rational_table(label: &str, values: &[(i64, i64)]) -> TabulatedFunction<BigRational> {
        TabulatedFunction::from_values(label, values.iter().map(|&(n, d)| rational(n, d)).collect())
    }

    #[test]
    fn transform_of_constant_one_is_delta() {
        let t = tables();
        let f = TabulatedFunction::<BigRational>::ones(50);
        let e = eratosthenes_transform(&t, &f);
        assert!(e.prime_value(1).is_one());
        for d in 2..=50 {
            assert!(e.prime_value(d).is_zero(), "d = {d}");
        }
    }

    #[test]
    fn transform_of_identity_is_totient() {
        let t = tables();
        let f = TabulatedFunction::from_fn("n", 80, BigRational::from_nat);
        let e = eratosthenes_transform(&t, &f);
        for d in 1..=80 {
            assert_eq!(e.prime_value(d), BigRational::from_nat(t.phi(d)), "d = {d}");
        }
    }

    #[test]
    fn transform_of_von_mangoldt_is_minus_mu_log() {
        let t = tables();
        let f = TabulatedFunction::von_mangoldt(&t, 400);
        let e = eratosthenes_transform(&t, &f);
        for d in 1..=400u64 {
            let expected = -(t.mu(d) as f64) * (d as f64).ln();
            assert!(
                (e.prime_value(d) - expected).abs() <= 1e-9,
                "d = {d}: {} vs {expected}",
                e.prime_value(d)
            );
        }
    }

    #[test]
    fn round_trip_is_exact_in_rational_mode() {
        let t = tables();
        let f = rational_table(
            "f",
            &[(3, 2), (-1, 5), (0, 1), (7, 3), (2, 1), (1, 7), (-4, 9)],
        );
        let e = eratosthenes_transform(&t, &f);
        let back = inverse_transform(&e, f.limit(), "back");
        for n in 1..=f.limit() {
            assert_eq!(back.value(n), f.value(n), "n = {n}");
        }
    }

    #[test]
    fn truncation_examples() {
        let t = tables();
        // cutoff >= limit reproduces the function.
        let f = rational_table("f", &[(1, 1), (5, 2), (7, 3), (2, 5), (3, 1), (8, 7)]);
        let e = eratosthenes_transform(&t, &f);
        let g = truncate(&e, 6, 6, "g");
        for n in 1..=6 {
            assert_eq!(g.value(n), f.value(n));
        }
        // Support removed by the cutoff.
        let e2 = EratosthenesTransform::from_support(2, &[(2, BigRational::one())]);
        let g2 = truncate(&e2, 1, 10, "g2");
        for n in 1..=10 {
            assert!(g2.value(n).is_zero());
        }
        // g'(q) = 1/q, cutoff 4, m = 12 -> 1 + 1/2 + 1/3 + 1/4.
        let e3 =
            EratosthenesTransform::from_values((1..=6).map(|q| rational(1, q)).collect::<Vec<_>>());
        let g3 = truncate(&e3, 4, 12, "g3");
        assert_eq!(g3.value(12), &rational(25, 12));
    }

    #[test]
    fn expansion_coefficients_examples() {
        let t = tables();
        // g' = delta_1 -> ghat = (1, 0, ..., 0).
        let e = EratosthenesTransform::from_support(1, &[(1, BigRational::one())]);
        let exp = finite_expansion(&e, 8);
        assert!(exp.coefficient(1).is_one());
        for l in 2..=8 {
            assert!(exp.coefficient(l).is_zero());
        }
        // g' supported on {6} with value 6 -> ghat(l) = 1 on divisors of 6.
        let e2 = EratosthenesTransform::from_support(6, &[(6, rational(6, 1))]);
        let exp2 = finite_expansion(&e2, 6);
        for l in 1..=6u64 {
            let expected = if 6 % l == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            assert_eq!(exp2.coefficient(l), expected, "l = {l}");
        }
        // g'(q) = 1/q for q <= 4.
        let e3 =
            EratosthenesTransform::from_values((1..=4).map(|q| rational(1, q)).collect::<Vec<_>>());
        let exp3 = finite_expansion(&e3, 4);
        assert_eq!(
            exp3.coefficient(1),
            rational(1, 1) + rational(1, 4) + rational(1, 9) + rational(1, 16)
        );
        assert_eq!(exp3.coefficient(2), rational(1, 4) + rational(1, 16));
        assert_eq!(exp3.coefficient(3), rational(1, 9));
        assert_eq!(exp3.coefficient(4), rational(1, 16));
        let _ = t;
    }

    #[test]
    fn expansion_evaluation_matches_divisor_side() {
        let t = tables();
        let e = EratosthenesTransform::from_support(6, &[(6, rational(6, 1))]);
        let exp = finite_expansion(&e, 6);
        assert_eq!(evaluate_expansion(&t, &exp, 6), rational(6, 1));
        assert!(evaluate_expansion(&t, &exp, 4).is_zero());

        let e2 =
            EratosthenesTransform::from_values((1..=4).map(|q| rational(1, q)).collect::<Vec<_>>());
        let exp2 = finite_expansion(&e2, 4);
        assert_eq!(evaluate_expansion(&t, &exp2, 8), rational(7, 4));

        let delta = EratosthenesTransform::from_support(1, &[(1, BigRational::one())]);
        let expd = finite_expansion(&delta, 5);
        for m in 1..=40 {
            assert!(evaluate_expansion(&t, &expd, m).is_one(), "m = {m}");
        }
    }

    #[test]
    fn wintner_coefficient_examples() {
        let e = EratosthenesTransform::from_support(10, &[(1, BigRational::one())]);
        for d_max in 1..=10 {
            assert!(wintner_delange_coefficient(&e, 1, d_max).is_one());
            assert!(wintner_delange_coefficient(&e, 2, d_max).is_zero());
        }
        let e2 = EratosthenesTransform::from_support(6, &[(6, rational(6, 1))]);
        assert!(wintner_delange_coefficient(&e2, 3, 6).is_one());
        assert!(wintner_delange_coefficient(&e2, 3, 5).is_zero());
    }

    #[test]
    fn dh_partial_sum_examples_and_monotonicity() {
        let t = tables();
        let e = EratosthenesTransform::from_support(10, &[(1, BigRational::one())]);
        for d_max in 1..=10 {
            assert_eq!(dh_partial_sum(&t, &e, d_max), 1.0);
        }
        let e2 = EratosthenesTransform::from_values(vec![
            rational(1, 1),
            rational(1, 1),
            rational(1, 1),
        ]);
        let s3 = dh_partial_sum(&t, &e2, 3);
        assert!((s3 - (1.0 + 1.0 + 2.0 / 3.0)).abs() < 1e-12);
        let mut prev = 0.0;
        for d_max in 1..=3 {
            let s = dh_partial_sum(&t, &e2, d_max);
            assert!(s >= prev);
            prev = s;
        }
        // Finite support stabilizes past the support.
        assert_eq!(dh_partial_sum(&t, &e2, 3), dh_partial_sum(&t, &e2, 50));
    }

    #[test]
    fn double_series_exchange_is_exact() {
        // For finitely supported F': sum_d (F'(d)/d) sum_{l|d} c_l(n) equals
        // sum_l (sum_{d = 0 mod l} F'(d)/d) c_l(n) equals F(n).
        let t = tables();
        let e = EratosthenesTransform::from_support(
            30,
            &[
                (2, rational(3, 4)),
                (9, rational(-5, 2)),
                (12, rational(1, 3)),
                (25, rational(7, 6)),
            ],
        );
        let f = inverse_transform(&e, 200, "f");
        for n in 1..=200u64 {
            let mut lhs = BigRational::zero();
            for d in 1..=30u64 {
                let v = e.prime_value(d);
                if v.is_zero() {
                    continue;
                }
                let mut csum = 0i64;
                for l in t.divisors(d).unwrap() {
                    csum += ramanujan_sum(&t, l, n as i64);
                }
                lhs += v / BigRational::from_nat(d) * BigRational::from_int(csum);
            }
            let mut rhs = BigRational::zero();
            for l in 1..=30u64 {
                let coeff = wintner_delange_coefficient(&e, l, 30);
                if coeff.is_zero() {
                    continue;
                }
                rhs += coeff * BigRational::from_int(ramanujan_sum(&t, l, n as i64));
            }
            assert_eq!(lhs, rhs, "n = {n}");
            assert_eq!(&lhs, f.value(n), "n = {n}");
        }
    }

    #[test]
    fn growth_diagnostic_reports_max() {
        let f = TabulatedFunction::from_values("f", vec![1.0, 8.0, 3.0]);
        let g = f.growth_diagnostic(0.0);
        assert_eq!(g, 8.0);
    }

    proptest! {
        // Möbius inversion round-trip on random rational tables of size 200.
        #[test]
        fn moebius_round_trip(nums in proptest::collection::vec(-20i64..=20, 200)) {
            let t = tables();
            let f = TabulatedFunction::from_values(
                "f",
                nums.iter().map(|&v| rational(v, 7)).collect::<Vec<_>>(),
            );
            let e = eratosthenes_transform(&t, &f);
            let back = inverse_transform(&e, 200, "back");
            for n in 1..=200 {
                prop_assert_eq!(back.value(n), f.value(n));
            }
        }

        // Finite-expansion identity on random sparse supports.
        #[test]
        fn expansion_identity_random(
            entries in proptest::collection::vec((1u64..=30, -9i64..=9, 1i64..=12), 1..6),
            q in 1u64..=30,
            m in 1u64..=120,
        ) {
            let t = tables();
            let pairs: Vec<(u64, BigRational)> = entries
                .iter()
                .map(|&(d, n, den)| (d, rational(n, den)))
                .collect();
            let e = EratosthenesTransform::from_support(30, &pairs);
            let exp = finite_expansion(&e, q);
            let lhs = evaluate_expansion(&t, &exp, m);
            let rhs = truncate(&e, q, m, "g_q");
            prop_assert_eq!(lhs, rhs.value(m).clone());
        }
    }
}
