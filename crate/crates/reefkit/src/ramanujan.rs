//! Ramanujan sums and the identities built directly on them.
//!
//! `c_q(n)` is the sum of `e^(2*pi*i*j*n/q)` over the residues `j <= q` coprime
//! to `q`. The fast path evaluates the gcd closed form in exact integer
//! arithmetic; [`ramanujan_sum_definition`] keeps the literal exponential sum
//! around as the slow reference route.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;

use crate::arith::SieveTables;
use crate::error::{Error, Result};

/// The additive character `e_q(x) = e^(2*pi*i*x/q)`.
pub fn additive_character(q: u64, x: i64) -> Complex64 {
    assert!(q >= 1, "modulus must be positive");
    let r = x.rem_euclid(q as i64) as f64;
    let theta = std::f64::consts::TAU * r / q as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// `c_q(n)` by the gcd closed form `mu(q/g) * phi(q) / phi(q/g)`, `g = gcd(q, n)`.
///
/// Negative arguments reduce mod `q`; `c_q(0) = phi(q)`. Panics when `q = 0`
/// or `q` exceeds the sieve limit.
pub fn ramanujan_sum(tables: &SieveTables, q: u64, n: i64) -> i64 {
    assert!(q >= 1, "modulus must be positive");
    assert!(
        q <= tables.limit(),
        "modulus {} beyond sieve limit {}",
        q,
        tables.limit()
    );
    let r = n.rem_euclid(q as i64) as u64;
    let g = if r == 0 { q } else { q.gcd(&r) };
    let reduced = q / g;
    let mu = tables.mu(reduced);
    if mu == 0 {
        return 0;
    }
    let quotient = tables.phi(q) / tables.phi(reduced);
    debug_assert_eq!(tables.phi(q) % tables.phi(reduced), 0);
    mu * quotient as i64
}

/// `c_q(n)` straight from the defining exponential sum.
///
/// Returns the nearest integer and the rounding residual (distance of the
/// complex sum from that integer). The residual stays far below 1/2 for the
/// moduli this crate handles, so the rounded value is exact.
pub fn ramanujan_sum_definition(q: u64, n: i64) -> (i64, f64) {
    assert!(q >= 1, "modulus must be positive");
    let r = n.rem_euclid(q as i64) as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..=q {
        if j.gcd(&q) == 1 {
            let arg = ((j as u128 * r as u128) % q as u128) as i64;
            acc += additive_character(q, arg);
        }
    }
    let rounded = acc.re.round();
    let residual = (acc - Complex64::new(rounded, 0.0)).norm();
    (rounded as i64, residual)
}

/// The divisibility indicator `1_{q|m} = (1/q) * sum_{l|q} c_l(m)`, exactly.
pub fn divisibility_indicator(tables: &SieveTables, q: u64, m: u64) -> BigRational {
    assert!(q >= 1 && m >= 1, "arguments must be positive");
    let mut sum: i64 = 0;
    for l in tables.divisors(q).expect("q within sieve range") {
        sum += ramanujan_sum(tables, l, m as i64);
    }
    BigRational::new(BigInt::from(sum), BigInt::from(q))
}

/// Outcome of the Delange bound `sum_{l|d} |c_l(n)| <= n * 2^omega(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelangeCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

/// Evaluates both sides of the Delange bound for `(d, n)`.
pub fn delange_bound_check(tables: &SieveTables, d: u64, n: u64) -> DelangeCheck {
    assert!(d >= 1 && n >= 1, "arguments must be positive");
    let mut lhs: u64 = 0;
    for l in tables.divisors(d).expect("d within sieve range") {
        lhs += ramanujan_sum(tables, l, n as i64).unsigned_abs();
    }
    let rhs = n
        .checked_mul(tables.two_pow_omega(d))
        .expect("Delange bound rhs overflows u64");
    DelangeCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
    }
}

/// Exact Cesàro average of `c_q(n + a) * c_l(a)` over one full period
/// `a = 1..=lcm(q, l)`.
///
/// The product is periodic in `a`, so this period average equals the limit in
/// the orthogonality relation: `c_q(n)` when `q = l`, zero otherwise.
pub fn orthogonality_average(
    tables: &SieveTables,
    q: u64,
    l: u64,
    n: u64,
    lcm_budget: u64,
) -> Result<BigRational> {
    assert!(q >= 1 && l >= 1, "moduli must be positive");
    let period = (q as u128 / q.gcd(&l) as u128) * l as u128;
    if period > lcm_budget as u128 {
        return Err(Error::PeriodBudget {
            period,
            budget: lcm_budget,
        });
    }
    let period = period as u64;
    let mut sum: i128 = 0;
    for a in 1..=period {
        let left = ramanujan_sum(tables, q, n as i64 + a as i64);
        let right = ramanujan_sum(tables, l, a as i64);
        sum += left as i128 * right as i128;
    }
    Ok(BigRational::new(BigInt::from(sum), BigInt::from(period)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    use crate::scalar::rational;

    fn tables() -> SieveTables {
        SieveTables::build(400).unwrap()
    }

    #[test]
    fn spot_values() {
        let t = tables();
        assert_eq!(ramanujan_sum(&t, 1, 5), 1);
        assert_eq!(ramanujan_sum(&t, 4, 8), 2);
        assert_eq!(ramanujan_sum(&t, 6, 4), -1);
        assert_eq!(ramanujan_sum(&t, 2, 1), -1);
        assert_eq!(ramanujan_sum(&t, 9, 3), -3);
    }

    #[test]
    fn value_at_zero_is_totient() {
        let t = tables();
        for q in 1..=60 {
            assert_eq!(ramanujan_sum(&t, q, 0), t.phi(q) as i64, "q = {q}");
        }
    }

    #[test]
    fn negative_arguments_reduce_mod_q() {
        let t = tables();
        for q in 1..=30i64 {
            for n in -60..=60i64 {
                assert_eq!(
                    ramanujan_sum(&t, q as u64, n),
                    ramanujan_sum(&t, q as u64, n.rem_euclid(q)),
                );
            }
        }
    }

    #[test]
    fn fast_path_matches_definition() {
        let t = tables();
        for q in 1..=40u64 {
            for n in -50..=50i64 {
                let (direct, residual) = ramanujan_sum_definition(q, n);
                assert!(residual < 1e-6, "q = {q}, n = {n}: residual {residual}");
                assert_eq!(ramanujan_sum(&t, q, n), direct, "q = {q}, n = {n}");
            }
        }
    }

    #[test]
    fn periodicity_and_evenness_exhaustive() {
        let t = tables();
        for q in 1..=50u64 {
            for n in 1..=(3 * q) {
                assert_eq!(
                    ramanujan_sum(&t, q, n as i64),
                    ramanujan_sum(&t, q, (n % q) as i64),
                );
            }
            for n in 1..=q {
                assert_eq!(
                    ramanujan_sum(&t, q, n as i64),
                    ramanujan_sum(&t, q, (q - n) as i64),
                );
            }
        }
    }

    #[test]
    fn gcd_bound_spot_range() {
        let t = tables();
        for q in 1..=60u64 {
            for n in 1..=60u64 {
                let c = ramanujan_sum(&t, q, n as i64).unsigned_abs();
                assert!(c <= q.gcd(&n), "q = {q}, n = {n}");
            }
        }
    }

    #[test]
    fn indicator_examples() {
        let t = tables();
        assert!(divisibility_indicator(&t, 1, 7).is_one());
        assert!(divisibility_indicator(&t, 4, 8).is_one());
        assert!(divisibility_indicator(&t, 4, 6).is_zero());
        // Per-term route for (4, 8): (c1 + c2 + c4)(8) = 1 + 1 + 2.
        assert_eq!(ramanujan_sum(&t, 1, 8), 1);
        assert_eq!(ramanujan_sum(&t, 2, 8), 1);
        assert_eq!(ramanujan_sum(&t, 4, 8), 2);
    }

    #[test]
    fn indicator_matches_mod_test() {
        let t = tables();
        for q in 1..=40u64 {
            for m in 1..=200u64 {
                let expected = if m % q == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                assert_eq!(divisibility_indicator(&t, q, m), expected, "q={q} m={m}");
            }
        }
    }

    #[test]
    fn delange_examples() {
        let t = tables();
        assert_eq!(
            delange_bound_check(&t, 1, 1),
            DelangeCheck {
                lhs: 1,
                rhs: 1,
                holds: true
            }
        );
        assert_eq!(
            delange_bound_check(&t, 6, 4),
            DelangeCheck {
                lhs: 4,
                rhs: 16,
                holds: true
            }
        );
        // Brute force for (12, 12): divisors 1,2,3,4,6,12.
        let lhs: u64 = t
            .divisors(12)
            .unwrap()
            .iter()
            .map(|&l| ramanujan_sum(&t, l, 12).unsigned_abs())
            .sum();
        let check = delange_bound_check(&t, 12, 12);
        assert_eq!(check.lhs, lhs);
        assert_eq!(check.rhs, 12 * 4);
        assert!(check.holds);
    }

    #[test]
    fn orthogonality_examples() {
        let t = tables();
        assert_eq!(
            orthogonality_average(&t, 2, 2, 1, 1_000_000).unwrap(),
            rational(-1, 1)
        );
        assert!(orthogonality_average(&t, 2, 3, 5, 1_000_000)
            .unwrap()
            .is_zero());
        for n in 1..=10 {
            assert!(orthogonality_average(&t, 1, 1, n, 1_000_000)
                .unwrap()
                .is_one());
        }
    }

    #[test]
    fn orthogonality_budget_is_enforced() {
        let t = tables();
        assert!(matches!(
            orthogonality_average(&t, 97, 89, 1, 100),
            Err(Error::PeriodBudget { .. })
        ));
    }

    #[test]
    fn character_is_on_unit_circle() {
        let e = additive_character(5, 3);
        assert!((e.norm() - 1.0).abs() < 1e-12);
        let full = additive_character(7, 7);
        assert!((full - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn gcd_bound_random(q in 1u64..=200, n in 1u64..=200) {
            let t = tables();
            let c = ramanujan_sum(&t, q, n as i64).unsigned_abs();
            prop_assert!(c <= q.gcd(&n));
        }

        #[test]
        fn integrality_random(q in 1u64..=100, n in -300i64..=300) {
            let t = tables();
            let (direct, residual) = ramanujan_sum_definition(q, n);
            prop_assert!(residual < 1e-6);
            prop_assert_eq!(ramanujan_sum(&t, q, n), direct);
        }
    }
}
