//! The two numeric modes shared by every tabulated quantity.
//!
//! Identities from the divisor lattice hold exactly and are checked over
//! arbitrary-precision rationals; anything touching `log` lives in `f64`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Tag distinguishing exact-rational tables from double-precision ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueMode {
    Exact,
    Real,
}

impl fmt::Display for ValueMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueMode::Exact => write!(f, "exact"),
            ValueMode::Real => write!(f, "real"),
        }
    }
}

/// Field of values a table can carry: exact rationals or `f64`.
///
/// `Signed` brings the ring/field operations plus `abs`; the extra
/// constructors embed the integers produced by sieves and Ramanujan sums.
pub trait Scalar:
    Signed + Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + 'static
{
    const MODE: ValueMode;

    fn from_int(v: i64) -> Self;

    fn from_nat(v: u64) -> Self;

    /// Lossy view for reports and diagnostics.
    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for f64 {
    const MODE: ValueMode = ValueMode::Real;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_nat(v: u64) -> Self {
        v as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const MODE: ValueMode = ValueMode::Exact;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_nat(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Shorthand for an exact rational `n/d`; handy in tests and table builders.
pub fn rational(numerator: i64, denominator: i64) -> BigRational {
    BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
}
