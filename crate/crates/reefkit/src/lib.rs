//! Correlations of arithmetic functions through finite Ramanujan expansions.
//!
//! The crate tabulates the elementary arithmetic functions (`arith`), evaluates
//! Ramanujan sums and the identities built on them (`ramanujan`), moves between a
//! function and its Eratosthenes transform (`transforms`), computes shifted
//! convolution sums and their Ramanujan coefficients (`correlation`), assembles
//! the exact explicit formula for truncated correlations (`reef`), and applies
//! the machinery to the 2k-twin-prime singular series (`twins`).
//!
//! Exact identities are computed over arbitrary-precision rationals
//! ([`num_rational::BigRational`]); quantities involving logarithms use `f64`.
//! The [`scalar::Scalar`] trait abstracts over the two modes.

pub mod arith;
pub mod config;
pub mod correlation;
pub mod error;
pub mod ramanujan;
pub mod reef;
pub mod report;
pub mod scalar;
pub mod transforms;
pub mod twins;
pub mod verify;

pub use arith::SieveTables;
pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use report::DiagnosticsReport;
pub use scalar::{Scalar, ValueMode};
pub use transforms::{EratosthenesTransform, FiniteExpansion, TabulatedFunction};
