use std::io;

use thiserror::Error;

/// Errors surfaced by the library's checked operations.
///
/// Budget violations (`SieveBudget`, `PeriodBudget`) are kept distinct from
/// range errors so callers can map them to separate exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sieve limit must be at least 1")]
    ZeroLimit,

    #[error("sieve limit {limit} exceeds the configured budget {budget}")]
    SieveBudget { limit: u64, budget: u64 },

    #[error("argument {n} outside tabulated range 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },

    #[error("`{label}` is tabulated through {limit} but {needed} is required")]
    InsufficientRange {
        label: String,
        limit: u64,
        needed: u64,
    },

    #[error("averaging period {period} exceeds the lcm budget {budget}")]
    PeriodBudget { period: u128, budget: u64 },

    #[error("shift must be even and positive, got {0}")]
    OddShift(u64),

    #[error(
        "transform support reaches {d_support}: log D / log N must stay below 1 - delta \
         (N = {n_limit}, delta = {delta})"
    )]
    SupportTooWide {
        d_support: u64,
        n_limit: u64,
        delta: f64,
    },

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
