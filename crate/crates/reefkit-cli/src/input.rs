//! Input parsing: shift ranges, named or CSV-backed tables, support lists.
//!
//! Values in a CSV are exact when every entry parses as an integer or a
//! fraction `p/q`; one decimal entry switches the whole table to real mode.

use std::fs;
use std::path::Path;

use num_rational::BigRational;

use reefkit::scalar::Scalar;
use reefkit::transforms::{EratosthenesTransform, TabulatedFunction};
use reefkit::SieveTables;

use crate::CliError;

/// `A1..A2` (inclusive) or a single `A`.
pub fn parse_shift_range(text: &str) -> Result<Vec<u64>, CliError> {
    let parse_end = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| CliError::Usage(format!("bad shift range `{text}`")))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = parse_end(lo)?;
        let hi = parse_end(hi)?;
        if lo > hi {
            return Err(CliError::Usage(format!(
                "shift range `{text}` is empty (start exceeds end)"
            )));
        }
        Ok((lo..=hi).collect())
    } else {
        Ok(vec![parse_end(text)?])
    }
}

/// Raw `(index, value-text)` rows of a two-column CSV; a `q,value`-style
/// header row is skipped.
fn read_pairs(path: &Path) -> Result<Vec<(u64, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected `index,value`",
                path.display(),
                idx + 1
            ))
        })?;
        let a = a.trim();
        if idx == 0 && a.parse::<u64>().is_err() {
            continue; // header row
        }
        let index = a.parse::<u64>().map_err(|_| {
            CliError::Usage(format!("{}:{}: bad index `{a}`", path.display(), idx + 1))
        })?;
        pairs.push((index, b.trim().to_string()));
    }
    if pairs.is_empty() {
        return Err(CliError::Usage(format!("{}: no data rows", path.display())));
    }
    Ok(pairs)
}

fn parse_values(pairs: &[(u64, String)], what: &str) -> Result<ParsedValues, CliError> {
    let exact: Option<Vec<(u64, BigRational)>> = pairs
        .iter()
        .map(|(i, s)| s.parse::<BigRational>().ok().map(|v| (*i, v)))
        .collect();
    if let Some(entries) = exact {
        return Ok(ParsedValues::Exact(entries));
    }
    let real: Option<Vec<(u64, f64)>> = pairs
        .iter()
        .map(|(i, s)| s.parse::<f64>().ok().map(|v| (*i, v)))
        .collect();
    match real {
        Some(entries) => Ok(ParsedValues::Real(entries)),
        None => Err(CliError::Usage(format!(
            "{what}: values must all parse as rationals (`p/q`) or reals"
        ))),
    }
}

enum ParsedValues {
    Exact(Vec<(u64, BigRational)>),
    Real(Vec<(u64, f64)>),
}

/// A tabulated function in whichever mode the source dictated.
pub enum AnyTable {
    Exact(TabulatedFunction<BigRational>),
    Real(TabulatedFunction<f64>),
}

impl AnyTable {
    pub fn is_exact(&self) -> bool {
        matches!(self, AnyTable::Exact(_))
    }

    pub fn into_real(self) -> TabulatedFunction<f64> {
        match self {
            AnyTable::Real(t) => t,
            AnyTable::Exact(t) => {
                TabulatedFunction::from_fn(t.label().to_string(), t.limit(), |n| {
                    t.value(n).to_f64_lossy()
                })
            }
        }
    }
}

/// A sparse Eratosthenes transform in whichever mode the source dictated.
pub enum AnySupport {
    Exact(EratosthenesTransform<BigRational>),
    Real(EratosthenesTransform<f64>),
}

impl AnySupport {
    pub fn into_real(self) -> EratosthenesTransform<f64> {
        match self {
            AnySupport::Real(e) => e,
            AnySupport::Exact(e) => {
                let limit = e.limit();
                let entries: Vec<(u64, f64)> = e
                    .support(limit)
                    .into_iter()
                    .map(|d| (d, e.prime_value(d).to_f64_lossy()))
                    .collect();
                EratosthenesTransform::from_support(limit, &entries)
            }
        }
    }
}

/// Built-in names (`one`, `mu`, `lambda`, `phi_over_n`) or a CSV path,
/// tabulated through `limit`.
pub fn load_table(
    tables: &SieveTables,
    source: &str,
    limit: u64,
    rational_mode: bool,
) -> Result<AnyTable, CliError> {
    if limit > tables.limit() {
        return Err(CliError::Budget(format!(
            "table `{source}` needs n <= {limit}, beyond the sieve budget {}",
            tables.limit()
        )));
    }
    let table = match source {
        "one" => AnyTable::Exact(TabulatedFunction::ones(limit)),
        "mu" => AnyTable::Exact(TabulatedFunction::moebius(tables, limit)),
        "phi_over_n" => AnyTable::Exact(TabulatedFunction::totient_ratio(tables, limit)),
        "lambda" => AnyTable::Real(TabulatedFunction::von_mangoldt(tables, limit)),
        path => {
            let pairs = read_pairs(Path::new(path))?;
            match parse_values(&pairs, path)? {
                ParsedValues::Exact(entries) => {
                    AnyTable::Exact(table_from_entries(path, &entries, limit)?)
                }
                ParsedValues::Real(entries) => {
                    AnyTable::Real(table_from_entries(path, &entries, limit)?)
                }
            }
        }
    };
    Ok(if rational_mode {
        table
    } else {
        AnyTable::Real(table.into_real())
    })
}

fn table_from_entries<T: Scalar>(
    label: &str,
    entries: &[(u64, T)],
    limit: u64,
) -> Result<TabulatedFunction<T>, CliError> {
    let mut values = vec![None::<T>; limit as usize + 1];
    for (n, v) in entries {
        if *n >= 1 && *n <= limit {
            values[*n as usize] = Some(v.clone());
        }
    }
    let mut out = Vec::with_capacity(limit as usize);
    for n in 1..=limit {
        match values[n as usize].take() {
            Some(v) => out.push(v),
            None => {
                return Err(CliError::Usage(format!(
                    "{label}: missing value at n = {n} (needed through {limit})"
                )))
            }
        }
    }
    Ok(TabulatedFunction::from_values(label.to_string(), out))
}

/// Sparse `q,value` support list from a CSV file.
pub fn load_support(path: &Path, rational_mode: bool) -> Result<AnySupport, CliError> {
    let pairs = read_pairs(path)?;
    for (q, _) in &pairs {
        if *q == 0 {
            return Err(CliError::Usage(format!(
                "{}: support indices start at 1",
                path.display()
            )));
        }
    }
    let limit = pairs.iter().map(|(q, _)| *q).max().unwrap_or(1);
    let support = match parse_values(&pairs, &path.display().to_string())? {
        ParsedValues::Exact(entries) => {
            AnySupport::Exact(EratosthenesTransform::from_support(limit, &entries))
        }
        ParsedValues::Real(entries) => {
            AnySupport::Real(EratosthenesTransform::from_support(limit, &entries))
        }
    };
    Ok(if rational_mode {
        support
    } else {
        AnySupport::Real(support.into_real())
    })
}

/// Writes `text` to `path` or stdout when no path is given.
pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::Other(format!("{}: {e}", parent.display())))?;
                }
            }
            fs::write(path, text).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
