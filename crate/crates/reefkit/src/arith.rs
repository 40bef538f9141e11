//! Linear sieve tables for the elementary arithmetic functions.
//!
//! One pass over `1..=limit` produces the smallest prime factor together with
//! the Möbius function, the Euler totient, the count of distinct prime factors
//! and the von Mangoldt function. Everything downstream reads these tables.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Largest table size accepted without an explicit budget override.
pub const DEFAULT_SIEVE_BUDGET: u64 = 100_000_000;

const CACHE_MAGIC: [u8; 8] = *b"RKSIEVE\0";
const CACHE_VERSION: u32 = 1;

/// Immutable sieve tables over `1..=limit`.
///
/// Arrays are 1-based: index 0 is allocated but never meaningful. Tables are
/// plain data and freely shareable across threads once built.
#[derive(Debug, Clone)]
pub struct SieveTables {
    limit: u64,
    mu: Vec<i8>,
    phi: Vec<u64>,
    omega: Vec<u8>,
    lambda: Vec<f64>,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SieveTables {
    /// Builds the tables with the default budget.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    /// Builds the tables, rejecting `limit = 0` and limits beyond `budget`.
    pub fn build_with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::ZeroLimit);
        }
        if limit > budget || limit > u32::MAX as u64 {
            return Err(Error::SieveBudget {
                limit,
                budget: budget.min(u32::MAX as u64),
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut phi = vec![0u64; n + 1];
        let mut omega = vec![0u8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        mu[1] = 1;
        phi[1] = 1;
        if n >= 1 {
            spf[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
                mu[i] = -1;
                phi[i] = i as u64 - 1;
                omega[i] = 1;
            }
            for &p in &primes {
                let ip = i * p as usize;
                if ip > n {
                    break;
                }
                spf[ip] = p;
                if i % p as usize == 0 {
                    mu[ip] = 0;
                    phi[ip] = phi[i] * p as u64;
                    omega[ip] = omega[i];
                    break;
                }
                mu[ip] = -mu[i];
                phi[ip] = phi[i] * (p as u64 - 1);
                omega[ip] = omega[i] + 1;
            }
        }
        // Lambda(p^k) = log p; every other entry stays 0.
        let mut lambda = vec![0.0f64; n + 1];
        for &p in &primes {
            let logp = (p as f64).ln();
            let mut pk = p as u64;
            while pk <= limit {
                lambda[pk as usize] = logp;
                match pk.checked_mul(p as u64) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
        Ok(SieveTables {
            limit,
            mu,
            phi,
            omega,
            lambda,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) {
        assert!(
            n >= 1 && n <= self.limit,
            "argument {} outside sieve range 1..={}",
            n,
            self.limit
        );
    }

    /// Möbius function.
    pub fn mu(&self, n: u64) -> i64 {
        self.check(n);
        self.mu[n as usize] as i64
    }

    /// Euler totient.
    pub fn phi(&self, n: u64) -> u64 {
        self.check(n);
        self.phi[n as usize]
    }

    /// Number of distinct prime factors.
    pub fn omega(&self, n: u64) -> u32 {
        self.check(n);
        self.omega[n as usize] as u32
    }

    /// `2^omega(n)`, the number of square-free divisors.
    pub fn two_pow_omega(&self, n: u64) -> u64 {
        1u64 << self.omega(n)
    }

    /// Smallest prime factor; `spf(1) = 1`.
    pub fn spf(&self, n: u64) -> u64 {
        self.check(n);
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf(n) == n
    }

    /// The primes up to the table limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    /// Von Mangoldt function: `log p` at prime powers `p^k`, zero elsewhere.
    pub fn von_mangoldt(&self, n: u64) -> Result<f64> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(self.lambda[n as usize])
    }

    /// Prime factorization `[(p, e), ...]` with ascending primes, via spf.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// All divisors of `n`, ascending.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let factors = self.factorize(n)?;
        let mut divs = vec![1u64];
        for (p, e) in factors {
            let prev = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..prev {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        Ok(divs)
    }

    /// Chebyshev psi: the running sum of the von Mangoldt function.
    pub fn psi(&self, n_limit: u64) -> Result<f64> {
        if n_limit == 0 || n_limit > self.limit {
            return Err(Error::OutOfRange {
                n: n_limit,
                limit: self.limit,
            });
        }
        let mut acc = 0.0;
        for n in 1..=n_limit as usize {
            acc += self.lambda[n];
        }
        Ok(acc)
    }

    /// Writes the little-endian binary cache: magic, version, limit, then the
    /// four integer arrays and the real array.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        w.write_all(&CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        for &v in &self.mu {
            w.write_all(&(v as u8).to_le_bytes())?;
        }
        for &v in &self.phi {
            w.write_all(&v.to_le_bytes())?;
        }
        for &v in &self.omega {
            w.write_all(&[v])?;
        }
        for &v in &self.spf {
            w.write_all(&v.to_le_bytes())?;
        }
        for &v in &self.lambda {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cache file, failing on bad magic, version mismatch, or a
    /// truncated body.
    pub fn read_cache(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::read_cache_body(BufReader::new(file), path).map_err(|e| match e {
            Error::Io(io) => Error::Cache(format!("{}: {io}", path.display())),
            other => other,
        })
    }

    fn read_cache_body(mut r: impl Read, path: &Path) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if magic != CACHE_MAGIC {
            return Err(Error::Cache(format!("{}: bad magic", path.display())));
        }
        let mut buf4 = [0u8; 4];
        r.read_exact(&mut buf4)?;
        let version = u32::from_le_bytes(buf4);
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!(
                "{}: version {} (expected {})",
                path.display(),
                version,
                CACHE_VERSION
            )));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let limit = u64::from_le_bytes(buf8);
        if limit == 0 || limit > u32::MAX as u64 {
            return Err(Error::Cache(format!(
                "{}: implausible limit {}",
                path.display(),
                limit
            )));
        }
        let n = limit as usize + 1;
        let mut mu = vec![0i8; n];
        for v in mu.iter_mut() {
            let mut b = [0u8; 1];
            r.read_exact(&mut b)?;
            *v = b[0] as i8;
        }
        let mut phi = vec![0u64; n];
        for v in phi.iter_mut() {
            r.read_exact(&mut buf8)?;
            *v = u64::from_le_bytes(buf8);
        }
        let mut omega = vec![0u8; n];
        r.read_exact(&mut omega)?;
        let mut spf = vec![0u32; n];
        for v in spf.iter_mut() {
            r.read_exact(&mut buf4)?;
            *v = u32::from_le_bytes(buf4);
        }
        let mut lambda = vec![0.0f64; n];
        for v in lambda.iter_mut() {
            r.read_exact(&mut buf8)?;
            *v = f64::from_le_bytes(buf8);
        }
        let primes = spf
            .iter()
            .enumerate()
            .skip(2)
            .filter(|&(i, &p)| p as usize == i)
            .map(|(i, _)| i as u32)
            .collect();
        Ok(SieveTables {
            limit,
            mu,
            phi,
            omega,
            lambda,
            spf,
            primes,
        })
    }

    /// Uses the cache at `path` when its version and limit match; otherwise
    /// builds fresh and rewrites the cache. Returns the tables and whether
    /// they came from the cache.
    pub fn load_or_build(limit: u64, budget: u64, cache: Option<&Path>) -> Result<(Self, bool)> {
        if let Some(path) = cache {
            if path.exists() {
                match Self::read_cache(path) {
                    Ok(t) if t.limit == limit => return Ok((t, true)),
                    // Mismatch or corruption invalidates the cache.
                    Ok(_) | Err(Error::Cache(_)) | Err(Error::Io(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            let tables = Self::build_with_budget(limit, budget)?;
            tables.write_cache(path)?;
            return Ok((tables, false));
        }
        Ok((Self::build_with_budget(limit, budget)?, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SieveTables {
        SieveTables::build(300).unwrap()
    }

    #[test]
    fn rejects_zero_and_budget() {
        assert!(matches!(SieveTables::build(0), Err(Error::ZeroLimit)));
        assert!(matches!(
            SieveTables::build_with_budget(100, 50),
            Err(Error::SieveBudget { .. })
        ));
    }

    #[test]
    fn base_case_limit_one() {
        let t = SieveTables::build(1).unwrap();
        assert_eq!(t.mu(1), 1);
        assert_eq!(t.phi(1), 1);
        assert_eq!(t.omega(1), 0);
        assert_eq!(t.von_mangoldt(1).unwrap(), 0.0);
    }

    #[test]
    fn spot_values_at_ten() {
        let t = small();
        assert_eq!(t.phi(10), 4);
        assert_eq!(t.mu(10), 1);
        assert_eq!(t.omega(10), 2);
        assert!((t.von_mangoldt(8).unwrap() - 2.0f64.ln()).abs() < 1e-12);
        assert_eq!(t.von_mangoldt(6).unwrap(), 0.0);
        assert_eq!(t.von_mangoldt(15).unwrap(), 0.0);
        assert!((t.von_mangoldt(9).unwrap() - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn prime_rows_match_definitions() {
        let t = small();
        for p in t.primes().collect::<Vec<_>>() {
            assert_eq!(t.mu(p), -1);
            assert_eq!(t.phi(p), p - 1);
            assert_eq!(t.omega(p), 1);
            assert_eq!(t.spf(p), p);
            assert!((t.von_mangoldt(p).unwrap() - (p as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn moebius_and_totient_divisor_sums() {
        let t = small();
        for n in 1..=t.limit() {
            let divs = t.divisors(n).unwrap();
            let mu_sum: i64 = divs.iter().map(|&d| t.mu(d)).sum();
            assert_eq!(mu_sum, if n == 1 { 1 } else { 0 }, "n = {n}");
            let phi_sum: u64 = divs.iter().map(|&d| t.phi(d)).sum();
            assert_eq!(phi_sum, n, "n = {n}");
        }
    }

    #[test]
    fn lambda_divisor_sum_is_log() {
        let t = small();
        for n in 1..=t.limit() {
            let sum: f64 = t
                .divisors(n)
                .unwrap()
                .iter()
                .map(|&d| t.von_mangoldt(d).unwrap())
                .sum();
            assert!(
                (sum - (n as f64).ln()).abs() <= 1e-9,
                "n = {n}: {sum} vs {}",
                (n as f64).ln()
            );
        }
    }

    #[test]
    fn lambda_agrees_with_moebius_log_form() {
        let t = SieveTables::build(2000).unwrap();
        for n in 1..=2000u64 {
            let via_mu: f64 = t
                .divisors(n)
                .unwrap()
                .iter()
                .map(|&d| -(t.mu(d) as f64) * (d as f64).ln())
                .sum();
            assert!(
                (t.von_mangoldt(n).unwrap() - via_mu).abs() <= 1e-9,
                "n = {n}"
            );
        }
    }

    #[test]
    fn divisor_lists() {
        let t = small();
        assert_eq!(t.divisors(1).unwrap(), vec![1]);
        assert_eq!(t.divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(t.divisors(7).unwrap(), vec![1, 7]);
        assert!(t.divisors(0).is_err());
        assert!(t.divisors(301).is_err());
    }

    #[test]
    fn two_pow_omega_counts_squarefree_divisors() {
        let t = SieveTables::build(10_000).unwrap();
        for d in 1..=10_000u64 {
            let squarefree = t
                .divisors(d)
                .unwrap()
                .iter()
                .filter(|&&e| t.mu(e) != 0)
                .count() as u64;
            assert_eq!(t.two_pow_omega(d), squarefree, "d = {d}");
        }
    }

    #[test]
    fn log_primes_below_lambda_divisor_sum() {
        let t = SieveTables::build(10_000).unwrap();
        for l in 1..=10_000u64 {
            let over_primes: f64 = t
                .factorize(l)
                .unwrap()
                .iter()
                .map(|&(p, _)| (p as f64).ln())
                .sum();
            let over_lambda: f64 = t
                .divisors(l)
                .unwrap()
                .iter()
                .map(|&n| t.von_mangoldt(n).unwrap())
                .sum();
            assert!(over_primes <= over_lambda + 1e-9, "l = {l}");
            assert!((over_lambda - (l as f64).ln()).abs() <= 1e-9, "l = {l}");
        }
    }

    #[test]
    fn cache_round_trip_and_invalidation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sieve.bin");
        let t = SieveTables::build(500).unwrap();
        t.write_cache(&path).unwrap();

        let back = SieveTables::read_cache(&path).unwrap();
        assert_eq!(back.limit(), 500);
        for n in 1..=500u64 {
            assert_eq!(back.mu(n), t.mu(n));
            assert_eq!(back.phi(n), t.phi(n));
            assert_eq!(back.omega(n), t.omega(n));
            assert_eq!(back.spf(n), t.spf(n));
            assert_eq!(
                back.von_mangoldt(n).unwrap().to_bits(),
                t.von_mangoldt(n).unwrap().to_bits()
            );
        }
        assert_eq!(back.prime_count(), t.prime_count());

        // Limit mismatch rebuilds rather than reusing.
        let (rebuilt, from_cache) =
            SieveTables::load_or_build(600, DEFAULT_SIEVE_BUDGET, Some(&path)).unwrap();
        assert!(!from_cache);
        assert_eq!(rebuilt.limit(), 600);
        let (reused, from_cache) =
            SieveTables::load_or_build(600, DEFAULT_SIEVE_BUDGET, Some(&path)).unwrap();
        assert!(from_cache);
        assert_eq!(reused.limit(), 600);

        // A corrupted header is invalid, and load_or_build replaces it.
        std::fs::write(&path, b"garbage").unwrap();
        assert!(matches!(
            SieveTables::read_cache(&path),
            Err(Error::Cache(_))
        ));
        let (_, from_cache) =
            SieveTables::load_or_build(100, DEFAULT_SIEVE_BUDGET, Some(&path)).unwrap();
        assert!(!from_cache);
    }

    #[test]
    fn psi_is_monotone_partial_sum() {
        let t = small();
        assert_eq!(t.psi(1).unwrap(), 0.0);
        let expected = 2.0f64.ln() + 3.0f64.ln() + 2.0f64.ln() + 5.0f64.ln();
        assert!((t.psi(5).unwrap() - expected).abs() < 1e-12);
    }
}
