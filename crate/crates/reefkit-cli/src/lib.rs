//! The `reefkit` command line: batch experiments over the library with
//! reproducible configs and deterministic report files.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage, 3 config, 4 budget,
//! 5 failed check.

mod input;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use reefkit::config::ConfigError;
use reefkit::correlation::{
    carmichael_coefficient_empirical, carmichael_coefficient_exact, correlate, dh_diagnostic,
    profile_direct, profile_expansion, profile_truncated,
};
use reefkit::ramanujan::ramanujan_sum;
use reefkit::reef::{reef_coefficients, reef_residual};
use reefkit::report::{DiagnosticsReport, ReportFormat};
use reefkit::scalar::Scalar;
use reefkit::transforms::{
    eratosthenes_transform, evaluate_expansion, finite_expansion, truncate, EratosthenesTransform,
    TabulatedFunction,
};
use reefkit::twins::{coefficient_table, hl_report};
use reefkit::verify;
use reefkit::{Error, ExperimentConfig, SieveTables};

use input::{load_support, load_table, parse_shift_range, write_text, AnySupport, AnyTable};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_CHECK: u8 = 5;

/// One error class per exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Budget(String),
    Check(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Other(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Config(m)
            | CliError::Budget(m)
            | CliError::Check(m)
            | CliError::Other(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SieveBudget { .. } | Error::PeriodBudget { .. } => {
                CliError::Budget(e.to_string())
            }
            Error::ZeroLimit
            | Error::OutOfRange { .. }
            | Error::InsufficientRange { .. }
            | Error::OddShift(_)
            | Error::SupportTooWide { .. } => CliError::Usage(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "reefkit",
    version,
    about = "Correlations of arithmetic functions via finite Ramanujan expansions"
)]
struct Cli {
    /// Configuration file (default: $REEFKIT_CONFIG, then ./reefkit.cfg).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Binary sieve cache; invalidated on version or limit mismatch.
    #[arg(long, global = true, value_name = "PATH")]
    sieve_cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Truncated,
    Expansion,
}

#[derive(Subcommand)]
enum Command {
    /// Build the sieve tables and print summary statistics.
    Sieve {
        /// Table size (default: sieve_limit from the config).
        #[arg(long, value_name = "N")]
        limit: Option<u64>,
    },
    /// Ramanujan sums: `csum Q N` prints c_Q(N); `--table Q N` emits a CSV matrix.
    Csum {
        q: Option<u64>,
        n: Option<i64>,
        /// Emit c_q(n) for q <= Q, n <= N as CSV.
        #[arg(long, num_args = 2, value_names = ["Q", "N"])]
        table: Option<Vec<u64>>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Finite Ramanujan expansion of a g' support list (CSV: q,value).
    Expand {
        #[arg(long, value_name = "FILE")]
        support: PathBuf,
        #[arg(long, value_name = "Q")]
        range: u64,
        /// Verify expansion == truncated divisor sum for all m <= M_MAX.
        #[arg(long, value_name = "M_MAX")]
        check_fre: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Correlation C_{f,g}(N, a) over a shift range -> CSV (a, value).
    Correlate {
        /// one | mu | lambda | phi_over_n | CSV file (n,value).
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long = "N")]
        n_limit: u64,
        /// Inclusive range `a1..a2` or a single shift.
        #[arg(long, value_name = "A1..A2")]
        shifts: String,
        /// Truncation range Q (defaults to N for non-direct methods).
        #[arg(long = "truncate", value_name = "Q")]
        truncate_at: Option<u64>,
        #[arg(long, value_enum, default_value = "direct")]
        method: MethodArg,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Partial sums of the Delange series for the truncated correlation.
    DiagnoseDh {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long = "N")]
        n_limit: u64,
        #[arg(long, value_name = "D")]
        d_max: u64,
        #[arg(long = "truncate", value_name = "Q")]
        truncate_at: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Carmichael coefficient of the truncated correlation at modulus l.
    Carmichael {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long = "N")]
        n_limit: u64,
        #[arg(long)]
        l: u64,
        /// Exact period average (sparse supports within the lcm budget).
        #[arg(long, conflicts_with = "empirical")]
        exact: bool,
        /// Finite-x average.
        #[arg(long)]
        empirical: bool,
        /// Averaging length for --empirical.
        #[arg(long, value_name = "X")]
        x: Option<u64>,
        #[arg(long = "truncate", value_name = "Q")]
        truncate_at: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Explicit-formula residuals -> CSV (a, direct, reef, residual).
    Reef {
        #[arg(long)]
        f: String,
        #[arg(long, value_name = "FILE")]
        g_support: PathBuf,
        #[arg(long = "N")]
        n_limit: u64,
        #[arg(long, value_name = "A1..A2")]
        shifts: Option<String>,
        /// Dump (l, coefficient) instead of per-shift residuals.
        #[arg(long)]
        coefficients: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Twin-prime correlations against the singular series.
    #[command(args_conflicts_with_subcommands = true)]
    Twins {
        #[command(subcommand)]
        sub: Option<TwinsCommand>,
        #[arg(long = "N")]
        n_limit: Option<u64>,
        /// Inclusive k range `k1..k2` (shifts 2k).
        #[arg(long, value_name = "K1..K2")]
        k: Option<String>,
        #[arg(long, value_name = "L")]
        l_max: Option<u64>,
        /// Also plot ratio vs 2k.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exit 5 on any failed check.
    Verify {
        /// identities | twins | determinism | all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Pin measured statistics to <output_dir>/baselines.cfg.
        #[arg(long)]
        pin: bool,
    },
}

#[derive(Subcommand)]
enum TwinsCommand {
    /// Truncated von Mangoldt coefficients vs mu(q)/phi(q).
    Coefficients {
        #[arg(long = "N")]
        n_limit: u64,
        #[arg(long)]
        q_max: u64,
    },
}

/// Parses `argv` (including the program name) and runs, returning the exit code.
pub fn run(argv: &[String]) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprintln!("{}", first_line(&e.to_string()));
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("reefkit: {}", first_line(e.message()));
            e.exit_code()
        }
    }
}

fn first_line(text: &str) -> &str {
    text.lines().next().unwrap_or(text)
}

fn load_config(flag: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let mut config = if let Some(path) = flag {
        ExperimentConfig::load(path)?
    } else if let Ok(env_path) = std::env::var("REEFKIT_CONFIG") {
        ExperimentConfig::load(Path::new(&env_path))?
    } else if Path::new("reefkit.cfg").exists() {
        ExperimentConfig::load(Path::new("reefkit.cfg"))?
    } else {
        ExperimentConfig::default()
    };
    config.merge_baselines_file()?;
    Ok(config)
}

/// Builds (or loads from cache) tables covering `needed`, gated by the
/// configured sieve budget. With a cache the tables are built at the full
/// configured size so the cache file stays stable across commands.
fn sieve_for(
    needed: u64,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<SieveTables, CliError> {
    let needed = needed.max(100);
    if needed > config.sieve_limit {
        return Err(CliError::Budget(format!(
            "needs sieve tables through {needed}, beyond the configured sieve_limit {}",
            config.sieve_limit
        )));
    }
    let size = if cache.is_some() {
        config.sieve_limit
    } else {
        needed
    };
    let (tables, _) = SieveTables::load_or_build(size, config.sieve_limit, cache)?;
    Ok(tables)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = load_config(cli.config.as_deref())?;
    let cache = cli.sieve_cache.as_deref();
    match cli.command {
        Command::Sieve { limit } => cmd_sieve(limit, &config, cache),
        Command::Csum { q, n, table, out } => cmd_csum(q, n, table, out, &config, cache),
        Command::Expand {
            support,
            range,
            check_fre,
            out,
        } => cmd_expand(&support, range, check_fre, out, &config, cache),
        Command::Correlate {
            f,
            g,
            n_limit,
            shifts,
            truncate_at,
            method,
            out,
        } => cmd_correlate(
            &f,
            &g,
            n_limit,
            &shifts,
            truncate_at,
            method,
            out,
            &config,
            cache,
        ),
        Command::DiagnoseDh {
            f,
            g,
            n_limit,
            d_max,
            truncate_at,
            out,
        } => cmd_diagnose_dh(&f, &g, n_limit, d_max, truncate_at, out, &config, cache),
        Command::Carmichael {
            f,
            g,
            n_limit,
            l,
            exact,
            empirical,
            x,
            truncate_at,
            out,
        } => cmd_carmichael(
            &f,
            &g,
            n_limit,
            l,
            exact,
            empirical,
            x,
            truncate_at,
            out,
            &config,
            cache,
        ),
        Command::Reef {
            f,
            g_support,
            n_limit,
            shifts,
            coefficients,
            out,
        } => cmd_reef(
            &f,
            &g_support,
            n_limit,
            shifts.as_deref(),
            coefficients,
            out,
            &config,
            cache,
        ),
        Command::Twins {
            sub,
            n_limit,
            k,
            l_max,
            svg,
            out,
        } => match sub {
            Some(TwinsCommand::Coefficients { n_limit, q_max }) => {
                cmd_twins_coefficients(n_limit, q_max, &config, cache)
            }
            None => cmd_twins(n_limit, k.as_deref(), l_max, svg, out, &config, cache),
        },
        Command::Verify { suite, pin } => cmd_verify(&suite, pin, &config, cache),
    }
}

fn cmd_sieve(
    limit: Option<u64>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    let limit = limit.unwrap_or(config.sieve_limit);
    if limit > config.sieve_limit {
        return Err(CliError::Budget(format!(
            "limit {limit} exceeds the configured sieve_limit {}",
            config.sieve_limit
        )));
    }
    let (tables, from_cache) = SieveTables::load_or_build(limit, config.sieve_limit, cache)?;
    let psi_ratio = tables.psi(limit)? / limit as f64;
    println!(
        "limit={} primes={} psi_over_n={} source={}",
        tables.limit(),
        tables.prime_count(),
        psi_ratio,
        if from_cache { "cache" } else { "built" }
    );
    Ok(())
}

fn cmd_csum(
    q: Option<u64>,
    n: Option<i64>,
    table: Option<Vec<u64>>,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    match (q, n, table) {
        (Some(q), Some(n), None) => {
            if q == 0 {
                return Err(CliError::Usage("modulus q must be positive".into()));
            }
            let tables = sieve_for(q, config, cache)?;
            println!("{}", ramanujan_sum(&tables, q, n));
            Ok(())
        }
        (None, None, Some(dims)) => {
            let (q_max, n_max) = (dims[0], dims[1]);
            if q_max == 0 || n_max == 0 {
                return Err(CliError::Usage("--table needs positive Q and N".into()));
            }
            let tables = sieve_for(q_max, config, cache)?;
            let mut text = String::from("q");
            for n in 1..=n_max {
                let _ = write!(text, ",{n}");
            }
            text.push('\n');
            for q in 1..=q_max {
                let _ = write!(text, "{q}");
                for n in 1..=n_max {
                    let _ = write!(text, ",{}", ramanujan_sum(&tables, q, n as i64));
                }
                text.push('\n');
            }
            write_text(out.as_deref(), &text)
        }
        _ => Err(CliError::Usage(
            "csum needs either positional `q n` or `--table Q N`".into(),
        )),
    }
}

fn cmd_expand(
    support: &Path,
    range: u64,
    check_fre: Option<u64>,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    if range == 0 {
        return Err(CliError::Usage("--range must be positive".into()));
    }
    let loaded = load_support(support, config.rational_mode)?;
    let tables = sieve_for(range.max(check_fre.unwrap_or(0)), config, cache)?;
    match loaded {
        AnySupport::Exact(gp) => expand_impl(&tables, &gp, range, check_fre, out),
        AnySupport::Real(gp) => expand_impl(&tables, &gp, range, check_fre, out),
    }
}

fn expand_impl<T: Scalar>(
    tables: &SieveTables,
    gprime: &EratosthenesTransform<T>,
    range: u64,
    check_fre: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let expansion = finite_expansion(gprime, range);
    let mut text = String::from("l,coefficient\n");
    for l in 1..=range {
        let _ = writeln!(text, "{l},{}", expansion.coefficient(l));
    }
    write_text(out.as_deref(), &text)?;
    if let Some(m_max) = check_fre {
        let truncated = truncate(gprime, range, m_max.max(1), "g_q");
        let mut mismatches = 0u64;
        for m in 1..=m_max {
            let lhs = evaluate_expansion(tables, &expansion, m);
            let rhs = truncated.value(m);
            let ok = if T::MODE == reefkit::ValueMode::Exact {
                &lhs == rhs
            } else {
                (lhs.clone() - rhs.clone()).abs().to_f64_lossy() <= 1e-9
            };
            if !ok {
                mismatches += 1;
            }
        }
        if mismatches > 0 {
            println!("check-fre: FAIL ({mismatches} mismatches up to m = {m_max})");
            return Err(CliError::Check(format!(
                "finite expansion mismatch at {mismatches} points"
            )));
        }
        println!("check-fre: PASS (all m <= {m_max})");
    }
    Ok(())
}

struct CorrelatePlan {
    f: AnyTable,
    g: AnyTable,
}

fn load_pair(
    tables: &SieveTables,
    f_spec: &str,
    f_limit: u64,
    g_spec: &str,
    g_limit: u64,
    config: &ExperimentConfig,
) -> Result<CorrelatePlan, CliError> {
    let f = load_table(tables, f_spec, f_limit, config.rational_mode)?;
    let g = load_table(tables, g_spec, g_limit, config.rational_mode)?;
    if f.is_exact() != g.is_exact() {
        // One real operand drags the pair to real mode.
        return Ok(CorrelatePlan {
            f: AnyTable::Real(f.into_real()),
            g: AnyTable::Real(g.into_real()),
        });
    }
    Ok(CorrelatePlan { f, g })
}

#[allow(clippy::too_many_arguments)]
fn cmd_correlate(
    f_spec: &str,
    g_spec: &str,
    n_limit: u64,
    shifts: &str,
    truncate_at: Option<u64>,
    method: MethodArg,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    if n_limit == 0 {
        return Err(CliError::Usage("--N must be positive".into()));
    }
    let shifts = parse_shift_range(shifts)?;
    let max_shift = shifts.iter().copied().max().unwrap_or(0);
    let cutoff = truncate_at.unwrap_or(n_limit);
    let tables = sieve_for((n_limit + max_shift).max(cutoff), config, cache)?;
    let g_limit = match method {
        MethodArg::Direct => n_limit + max_shift,
        _ => cutoff,
    };
    let plan = load_pair(&tables, f_spec, n_limit, g_spec, g_limit, config)?;
    let text = match (plan.f, plan.g) {
        (AnyTable::Exact(f), AnyTable::Exact(g)) => {
            correlate_rows(&tables, &f, &g, n_limit, &shifts, cutoff, method)?
        }
        (AnyTable::Real(f), AnyTable::Real(g)) => {
            correlate_rows(&tables, &f, &g, n_limit, &shifts, cutoff, method)?
        }
        _ => unreachable!("load_pair aligns modes"),
    };
    write_text(out.as_deref(), &text)
}

fn correlate_rows<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    g: &TabulatedFunction<T>,
    n_limit: u64,
    shifts: &[u64],
    cutoff: u64,
    method: MethodArg,
) -> Result<String, CliError> {
    let profile = match method {
        MethodArg::Direct => profile_direct(f, g, n_limit, shifts)?,
        MethodArg::Truncated => {
            let gprime = eratosthenes_transform(tables, g);
            profile_truncated(f, &gprime, n_limit, shifts, cutoff)?
        }
        MethodArg::Expansion => {
            let gprime = eratosthenes_transform(tables, g);
            let expansion = finite_expansion(&gprime, cutoff);
            profile_expansion(tables, f, &expansion, n_limit, shifts)?
        }
    };
    let mut text = String::from("a,value\n");
    for (a, v) in profile.shifts.iter().zip(profile.values.iter()) {
        let _ = writeln!(text, "{a},{v}");
    }
    Ok(text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_diagnose_dh(
    f_spec: &str,
    g_spec: &str,
    n_limit: u64,
    d_max: u64,
    truncate_at: Option<u64>,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    if n_limit == 0 || d_max == 0 {
        return Err(CliError::Usage("--N and --d-max must be positive".into()));
    }
    let cutoff = truncate_at.unwrap_or(n_limit);
    let tables = sieve_for((n_limit + d_max).max(cutoff), config, cache)?;
    let plan = load_pair(&tables, f_spec, n_limit, g_spec, cutoff, config)?;
    let exact_mode = plan.f.is_exact();
    let points = match (plan.f, plan.g) {
        (AnyTable::Exact(f), AnyTable::Exact(g)) => {
            let gprime = eratosthenes_transform(&tables, &g);
            dh_diagnostic(&tables, &f, &gprime, n_limit, cutoff, d_max)?
        }
        (AnyTable::Real(f), AnyTable::Real(g)) => {
            let gprime = eratosthenes_transform(&tables, &g);
            dh_diagnostic(&tables, &f, &gprime, n_limit, cutoff, d_max)?
        }
        _ => unreachable!("load_pair aligns modes"),
    };
    let mut report = DiagnosticsReport::new("diagnose-dh");
    report.insert_metadata("N", n_limit.to_string());
    report.insert_metadata("Q", cutoff.to_string());
    report.insert_metadata("mode", if exact_mode { "exact" } else { "real" });
    report.insert_metadata(
        "stabilization_threshold",
        config.stabilization_threshold.to_string(),
    );
    report.push_column("d", points.iter().map(|p| p.d as f64).collect());
    report.push_column("term", points.iter().map(|p| p.term).collect());
    report.push_column("partial", points.iter().map(|p| p.partial).collect());
    // Stabilization is an observation about successive differences, never a
    // convergence claim.
    if let Some(last) = points.last() {
        if last.term > config.stabilization_threshold {
            eprintln!(
                "note: last term {:e} still above the stabilization threshold {:e}",
                last.term, config.stabilization_threshold
            );
        }
    }
    write_text(out.as_deref(), &report.to_csv())
}

#[allow(clippy::too_many_arguments)]
fn cmd_carmichael(
    f_spec: &str,
    g_spec: &str,
    n_limit: u64,
    l: u64,
    exact: bool,
    empirical: bool,
    x: Option<u64>,
    truncate_at: Option<u64>,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    if !(exact ^ empirical) {
        return Err(CliError::Usage(
            "choose exactly one of --exact or --empirical".into(),
        ));
    }
    if l == 0 || n_limit == 0 {
        return Err(CliError::Usage("--N and --l must be positive".into()));
    }
    let cutoff = truncate_at.unwrap_or(n_limit);
    let x = x.unwrap_or(12 * l.max(1));
    let needed = if empirical {
        (n_limit + x).max(l)
    } else {
        n_limit.max(l).max(cutoff)
    };
    let tables = sieve_for(needed, config, cache)?;
    let plan = load_pair(&tables, f_spec, n_limit, g_spec, cutoff, config)?;
    let value = match (plan.f, plan.g) {
        (AnyTable::Exact(f), AnyTable::Exact(g)) => carmichael_impl(
            &tables,
            &f,
            &g,
            n_limit,
            cutoff,
            l,
            exact,
            x,
            config.lcm_budget,
        )?,
        (AnyTable::Real(f), AnyTable::Real(g)) => carmichael_impl(
            &tables,
            &f,
            &g,
            n_limit,
            cutoff,
            l,
            exact,
            x,
            config.lcm_budget,
        )?,
        _ => unreachable!("load_pair aligns modes"),
    };
    write_text(out.as_deref(), &format!("l,coefficient\n{l},{value}\n"))
}

#[allow(clippy::too_many_arguments)]
fn carmichael_impl<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    g: &TabulatedFunction<T>,
    n_limit: u64,
    cutoff: u64,
    l: u64,
    exact: bool,
    x: u64,
    lcm_budget: u64,
) -> Result<String, CliError> {
    let gprime = eratosthenes_transform(tables, g);
    if exact {
        let v = carmichael_coefficient_exact(tables, f, &gprime, n_limit, cutoff, l, lcm_budget)?;
        Ok(v.to_string())
    } else {
        let g_cut = truncate(&gprime, cutoff, n_limit + x, "g_cut");
        let v = carmichael_coefficient_empirical(
            tables,
            |a| correlate(f, &g_cut, n_limit, a).expect("domain covers shifts"),
            l,
            x,
        );
        Ok(v.to_string())
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_reef(
    f_spec: &str,
    g_support: &Path,
    n_limit: u64,
    shifts: Option<&str>,
    coefficients: bool,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    if n_limit == 0 {
        return Err(CliError::Usage("--N must be positive".into()));
    }
    let shifts = match shifts {
        Some(text) => parse_shift_range(text)?,
        None if coefficients => Vec::new(),
        None => {
            return Err(CliError::Usage(
                "--shifts is required unless --coefficients is set".into(),
            ))
        }
    };
    let max_shift = shifts.iter().copied().max().unwrap_or(0);
    let tables = sieve_for(n_limit + max_shift, config, cache)?;
    let support = load_support(g_support, config.rational_mode)?;
    let f = load_table(&tables, f_spec, n_limit, config.rational_mode)?;
    let text = match (f, support) {
        (AnyTable::Exact(f), AnySupport::Exact(gp)) => {
            reef_impl(&tables, &f, &gp, n_limit, &shifts, coefficients)?
        }
        (f, gp) => {
            let f = f.into_real();
            let gp = gp.into_real();
            reef_impl(&tables, &f, &gp, n_limit, &shifts, coefficients)?
        }
    };
    write_text(out.as_deref(), &text)
}

fn reef_impl<T: Scalar>(
    tables: &SieveTables,
    f: &TabulatedFunction<T>,
    gprime: &EratosthenesTransform<T>,
    n_limit: u64,
    shifts: &[u64],
    coefficients: bool,
) -> Result<String, CliError> {
    if coefficients {
        let expansion = finite_expansion(gprime, n_limit);
        let coeffs = reef_coefficients(tables, f, &expansion, n_limit)?;
        let mut text = String::from("l,coefficient\n");
        for l in 1..=n_limit {
            let _ = writeln!(text, "{l},{}", coeffs.coefficient(l));
        }
        return Ok(text);
    }
    let residual = reef_residual(tables, f, gprime, n_limit, shifts)?;
    let mut text = String::from("a,direct,reef,residual\n");
    for i in 0..shifts.len() {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            residual.shifts[i], residual.direct[i], residual.reef[i], residual.residual[i]
        );
    }
    Ok(text)
}

fn cmd_twins_coefficients(
    n_limit: u64,
    q_max: u64,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    if n_limit == 0 || q_max == 0 {
        return Err(CliError::Usage("--N and --q-max must be positive".into()));
    }
    if q_max > n_limit {
        return Err(CliError::Usage("--q-max cannot exceed --N".into()));
    }
    let tables = sieve_for(n_limit, config, cache)?;
    let rows = coefficient_table(&tables, n_limit, q_max)?;
    let mut report = DiagnosticsReport::new("twins-coefficients");
    report.insert_metadata("N", n_limit.to_string());
    report.push_column("q", rows.iter().map(|r| r.q as f64).collect());
    report.push_column("value", rows.iter().map(|r| r.value).collect());
    report.push_column("reference", rows.iter().map(|r| r.reference).collect());
    report.push_column(
        "scaled_error",
        rows.iter().map(|r| r.scaled_error).collect(),
    );
    print!("{}", report.to_csv());
    Ok(())
}

fn cmd_twins(
    n_limit: Option<u64>,
    k: Option<&str>,
    l_max: Option<u64>,
    svg: Option<PathBuf>,
    out: Option<PathBuf>,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    let n_limit = n_limit.unwrap_or(1_000_000);
    let (k_min, k_max) = match k {
        Some(text) => {
            let ks = parse_shift_range(text)?;
            (*ks.first().unwrap(), *ks.last().unwrap())
        }
        None => (1, 8),
    };
    if k_min == 0 {
        return Err(CliError::Usage("k starts at 1".into()));
    }
    let l_max = l_max.unwrap_or(100_000);
    let tables = sieve_for((n_limit + 2 * k_max).max(l_max), config, cache)?;
    let report = hl_report(&tables, n_limit, k_min, k_max, l_max, 0.25)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    let diag = report.to_report();
    write_text(out.as_deref(), &diag.to_csv())?;
    if let Some(svg_path) = svg {
        let mut ratio_plot = DiagnosticsReport::new("twins ratio vs shift");
        ratio_plot.push_column("2k", report.rows.iter().map(|r| r.two_k as f64).collect());
        ratio_plot.push_column("ratio", report.rows.iter().map(|r| r.ratio).collect());
        ratio_plot
            .emit(ReportFormat::Svg, &svg_path)
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(())
}

fn cmd_verify(
    suite: &str,
    pin: bool,
    config: &ExperimentConfig,
    cache: Option<&Path>,
) -> Result<(), CliError> {
    let run_identities = matches!(suite, "identities" | "all");
    let run_twins = matches!(suite, "twins" | "all");
    let run_determinism = matches!(suite, "determinism" | "all");
    if !(run_identities || run_twins || run_determinism) {
        return Err(CliError::Usage(format!(
            "unknown suite `{suite}` (identities | twins | determinism | all)"
        )));
    }
    let needed = if run_twins { config.sieve_limit } else { 2_500 };
    let tables = sieve_for(needed, config, cache)?;
    let mut suites = Vec::new();
    if run_identities {
        suites.extend(verify::identity_suites(&tables, config.random_seed));
    }
    let mut measured = BTreeMap::new();
    if run_twins {
        let (twin_suites, twin_measured) = verify::twins_suites(&tables, &config.pinned_baselines);
        suites.extend(twin_suites);
        measured = twin_measured;
    }
    if run_determinism {
        std::fs::create_dir_all(&config.output_dir)
            .map_err(|e| CliError::Other(format!("{}: {e}", config.output_dir.display())))?;
        suites.push(verify::determinism_suite(&tables, &config.output_dir));
    }
    let mut failures = 0u64;
    for s in &suites {
        for check in &s.checks {
            let status = if check.passed { "PASS" } else { "FAIL" };
            println!("{status} [{}] {} — {}", s.name, check.label, check.detail);
            if !check.passed {
                failures += 1;
            }
        }
    }
    if pin && !measured.is_empty() {
        std::fs::create_dir_all(&config.output_dir)
            .map_err(|e| CliError::Other(format!("{}: {e}", config.output_dir.display())))?;
        let mut text = String::from("[baselines]\n");
        for (key, value) in &measured {
            let _ = writeln!(text, "{key} = {value}");
        }
        let path = config.baselines_path();
        std::fs::write(&path, text)
            .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
        println!("pinned {} baselines to {}", measured.len(), path.display());
    }
    if failures > 0 {
        return Err(CliError::Check(format!("{failures} checks failed")));
    }
    Ok(())
}
