//! Run configuration: sequence selection, sizes, budgets, threads, output.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use ternrec_core::modular::DEFAULT_SCAN_BUDGET;
use ternrec_core::recurrence::{Preset, RecurrenceSpec, DEFAULT_TERM_DIGITS};
use ternrec_core::representation::{RepresentConfig, DEFAULT_ENUMERATION_LIMIT, DEFAULT_N_EXACT, DEFAULT_RHO_BUDGET};
use ternrec_core::{Error, Result};

pub const THREADS_ENV: &str = "TERNARY_THREADS";

/// Rho iterations granted per second of `factor_timeout_s`. Budgets are
/// counted in iterations so results never depend on machine speed.
pub const RHO_ITERATIONS_PER_SECOND: u64 = DEFAULT_RHO_BUDGET / 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Pollard-rho iterations per factorization.
    pub rho_iterations: Option<u64>,
    /// Converted to iterations at `RHO_ITERATIONS_PER_SECOND`.
    pub factor_timeout_s: Option<f64>,
    pub scan_states: Option<u64>,
    pub term_digits: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Contents of a `--config` file; every field is optional and command-line
/// flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub spec: Option<RecurrenceSpec>,
    pub x: Option<u64>,
    pub n_exact: Option<u64>,
    #[serde(alias = "thread_count")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub output: OutputConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::invalid(format!("bad config {}: {e}", path.display())))
    }
}

/// Sequence selection flags shared by the subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct SeqArgs {
    /// Preset name: tribonacci, pow2-plus-fib, pow2-plus-n, square-pow,
    /// five-fib-sq-minus-4, fibonacci.
    #[arg(long)]
    pub preset: Option<String>,
    /// Explicit spec as JSON, e.g. '{"a1":1,"a2":1,"a3":1,"u0":0,"u1":0,"u2":1}'.
    #[arg(long)]
    pub spec: Option<String>,
    /// JSON run configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: RecurrenceSpec,
    pub x: Option<u64>,
    pub n_exact: u64,
    pub threads: usize,
    pub rho_iterations: u64,
    pub scan_states: u64,
    pub term_digits: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn represent(&self) -> RepresentConfig {
        RepresentConfig {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            rho_budget: self.rho_iterations,
            term_digits: self.term_digits,
        }
    }
}

/// Flag values that override the file configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub x: Option<u64>,
    pub n_exact: Option<u64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

fn positive(name: &str, v: u64) -> Result<u64> {
    if v == 0 {
        return Err(Error::invalid(format!("{name} must be positive")));
    }
    Ok(v)
}

/// Thread count: flag, then `TERNARY_THREADS`, then the config file, then
/// the available parallelism.
pub fn resolve_threads(flag: Option<usize>, file: Option<usize>) -> Result<usize> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("{THREADS_ENV}={s:?} is not a positive integer")))?,
        ),
        _ => None,
    };
    let n = flag
        .or(env)
        .or(file)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if n == 0 {
        return Err(Error::invalid("thread count must be at least 1"));
    }
    Ok(n)
}

pub fn resolve(seq: &SeqArgs, over: Overrides, default_spec: Option<Preset>) -> Result<RunConfig> {
    let file = match &seq.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if seq.preset.is_some() && seq.spec.is_some() {
        return Err(Error::invalid("give either --preset or --spec, not both"));
    }
    let spec = if let Some(name) = &seq.preset {
        Preset::from_str(name)?.spec()
    } else if let Some(json) = &seq.spec {
        RecurrenceSpec::from_str(json)?
    } else if let Some(s) = file.spec {
        s
    } else if let Some(p) = default_spec {
        p.spec()
    } else {
        return Err(Error::invalid("no sequence given: use --preset, --spec or --config"));
    };
    let b = &file.budgets;
    let rho = match (b.rho_iterations, b.factor_timeout_s) {
        (Some(_), Some(_)) => return Err(Error::invalid("give rho_iterations or factor_timeout_s, not both")),
        (Some(n), None) => n,
        (None, Some(s)) if s.is_finite() && s > 0.0 => (s * RHO_ITERATIONS_PER_SECOND as f64).ceil() as u64,
        (None, Some(s)) => return Err(Error::invalid(format!("factor_timeout_s must be positive, got {s}"))),
        (None, None) => DEFAULT_RHO_BUDGET,
    };
    Ok(RunConfig {
        spec,
        x: over.x.or(file.x),
        n_exact: over.n_exact.or(file.n_exact).unwrap_or(DEFAULT_N_EXACT),
        threads: resolve_threads(over.threads, file.threads)?,
        rho_iterations: positive("rho_iterations", rho)?,
        scan_states: positive("scan_states", b.scan_states.unwrap_or(DEFAULT_SCAN_BUDGET))?,
        term_digits: positive("term_digits", b.term_digits.unwrap_or(DEFAULT_TERM_DIGITS))?,
        output: over.output.or(file.output.path),
        format: over.format.or(file.output.format).unwrap_or_default(),
    })
}
