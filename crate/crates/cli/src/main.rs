//! `ternrec`: analyze ternary recurrences, profile primes, count indices
//! with `U_n = u^2 + n v^2`, and run the verification experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, SeqArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ternrec",
    version,
    about = "Ternary linear recurrences: conditions, primes, and U_n = u^2 + n v^2",
    after_help = "Exit codes: 0 success or pass, 1 input error, 2 condition or verification failure, 3 budget exhausted.\n\
                  Threads: --threads wins over TERNARY_THREADS, which wins over the config file."
)]
struct Cli {
    /// Worker threads (default: TERNARY_THREADS, else available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the characteristic-polynomial analysis as JSON. Exit 0 when
    /// conditions (i), (ii) and (iii) all hold, 2 otherwise.
    Analyze {
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// Profile every prime up to --max.
    ///
    /// CSV columns: p, root_count, in_Z, alpha, t_p, k_p, ord_alpha, ord_ratio, mult_order.
    /// Empty fields are undefined for that prime.
    Primes {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long = "max")]
        p_max: u64,
        /// Write rows here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Classify every n <= x (default sequence: tribonacci).
    ///
    /// CSV columns: n, status, u, v, obstruction_p. status is member, non_member,
    /// obstructed or unknown. A JSON summary with density bounds goes to --summary
    /// (default stderr).
    Count {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        x: Option<u64>,
        /// Indices up to this are decided exactly.
        #[arg(long)]
        n_exact: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a named experiment and print its report as JSON. Exit 0 iff it passes.
    ///
    /// Experiments and parameters: z-density (x, tolerance); lemma5 (p_min, p_max);
    /// multipliers (p_min, p_max); beukers (n_max); beukers-random (samples, bound,
    /// n_max, seed); char-sums (p_max); smooth (x, y, expected); divisor-interval
    /// (x, y, z, expected); shifted-prime (x, y, z, lam, expected); omega-iz (n, z3,
    /// y2, expected); counterexample (x); theorem-shape (xs, n_exact, threshold).
    Verify {
        experiment: String,
        #[command(flatten)]
        seq: SeqArgs,
        /// Experiment parameter as key=value; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Print delta, kappa, lambda and kappa*delta.
    Constants {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli.command, cli.threads))
}
