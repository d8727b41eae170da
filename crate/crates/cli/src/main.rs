//! `diffset` — experiment driver for difference-set constructions over
//! F_p^n: Gauss-sum magnitude checks, adversarial quadric samples,
//! success-rate scans, dual-function tables, concentration experiments,
//! and matrix rank censuses.
//!
//! Every randomized command requires `--seed` and reproduces its CSV output
//! byte-for-byte at any worker count. Results go to stdout or `--out FILE`
//! (with a JSON summary sidecar next to the file); a one-line status is
//! printed to stderr. Exit codes: 0 success, 1 budget/resource exhaustion,
//! 2 invalid input.

mod commands;
mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};
use config::Resolver;
use error::CliError;
use std::path::PathBuf;
use std::time::Instant;

/// Shared flag surface. Flags are declared as raw strings and validated by
/// each command, so `key = value` lines in `--config` files and CLI flags
/// go through identical parsing (precedence: CLI > config > defaults).
#[derive(Args, Debug, Default)]
struct Flags {
    /// Odd prime modulus p.
    #[arg(long)]
    p: Option<String>,
    /// Dimension n over F_p (comma-separated list where a scan expects one).
    #[arg(long)]
    n: Option<String>,
    /// Domain size N for interval/cyclic domains (comma-separated schedule
    /// for concentration runs).
    #[arg(long = "N")]
    size_n: Option<String>,
    /// Number of sampled differences K (comma-separated list in scans).
    #[arg(long = "K")]
    draws: Option<String>,
    /// Progression length k.
    #[arg(long)]
    k: Option<String>,
    /// Random-set model, e.g. `uniform:c=10`, `perelem:c=4`, `fixed:K=32`,
    /// or `bern:c=0.25,1,4` for threshold-scan.
    #[arg(long)]
    model: Option<String>,
    /// Relative deviation threshold ε.
    #[arg(long)]
    eps: Option<String>,
    /// Number of independent trials.
    #[arg(long)]
    trials: Option<String>,
    /// Master seed (required for randomized commands; runs are never
    /// time-seeded).
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path; a `.json` summary sidecar is written next to it.
    /// Without this, the CSV goes to stdout.
    #[arg(long)]
    out: Option<String>,
    /// Enumeration budget in points (caps exhaustive scans).
    #[arg(long)]
    budget: Option<String>,
    /// Enumeration mode where applicable: `exhaustive` or `sample`.
    #[arg(long)]
    mode: Option<String>,
    /// Single rank bound r for the census.
    #[arg(long)]
    r: Option<String>,
    /// Path to a set file: one element per line (`#` comments allowed).
    #[arg(long)]
    set: Option<String>,
    /// Path to a difference-set file for the inner-product summary.
    #[arg(long)]
    diffs: Option<String>,
    /// Domain kind for set files: `interval`, `cyclic`, or `vector`.
    #[arg(long)]
    domain: Option<String>,
    /// Config file of `key = value` lines; CLI flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("p", self.p.clone()),
            ("n", self.n.clone()),
            ("N", self.size_n.clone()),
            ("K", self.draws.clone()),
            ("k", self.k.clone()),
            ("model", self.model.clone()),
            ("eps", self.eps.clone()),
            ("trials", self.trials.clone()),
            ("seed", self.seed.clone()),
            ("out", self.out.clone()),
            ("budget", self.budget.clone()),
            ("mode", self.mode.clone()),
            ("r", self.r.clone()),
            ("set", self.set.clone()),
            ("diffs", self.diffs.clone()),
            ("domain", self.domain.clone()),
        ]
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "diffset",
    version,
    about = "Difference-set experiments over prime-field vector spaces",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check |Gauss sum| = p^{-rank/2} over symmetric forms
    /// (all forms in dimension n, or --mode sample with --trials).
    GaussSum(Flags),
    /// Sample K differences, certify independence, and build a quadric
    /// avoiding all progressions with those common differences.
    Adversary(Flags),
    /// Success-rate surface over a grid: --K list (fixed sample sizes) or
    /// --model bern:c=... (Bernoulli densities).
    ThresholdScan(Flags),
    /// Tabulate the k-term dual function of a set file over its domain.
    Dual(Flags),
    /// Tail probabilities of the character-correlation sup across an N
    /// schedule, with exponential reference curve and trend verdict.
    Concentration(Flags),
    /// Count n x n matrices of rank <= r against the p^{2nr} bound.
    Census(Flags),
}

impl Command {
    fn dispatch(&self) -> (&'static str, &Flags) {
        match self {
            Command::GaussSum(f) => ("gauss-sum", f),
            Command::Adversary(f) => ("adversary", f),
            Command::ThresholdScan(f) => ("threshold-scan", f),
            Command::Dual(f) => ("dual", f),
            Command::Concentration(f) => ("concentration", f),
            Command::Census(f) => ("census", f),
        }
    }
}

fn run(name: &'static str, flags: &Flags, start: Instant) -> Result<String, CliError> {
    let resolver = Resolver::new(name, flags.pairs(), flags.config.as_deref())?;
    let output = match name {
        "gauss-sum" => commands::cmd_gauss_sum(&resolver)?,
        "adversary" => commands::cmd_adversary(&resolver)?,
        "threshold-scan" => commands::cmd_threshold_scan(&resolver)?,
        "dual" => commands::cmd_dual(&resolver)?,
        "concentration" => commands::cmd_concentration(&resolver)?,
        "census" => commands::cmd_census(&resolver)?,
        _ => unreachable!("dispatch covers every subcommand"),
    };
    output::emit(&resolver, &output, start.elapsed().as_secs_f64())
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, flags) = cli.command.dispatch();
    match run(name, flags, start) {
        Ok(status) => eprintln!("{status}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
