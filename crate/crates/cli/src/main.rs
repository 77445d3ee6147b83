//! `qres` — command-line driver for the quadratic-residue verification
//! suites: permutation signs, exact congruence and cyclotomic products,
//! class-number identities, signed-log trigonometric products, and the
//! open-statement scanners.
//!
//! Exit status: 0 when every attempted check passes, 1 when any check fails
//! (a counterexample or a broken identity), 2 for usage and I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod bfile;
mod runner;
mod suite;

use runner::{CliError, RunSpec, RunSummary, INTERRUPT_EXIT};
use suite::{Suite, SuiteOptions};

/// Verification workbench for quadratic-residue permutation signs,
/// class-number identities, exact cyclotomic products, and trigonometric
/// product laws.
#[derive(Parser)]
#[command(name = "qres", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one verification suite over a parameter range.
    Verify {
        /// Suite token: thm11, thm12, thm13_exact, thm13_numeric, thm14,
        /// thm15, thm16, lemmas, mordell, or conj:<id> (id in 6.1 … 6.8).
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scan one conjecture, halting at the first counterexample.
    Scan {
        /// Conjecture id: 6.1 … 6.8 (a leading "conj:" is accepted).
        conj_id: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a sequence as b-file lines ("index value", indexed from 1).
    Export {
        /// Sequence token: s_p, t_p, sign_sp, or h_minus.
        sequence: String,
        /// Smallest prime to include.
        #[arg(long, default_value_t = 3)]
        from: u64,
        /// Largest prime to include (inclusive).
        #[arg(long)]
        to: u64,
        /// Output path for the b-file.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
    },
    /// Resume an interrupted run from its checkpoint file.
    Resume {
        /// Checkpoint written by a previous verify/scan run.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Optional suite token; must match the checkpoint if given.
        suite: Option<String>,
        /// Override the worker count recorded in the checkpoint.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Smallest parameter to visit.
    #[arg(long, default_value_t = 3)]
    from: u64,
    /// Largest parameter to visit (inclusive).
    #[arg(long)]
    to: u64,
    /// Multiplier to test (repeatable); default: 1 plus the least
    /// quadratic nonresidue where the identity takes a multiplier.
    #[arg(long = "a", value_name = "A")]
    a: Vec<i64>,
    /// Half-width of the coefficient grid for the grid-driven suites.
    #[arg(long)]
    grid: Option<i64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Write one JSON verdict per line to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write and refresh a checkpoint here as parameters complete.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Relative tolerance for floating-point comparisons.
    #[arg(long, default_value_t = suite::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Record per-parameter timings in the JSON lines (sacrifices
    /// byte-stability across runs).
    #[arg(long, default_value_t = false)]
    timing: bool,
    /// Test hook: stop right after this parameter, as if interrupted.
    #[arg(long, hide = true)]
    halt_after: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Verify { suite, common } => {
            let suite = Suite::parse(&suite).map_err(CliError::Usage)?;
            run_cmd(suite, common, false)
        }
        Cmd::Scan { conj_id, common } => {
            let suite = Suite::parse_conjecture(&conj_id).map_err(CliError::Usage)?;
            run_cmd(suite, common, true)
        }
        Cmd::Export { sequence, from, to, out, jobs } => {
            if from > to {
                return Err(CliError::Usage(format!("--from {from} exceeds --to {to}")));
            }
            let seq = bfile::Sequence::parse(&sequence).map_err(CliError::Usage)?;
            let n = bfile::export(seq, from, to, &out, jobs as usize)?;
            println!("wrote {n} entries to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Resume { checkpoint, suite, jobs } => {
            let summary =
                runner::resume(&checkpoint, suite.as_deref(), jobs.map(|j| j as usize))?;
            print_summary(&summary);
            Ok(exit_for(&summary))
        }
    }
}

fn run_cmd(suite: Suite, common: CommonArgs, scan: bool) -> Result<ExitCode, CliError> {
    if common.from > common.to {
        return Err(CliError::Usage(format!(
            "--from {} exceeds --to {}",
            common.from, common.to
        )));
    }
    if common.a.contains(&0) {
        return Err(CliError::Usage("--a 0 is not a valid multiplier".into()));
    }
    if let Some(g) = common.grid {
        if g < 0 {
            return Err(CliError::Usage("--grid must be nonnegative".into()));
        }
    }
    if !(common.tolerance > 0.0 && common.tolerance.is_finite()) {
        return Err(CliError::Usage("--tolerance must be a positive number".into()));
    }
    let spec = RunSpec {
        suite,
        from: common.from,
        to: common.to,
        opts: SuiteOptions {
            a_set: (!common.a.is_empty()).then(|| common.a.clone()),
            grid: common.grid,
            tolerance: common.tolerance,
        },
        jobs: common.jobs as usize,
        out: common.out,
        checkpoint: common.checkpoint,
        timing: common.timing,
        scan,
        halt_after: common.halt_after,
    };
    let summary = runner::run_fresh(&spec)?;
    if summary.interrupted {
        println!(
            "interrupted after p={}",
            summary
                .tallies
                .last_completed_param
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into())
        );
        eprintln!("wall time: {:.3}s", summary.wall);
        return Ok(ExitCode::from(INTERRUPT_EXIT));
    }
    print_summary(&summary);
    Ok(exit_for(&summary))
}

const MAX_SKIPS_SHOWN: usize = 10;
const MAX_FAILURES_SHOWN: usize = 20;

/// Human summary on stdout. Everything printed here is a deterministic
/// function of (suite, range, options); wall time goes to stderr.
fn print_summary(sum: &RunSummary) {
    println!(
        "suite {}: range [{}, {}] {} attempted {}",
        sum.suite,
        sum.from,
        sum.to,
        sum.desc,
        sum.attempted()
    );
    println!(
        "passes {}  failures {}  skipped {}",
        sum.tallies.passes,
        sum.tallies.failures.len(),
        sum.tallies.skipped.len()
    );
    for (p, reason) in sum.tallies.skipped.iter().take(MAX_SKIPS_SHOWN) {
        println!("skip p={p}: {reason}");
    }
    if sum.tallies.skipped.len() > MAX_SKIPS_SHOWN {
        println!(
            "... and {} more skips",
            sum.tallies.skipped.len() - MAX_SKIPS_SHOWN
        );
    }
    for f in sum.tallies.failures.iter().take(MAX_FAILURES_SHOWN) {
        println!("FAIL p={} {}: lhs={} rhs={}", f.p, f.params, f.lhs, f.rhs);
    }
    if sum.tallies.failures.len() > MAX_FAILURES_SHOWN {
        println!(
            "... and {} more failures",
            sum.tallies.failures.len() - MAX_FAILURES_SHOWN
        );
    }
    if let Some(p) = sum.halted_at {
        println!("scan halted at first counterexample: p={p}");
    }
    println!(
        "result: {}",
        if sum.tallies.failures.is_empty() { "PASS" } else { "FAIL" }
    );
    eprintln!("wall time: {:.3}s", sum.wall);
}

fn exit_for(sum: &RunSummary) -> ExitCode {
    if sum.tallies.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
