//! Command-line front end: instance generation, experiment sweeps, theorem
//! verification, and bound reporting. Machine-readable output goes to files
//! or stdout; progress goes to stderr. Every command is deterministic given
//! its `--seed`, independent of `--jobs`.
//!
//! Exit codes: 0 on success (all checks hold), 1 on usage or configuration
//! errors, 2 when a check or episode fails.

mod commands;
mod config;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "rising-bandits",
    version,
    about = "Rising-bandit experiment harness",
    max_term_width = 100
)]
struct Cli {
    /// Worker threads for sweeps and verification suites (default: all
    /// cores). Results do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic instance files plus a manifest.
    Generate(commands::generate::GenerateArgs),
    /// Run an experiment config: sweep, aggregate, write tables.
    Run(commands::run::RunArgs),
    /// Run a named verification suite and report pass/fail per check.
    Verify(commands::verify::VerifyArgs),
    /// Evaluate the regret upper bound on one instance.
    Bound(commands::bound::BoundArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: could not configure {jobs} worker threads: {err}");
        }
    }
    let outcome = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Run(args) => commands::run::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Bound(args) => commands::bound::run(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
