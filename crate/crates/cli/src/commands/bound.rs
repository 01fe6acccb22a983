//! `bound`: evaluate the regret upper bound on one instance, optionally
//! against measured regret.

use crate::config::load_instance_file;
use anyhow::Result;
use rising_bandits::policy::PolicyConfig;
use rising_bandits::theory::{measure_mean_regret, theorem_bound};
use serde_json::json;
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct BoundArgs {
    /// Instance JSON (or CSV of tabulated curves).
    #[arg(long)]
    pub instance: PathBuf,

    #[arg(long, visible_alias = "T")]
    pub horizon: u64,

    /// Increment exponent in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,

    /// Window fraction in (0, 0.5); also used by the measured policy.
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,

    /// Noise scale in the bound; defaults to the instance's own scale.
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Measure the index policy over this many seeded episodes and report
    /// the slack. Exits 2 if the slack is negative.
    #[arg(long)]
    pub measure: Option<u64>,

    /// Base seed for the measured episodes.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

pub fn run(args: BoundArgs) -> Result<i32> {
    let instance = load_instance_file(&args.instance)?;
    let sigma = args.sigma.unwrap_or_else(|| instance.bonus_sigma());
    let mut report = theorem_bound(&instance, args.horizon, args.q, args.epsilon, sigma)?;
    if let Some(replicates) = args.measure {
        let config =
            PolicyConfig::with_params("cure_ucb", json!({ "epsilon": args.epsilon }));
        let measured =
            measure_mean_regret(&instance, &config, args.horizon, replicates, args.seed)?;
        report = report.with_measurement(measured);
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(match report.slack {
        Some(slack) if slack < 0.0 => 2,
        _ => 0,
    })
}
