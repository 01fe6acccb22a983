//! `verify`: run the named certification suites and report per-check rows.

use anyhow::{Context, Result};
use rising_bandits::theory::{
    bound_suite, claims_suite, dominance_suite, lemma_d1_suite, lemma_d2_suite, prop41_suite,
    verify_all, BoundSuiteParams, ClaimsSuiteParams, DominanceSuiteParams, LemmaD1SuiteParams,
    LemmaD2SuiteParams, Prop41SuiteParams, SuiteReport, DEFAULT_VERIFY_SEED,
};
use serde_json::json;
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub suite: Suite,
}

#[derive(clap::Args)]
pub struct Common {
    /// Seed for instance generation and Monte Carlo streams.
    #[arg(long, default_value_t = DEFAULT_VERIFY_SEED)]
    pub seed: u64,

    /// Write the JSON report here in addition to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Subcommand)]
pub enum Suite {
    /// Horizon-aware vs slope-tracking regret on generated linear-then-flat
    /// instances.
    Dominance {
        #[arg(long, default_value_t = 100)]
        instances: u32,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1_000u64, 10_000, 50_000])]
        horizons: Vec<u64>,
        #[arg(long, default_value_t = 50_000)]
        gen_horizon: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Pull-count structure of the deterministic policies.
    Claims {
        #[arg(long, default_value_t = 100)]
        instances: u32,
        #[arg(long, visible_alias = "T", default_value_t = 50_000)]
        horizon: u64,
        #[arg(long, default_value_t = 50_000)]
        gen_horizon: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Windowed-estimator concentration frequencies (Monte Carlo).
    #[command(name = "lemma_d1")]
    LemmaD1 {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Override the noise scale of every built-in configuration.
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Future-gain bound on a (t, n) grid for generated concave arms.
    #[command(name = "lemma_d2")]
    LemmaD2 {
        #[arg(long, default_value_t = 10)]
        instances: u32,
        #[arg(long, visible_alias = "T", default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 200)]
        grid: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Single-arm rule vs exhaustive allocation oracle, exact equality.
    Prop41 {
        #[arg(long, default_value_t = 200)]
        count: u32,
        #[arg(long, default_value_t = 10)]
        max_t: u64,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Seed-averaged index-policy regret against the closed-form bound.
    Bound {
        #[arg(long, default_value_t = 20)]
        instances: u32,
        #[arg(long, value_delimiter = ',', default_values_t = vec![5_000u64, 10_000])]
        horizons: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5f64, 1.0])]
        q: Vec<f64>,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long, default_value_t = 20)]
        replicates: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Every suite above (except `bound`), default parameters.
    All {
        #[command(flatten)]
        common: Common,
    },
}

pub fn run(args: VerifyArgs) -> Result<i32> {
    let (reports, common) = match args.suite {
        Suite::Dominance {
            instances,
            horizons,
            gen_horizon,
            common,
        } => (
            vec![dominance_suite(&DominanceSuiteParams {
                instances,
                horizons,
                generation_horizon: gen_horizon,
                seed: common.seed,
            })?],
            common,
        ),
        Suite::Claims {
            instances,
            horizon,
            gen_horizon,
            common,
        } => (
            vec![claims_suite(&ClaimsSuiteParams {
                instances,
                horizon,
                generation_horizon: gen_horizon,
                seed: common.seed,
            })?],
            common,
        ),
        Suite::LemmaD1 {
            trials,
            sigma,
            common,
        } => {
            let mut params = LemmaD1SuiteParams {
                trials,
                seed: common.seed,
                ..Default::default()
            };
            if let Some(sigma) = sigma {
                for cfg in &mut params.configs {
                    cfg.sigma = sigma;
                }
            }
            (vec![lemma_d1_suite(&params)?], common)
        }
        Suite::LemmaD2 {
            instances,
            horizon,
            grid,
            common,
        } => (
            vec![lemma_d2_suite(&LemmaD2SuiteParams {
                instances,
                grid,
                horizon,
                seed: common.seed,
                ..Default::default()
            })?],
            common,
        ),
        Suite::Prop41 {
            count,
            max_t,
            max_k,
            common,
        } => (
            vec![prop41_suite(&Prop41SuiteParams {
                count,
                max_k,
                max_horizon: max_t,
                seed: common.seed,
            })?],
            common,
        ),
        Suite::Bound {
            instances,
            horizons,
            q,
            epsilon,
            sigma,
            replicates,
            common,
        } => (
            vec![bound_suite(&BoundSuiteParams {
                instances,
                horizons,
                q_values: q,
                epsilon,
                sigma,
                replicates,
                seed: common.seed,
                ..Default::default()
            })?],
            common,
        ),
        Suite::All { common } => (verify_all(common.seed)?, common),
    };

    let all_hold = reports.iter().all(|r| r.all_hold);
    for report in &reports {
        summarize(report);
    }
    let payload = if reports.len() == 1 {
        serde_json::to_value(&reports[0])?
    } else {
        json!({ "all_hold": all_hold, "suites": reports })
    };
    let text = format!("{}\n", serde_json::to_string_pretty(&payload)?);
    if let Some(path) = &common.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{text}");
    Ok(if all_hold { 0 } else { 2 })
}

fn summarize(report: &SuiteReport) {
    eprintln!(
        "suite {}: {}/{} checks hold ({})",
        report.suite,
        report.passed,
        report.total,
        if report.all_hold { "PASS" } else { "FAIL" }
    );
    for check in report.checks.iter().filter(|c| !c.holds) {
        eprintln!(
            "  FAIL {} {} {}: lhs={} rhs={}",
            check.name, check.instance, check.params, check.lhs, check.rhs
        );
    }
}
