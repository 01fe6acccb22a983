//! Episode execution and regret accounting.
//!
//! Regret is pseudo-regret: the trace is computed from the true means of the
//! pulls the policy made, not from the sampled rewards, so the only
//! randomness left in a measured regret is the policy's own behavior.

mod optimal;
mod sweep;

pub use optimal::{
    brute_force_optimal, cumulative_mean, optimal_arm, optimal_arm_value, optimal_value,
    BruteForceError, BRUTE_FORCE_MAX_T,
};
pub use sweep::{
    aggregate, average_rank, sweep, win_rate_matrix, write_regret_csv, AggregateRow, RankRow,
    SweepCell, SweepFailure, SweepSpec, SweepTable, WinRateMatrix,
};

use crate::env::{EnvError, Instance};
use crate::policy::{
    CureConfig, CureUcb, DetIndexPolicy, DetVariant, FixedArmPolicy, Policy, PolicyConfig,
    PolicyError, PolicyKind, PolicySpec, Rexp3, SwUcb,
};
use crate::util::{derive_seed, KahanSum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Everything recorded about one episode.
#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub instance: String,
    pub policy: String,
    pub horizon: u64,
    pub seed: u64,
    /// Arm played at each round, 0-indexed.
    pub pulls: Vec<u32>,
    /// Running sum of true means along the pull sequence.
    pub reward_trace: Vec<f64>,
    /// Diagnostic trace: `optimal_value * t/T` minus the running sum. Only
    /// the final entry is a regret in the strict sense; mid-trace values
    /// compare against a prorated benchmark and may decrease.
    pub pseudo_regret_trace: Vec<f64>,
    pub optimal_value: f64,
    /// `optimal_value - sum of true means`; non-negative up to rounding.
    pub final_regret: f64,
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("round {round}: {source}")]
    Policy {
        round: u64,
        #[source]
        source: PolicyError,
    },
    #[error("round {round}: {source}")]
    Env {
        round: u64,
        #[source]
        source: EnvError,
    },
}

impl EpisodeError {
    fn policy(round: u64, source: PolicyError) -> Self {
        EpisodeError::Policy { round, source }
    }

    /// Round at which the episode failed; 0 means setup.
    pub fn round(&self) -> u64 {
        match self {
            EpisodeError::Policy { round, .. } | EpisodeError::Env { round, .. } => *round,
        }
    }
}

/// Per-round trace output: `t,cumulative_expected_reward`.
pub fn write_trace_csv<W: std::io::Write>(
    writer: W,
    run: &RunResult,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "cumulative_expected_reward"])?;
    for (i, value) in run.reward_trace.iter().enumerate() {
        w.write_record([(i + 1).to_string(), value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Instantiate a policy for one episode. The seed feeds only the policy's
/// internal randomness; reward noise draws from a separate stream derived
/// from the same episode seed.
pub fn build_policy(
    spec: &PolicySpec,
    instance: &Instance,
    horizon: u64,
    seed: u64,
) -> Result<Box<dyn Policy>, PolicyError> {
    if spec.kind.requires_deterministic() && !instance.is_deterministic() {
        return Err(PolicyError::RequiresDeterministic {
            name: spec.label.clone(),
        });
    }
    let k = instance.k();
    Ok(match &spec.kind {
        PolicyKind::CureUcb {
            epsilon,
            sigma,
            deterministic_h1,
        } => Box::new(CureUcb::new(
            k,
            horizon,
            CureConfig {
                epsilon: *epsilon,
                sigma: sigma.unwrap_or_else(|| instance.bonus_sigma()),
                deterministic_h1: *deterministic_h1,
            },
        )?),
        PolicyKind::DetCure => Box::new(DetIndexPolicy::new(DetVariant::Cure, k, horizon)),
        PolicyKind::DetRed => Box::new(DetIndexPolicy::new(DetVariant::Red, k, horizon)),
        PolicyKind::SwUcb { tau, xi } => Box::new(SwUcb::new(k, horizon, *tau, *xi)),
        PolicyKind::Rexp3 => {
            let rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[b"policy"]));
            Box::new(Rexp3::new(k, horizon, rng))
        }
        PolicyKind::Oracle => {
            let arm = optimal_arm(instance, horizon).map_err(|e| PolicyError::InvalidParams {
                name: "oracle".into(),
                message: e.to_string(),
            })?;
            Box::new(FixedArmPolicy::new(k, horizon, arm)?)
        }
    })
}

/// Run one seeded episode of `config` on `instance` over `horizon` rounds.
pub fn run_episode(
    instance: &Instance,
    config: &PolicyConfig,
    horizon: u64,
    seed: u64,
) -> Result<RunResult, EpisodeError> {
    let spec = config.parse().map_err(|e| EpisodeError::policy(0, e))?;
    run_episode_spec(instance, &spec, horizon, seed)
}

pub fn run_episode_spec(
    instance: &Instance,
    spec: &PolicySpec,
    horizon: u64,
    seed: u64,
) -> Result<RunResult, EpisodeError> {
    let mut policy =
        build_policy(spec, instance, horizon, seed).map_err(|e| EpisodeError::policy(0, e))?;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[b"noise"]));
    let optimal = optimal_value(instance, horizon).map_err(|e| EpisodeError::Env {
        round: 0,
        source: e,
    })?;

    let mut counts = vec![0u64; instance.k()];
    let mut pulls = Vec::with_capacity(horizon as usize);
    let mut reward_trace = Vec::with_capacity(horizon as usize);
    let mut pseudo_regret_trace = Vec::with_capacity(horizon as usize);
    let mut achieved = KahanSum::new();

    for t in 1..=horizon {
        let arm = policy.select().map_err(|e| EpisodeError::policy(t, e))?;
        if arm >= instance.k() {
            return Err(EpisodeError::policy(
                t,
                PolicyError::ArmOutOfRange {
                    arm,
                    k: instance.k(),
                },
            ));
        }
        counts[arm] += 1;
        let n = counts[arm];
        let reward = instance
            .sample_reward(arm, n, &mut noise_rng)
            .map_err(|e| EpisodeError::Env { round: t, source: e })?;
        policy
            .observe(arm, reward)
            .map_err(|e| EpisodeError::policy(t, e))?;

        let true_mean = instance
            .mean(arm, n)
            .map_err(|e| EpisodeError::Env { round: t, source: e })?;
        achieved.add(true_mean);
        pulls.push(arm as u32);
        reward_trace.push(achieved.value());
        pseudo_regret_trace.push(optimal * (t as f64 / horizon as f64) - achieved.value());
    }

    Ok(RunResult {
        instance: instance.label.clone(),
        policy: spec.label.clone(),
        horizon,
        seed,
        pulls,
        reward_trace,
        pseudo_regret_trace,
        optimal_value: optimal,
        final_regret: optimal - achieved.value(),
    })
}
