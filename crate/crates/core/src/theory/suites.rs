//! Named verification suites behind the `verify` command: each generates its
//! own seeded inputs, runs the corresponding checks, and reports one
//! pass/fail row per check.

use super::{
    claims_check, concentration_check, dominance_check, lemma_future_bound_check, theorem_bound,
    ConcentrationParams, TheoryError,
};
use crate::env::{
    generate_concave_instance, generate_ltf_instance, generate_small_rising_instance, Instance,
    MeanCurve, NoiseFamily,
};
use crate::eval::{brute_force_optimal, optimal_value, run_episode, EpisodeError};
use crate::policy::PolicyConfig;
use crate::util::{derive_seed, episode_seed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

pub const DEFAULT_VERIFY_SEED: u64 = 7;

/// One pass/fail row: `lhs` and `rhs` are the two sides of whatever
/// inequality or equality the check states.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub instance: String,
    pub params: serde_json::Value,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub total: usize,
    pub passed: usize,
    pub all_hold: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(
        suite: &str,
        seed: u64,
        params: serde_json::Value,
        checks: Vec<CheckResult>,
    ) -> SuiteReport {
        let passed = checks.iter().filter(|c| c.holds).count();
        SuiteReport {
            suite: suite.to_string(),
            seed,
            params,
            total: checks.len(),
            passed,
            all_hold: passed == checks.len(),
            checks,
        }
    }
}

fn ltf_batch(count: u32, generation_horizon: u64, seed: u64) -> Result<Vec<Instance>, TheoryError> {
    (0..count)
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(seed, &[b"ltf", &i.to_le_bytes()]));
            generate_ltf_instance(
                &mut rng,
                generation_horizon,
                0.0,
                NoiseFamily::None,
                format!("ltf-{i:03}"),
            )
            .map_err(TheoryError::Env)
        })
        .collect()
}

fn concave_batch(
    count: u32,
    generation_horizon: u64,
    sigma: f64,
    noise_family: NoiseFamily,
    seed: u64,
) -> Result<Vec<Instance>, TheoryError> {
    (0..count)
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(seed, &[b"concave", &i.to_le_bytes()]));
            generate_concave_instance(
                &mut rng,
                generation_horizon,
                sigma,
                noise_family,
                format!("concave-{i:03}"),
            )
            .map_err(TheoryError::Env)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceSuiteParams {
    pub instances: u32,
    pub horizons: Vec<u64>,
    pub generation_horizon: u64,
    pub seed: u64,
}

impl Default for DominanceSuiteParams {
    fn default() -> Self {
        Self {
            instances: 100,
            horizons: vec![1_000, 10_000, 50_000],
            generation_horizon: 50_000,
            seed: DEFAULT_VERIFY_SEED,
        }
    }
}

/// Horizon-aware vs slope-tracking regret on every (instance, horizon) cell.
pub fn dominance_suite(params: &DominanceSuiteParams) -> Result<SuiteReport, TheoryError> {
    let instances = ltf_batch(params.instances, params.generation_horizon, params.seed)?;
    let mut cells = Vec::new();
    for inst in &instances {
        for &horizon in &params.horizons {
            cells.push((inst, horizon));
        }
    }
    let checks: Result<Vec<CheckResult>, TheoryError> = cells
        .par_iter()
        .map(|(inst, horizon)| {
            let out = dominance_check(inst, *horizon)?;
            Ok(CheckResult {
                name: "dominance".into(),
                instance: inst.label.clone(),
                params: json!({ "T": horizon }),
                holds: out.holds,
                lhs: out.reg_cure,
                rhs: out.reg_red,
                note: None,
            })
        })
        .collect();
    Ok(SuiteReport::new(
        "dominance",
        params.seed,
        serde_json::to_value(params).expect("serializable"),
        checks?,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimsSuiteParams {
    pub instances: u32,
    pub horizon: u64,
    pub generation_horizon: u64,
    pub seed: u64,
}

impl Default for ClaimsSuiteParams {
    fn default() -> Self {
        Self {
            instances: 100,
            horizon: 50_000,
            generation_horizon: 50_000,
            seed: DEFAULT_VERIFY_SEED,
        }
    }
}

/// Pull-structure claims of the two deterministic policies.
pub fn claims_suite(params: &ClaimsSuiteParams) -> Result<SuiteReport, TheoryError> {
    let instances = ltf_batch(params.instances, params.generation_horizon, params.seed)?;
    let horizon = params.horizon;
    let per_instance: Result<Vec<Vec<CheckResult>>, TheoryError> = instances
        .par_iter()
        .map(|inst| {
            let out = claims_check(inst, horizon)?;
            let cell = |name: &str, holds: bool| CheckResult {
                name: name.into(),
                instance: inst.label.clone(),
                params: json!({ "T": horizon }),
                holds,
                lhs: if holds { 1.0 } else { 0.0 },
                rhs: 1.0,
                note: None,
            };
            if !out.in_scope {
                return Ok(vec![CheckResult {
                    note: out.scope_note.clone(),
                    ..cell("claims.scope", true)
                }]);
            }
            Ok(vec![
                cell("claims.first_pull_order", out.first_pulls_ordered),
                cell("claims.cure_exact_counts", out.cure_exact_counts),
                cell("claims.red_minimum_counts", out.red_minimum_counts),
                cell("claims.engaged_subset", out.engaged_subset),
            ])
        })
        .collect();
    let checks = per_instance?.into_iter().flatten().collect();
    Ok(SuiteReport::new(
        "claims",
        params.seed,
        serde_json::to_value(params).expect("serializable"),
        checks,
    ))
}

/// One Monte Carlo configuration of the concentration check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcentrationConfig {
    pub round: u64,
    pub pulls: u64,
    pub window: u64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaD1SuiteParams {
    pub configs: Vec<ConcentrationConfig>,
    pub trials: u64,
    pub generation_horizon: u64,
    pub seed: u64,
}

impl Default for LemmaD1SuiteParams {
    fn default() -> Self {
        Self {
            configs: vec![
                ConcentrationConfig {
                    round: 50,
                    pulls: 25,
                    window: 5,
                    sigma: 0.1,
                },
                ConcentrationConfig {
                    round: 100,
                    pulls: 50,
                    window: 10,
                    sigma: 0.1,
                },
                ConcentrationConfig {
                    round: 200,
                    pulls: 100,
                    window: 20,
                    sigma: 0.3,
                },
            ],
            trials: 100_000,
            generation_horizon: 50_000,
            seed: DEFAULT_VERIFY_SEED,
        }
    }
}

/// Windowed-estimator concentration frequencies against `2 t^{-2}`, run on
/// the late-bloomer arm of a generated concave instance with the horizon set
/// to twice the evaluation round so the lookahead term is active.
pub fn lemma_d1_suite(params: &LemmaD1SuiteParams) -> Result<SuiteReport, TheoryError> {
    let inst = concave_batch(
        1,
        params.generation_horizon,
        0.0,
        NoiseFamily::None,
        derive_seed(params.seed, &[b"lemma_d1"]),
    )?
    .pop()
    .expect("one instance");
    let curve = late_bloomer(&inst);
    let checks: Result<Vec<CheckResult>, TheoryError> = params
        .configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                params.seed,
                &[b"lemma_d1_trials", &(i as u64).to_le_bytes()],
            ));
            let cparams = ConcentrationParams {
                sigma: cfg.sigma,
                horizon: 2 * cfg.round,
                round: cfg.round,
                pulls: cfg.pulls,
                window: cfg.window,
                trials: params.trials,
                beta_inflation: 1.0,
            };
            let out = concentration_check(curve, &cparams, &mut rng)?;
            Ok(CheckResult {
                name: "lemma_d1".into(),
                instance: inst.label.clone(),
                params: serde_json::to_value(cparams).expect("serializable"),
                holds: out.holds,
                lhs: out.frequency,
                rhs: out.bound,
                note: None,
            })
        })
        .collect();
    Ok(SuiteReport::new(
        "lemma_d1",
        params.seed,
        serde_json::to_value(params).expect("serializable"),
        checks?,
    ))
}

fn late_bloomer(instance: &Instance) -> &MeanCurve {
    instance
        .arms
        .iter()
        .find(|arm| matches!(arm, MeanCurve::Concave { start, .. } if (*start - 0.1).abs() < 1e-9))
        .unwrap_or(&instance.arms[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaD2SuiteParams {
    pub instances: u32,
    pub grid: u64,
    pub horizon: u64,
    pub generation_horizon: u64,
    pub seed: u64,
}

impl Default for LemmaD2SuiteParams {
    fn default() -> Self {
        Self {
            instances: 10,
            grid: 200,
            horizon: 10_000,
            generation_horizon: 50_000,
            seed: DEFAULT_VERIFY_SEED,
        }
    }
}

/// Future-gain bound over a `grid x grid` lattice of `(t, n)` pairs with
/// `1 <= n <= t <= T`, one check row per generated concave arm; reports the
/// grid point with the least slack.
pub fn lemma_d2_suite(params: &LemmaD2SuiteParams) -> Result<SuiteReport, TheoryError> {
    let instances = concave_batch(
        params.instances,
        params.generation_horizon,
        0.0,
        NoiseFamily::None,
        params.seed,
    )?;
    let grid = params.grid.max(2);
    let horizon = params.horizon;
    let per_instance: Result<Vec<Vec<CheckResult>>, TheoryError> = instances
        .par_iter()
        .map(|inst| {
            let mut rows = Vec::new();
            for (arm, curve) in inst.arms.iter().enumerate() {
                let mut worst: Option<(f64, f64, u64, u64)> = None;
                let mut all_hold = true;
                for ti in 0..grid {
                    let t = 1 + ti * (horizon - 1) / (grid - 1);
                    for ni in 0..grid {
                        let n = 1 + ni * (t - 1) / (grid - 1).max(1);
                        let out = lemma_future_bound_check(curve, t, n, horizon)?;
                        all_hold &= out.holds;
                        let margin = out.lhs - out.rhs;
                        if worst.is_none_or(|(l, r, _, _)| margin > l - r) {
                            worst = Some((out.lhs, out.rhs, t, n));
                        }
                    }
                }
                let (lhs, rhs, t, n) = worst.expect("grid non-empty");
                rows.push(CheckResult {
                    name: "lemma_d2".into(),
                    instance: inst.label.clone(),
                    params: json!({ "arm": arm, "T": horizon, "worst_t": t, "worst_n": n }),
                    holds: all_hold,
                    lhs,
                    rhs,
                    note: None,
                });
            }
            Ok(rows)
        })
        .collect();
    let checks = per_instance?.into_iter().flatten().collect();
    Ok(SuiteReport::new(
        "lemma_d2",
        params.seed,
        serde_json::to_value(params).expect("serializable"),
        checks,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop41SuiteParams {
    pub count: u32,
    pub max_k: usize,
    pub max_horizon: u64,
    pub seed: u64,
}

impl Default for Prop41SuiteParams {
    fn default() -> Self {
        Self {
            count: 200,
            max_k: 3,
            max_horizon: 10,
            seed: DEFAULT_VERIFY_SEED,
        }
    }
}

/// Exhaustive-allocation oracle vs the single-arm rule on random rising
/// instances, exact equality required.
pub fn prop41_suite(params: &Prop41SuiteParams) -> Result<SuiteReport, TheoryError> {
    if params.max_horizon > crate::eval::BRUTE_FORCE_MAX_T {
        return Err(TheoryError::BadParam {
            name: "max_horizon",
            value: params.max_horizon as f64,
            expected: "at most the enumeration guard (12)",
        });
    }
    let mut checks = Vec::with_capacity(params.count as usize);
    for i in 0..params.count {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(params.seed, &[b"prop41", &i.to_le_bytes()]));
        let horizon = rng.random_range(1..=params.max_horizon);
        let inst = generate_small_rising_instance(
            &mut rng,
            params.max_k,
            params.max_horizon,
            format!("rising-{i:03}"),
        );
        let brute = brute_force_optimal(&inst, horizon).map_err(|e| match e {
            crate::eval::BruteForceError::Env(env) => TheoryError::Env(env),
            crate::eval::BruteForceError::HorizonTooLarge { .. } => {
                unreachable!("max_horizon validated against the guard")
            }
        })?;
        let fast = optimal_value(&inst, horizon)?;
        checks.push(CheckResult {
            name: "prop41".into(),
            instance: inst.label.clone(),
            params: json!({ "T": horizon, "K": inst.k() }),
            holds: fast == brute,
            lhs: fast,
            rhs: brute,
            note: None,
        });
    }
    Ok(SuiteReport::new(
        "prop41",
        params.seed,
        serde_json::to_value(params).expect("serializable"),
        checks,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSuiteParams {
    pub instances: u32,
    pub generation_horizon: u64,
    pub horizons: Vec<u64>,
    pub q_values: Vec<f64>,
    pub epsilon: f64,
    pub sigma: f64,
    pub replicates: u64,
    pub seed: u64,
}

impl Default for BoundSuiteParams {
    fn default() -> Self {
        Self {
            instances: 20,
            generation_horizon: 50_000,
            horizons: vec![5_000, 10_000],
            q_values: vec![0.5, 1.0],
            epsilon: 0.25,
            sigma: 0.1,
            replicates: 20,
            seed: DEFAULT_VERIFY_SEED,
        }
    }
}

/// Mean regret of one policy over seeded replicates; pseudo-regret, so the
/// average isolates policy behavior.
pub fn measure_mean_regret(
    instance: &Instance,
    config: &PolicyConfig,
    horizon: u64,
    replicates: u64,
    base_seed: u64,
) -> Result<f64, EpisodeError> {
    let mut total = 0.0;
    for rep in 0..replicates.max(1) {
        let seed = episode_seed(base_seed, &instance.label, &config.name, horizon, rep);
        total += run_episode(instance, config, horizon, seed)?.final_regret;
    }
    Ok(total / replicates.max(1) as f64)
}

/// Seed-averaged index-policy regret against the closed-form bound on
/// generated concave instances: slack must be non-negative in every cell.
pub fn bound_suite(params: &BoundSuiteParams) -> Result<SuiteReport, TheoryError> {
    let instances = concave_batch(
        params.instances,
        params.generation_horizon,
        params.sigma,
        NoiseFamily::Gaussian,
        params.seed,
    )?;
    let config = PolicyConfig::with_params("cure_ucb", json!({ "epsilon": params.epsilon }));
    let mut cells = Vec::new();
    for inst in &instances {
        for &horizon in &params.horizons {
            cells.push((inst, horizon));
        }
    }
    let per_cell: Result<Vec<Vec<CheckResult>>, TheoryError> = cells
        .par_iter()
        .map(|(inst, horizon)| {
            let measured =
                measure_mean_regret(inst, &config, *horizon, params.replicates, params.seed)?;
            let mut rows = Vec::new();
            for &q in &params.q_values {
                let report =
                    theorem_bound(inst, *horizon, q, params.epsilon, params.sigma)?
                        .with_measurement(measured);
                rows.push(CheckResult {
                    name: "theorem_bound".into(),
                    instance: inst.label.clone(),
                    params: json!({
                        "T": horizon,
                        "q": q,
                        "epsilon": params.epsilon,
                        "sigma": params.sigma,
                        "replicates": params.replicates,
                    }),
                    holds: report.slack.expect("measured") >= 0.0,
                    lhs: measured,
                    rhs: report.bound,
                    note: None,
                });
            }
            Ok(rows)
        })
        .collect();
    let checks = per_cell?.into_iter().flatten().collect();
    Ok(SuiteReport::new(
        "bound",
        params.seed,
        serde_json::to_value(params).expect("serializable"),
        checks,
    ))
}

/// The five named verification suites with their default parameters.
pub fn verify_all(seed: u64) -> Result<Vec<SuiteReport>, TheoryError> {
    Ok(vec![
        dominance_suite(&DominanceSuiteParams {
            seed,
            ..Default::default()
        })?,
        claims_suite(&ClaimsSuiteParams {
            seed,
            ..Default::default()
        })?,
        lemma_d1_suite(&LemmaD1SuiteParams {
            seed,
            ..Default::default()
        })?,
        lemma_d2_suite(&LemmaD2SuiteParams {
            seed,
            ..Default::default()
        })?,
        prop41_suite(&Prop41SuiteParams {
            seed,
            ..Default::default()
        })?,
    ])
}
