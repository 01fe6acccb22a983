//! Sweeps: every (instance, policy, horizon, replicate) cell is an
//! independent seeded episode, and the aggregates (mean regret with normal
//! 95% intervals, average ranks, pairwise win rates) are computed per
//! horizon with seeds averaged within each instance first.
//!
//! Horizon-aware policies receive each cell's horizon at construction;
//! regret at different horizons always comes from separate runs, never from
//! truncating one long one.

use super::{run_episode_spec, EpisodeError};
use crate::env::Instance;
use crate::policy::{PolicyConfig, PolicyError, PolicySpec};
use crate::util::episode_seed;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub instance: String,
    pub policy: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub seed: u64,
    pub final_regret: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub instance: String,
    pub policy: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub seed: u64,
    pub round: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub instance_order: Vec<String>,
    pub policy_order: Vec<String>,
    pub horizons: Vec<u64>,
    pub cells: Vec<SweepCell>,
    pub failures: Vec<SweepFailure>,
}

/// Axes of a sweep. `base_seed` feeds the per-cell seed derivation.
#[derive(Debug, Clone)]
pub struct SweepSpec<'a> {
    pub instances: &'a [Instance],
    pub policies: &'a [PolicyConfig],
    pub horizons: &'a [u64],
    pub replicates: u64,
    pub base_seed: u64,
}

/// Run every cell, in parallel, recording failures instead of aborting.
/// Policy configs are validated up front so a typo fails before any episode
/// runs.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable, PolicyError> {
    let parsed: Vec<PolicySpec> = spec
        .policies
        .iter()
        .map(|c| c.parse())
        .collect::<Result<_, _>>()?;
    for (i, a) in parsed.iter().enumerate() {
        for b in parsed.iter().skip(i + 1) {
            if a.label == b.label {
                return Err(PolicyError::InvalidParams {
                    name: a.label.clone(),
                    message: "duplicate policy label; set distinct labels".into(),
                });
            }
        }
    }
    // Instance labels key both seed derivation and aggregation.
    for (i, a) in spec.instances.iter().enumerate() {
        for b in spec.instances.iter().skip(i + 1) {
            if a.label == b.label {
                return Err(PolicyError::InvalidParams {
                    name: a.label.clone(),
                    message: "duplicate instance label; relabel the inputs".into(),
                });
            }
        }
    }

    struct Job<'b> {
        instance: &'b Instance,
        policy: &'b PolicySpec,
        horizon: u64,
        seed: u64,
    }
    let mut jobs = Vec::new();
    for instance in spec.instances {
        for policy in &parsed {
            for &horizon in spec.horizons {
                for replicate in 0..spec.replicates.max(1) {
                    let seed = episode_seed(
                        spec.base_seed,
                        &instance.label,
                        &policy.label,
                        horizon,
                        replicate,
                    );
                    jobs.push(Job {
                        instance,
                        policy,
                        horizon,
                        seed,
                    });
                }
            }
        }
    }

    let outcomes: Vec<Result<SweepCell, SweepFailure>> = jobs
        .par_iter()
        .map(|job| {
            match run_episode_spec(job.instance, job.policy, job.horizon, job.seed) {
                Ok(run) => Ok(SweepCell {
                    instance: run.instance,
                    policy: run.policy,
                    horizon: run.horizon,
                    seed: run.seed,
                    final_regret: run.final_regret,
                }),
                Err(err) => Err(SweepFailure {
                    instance: job.instance.label.clone(),
                    policy: job.policy.label.clone(),
                    horizon: job.horizon,
                    seed: job.seed,
                    round: match &err {
                        EpisodeError::Policy { round, .. } | EpisodeError::Env { round, .. } => {
                            *round
                        }
                    },
                    error: err.to_string(),
                }),
            }
        })
        .collect();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(cell) => cells.push(cell),
            Err(fail) => failures.push(fail),
        }
    }
    Ok(SweepTable {
        instance_order: spec.instances.iter().map(|i| i.label.clone()).collect(),
        policy_order: parsed.iter().map(|p| p.label.clone()).collect(),
        horizons: spec.horizons.to_vec(),
        cells,
        failures,
    })
}

impl SweepTable {
    /// Seed-averaged regret per (instance, policy) at one horizon. Only
    /// instances with a value for every policy are returned, so downstream
    /// ranks stay permutations.
    fn per_instance_means(&self, horizon: u64) -> Vec<(String, Vec<f64>)> {
        let mut sums: BTreeMap<(String, String), (f64, u64)> = BTreeMap::new();
        for cell in self.cells.iter().filter(|c| c.horizon == horizon) {
            let entry = sums
                .entry((cell.instance.clone(), cell.policy.clone()))
                .or_insert((0.0, 0));
            entry.0 += cell.final_regret;
            entry.1 += 1;
        }
        let mut rows = Vec::new();
        for instance in &self.instance_order {
            let values: Option<Vec<f64>> = self
                .policy_order
                .iter()
                .map(|p| {
                    sums.get(&(instance.clone(), p.clone()))
                        .map(|(s, n)| s / *n as f64)
                })
                .collect();
            if let Some(values) = values {
                rows.push((instance.clone(), values));
            }
        }
        rows
    }
}

fn mean_and_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Competition ranks (1 = lowest regret); exact ties share the average of
/// the ranks they span.
fn ranks_ascending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("regrets are finite")
            .then(a.cmp(&b))
    });
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RankRow {
    pub policy: String,
    pub mean_rank: f64,
    pub ci95: f64,
}

/// Mean rank per policy at one horizon, across instances.
pub fn average_rank(table: &SweepTable, horizon: u64) -> Vec<RankRow> {
    let rows = table.per_instance_means(horizon);
    let p = table.policy_order.len();
    let mut per_policy: Vec<Vec<f64>> = vec![Vec::new(); p];
    for (_, values) in &rows {
        for (i, r) in ranks_ascending(values).into_iter().enumerate() {
            per_policy[i].push(r);
        }
    }
    table
        .policy_order
        .iter()
        .zip(per_policy)
        .map(|(policy, ranks)| {
            let (mean_rank, ci95) = mean_and_ci95(&ranks);
            RankRow {
                policy: policy.clone(),
                mean_rank,
                ci95,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WinRateMatrix {
    pub policies: Vec<String>,
    /// `rates[p][q]` = fraction of instances where policy `p` beats `q`;
    /// exact ties split 0.5/0.5 and the diagonal is 0.5 by convention.
    pub rates: Vec<Vec<f64>>,
}

pub fn win_rate_matrix(table: &SweepTable, horizon: u64) -> WinRateMatrix {
    let rows = table.per_instance_means(horizon);
    let p = table.policy_order.len();
    let mut rates = vec![vec![0.5; p]; p];
    if !rows.is_empty() {
        for a in 0..p {
            for b in 0..p {
                if a == b {
                    continue;
                }
                let mut score = 0.0;
                for (_, values) in &rows {
                    score += if values[a] < values[b] {
                        1.0
                    } else if values[a] == values[b] {
                        0.5
                    } else {
                        0.0
                    };
                }
                rates[a][b] = score / rows.len() as f64;
            }
        }
    }
    WinRateMatrix {
        policies: table.policy_order.clone(),
        rates,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub policy: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub instances: usize,
    pub mean_regret: f64,
    pub ci95: f64,
    pub mean_rank: f64,
    pub rank_ci95: f64,
    pub win_rates: BTreeMap<String, f64>,
}

/// One row per (policy, horizon).
pub fn aggregate(table: &SweepTable) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for &horizon in &table.horizons {
        let rows = table.per_instance_means(horizon);
        let ranks = average_rank(table, horizon);
        let wins = win_rate_matrix(table, horizon);
        for (i, policy) in table.policy_order.iter().enumerate() {
            let regrets: Vec<f64> = rows.iter().map(|(_, v)| v[i]).collect();
            let (mean_regret, ci95) = mean_and_ci95(&regrets);
            let win_rates = table
                .policy_order
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(j, other)| (other.clone(), wins.rates[i][j]))
                .collect();
            out.push(AggregateRow {
                policy: policy.clone(),
                horizon,
                instances: rows.len(),
                mean_regret,
                ci95,
                mean_rank: ranks[i].mean_rank,
                rank_ci95: ranks[i].ci95,
                win_rates,
            });
        }
    }
    out
}

/// Bulk per-cell output: `instance,policy,T,seed,final_regret`.
pub fn write_regret_csv<W: Write>(writer: W, table: &SweepTable) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["instance", "policy", "T", "seed", "final_regret"])?;
    for cell in &table.cells {
        w.write_record([
            cell.instance.as_str(),
            cell.policy.as_str(),
            &cell.horizon.to_string(),
            &cell.seed.to_string(),
            &cell.final_regret.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
