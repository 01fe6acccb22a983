//! `run`: execute an experiment config and write the result tables.

use super::sanitize;
use crate::config::ExperimentConfig;
use anyhow::{Context, Result};
use rising_bandits::eval::{
    aggregate, average_rank, run_episode, sweep, win_rate_matrix, write_regret_csv,
    write_trace_csv, SweepSpec, SweepTable,
};
use std::fs::File;
use std::path::{Path, PathBuf};

#[derive(clap::Args)]
pub struct RunArgs {
    /// Experiment config JSON.
    #[arg(long)]
    pub config: PathBuf,

    /// Output directory (overrides the config's `output_dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Also write per-episode reward traces under `<out>/traces/`.
    #[arg(long)]
    pub traces: bool,
}

pub fn run(args: RunArgs) -> Result<i32> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let config_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let instances = cfg.load_instances(&config_dir)?;
    eprintln!(
        "sweeping {} instance(s) x {} policy(ies) x {} horizon(s) x {} replicate(s)",
        instances.len(),
        cfg.policies.len(),
        cfg.horizons.len(),
        cfg.replicates
    );
    let table = sweep(&SweepSpec {
        instances: &instances,
        policies: &cfg.policies,
        horizons: &cfg.horizons,
        replicates: cfg.replicates,
        base_seed: cfg.base_seed,
    })?;

    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    write_outputs(&out_dir, &table)?;
    write_run_meta(&out_dir, &cfg, &instances)?;

    if args.traces || cfg.write_traces {
        // Episodes are cheap to replay deterministically from their cell
        // seeds; traces are only materialized on demand.
        let trace_dir = out_dir.join("traces");
        std::fs::create_dir_all(&trace_dir)?;
        for cell in &table.cells {
            let instance = instances
                .iter()
                .find(|i| i.label == cell.instance)
                .expect("cell instances come from this sweep");
            let policy = cfg
                .policies
                .iter()
                .find(|p| {
                    p.parse()
                        .map(|s| s.label == cell.policy)
                        .unwrap_or(false)
                })
                .expect("cell policies come from this sweep");
            let run = run_episode(instance, policy, cell.horizon, cell.seed)
                .map_err(|e| anyhow::anyhow!("trace replay failed: {e}"))?;
            let name = format!(
                "{}__{}__T{}__s{}.csv",
                sanitize(&cell.instance),
                sanitize(&cell.policy),
                cell.horizon,
                cell.seed
            );
            write_trace_csv(File::create(trace_dir.join(name))?, &run)?;
        }
        eprintln!("wrote {} trace file(s)", table.cells.len());
    }

    summarize(&table);
    Ok(if table.failures.is_empty() { 0 } else { 2 })
}

fn write_outputs(out_dir: &Path, table: &SweepTable) -> Result<()> {
    write_regret_csv(File::create(out_dir.join("regret.csv"))?, table)?;

    let rows = aggregate(table);
    std::fs::write(
        out_dir.join("aggregate.json"),
        format!("{}\n", serde_json::to_string_pretty(&rows)?),
    )?;

    let mut ranks = csv::Writer::from_writer(File::create(out_dir.join("ranks.csv"))?);
    ranks.write_record(["policy", "T", "mean_rank", "ci95"])?;
    for &horizon in &table.horizons {
        for row in average_rank(table, horizon) {
            ranks.write_record([
                row.policy.as_str(),
                &horizon.to_string(),
                &row.mean_rank.to_string(),
                &row.ci95.to_string(),
            ])?;
        }
    }
    ranks.flush()?;

    let mut wins = csv::Writer::from_writer(File::create(out_dir.join("win_rates.csv"))?);
    wins.write_record(["T", "policy", "opponent", "win_rate"])?;
    for &horizon in &table.horizons {
        let matrix = win_rate_matrix(table, horizon);
        for (i, p) in matrix.policies.iter().enumerate() {
            for (j, q) in matrix.policies.iter().enumerate() {
                if i != j {
                    wins.write_record([
                        &horizon.to_string(),
                        p.as_str(),
                        q.as_str(),
                        &matrix.rates[i][j].to_string(),
                    ])?;
                }
            }
        }
    }
    wins.flush()?;

    if !table.failures.is_empty() {
        std::fs::write(
            out_dir.join("failures.json"),
            format!("{}\n", serde_json::to_string_pretty(&table.failures)?),
        )?;
    }
    Ok(())
}

/// Reproducibility record: seeds, axes, and the noise configuration each
/// instance actually ran with.
fn write_run_meta(
    out_dir: &Path,
    cfg: &ExperimentConfig,
    instances: &[rising_bandits::env::Instance],
) -> Result<()> {
    let meta = serde_json::json!({
        "base_seed": cfg.base_seed,
        "replicates": cfg.replicates,
        "horizons": cfg.horizons,
        "policies": cfg.policies.iter().map(|p| {
            serde_json::json!({ "name": p.name, "label": p.label, "params": p.params })
        }).collect::<Vec<_>>(),
        "instances": instances.iter().map(|i| {
            serde_json::json!({
                "label": i.label,
                "sigma": i.sigma,
                "noise_family": i.noise_family.to_string(),
                "arms": i.k(),
            })
        }).collect::<Vec<_>>(),
    });
    std::fs::write(
        out_dir.join("run_meta.json"),
        format!("{}\n", serde_json::to_string_pretty(&meta)?),
    )?;
    Ok(())
}

fn summarize(table: &SweepTable) {
    for row in aggregate(table) {
        eprintln!(
            "T={:>6}  {:<12} mean_regret={:>12.3} +-{:>9.3}  mean_rank={:.2}",
            row.horizon, row.policy, row.mean_regret, row.ci95, row.mean_rank
        );
    }
    if !table.failures.is_empty() {
        eprintln!("{} cell(s) failed; see failures.json", table.failures.len());
    }
}
