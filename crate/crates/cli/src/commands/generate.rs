//! `generate`: write a batch of synthetic instances and a manifest.

use super::{sanitize, NoiseArg};
use crate::config::{Family, GenerateSpec};
use anyhow::{bail, Context, Result};
use serde_json::json;
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct GenerateArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    pub family: Family,

    /// Number of instances to generate.
    #[arg(long, default_value_t = 1)]
    pub count: u64,

    /// Generation horizon: saturation times and curve normalization refer
    /// to it.
    #[arg(long, visible_alias = "T", default_value_t = 50_000)]
    pub horizon: u64,

    /// Base seed; instance i derives its own stream from (seed, family, i).
    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Noise scale written into each instance.
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,

    /// Noise family written into each instance.
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    pub noise: NoiseArg,

    /// Output directory for the instance files and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: GenerateArgs) -> Result<i32> {
    if args.count == 0 {
        bail!("--count must be at least 1");
    }
    if args.family == Family::Intro && args.count != 1 {
        bail!("the intro family is a single fixed instance; use --count 1");
    }
    let spec = GenerateSpec {
        family: args.family,
        count: args.count,
        horizon: args.horizon,
        seed: args.seed,
        sigma: args.sigma,
        noise: args.noise.into(),
    };
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut files = Vec::with_capacity(args.count as usize);
    for index in 0..args.count {
        let instance = crate::config::generate_instance(&spec, index)?;
        let name = format!("{}.json", sanitize(&instance.label));
        instance
            .to_json_file(args.out.join(&name))
            .with_context(|| format!("writing {name}"))?;
        files.push(name);
    }
    let manifest = json!({
        "family": spec.family.to_string(),
        "count": spec.count,
        "T": spec.horizon,
        "seed": spec.seed,
        "sigma": spec.sigma,
        "noise_family": spec.noise.to_string(),
        "files": files,
    });
    let manifest_path = args.out.join("manifest.json");
    std::fs::write(
        &manifest_path,
        format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )
    .with_context(|| format!("writing {}", manifest_path.display()))?;
    eprintln!(
        "wrote {} {} instance(s) and manifest.json under {}",
        args.count,
        spec.family,
        args.out.display()
    );
    Ok(0)
}
