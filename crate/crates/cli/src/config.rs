//! Experiment configuration file: instances, policies, horizons, replicates.

use anyhow::{bail, Context, Result};
use rising_bandits::env::{
    generate_concave_instance, generate_ltf_instance, intro_instance, Instance, NoiseFamily,
};
use rising_bandits::policy::PolicyConfig;
use rising_bandits::util::derive_seed;
use serde::Deserialize;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_seed: u64,
    pub instances: Vec<InstanceSource>,
    pub policies: Vec<PolicyConfig>,
    pub horizons: Vec<u64>,
    #[serde(default = "one")]
    pub replicates: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Applied to every instance after loading/generation.
    #[serde(default)]
    pub noise_override: Option<NoiseOverride>,
    /// Also write per-episode reward traces.
    #[serde(default)]
    pub write_traces: bool,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseOverride {
    pub sigma: f64,
    pub family: NoiseFamily,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum InstanceSource {
    /// Path to an instance JSON file (or a CSV of tabulated curves).
    File(PathBuf),
    /// Inline instance object.
    Inline(Instance),
    /// Generate a batch on the fly.
    Generate(GenerateSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub family: Family,
    #[serde(default = "one")]
    pub count: u64,
    pub horizon: u64,
    pub seed: u64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_noise")]
    pub noise: NoiseFamily,
}

/// Noise level for stochastic synthetic runs when none is specified.
pub fn default_sigma() -> f64 {
    0.1
}

pub fn default_noise() -> NoiseFamily {
    NoiseFamily::Gaussian
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Family {
    Ltf,
    Concave,
    Intro,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Ltf => write!(f, "ltf"),
            Family::Concave => write!(f, "concave"),
            Family::Intro => write!(f, "intro"),
        }
    }
}

/// Generate the `index`-th instance of a batch, deterministically in
/// `(seed, index)`.
pub fn generate_instance(spec: &GenerateSpec, index: u64) -> Result<Instance> {
    let label = format!("{}-T{}-s{}-{index:03}", spec.family, spec.horizon, spec.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        spec.seed,
        &[spec.family.to_string().as_bytes(), &index.to_le_bytes()],
    ));
    let instance = match spec.family {
        Family::Ltf => {
            generate_ltf_instance(&mut rng, spec.horizon, spec.sigma, spec.noise, label)?
        }
        Family::Concave => {
            generate_concave_instance(&mut rng, spec.horizon, spec.sigma, spec.noise, label)?
        }
        Family::Intro => {
            let mut inst = intro_instance(spec.sigma, spec.noise);
            inst.label = label;
            inst
        }
    };
    Ok(instance)
}

pub fn load_instance_file(path: &Path) -> Result<Instance> {
    if !path.exists() {
        bail!("instance file {} does not exist", path.display());
    }
    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    let instance = if is_csv {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "tabulated".into());
        Instance::tabulated_from_csv_path(path, label, 0.0, NoiseFamily::None)
            .with_context(|| format!("loading {}", path.display()))?
    } else {
        Instance::from_json_file(path).with_context(|| format!("loading {}", path.display()))?
    };
    Ok(instance)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            bail!("config lists no instances");
        }
        if self.policies.is_empty() {
            bail!("config lists no policies");
        }
        if self.horizons.is_empty() {
            bail!("config lists no horizons");
        }
        if !self.horizons.windows(2).all(|w| w[0] < w[1]) {
            bail!("horizons must be strictly ascending");
        }
        if self.replicates < 1 {
            bail!("replicates must be at least 1");
        }
        for policy in &self.policies {
            policy
                .parse()
                .with_context(|| format!("policy {:?}", policy.name))?;
        }
        Ok(())
    }

    /// Materialize every instance source, applying the noise override.
    pub fn load_instances(&self, config_dir: &Path) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        for source in &self.instances {
            match source {
                InstanceSource::File(path) => {
                    let resolved = if path.is_relative() {
                        config_dir.join(path)
                    } else {
                        path.clone()
                    };
                    out.push(load_instance_file(&resolved)?);
                }
                InstanceSource::Inline(instance) => out.push(instance.clone()),
                InstanceSource::Generate(spec) => {
                    for index in 0..spec.count {
                        out.push(generate_instance(spec, index)?);
                    }
                }
            }
        }
        if let Some(noise) = &self.noise_override {
            for inst in &mut out {
                inst.sigma = noise.sigma;
                inst.noise_family = noise.family;
            }
        }
        Ok(out)
    }
}
