pub mod bound;
pub mod generate;
pub mod run;
pub mod verify;

use rising_bandits::env::NoiseFamily;

/// CLI-facing mirror of the noise families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum NoiseArg {
    Gaussian,
    Bernoulli,
    None,
}

impl From<NoiseArg> for NoiseFamily {
    fn from(value: NoiseArg) -> Self {
        match value {
            NoiseArg::Gaussian => NoiseFamily::Gaussian,
            NoiseArg::Bernoulli => NoiseFamily::Bernoulli,
            NoiseArg::None => NoiseFamily::None,
        }
    }
}

/// Labels become file names; keep them path-safe.
pub fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
