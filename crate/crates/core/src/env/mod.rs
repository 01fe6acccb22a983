//! Mean-reward curves, noise models, and problem instances.
//!
//! An arm's expected reward is a non-decreasing function `mu(n)` of its own
//! pull count `n`. Pull counts are 1-indexed; by convention `mu(0) = 0` for
//! every curve so that the first increment `gamma(0) = mu(1)` is always
//! defined (the deterministic index policies evaluate it on their first
//! post-initialization round).

mod generate;

pub use generate::{
    generate_concave_instance, generate_ltf_instance, generate_small_rising_instance,
    intro_instance, ConcaveGenError,
};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Shape family for the saturating concave curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcaveShape {
    /// `g(t) = (t/(t+k)) / (T/(T+k))`
    Rational,
    /// `g(t) = (1-e^{-kt}) / (1-e^{-kT})`
    Exponential,
    /// `g(t) = atan(kt) / atan(kT)`
    Arctangent,
}

impl ConcaveShape {
    pub const ALL: [ConcaveShape; 3] = [
        ConcaveShape::Rational,
        ConcaveShape::Exponential,
        ConcaveShape::Arctangent,
    ];

    /// Normalized growth profile: `g(0) = 0`, `g(t_ref) = 1`, concave and
    /// increasing in between.
    pub fn g(self, t: f64, rate: f64, t_ref: f64) -> f64 {
        match self {
            ConcaveShape::Rational => (t / (t + rate)) / (t_ref / (t_ref + rate)),
            // (1 - e^{-kt}) / (1 - e^{-kT}) via expm1 for small-k stability.
            ConcaveShape::Exponential => (-rate * t).exp_m1() / (-rate * t_ref).exp_m1(),
            ConcaveShape::Arctangent => (rate * t).atan() / (rate * t_ref).atan(),
        }
    }
}

impl fmt::Display for ConcaveShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcaveShape::Rational => write!(f, "rational"),
            ConcaveShape::Exponential => write!(f, "exponential"),
            ConcaveShape::Arctangent => write!(f, "arctangent"),
        }
    }
}

/// One arm's expected-reward function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MeanCurve {
    /// Flat reward `level` from the first pull on.
    Constant { level: f64 },
    /// Linear-then-flat: `min(cap, slope * n)`.
    Ltf { slope: f64, cap: f64 },
    /// Saturating curve `start + (limit - start) * g(n)`, with `g` normalized
    /// so `g(t_ref) = 1`. Evaluating past `t_ref` stays monotone and concave
    /// but may leave `[0, 1]`; validation catches that when asked.
    Concave {
        shape: ConcaveShape,
        start: f64,
        limit: f64,
        rate: f64,
        t_ref: u64,
    },
    /// Explicit per-pull means, `values[r-1] = mu(r)`. The only variant that
    /// may be non-concave; validation reports rather than rejects that.
    Tabulated { values: Vec<f64> },
}

impl MeanCurve {
    /// Expected reward on the `n`-th pull. `mean(0) = 0` for every variant.
    pub fn mean(&self, n: u64) -> Result<f64, EnvError> {
        if n == 0 {
            return Ok(0.0);
        }
        match self {
            MeanCurve::Constant { level } => Ok(*level),
            MeanCurve::Ltf { slope, cap } => Ok((slope * n as f64).min(*cap)),
            MeanCurve::Concave {
                shape,
                start,
                limit,
                rate,
                t_ref,
            } => Ok(start + (limit - start) * shape.g(n as f64, *rate, *t_ref as f64)),
            MeanCurve::Tabulated { values } => values
                .get((n - 1) as usize)
                .copied()
                .ok_or(EnvError::PullOutOfRange {
                    n,
                    len: values.len(),
                }),
        }
    }

    /// Per-pull gain `gamma(n) = mean(n+1) - mean(n)`.
    pub fn increment(&self, n: u64) -> Result<f64, EnvError> {
        Ok(self.mean(n + 1)? - self.mean(n)?)
    }

    /// Largest `n` for which `mean(n)` is defined (`u64::MAX` for the
    /// closed-form variants).
    pub fn max_pulls(&self) -> u64 {
        match self {
            MeanCurve::Tabulated { values } => values.len() as u64,
            _ => u64::MAX,
        }
    }
}

/// Reward noise attached to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    /// `mu(n) + sigma * Z`, unclipped: clipping would break the subgaussian
    /// tail the exploration bonus is calibrated against.
    Gaussian,
    /// `Bernoulli(mu(n))`; 1/2-subgaussian regardless of `sigma`.
    Bernoulli,
    /// Rewards equal means exactly.
    None,
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseFamily::Gaussian => write!(f, "gaussian"),
            NoiseFamily::Bernoulli => write!(f, "bernoulli"),
            NoiseFamily::None => write!(f, "none"),
        }
    }
}

/// A bandit problem: arm curves plus a noise model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub label: String,
    pub sigma: f64,
    pub noise_family: NoiseFamily,
    pub arms: Vec<MeanCurve>,
}

impl Instance {
    pub fn new(
        label: impl Into<String>,
        sigma: f64,
        noise_family: NoiseFamily,
        arms: Vec<MeanCurve>,
    ) -> Result<Self, EnvError> {
        if arms.is_empty() {
            return Err(EnvError::EmptyInstance);
        }
        Ok(Self {
            label: label.into(),
            sigma,
            noise_family,
            arms,
        })
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    fn arm(&self, arm: usize) -> Result<&MeanCurve, EnvError> {
        self.arms.get(arm).ok_or(EnvError::ArmOutOfRange {
            arm,
            k: self.arms.len(),
        })
    }

    pub fn mean(&self, arm: usize, n: u64) -> Result<f64, EnvError> {
        self.arm(arm)?.mean(n)
    }

    pub fn increment(&self, arm: usize, n: u64) -> Result<f64, EnvError> {
        self.arm(arm)?.increment(n)
    }

    /// Draw the reward for the `n`-th pull of `arm` (1-indexed).
    pub fn sample_reward<R: Rng + ?Sized>(
        &self,
        arm: usize,
        n: u64,
        rng: &mut R,
    ) -> Result<f64, EnvError> {
        if n == 0 {
            return Err(EnvError::ZeroPull);
        }
        let mean = self.arm(arm)?.mean(n)?;
        Ok(match self.noise_family {
            NoiseFamily::None => mean,
            NoiseFamily::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                mean + self.sigma * z
            }
            NoiseFamily::Bernoulli => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    /// True when episodes on this instance are noise-free.
    pub fn is_deterministic(&self) -> bool {
        matches!(self.noise_family, NoiseFamily::None)
            || (matches!(self.noise_family, NoiseFamily::Gaussian) && self.sigma == 0.0)
    }

    /// Copy with noise stripped; used by the checks that are stated for the
    /// deterministic reward setting.
    pub fn deterministic(&self) -> Instance {
        Instance {
            label: self.label.clone(),
            sigma: 0.0,
            noise_family: NoiseFamily::None,
            arms: self.arms.clone(),
        }
    }

    /// Sub-gaussian scale to use in exploration bonuses when the policy
    /// config does not pin one.
    pub fn bonus_sigma(&self) -> f64 {
        match self.noise_family {
            NoiseFamily::Gaussian => self.sigma,
            NoiseFamily::Bernoulli => 0.5,
            NoiseFamily::None => 0.0,
        }
    }

    pub fn validate(&self, t_max: u64) -> ValidationReport {
        validate_instance(self, t_max)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json_string(&self) -> Result<String, EnvError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_json_file(&self, path: impl AsRef<Path>) -> Result<(), EnvError> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Build a tabulated instance from a CSV file with one column per arm and
    /// row `r` holding `mu(r)`. A non-numeric first row is treated as a
    /// header.
    pub fn tabulated_from_csv_path(
        path: impl AsRef<Path>,
        label: impl Into<String>,
        sigma: f64,
        noise_family: NoiseFamily,
    ) -> Result<Self, EnvError> {
        let file = std::fs::File::open(path)?;
        Self::tabulated_from_csv(file, label, sigma, noise_family)
    }

    pub fn tabulated_from_csv<R: std::io::Read>(
        reader: R,
        label: impl Into<String>,
        sigma: f64,
        noise_family: NoiseFamily,
    ) -> Result<Self, EnvError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for (row_idx, record) in rdr.records().enumerate() {
            let record = record?;
            if record.is_empty() || (record.len() == 1 && record[0].is_empty()) {
                continue;
            }
            let parsed: Result<Vec<f64>, usize> = record
                .iter()
                .enumerate()
                .map(|(col, field)| field.parse::<f64>().map_err(|_| col))
                .collect();
            match parsed {
                Ok(values) => {
                    if columns.is_empty() {
                        columns = vec![Vec::new(); values.len()];
                    }
                    if values.len() != columns.len() {
                        return Err(EnvError::CsvShape {
                            row: row_idx + 1,
                            expected: columns.len(),
                            got: values.len(),
                        });
                    }
                    for (col, v) in values.into_iter().enumerate() {
                        columns[col].push(v);
                    }
                }
                Err(col) => {
                    // Only the very first row may be a header.
                    if row_idx == 0 && columns.is_empty() {
                        continue;
                    }
                    return Err(EnvError::CsvValue {
                        column: col + 1,
                        row: row_idx + 1,
                        value: record.get(col).unwrap_or("").to_string(),
                    });
                }
            }
        }
        let arms = columns
            .into_iter()
            .map(|values| MeanCurve::Tabulated { values })
            .collect();
        Instance::new(label, sigma, noise_family, arms)
    }
}

/// Checks an instance against the model assumptions on the integer grid
/// `[0, t_max]`. Violations are data, not errors: callers decide what to do.
pub fn validate_instance(instance: &Instance, t_max: u64) -> ValidationReport {
    let mut violations = Vec::new();
    if instance.k() < 2 {
        violations.push(Violation {
            arm: 0,
            n: 0,
            kind: ViolationKind::TooFewArms { k: instance.k() },
        });
    }
    for (arm, curve) in instance.arms.iter().enumerate() {
        let avail = curve.max_pulls();
        if avail < t_max {
            violations.push(Violation {
                arm,
                n: t_max,
                kind: ViolationKind::TableTooShort { len: avail },
            });
        }
        let hi = t_max.min(avail);
        let mut prev = 0.0; // mean(0)
        let mut prev_gamma: Option<f64> = None;
        for n in 1..=hi {
            let value = curve.mean(n).expect("within checked range");
            if !(-1e-12..=1.0 + 1e-12).contains(&value) {
                violations.push(Violation {
                    arm,
                    n,
                    kind: ViolationKind::OutOfBounds { value },
                });
            }
            if value < prev - 1e-12 {
                violations.push(Violation {
                    arm,
                    n: n - 1,
                    kind: ViolationKind::Decreasing {
                        at: prev,
                        next: value,
                    },
                });
            }
            // Non-increasing increments are required from gamma(1) on; the
            // synthetic first step gamma(0) = mu(1) is exempt.
            let gamma = value - prev;
            if n >= 2 {
                if let Some(pg) = prev_gamma {
                    if gamma > pg + 1e-12 {
                        violations.push(Violation {
                            arm,
                            n: n - 1,
                            kind: ViolationKind::IncreasingIncrement {
                                at: pg,
                                next: gamma,
                            },
                        });
                    }
                }
                prev_gamma = Some(gamma);
            }
            prev = value;
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub arm: usize,
    pub n: u64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    OutOfBounds { value: f64 },
    Decreasing { at: f64, next: f64 },
    IncreasingIncrement { at: f64, next: f64 },
    TableTooShort { len: u64 },
    TooFewArms { k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::OutOfBounds { value } => {
                write!(f, "arm {}: mean({}) = {} outside [0, 1]", self.arm, self.n, value)
            }
            ViolationKind::Decreasing { at, next } => write!(
                f,
                "arm {}: mean decreases at n={} ({} -> {})",
                self.arm, self.n, at, next
            ),
            ViolationKind::IncreasingIncrement { at, next } => write!(
                f,
                "arm {}: increment rises at n={} ({} -> {})",
                self.arm, self.n, at, next
            ),
            ViolationKind::TableTooShort { len } => write!(
                f,
                "arm {}: table covers {} pulls but {} are required",
                self.arm, len, self.n
            ),
            ViolationKind::TooFewArms { k } => {
                write!(f, "instance has {k} arm(s); at least 2 expected")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("pull count {n} out of range for tabulated curve of length {len}")]
    PullOutOfRange { n: u64, len: usize },
    #[error("arm {arm} out of range for instance with {k} arms")]
    ArmOutOfRange { arm: usize, k: usize },
    #[error("instance must have at least one arm")]
    EmptyInstance,
    #[error("pull counts are 1-indexed; cannot sample pull 0")]
    ZeroPull,
    #[error("horizon {horizon} below the minimum {min} for {family} generation")]
    HorizonTooSmall {
        family: &'static str,
        horizon: u64,
        min: u64,
    },
    #[error(transparent)]
    Generation(#[from] ConcaveGenError),
    #[error("csv row {row}: expected {expected} columns, got {got}")]
    CsvShape {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("csv column {column} row {row}: cannot parse {value:?} as a reward")]
    CsvValue {
        column: usize,
        row: usize,
        value: String,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
