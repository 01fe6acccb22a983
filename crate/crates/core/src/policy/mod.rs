//! Policy state machines.
//!
//! A policy interacts with the runner through a strict select/observe loop:
//! at round `t` it names an arm, the runner samples a reward for that arm's
//! next pull, and the observation is fed back before the next round. Policies
//! never see the instance's mean curves; everything they know comes from
//! their own observation histories (the fixed-arm oracle is the deliberate
//! exception and is configured from outside).

mod cure;
mod deterministic;
mod oracle;
mod rexp3;
mod sliding_window;

pub use cure::{cure_index, exploration_bonus, window_size, CureConfig, CureUcb};
pub use deterministic::{det_cure_index, det_red_index, DetIndexPolicy, DetVariant};
pub use oracle::FixedArmPolicy;
pub use rexp3::{rexp3_schedule, Rexp3, Rexp3Schedule};
pub use sliding_window::{sw_ucb_window, SwUcb};

use serde::Deserialize;
use thiserror::Error;

/// Observations of a single arm, in pull order, with prefix sums so windowed
/// averages cost O(1).
#[derive(Debug, Clone, Default)]
pub struct ArmHistory {
    observations: Vec<f64>,
    prefix: Vec<f64>,
}

impl ArmHistory {
    pub fn new() -> Self {
        Self {
            observations: Vec::new(),
            prefix: vec![0.0],
        }
    }

    pub fn pulls(&self) -> u64 {
        self.observations.len() as u64
    }

    /// Observation of the `l`-th pull, 1-indexed.
    pub fn observation(&self, l: u64) -> Option<f64> {
        if l == 0 {
            None
        } else {
            self.observations.get((l - 1) as usize).copied()
        }
    }

    pub fn last(&self) -> Option<f64> {
        self.observations.last().copied()
    }

    pub fn push(&mut self, x: f64) {
        self.observations.push(x);
        self.prefix.push(self.prefix.last().expect("non-empty") + x);
    }

    /// Sum of observations with 1-indexed pull numbers in `(lo, hi]`.
    pub fn window_sum(&self, lo: u64, hi: u64) -> f64 {
        debug_assert!(lo <= hi && hi <= self.pulls());
        self.prefix[hi as usize] - self.prefix[lo as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().copied()
    }
}

/// Round counter plus per-arm histories; the state every policy carries.
#[derive(Debug, Clone)]
pub struct PolicyState {
    k: usize,
    horizon: u64,
    rounds: u64,
    histories: Vec<ArmHistory>,
}

impl PolicyState {
    pub fn new(k: usize, horizon: u64) -> Self {
        Self {
            k,
            horizon,
            rounds: 0,
            histories: vec![ArmHistory::new(); k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Rounds already completed (observations recorded).
    pub fn rounds_completed(&self) -> u64 {
        self.rounds
    }

    /// The 1-indexed round about to be played.
    pub fn current_round(&self) -> u64 {
        self.rounds + 1
    }

    pub fn history(&self, arm: usize) -> &ArmHistory {
        &self.histories[arm]
    }

    pub fn pulls(&self, arm: usize) -> u64 {
        self.histories[arm].pulls()
    }

    /// Guard shared by every `select` implementation.
    fn check_can_select(&self) -> Result<(), PolicyError> {
        if self.rounds >= self.horizon {
            return Err(PolicyError::HorizonExhausted {
                round: self.current_round(),
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    fn record(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        if arm >= self.k {
            return Err(PolicyError::ArmOutOfRange { arm, k: self.k });
        }
        self.histories[arm].push(reward);
        self.rounds += 1;
        debug_assert_eq!(
            self.rounds,
            self.histories.iter().map(|h| h.pulls()).sum::<u64>()
        );
        Ok(())
    }
}

/// The select/observe contract every policy implements.
pub trait Policy: Send {
    fn state(&self) -> &PolicyState;

    /// Choose the arm to play at the current round.
    fn select(&mut self) -> Result<usize, PolicyError>;

    /// Feed back the reward observed for `arm`.
    fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError>;
}

/// Lowest-index argmax: the deterministic tie-break used everywhere.
pub(crate) fn argmax_lowest(scores: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("select called at round {round} but the horizon is {horizon}")]
    HorizonExhausted { round: u64, horizon: u64 },
    #[error("arm {arm} out of range for {k} arms")]
    ArmOutOfRange { arm: usize, k: usize },
    #[error("arm {arm}: index window needs {required} observations but only {available} exist")]
    WindowTooWide {
        arm: usize,
        required: u64,
        available: u64,
    },
    #[error("deterministic index needs at least one pull")]
    EmptyHistory,
    #[error("unknown policy {name:?}")]
    UnknownPolicy { name: String },
    #[error("policy {name}: {message}")]
    InvalidParams { name: String, message: String },
    #[error("policy {name} is defined for deterministic rewards; instance has noise")]
    RequiresDeterministic { name: String },
    #[error("policy {name}: bad config: {source}")]
    BadConfig {
        name: String,
        source: serde_json::Error,
    },
}

/// One policy block of an experiment config: `{name, label?, params?}`.
/// Unknown parameter keys are rejected so typos fail fast.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub name: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "empty_params")]
    pub params: serde_json::Value,
}

fn empty_params() -> serde_json::Value {
    serde_json::Value::Object(serde_json::Map::new())
}

impl PolicyConfig {
    pub fn bare(name: &str) -> Self {
        Self {
            name: name.to_string(),
            label: None,
            params: empty_params(),
        }
    }

    pub fn with_params(name: &str, params: serde_json::Value) -> Self {
        Self {
            name: name.to_string(),
            label: None,
            params,
        }
    }

    pub fn parse(&self) -> Result<PolicySpec, PolicyError> {
        let label = self.label.clone().unwrap_or_else(|| self.name.clone());
        let kind = match self.name.as_str() {
            "cure_ucb" => {
                let p: CureParams = self.params_as()?;
                let epsilon = p.epsilon.unwrap_or(0.25);
                if !(epsilon > 0.0 && epsilon < 0.5) {
                    return Err(PolicyError::InvalidParams {
                        name: self.name.clone(),
                        message: format!("epsilon must lie in (0, 0.5), got {epsilon}"),
                    });
                }
                PolicyKind::CureUcb {
                    epsilon,
                    sigma: p.sigma,
                    deterministic_h1: p.deterministic_h1.unwrap_or(false),
                }
            }
            "det_cure" => {
                self.params_as::<NoParams>()?;
                PolicyKind::DetCure
            }
            "det_red" => {
                self.params_as::<NoParams>()?;
                PolicyKind::DetRed
            }
            "sw_ucb" => {
                let p: SwParams = self.params_as()?;
                if let Some(tau) = p.tau {
                    if tau < 1.0 || tau.is_nan() {
                        return Err(PolicyError::InvalidParams {
                            name: self.name.clone(),
                            message: format!("tau must be at least 1, got {tau}"),
                        });
                    }
                }
                PolicyKind::SwUcb {
                    tau: p.tau,
                    xi: p.xi.unwrap_or(1.5),
                }
            }
            "rexp3" => {
                self.params_as::<NoParams>()?;
                PolicyKind::Rexp3
            }
            "oracle" => {
                self.params_as::<NoParams>()?;
                PolicyKind::Oracle
            }
            _ => {
                return Err(PolicyError::UnknownPolicy {
                    name: self.name.clone(),
                })
            }
        };
        Ok(PolicySpec { label, kind })
    }

    fn params_as<T: serde::de::DeserializeOwned>(&self) -> Result<T, PolicyError> {
        serde_json::from_value(self.params.clone()).map_err(|source| PolicyError::BadConfig {
            name: self.name.clone(),
            source,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CureParams {
    epsilon: Option<f64>,
    sigma: Option<f64>,
    deterministic_h1: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SwParams {
    tau: Option<f64>,
    xi: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

/// Validated policy description, still independent of any instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub label: String,
    pub kind: PolicyKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    CureUcb {
        epsilon: f64,
        /// Bonus scale; defaults to the instance's subgaussian scale.
        sigma: Option<f64>,
        deterministic_h1: bool,
    },
    DetCure,
    DetRed,
    SwUcb {
        tau: Option<f64>,
        xi: f64,
    },
    Rexp3,
    Oracle,
}

impl PolicyKind {
    /// Whether the policy's contract requires noise-free rewards.
    pub fn requires_deterministic(&self) -> bool {
        matches!(self, PolicyKind::DetCure | PolicyKind::DetRed)
    }
}
