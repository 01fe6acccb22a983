//! Deterministic single-step-window variants for the noise-free setting.
//!
//! Both policies round-robin once through the arms and then follow an index
//! built from the last observed reward `mu(n)` and the last observed
//! increment `gamma(n-1) = mu(n) - mu(n-1)` (with `mu(0) = 0`):
//!
//! - horizon-aware:    `mu(n) + ((T - t) / 2) * gamma(n-1)`
//! - slope-tracking:   `mu(n) + (t - n) * gamma(n-1)`
//!
//! The first weighs growth by the remaining budget; the second extrapolates
//! to the current round number regardless of how much budget is left, which
//! is what makes it overshoot on short horizons.

use super::{argmax_lowest, Policy, PolicyError, PolicyState};

/// Which deterministic index to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetVariant {
    /// Horizon-aware index (deterministic CURE-UCB).
    Cure,
    /// Horizon-agnostic slope extrapolation (deterministic R-ed-UCB).
    Red,
}

impl DetVariant {
    pub fn policy_name(self) -> &'static str {
        match self {
            DetVariant::Cure => "det_cure",
            DetVariant::Red => "det_red",
        }
    }
}

/// Horizon-aware deterministic index. `mean_prev` is `mu(n-1)`, zero when
/// `n = 1`.
pub fn det_cure_index(
    mean_n: f64,
    mean_prev: f64,
    n: u64,
    t: u64,
    horizon: u64,
) -> Result<f64, PolicyError> {
    if n == 0 {
        return Err(PolicyError::EmptyHistory);
    }
    let look = horizon.saturating_sub(t) as f64;
    Ok(mean_n + (look / 2.0) * (mean_n - mean_prev))
}

/// Horizon-agnostic deterministic index.
pub fn det_red_index(mean_n: f64, mean_prev: f64, n: u64, t: u64) -> Result<f64, PolicyError> {
    if n == 0 {
        return Err(PolicyError::EmptyHistory);
    }
    Ok(mean_n + (t.saturating_sub(n)) as f64 * (mean_n - mean_prev))
}

/// Policy wrapper driving either deterministic index.
#[derive(Debug, Clone)]
pub struct DetIndexPolicy {
    variant: DetVariant,
    state: PolicyState,
}

impl DetIndexPolicy {
    pub fn new(variant: DetVariant, k: usize, horizon: u64) -> Self {
        Self {
            variant,
            state: PolicyState::new(k, horizon),
        }
    }

    fn index(&self, arm: usize, t: u64) -> Result<f64, PolicyError> {
        let hist = self.state.history(arm);
        let n = hist.pulls();
        let mean_n = hist.last().ok_or(PolicyError::EmptyHistory)?;
        let mean_prev = if n >= 2 {
            hist.observation(n - 1).expect("n-1 >= 1")
        } else {
            0.0
        };
        match self.variant {
            DetVariant::Cure => det_cure_index(mean_n, mean_prev, n, t, self.state.horizon()),
            DetVariant::Red => det_red_index(mean_n, mean_prev, n, t),
        }
    }
}

impl Policy for DetIndexPolicy {
    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        self.state.check_can_select()?;
        let t = self.state.current_round();
        let k = self.state.k() as u64;
        if t <= k {
            // Round-robin `(t mod K) + 1` in 1-based arm ids.
            return Ok((t % k) as usize);
        }
        let scores: Result<Vec<f64>, PolicyError> =
            (0..self.state.k()).map(|arm| self.index(arm, t)).collect();
        Ok(argmax_lowest(scores?).expect("k >= 1"))
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.state.record(arm, reward)
    }
}
