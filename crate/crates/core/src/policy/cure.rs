//! CURE-UCB: the horizon-aware index policy.
//!
//! The index of an arm at round `t` with `n` recorded pulls and window `h`
//! (requires `n >= 2h`) is the sum of three terms:
//!
//! 1. recent average: `(1/h) * sum_{l=n-h+1}^{n} X(l)`
//! 2. expected future cumulative gain:
//!    `((T-t)/2) * (1/h) * sum_{l=n-h+1}^{n} (X(l) - X(l-h)) / h`
//! 3. exploration bonus:
//!    `sigma * sqrt(2 * [3(T-t)^2 + 8h^2] * 3 ln t / (4 h^3))`
//!
//! Term 2 projects the windowed growth estimate over half of the remaining
//! horizon: the average height of a linear reward ramp played to the end.
//! Inside term 3, `3 ln t` is `log t^3` with the natural logarithm, and `t`
//! is the global round counter, not the arm's pull count.

use super::{argmax_lowest, ArmHistory, Policy, PolicyError, PolicyState};

/// Sliding-window width `max(1, floor(epsilon * n))`. The clamp keeps the
/// window usable right after the double initialization; for `epsilon < 0.5`
/// it also guarantees `2h <= n` whenever `n >= 2`.
pub fn window_size(n: u64, epsilon: f64) -> u64 {
    ((epsilon * n as f64).floor() as u64).max(1)
}

/// Exploration bonus (term 3 of the index).
pub fn exploration_bonus(t: u64, horizon: u64, sigma: f64, h: u64) -> f64 {
    let look = horizon.saturating_sub(t) as f64;
    let hf = h as f64;
    let log_t_cubed = 3.0 * (t as f64).ln();
    sigma * ((2.0 * (3.0 * look * look + 8.0 * hf * hf) * log_t_cubed) / (4.0 * hf * hf * hf)).sqrt()
}

/// Full index of one arm. Errors rather than truncating when the history
/// cannot support the window.
pub fn cure_index(
    hist: &ArmHistory,
    t: u64,
    horizon: u64,
    sigma: f64,
    h: u64,
) -> Result<f64, PolicyError> {
    let n = hist.pulls();
    if h == 0 || n < 2 * h {
        return Err(PolicyError::WindowTooWide {
            arm: usize::MAX,
            required: 2 * h.max(1),
            available: n,
        });
    }
    if t > horizon {
        return Err(PolicyError::HorizonExhausted { round: t, horizon });
    }
    let hf = h as f64;
    let recent = hist.window_sum(n - h, n);
    let lagged = hist.window_sum(n - 2 * h, n - h);
    let look = (horizon - t) as f64;
    let recent_average = recent / hf;
    let future_gain = (look / 2.0) * (recent - lagged) / (hf * hf);
    Ok(recent_average + future_gain + exploration_bonus(t, horizon, sigma, h))
}

/// Configuration for [`CureUcb`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CureConfig {
    /// Window fraction in (0, 0.5).
    pub epsilon: f64,
    /// Subgaussian scale used by the bonus.
    pub sigma: f64,
    /// Force `h = 1` (the window used by the deterministic analysis).
    pub deterministic_h1: bool,
}

impl Default for CureConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.25,
            sigma: 0.0,
            deterministic_h1: false,
        }
    }
}

/// The stochastic policy: play every arm twice, then follow the index.
#[derive(Debug, Clone)]
pub struct CureUcb {
    cfg: CureConfig,
    state: PolicyState,
}

impl CureUcb {
    pub fn new(k: usize, horizon: u64, cfg: CureConfig) -> Result<Self, PolicyError> {
        if !(cfg.epsilon > 0.0 && cfg.epsilon < 0.5) {
            return Err(PolicyError::InvalidParams {
                name: "cure_ucb".into(),
                message: format!("epsilon must lie in (0, 0.5), got {}", cfg.epsilon),
            });
        }
        if horizon < 2 * k as u64 {
            return Err(PolicyError::InvalidParams {
                name: "cure_ucb".into(),
                message: format!(
                    "horizon {horizon} cannot fit the double initialization of {k} arms"
                ),
            });
        }
        Ok(Self {
            cfg,
            state: PolicyState::new(k, horizon),
        })
    }

    fn window_for(&self, arm: usize) -> u64 {
        if self.cfg.deterministic_h1 {
            1
        } else {
            window_size(self.state.pulls(arm), self.cfg.epsilon)
        }
    }
}

impl Policy for CureUcb {
    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        self.state.check_can_select()?;
        let t = self.state.current_round();
        let k = self.state.k() as u64;
        if t <= 2 * k {
            return Ok(((t - 1) % k) as usize);
        }
        let mut scores = Vec::with_capacity(self.state.k());
        for arm in 0..self.state.k() {
            let h = self.window_for(arm);
            let idx = cure_index(
                self.state.history(arm),
                t,
                self.state.horizon(),
                self.cfg.sigma,
                h,
            )
            .map_err(|e| match e {
                PolicyError::WindowTooWide {
                    required,
                    available,
                    ..
                } => PolicyError::WindowTooWide {
                    arm,
                    required,
                    available,
                },
                other => other,
            })?;
            scores.push(idx);
        }
        Ok(argmax_lowest(scores).expect("k >= 1"))
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.state.record(arm, reward)
    }
}
