//! Rexp3: adversarial Exp3 restarted on a fixed epoch schedule, the
//! restart-based non-stationary baseline.

use super::{Policy, PolicyError, PolicyState};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Epoch length and exploration rate tuned for a total-variation budget of
/// `V_T = K`:
/// `delta = ceil((K ln K)^{1/3} (T / V_T)^{2/3})`,
/// `gamma = min(1, sqrt(K ln K / ((e - 1) delta)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rexp3Schedule {
    pub epoch_len: u64,
    pub gamma: f64,
}

pub fn rexp3_schedule(k: usize, horizon: u64) -> Rexp3Schedule {
    let kf = k as f64;
    let k_log_k = kf * kf.ln();
    let variation = kf; // V_T = K
    let epoch_len = (k_log_k.powf(1.0 / 3.0) * (horizon as f64 / variation).powf(2.0 / 3.0))
        .ceil()
        .max(1.0) as u64;
    let gamma = (k_log_k / ((std::f64::consts::E - 1.0) * epoch_len as f64))
        .sqrt()
        .min(1.0);
    Rexp3Schedule { epoch_len, gamma }
}

#[derive(Debug, Clone)]
pub struct Rexp3 {
    state: PolicyState,
    schedule: Rexp3Schedule,
    weights: Vec<f64>,
    probs: Vec<f64>,
    rng: ChaCha8Rng,
}

impl Rexp3 {
    pub fn new(k: usize, horizon: u64, rng: ChaCha8Rng) -> Self {
        let schedule = rexp3_schedule(k, horizon);
        Self {
            state: PolicyState::new(k, horizon),
            schedule,
            weights: vec![1.0; k],
            probs: vec![1.0 / k as f64; k],
            rng,
        }
    }

    pub fn schedule(&self) -> Rexp3Schedule {
        self.schedule
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn refresh_probs(&mut self) {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        let gamma = self.schedule.gamma;
        for (p, w) in self.probs.iter_mut().zip(&self.weights) {
            *p = (1.0 - gamma) * (w / total) + gamma / k;
        }
    }
}

impl Policy for Rexp3 {
    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        self.state.check_can_select()?;
        if self
            .state
            .rounds_completed()
            .is_multiple_of(self.schedule.epoch_len)
        {
            self.weights.fill(1.0);
        }
        self.refresh_probs();
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        for (arm, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return Ok(arm);
            }
        }
        Ok(self.probs.len() - 1)
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.state.record(arm, reward)?;
        // Importance weighting assumes bounded payoffs; unclipped Gaussian
        // samples can stray outside [0, 1].
        let x = reward.clamp(0.0, 1.0);
        let k = self.weights.len() as f64;
        let est = x / self.probs[arm];
        self.weights[arm] *= (self.schedule.gamma * est / k).exp();
        // Renormalize so long epochs cannot overflow; probabilities are
        // scale-invariant in the weights.
        let total: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w /= total;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn schedule_matches_the_formula() {
        let s = rexp3_schedule(2, 50_000);
        assert_eq!(s.epoch_len, 954);
        assert!((s.gamma - 0.029080799515437968).abs() < 1e-12);
    }

    #[test]
    fn gamma_never_exceeds_one() {
        for k in 1..=6 {
            for horizon in [10u64, 100, 1000, 50_000] {
                assert!(rexp3_schedule(k, horizon).gamma <= 1.0);
            }
        }
    }

    #[test]
    fn weights_are_equal_right_after_an_epoch_reset() {
        let mut p = Rexp3::new(2, 10_000, ChaCha8Rng::seed_from_u64(5));
        let epoch = p.schedule().epoch_len;
        for round in 0..epoch {
            let arm = p.select().unwrap();
            p.observe(arm, if arm == 0 { 1.0 } else { 0.0 }).unwrap();
            if round == epoch - 1 {
                continue;
            }
        }
        let before: Vec<f64> = p.weights().to_vec();
        assert!(
            (before[0] - before[1]).abs() > 1e-12,
            "weights should have separated inside the epoch"
        );
        // First select of the new epoch resets.
        let _ = p.select().unwrap();
        let after = p.weights();
        assert_eq!(after[0], after[1]);
    }

    #[test]
    fn replay_is_deterministic_for_a_fixed_seed() {
        let run = |seed| {
            let mut p = Rexp3::new(3, 500, ChaCha8Rng::seed_from_u64(seed));
            (0..500)
                .map(|_| {
                    let arm = p.select().unwrap();
                    p.observe(arm, 0.25 * arm as f64).unwrap();
                    arm
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn rewards_outside_unit_interval_are_clipped_not_fatal() {
        let mut p = Rexp3::new(2, 100, ChaCha8Rng::seed_from_u64(1));
        for _ in 0..50 {
            let arm = p.select().unwrap();
            let reward = if arm == 0 { 1.7 } else { -0.3 };
            p.observe(arm, reward).unwrap();
        }
        assert!(p.weights().iter().all(|w| w.is_finite() && *w > 0.0));
    }
}
