//! Sliding-window UCB: a non-stationary baseline that estimates each arm's
//! current mean over the last `tau` global rounds and adds a count-based
//! bonus. It tracks where rewards are now, not where they are going, so it
//! under-invests in arms that are still climbing.

use super::{argmax_lowest, Policy, PolicyError, PolicyState};
use std::collections::VecDeque;

/// Default window `2 * sqrt(T ln T)`.
pub fn sw_ucb_window(horizon: u64) -> f64 {
    let t = horizon as f64;
    2.0 * (t * t.ln()).sqrt()
}

#[derive(Debug, Clone)]
pub struct SwUcb {
    state: PolicyState,
    tau: f64,
    xi: f64,
    window: VecDeque<(usize, f64)>,
    win_sum: Vec<f64>,
    win_count: Vec<u64>,
}

impl SwUcb {
    /// `tau` defaults to [`sw_ucb_window`] of the horizon; `xi` is the bonus
    /// constant.
    pub fn new(k: usize, horizon: u64, tau: Option<f64>, xi: f64) -> Self {
        let tau = tau.unwrap_or_else(|| sw_ucb_window(horizon)).max(1.0);
        Self {
            state: PolicyState::new(k, horizon),
            tau,
            xi,
            window: VecDeque::new(),
            win_sum: vec![0.0; k],
            win_count: vec![0; k],
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn window_len(&self) -> usize {
        (self.tau.floor() as usize).max(1)
    }
}

impl Policy for SwUcb {
    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        self.state.check_can_select()?;
        let t = self.state.current_round();
        let k = self.state.k();
        if t <= k as u64 {
            return Ok((t - 1) as usize);
        }
        // Arms with no observation left in the window take priority.
        if let Some(arm) = (0..k).find(|&i| self.win_count[i] == 0) {
            return Ok(arm);
        }
        let log_term = (t as f64).min(self.tau).ln();
        let scores = (0..k).map(|i| {
            let n = self.win_count[i] as f64;
            self.win_sum[i] / n + (self.xi * log_term / n).sqrt()
        });
        Ok(argmax_lowest(scores).expect("k >= 1"))
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.state.record(arm, reward)?;
        self.window.push_back((arm, reward));
        self.win_sum[arm] += reward;
        self.win_count[arm] += 1;
        while self.window.len() > self.window_len() {
            let (old_arm, old_reward) = self.window.pop_front().expect("non-empty");
            self.win_sum[old_arm] -= old_reward;
            self.win_count[old_arm] -= 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_matches_the_formula() {
        // 2 * sqrt(50000 * ln 50000)
        assert!((sw_ucb_window(50_000) - 1471.0389719113687).abs() < 1e-9);
    }

    #[test]
    fn plays_each_arm_once_first() {
        let mut p = SwUcb::new(3, 100, None, 1.5);
        let mut picks = Vec::new();
        for _ in 0..3 {
            let arm = p.select().unwrap();
            picks.push(arm);
            p.observe(arm, 0.5).unwrap();
        }
        assert_eq!(picks, vec![0, 1, 2]);
    }

    #[test]
    fn evicted_arm_regains_priority() {
        // FIFO window of 3: arm 1's single observation (round 2) leaves the
        // window after round 5, and it must be selected next.
        let mut p = SwUcb::new(2, 100, Some(3.0), 1.5);
        for arm in [0usize, 1] {
            let got = p.select().unwrap();
            assert_eq!(got, arm);
            p.observe(arm, if arm == 0 { 1.0 } else { 0.0 }).unwrap();
        }
        for _ in 0..3 {
            let arm = p.select().unwrap();
            assert_eq!(arm, 0, "arm 0 dominates while both are in-window");
            p.observe(arm, 1.0).unwrap();
        }
        assert_eq!(p.win_count[1], 0);
        assert_eq!(p.select().unwrap(), 1);
    }

    /// Incremental window sums and counts always agree with recomputing
    /// them from scratch over the last `floor(tau)` rounds.
    #[test]
    fn window_bookkeeping_matches_naive_recomputation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for tau in [1.0, 2.0, 5.0, 17.0, 64.5] {
            let k = 3;
            let mut p = SwUcb::new(k, 10_000, Some(tau), 1.5);
            let mut log: Vec<(usize, f64)> = Vec::new();
            for _ in 0..300 {
                let arm = p.select().unwrap();
                let reward: f64 = rng.random();
                p.observe(arm, reward).unwrap();
                log.push((arm, reward));
                let w = tau.floor() as usize;
                let start = log.len().saturating_sub(w);
                for i in 0..k {
                    let naive: Vec<f64> = log[start..]
                        .iter()
                        .filter(|(a, _)| *a == i)
                        .map(|(_, r)| *r)
                        .collect();
                    assert_eq!(p.win_count[i], naive.len() as u64, "tau={tau}");
                    let sum: f64 = naive.iter().sum();
                    assert!((p.win_sum[i] - sum).abs() < 1e-9, "tau={tau}");
                }
            }
        }
    }

    #[test]
    fn prefers_the_better_windowed_mean() {
        let mut p = SwUcb::new(2, 1000, None, 1.5);
        for _ in 0..20 {
            let arm = p.select().unwrap();
            p.observe(arm, if arm == 0 { 0.9 } else { 0.1 }).unwrap();
        }
        let pulls0 = p.state().pulls(0);
        let pulls1 = p.state().pulls(1);
        assert!(pulls0 > pulls1, "{pulls0} vs {pulls1}");
    }
}
