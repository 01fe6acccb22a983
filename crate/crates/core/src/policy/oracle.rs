//! Evaluation-only policy that plays one pre-computed arm every round. The
//! episode runner wires it to the horizon-optimal arm of the instance under
//! test, turning measured regret into a zero baseline.

use super::{Policy, PolicyError, PolicyState};

#[derive(Debug, Clone)]
pub struct FixedArmPolicy {
    state: PolicyState,
    arm: usize,
}

impl FixedArmPolicy {
    pub fn new(k: usize, horizon: u64, arm: usize) -> Result<Self, PolicyError> {
        if arm >= k {
            return Err(PolicyError::ArmOutOfRange { arm, k });
        }
        Ok(Self {
            state: PolicyState::new(k, horizon),
            arm,
        })
    }
}

impl Policy for FixedArmPolicy {
    fn state(&self) -> &PolicyState {
        &self.state
    }

    fn select(&mut self) -> Result<usize, PolicyError> {
        self.state.check_can_select()?;
        Ok(self.arm)
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.state.record(arm, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn always_plays_the_configured_arm() {
        let mut p = FixedArmPolicy::new(3, 5, 2).unwrap();
        for _ in 0..5 {
            let arm = p.select().unwrap();
            assert_eq!(arm, 2);
            p.observe(arm, 0.1).unwrap();
        }
        assert!(p.select().is_err());
    }

    #[test]
    fn arm_must_exist() {
        assert!(FixedArmPolicy::new(2, 5, 2).is_err());
        assert!(FixedArmPolicy::new(1, 5, 0).is_ok());
    }
}
