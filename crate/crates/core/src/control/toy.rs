use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

use super::{Environment, StepOutcome};

/// One-dimensional distance keeping: the state is the distance error `e`,
/// the action shifts it by `-a`, the reward is `-e^2` after the move.
#[derive(Debug, Clone)]
pub struct ToyDistanceEnv {
    pub bound: f64,
    pub horizon: usize,
    pub init_range: f64,
    e: f64,
    t: usize,
}

impl Default for ToyDistanceEnv {
    fn default() -> Self {
        Self::new(0.2, 50, 1.0)
    }
}

impl ToyDistanceEnv {
    pub fn new(bound: f64, horizon: usize, init_range: f64) -> Self {
        Self {
            bound,
            horizon,
            init_range,
            e: 0.0,
            t: 0,
        }
    }

    pub fn error(&self) -> f64 {
        self.e
    }
}

impl Environment for ToyDistanceEnv {
    fn state_dim(&self) -> usize {
        1
    }

    fn action_bounds(&self) -> Vec<f64> {
        vec![self.bound]
    }

    fn reset(&mut self, seed: u64) -> Result<Vec<f64>> {
        let mut rng = rng_from_seed(seed);
        self.e = rng.gen_range(-self.init_range..=self.init_range);
        self.t = 0;
        Ok(vec![self.e])
    }

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome> {
        let &[a] = action else {
            return Err(Error::Contract(format!("toy env takes 1 action, got {}", action.len())));
        };
        self.e -= a.clamp(-self.bound, self.bound);
        self.t += 1;
        let truncated = self.t >= self.horizon;
        Ok(StepOutcome {
            state: vec![self.e],
            reward: -self.e * self.e,
            terminal: false,
            truncated,
            label: if truncated { "TimeLimit" } else { "Running" }.into(),
        })
    }
}
