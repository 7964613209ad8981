use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: Vec<f64>,
    pub reward: f64,
    /// Episode ended in a state whose value should not be bootstrapped.
    pub terminal: bool,
    /// Episode ended for a reason unrelated to the state (time limit).
    pub truncated: bool,
    /// Short status label recorded in training logs.
    pub label: String,
}

impl StepOutcome {
    pub fn done(&self) -> bool {
        self.terminal || self.truncated
    }
}

/// Episodic environment with continuous bounded actions.
pub trait Environment {
    fn state_dim(&self) -> usize;

    /// Symmetric bound per action component.
    fn action_bounds(&self) -> Vec<f64>;

    fn action_dim(&self) -> usize {
        self.action_bounds().len()
    }

    fn reset(&mut self, seed: u64) -> Result<Vec<f64>>;

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome>;
}
