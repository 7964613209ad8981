use serde::{Deserialize, Serialize};

use crate::world::{MAX_DV_STEP, MAX_DW_STEP};

/// Per-output bounds of the actor: `[|dv|, |dw|]`.
pub const ACTION_BOUNDS: [f64; 2] = [MAX_DV_STEP, MAX_DW_STEP];

/// Velocity increment applied over one 0.1 s control period.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub delta_v: f64,
    pub delta_w: f64,
}

impl Action {
    pub fn new(delta_v: f64, delta_w: f64) -> Self {
        Self { delta_v, delta_w }
    }

    /// First two components of `a`; missing components are zero.
    pub fn from_slice(a: &[f64]) -> Self {
        Self::new(
            a.first().copied().unwrap_or(0.0),
            a.get(1).copied().unwrap_or(0.0),
        )
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.delta_v, self.delta_w]
    }

    /// Componentwise clamp to the increment limits.
    pub fn clamped(self) -> Self {
        Self::new(
            self.delta_v.clamp(-MAX_DV_STEP, MAX_DV_STEP),
            self.delta_w.clamp(-MAX_DW_STEP, MAX_DW_STEP),
        )
    }

    pub fn within_limits(&self) -> bool {
        self.delta_v.abs() <= MAX_DV_STEP && self.delta_w.abs() <= MAX_DW_STEP
    }
}
