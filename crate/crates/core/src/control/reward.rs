use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardParams {
    pub k_dist: f64,
    pub k_x: f64,
    pub alpha: f64,
    pub d_col_min: f64,
    pub x_target: f64,
    pub d_target: f64,
    /// Success band on |e_x|, pixels.
    pub success_px: f64,
    /// Success band on |e_d|, meters.
    pub success_m: f64,
    pub bonus: f64,
    pub min_ped_distance: f64,
    pub max_ped_distance: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        Self {
            k_dist: 10.0,
            k_x: 0.01,
            alpha: 1.0,
            d_col_min: 0.5,
            x_target: 173.0,
            d_target: 2.0,
            success_px: 1.0,
            success_m: 0.1,
            bonus: 500.0,
            min_ped_distance: 1.0,
            max_ped_distance: 3.0,
        }
    }
}

impl RewardParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k_dist", self.k_dist), ("k_x", self.k_x), ("alpha", self.alpha)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("reward.{name} must be >= 0, got {v}")));
            }
        }
        if !(self.d_col_min > 0.0) {
            return Err(Error::Parameter(format!(
                "reward.d_col_min must be > 0, got {}",
                self.d_col_min
            )));
        }
        if !(self.min_ped_distance < self.max_ped_distance) {
            return Err(Error::Parameter(
                "reward.min_ped_distance must be below reward.max_ped_distance".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardBranch {
    Success,
    Collision,
    DistanceBound,
    Shaped,
}

/// The branch that fires, checked in order success, collision, distance.
pub fn reward_branch(e_x: f64, e_d: f64, d_obs: f64, d_ped: f64, p: &RewardParams) -> RewardBranch {
    if e_x.abs() < p.success_px && e_d.abs() < p.success_m {
        RewardBranch::Success
    } else if d_obs <= p.d_col_min {
        RewardBranch::Collision
    } else if d_ped > p.max_ped_distance || d_ped < p.min_ped_distance {
        RewardBranch::DistanceBound
    } else {
        RewardBranch::Shaped
    }
}

/// `(reward, terminal)`. The success bonus does not end the episode.
pub fn compute_reward(e_x: f64, e_d: f64, d_obs: f64, d_ped: f64, p: &RewardParams) -> (f64, bool) {
    match reward_branch(e_x, e_d, d_obs, d_ped, p) {
        RewardBranch::Success => (p.bonus, false),
        RewardBranch::Collision | RewardBranch::DistanceBound => (-p.bonus, true),
        RewardBranch::Shaped => {
            let w = p.k_x / (1.0 + p.alpha * e_d * e_d);
            (-p.k_dist * e_d * e_d - w * e_x * e_x, false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p = RewardParams::default();
        assert_eq!(compute_reward(0.5, 0.05, 2.0, 2.0, &p), (500.0, false));
        assert_eq!(compute_reward(30.0, 0.3, 0.4, 2.3, &p), (-500.0, true));
        assert_eq!(compute_reward(30.0, 1.5, 2.0, 3.5, &p), (-500.0, true));
        let (r, t) = compute_reward(20.0, 0.5, 2.0, 2.5, &p);
        assert!((r + 5.7).abs() < 1e-12, "{r}");
        assert!(!t);
    }

    #[test]
    fn collision_boundary_is_inclusive() {
        let p = RewardParams::default();
        assert_eq!(reward_branch(10.0, 0.5, 0.5, 2.5, &p), RewardBranch::Collision);
        assert_eq!(reward_branch(10.0, 0.5, 0.5001, 2.5, &p), RewardBranch::Shaped);
    }

    proptest! {
        #[test]
        fn branch_order(e_x in -200.0..200.0f64, d_ped in 0.0..5.0f64, d_obs in 0.0..5.0f64) {
            let p = RewardParams::default();
            let e_d = d_ped - 2.0;
            let b = reward_branch(e_x, e_d, d_obs, d_ped, &p);
            let success = e_x.abs() < 1.0 && e_d.abs() < 0.1;
            let expected = if success {
                RewardBranch::Success
            } else if d_obs <= 0.5 {
                RewardBranch::Collision
            } else if !(1.0..=3.0).contains(&d_ped) {
                RewardBranch::DistanceBound
            } else {
                RewardBranch::Shaped
            };
            prop_assert_eq!(b, expected);
        }

        #[test]
        fn shaped_reward_non_positive(e_x in -200.0..200.0f64, e_d in -1.0..1.0f64) {
            let p = RewardParams::default();
            let (r, _) = compute_reward(e_x, e_d, 5.0, 2.0 + e_d, &p);
            if reward_branch(e_x, e_d, 5.0, 2.0 + e_d, &p) == RewardBranch::Shaped {
                prop_assert!(r <= 0.0);
                prop_assert_eq!(r == 0.0, e_x == 0.0 && e_d == 0.0);
            }
        }

        #[test]
        fn centering_weight_non_increasing(a in 0.0..2.0f64, b in 0.0..2.0f64, alpha in 0.0..5.0f64) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let w = |e: f64| 0.01 / (1.0 + alpha * e * e);
            prop_assert!(w(hi) <= w(lo));
        }
    }
}
