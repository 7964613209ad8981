use std::fmt;

use serde::{Deserialize, Serialize};

/// Episode status after a control tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminationStatus {
    Running,
    GoalReached,
    FeatureLost,
    DistanceBound,
    ObstacleTooClose,
}

impl TerminationStatus {
    pub fn is_terminal(self) -> bool {
        self != TerminationStatus::Running
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TerminationStatus::Running => "Running",
            TerminationStatus::GoalReached => "GoalReached",
            TerminationStatus::FeatureLost => "FeatureLost",
            TerminationStatus::DistanceBound => "DistanceBound",
            TerminationStatus::ObstacleTooClose => "ObstacleTooClose",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            TerminationStatus::Running,
            TerminationStatus::GoalReached,
            TerminationStatus::FeatureLost,
            TerminationStatus::DistanceBound,
            TerminationStatus::ObstacleTooClose,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
    }
}

impl fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerminationLimits {
    /// Longest tolerated detection gap (s).
    pub max_lost: f64,
    pub min_ped_distance: f64,
    pub max_ped_distance: f64,
    pub min_obstacle_distance: f64,
}

impl Default for TerminationLimits {
    fn default() -> Self {
        Self {
            max_lost: 4.0,
            min_ped_distance: 1.0,
            max_ped_distance: 3.0,
            min_obstacle_distance: 0.5,
        }
    }
}

/// The quantities termination depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldSnapshot {
    /// Pedestrian clock (s) and the length of the walk.
    pub ped_clock: f64,
    pub duration: f64,
    pub lost_duration: f64,
    pub d_ped: f64,
    pub d_obs: f64,
}

/// First matching condition, in order: goal, lost feature, distance, obstacle.
pub fn check_termination(snap: &WorldSnapshot, limits: &TerminationLimits) -> TerminationStatus {
    if snap.ped_clock >= snap.duration {
        TerminationStatus::GoalReached
    } else if snap.lost_duration > limits.max_lost {
        TerminationStatus::FeatureLost
    } else if snap.d_ped > limits.max_ped_distance || snap.d_ped < limits.min_ped_distance {
        TerminationStatus::DistanceBound
    } else if snap.d_obs < limits.min_obstacle_distance {
        TerminationStatus::ObstacleTooClose
    } else {
        TerminationStatus::Running
    }
}
