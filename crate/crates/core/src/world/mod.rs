//! Deterministic 2D world: kinematics, map, pedestrian, LIDAR and termination.

mod kinematics;
mod lidar;
mod map;
mod pedestrian;
mod termination;

pub use kinematics::{
    body_to_wheel, clamp_increments, step_kinematics, wheel_to_body, wrap_angle, RobotPose,
    VelocityCommand, WheelRates, MAX_DV_STEP, MAX_DW_STEP, OMEGA_MAX, TWIST_EPS, V_MAX,
};
pub use lidar::{lidar_scan, ray_rect_distance, LidarConfig, LidarScan};
pub use map::{PathSpec, Rect, SpawnPose, WorldMap};
pub use pedestrian::{PedestrianPath, PedestrianPose, ARC_TABLE_SAMPLES};
pub use termination::{check_termination, TerminationLimits, TerminationStatus, WorldSnapshot};
