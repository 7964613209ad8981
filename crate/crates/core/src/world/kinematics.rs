use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::control::Action;
use crate::error::{Error, Result};

/// Upper bound on the linear speed command (m/s).
pub const V_MAX: f64 = 1.0;
/// Bound on |angular speed command| (rad/s).
pub const OMEGA_MAX: f64 = 0.5;
/// Largest linear speed change per 0.1 s control tick (m/s).
pub const MAX_DV_STEP: f64 = 0.2;
/// Largest angular speed change per 0.1 s control tick (rad/s).
pub const MAX_DW_STEP: f64 = 0.5;
/// Below this |omega| the pose is integrated as a straight segment.
pub const TWIST_EPS: f64 = 1e-8;

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = a - two_pi * ((a - PI) / two_pi).ceil();
    // ceil can land exactly on -pi after rounding
    if w <= -PI {
        w + two_pi
    } else {
        w
    }
}

/// Planar robot configuration `(x, y, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotPose {
    pub x: f64,
    pub y: f64,
    /// Heading in (-pi, pi], counter-clockwise from +x.
    pub theta: f64,
}

impl RobotPose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }
}

/// Body-frame velocity command `(v_r, omega_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VelocityCommand {
    pub v: f64,
    pub omega: f64,
}

impl VelocityCommand {
    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }

    /// Clamp into the platform's absolute speed ranges.
    pub fn clamped(self) -> Self {
        Self {
            v: self.v.clamp(0.0, V_MAX),
            omega: self.omega.clamp(-OMEGA_MAX, OMEGA_MAX),
        }
    }

    pub fn within_limits(&self) -> bool {
        (0.0..=V_MAX).contains(&self.v) && self.omega.abs() <= OMEGA_MAX
    }
}

/// Angular rates of the four wheels of a skid-steer base.
///
/// Wheels 1/2 are on one side and 3/4 on the other; without slip the pairs
/// spin together, so only `omega[0]` and `omega[2]` enter the body twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelRates {
    pub omega: [f64; 4],
    /// Wheel diameter `L` (m).
    pub wheel_diameter: f64,
    /// Distance between the wheel sides `B` (m).
    pub track: f64,
}

fn check_geometry(wheel_diameter: f64, track: f64) -> Result<()> {
    if !(wheel_diameter > 0.0) || !(track > 0.0) {
        return Err(Error::Parameter(format!(
            "wheel diameter and track must be positive (got L={wheel_diameter}, B={track})"
        )));
    }
    Ok(())
}

/// Body twist from wheel rates: `v = L/4 (w1 + w3)`, `omega = L/(2B) (w3 - w1)`.
///
/// The result is not clamped to the command limits.
pub fn wheel_to_body(w: &WheelRates) -> Result<VelocityCommand> {
    check_geometry(w.wheel_diameter, w.track)?;
    let (w1, w3) = (w.omega[0], w.omega[2]);
    Ok(VelocityCommand {
        v: w.wheel_diameter / 4.0 * (w1 + w3),
        omega: w.wheel_diameter / (2.0 * w.track) * (w3 - w1),
    })
}

/// Inverse of [`wheel_to_body`] under the no-slip pairing.
pub fn body_to_wheel(cmd: VelocityCommand, wheel_diameter: f64, track: f64) -> Result<WheelRates> {
    check_geometry(wheel_diameter, track)?;
    let sum = 4.0 * cmd.v / wheel_diameter;
    let diff = 2.0 * track * cmd.omega / wheel_diameter;
    let w1 = (sum - diff) / 2.0;
    let w3 = (sum + diff) / 2.0;
    Ok(WheelRates {
        omega: [w1, w1, w3, w3],
        wheel_diameter,
        track,
    })
}

/// Integrate the unicycle model over `dt` holding the twist constant.
pub fn step_kinematics(pose: RobotPose, cmd: VelocityCommand, dt: f64) -> RobotPose {
    let (v, w) = (cmd.v, cmd.omega);
    let th = pose.theta;
    if w.abs() > TWIST_EPS {
        let th1 = th + w * dt;
        let r = v / w;
        RobotPose::new(
            pose.x + r * (th1.sin() - th.sin()),
            pose.y + r * (th.cos() - th1.cos()),
            th1,
        )
    } else {
        RobotPose::new(
            pose.x + v * dt * th.cos(),
            pose.y + v * dt * th.sin(),
            th + w * dt,
        )
    }
}

/// Apply an increment action to the previous command under both the
/// per-tick increment limits and the absolute speed ranges.
pub fn clamp_increments(prev: VelocityCommand, delta: Action) -> VelocityCommand {
    let dv = delta.delta_v.clamp(-MAX_DV_STEP, MAX_DV_STEP);
    let dw = delta.delta_w.clamp(-MAX_DW_STEP, MAX_DW_STEP);
    VelocityCommand::new(prev.v + dv, prev.omega + dw).clamped()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wheel_examples() {
        let straight = WheelRates {
            omega: [5.0, 5.0, 5.0, 5.0],
            wheel_diameter: 0.2,
            track: 0.4,
        };
        let c = wheel_to_body(&straight).unwrap();
        assert!(close(c.v, 0.5, 1e-12) && close(c.omega, 0.0, 1e-12));

        let zero = WheelRates {
            omega: [0.0; 4],
            ..straight
        };
        assert_eq!(wheel_to_body(&zero).unwrap(), VelocityCommand::new(0.0, 0.0));

        let turn = WheelRates {
            omega: [0.0, 0.0, 4.0, 4.0],
            ..straight
        };
        let c = wheel_to_body(&turn).unwrap();
        assert!(close(c.v, 0.2, 1e-12) && close(c.omega, 1.0, 1e-12));
    }

    #[test]
    fn wheel_rejects_bad_geometry() {
        let w = WheelRates {
            omega: [1.0; 4],
            wheel_diameter: 0.0,
            track: 0.4,
        };
        assert!(matches!(wheel_to_body(&w), Err(Error::Parameter(_))));
        let w = WheelRates {
            wheel_diameter: 0.2,
            track: -1.0,
            ..w
        };
        assert!(wheel_to_body(&w).is_err());
    }

    #[test]
    fn kinematics_examples() {
        let p = step_kinematics(RobotPose::default(), VelocityCommand::new(1.0, 0.0), 2.0);
        assert!(close(p.x, 2.0, 1e-12) && close(p.y, 0.0, 1e-12) && close(p.theta, 0.0, 1e-12));

        let p = step_kinematics(RobotPose::default(), VelocityCommand::new(0.0, 0.5), PI);
        assert!(close(p.x, 0.0, 1e-12) && close(p.y, 0.0, 1e-12));
        assert!(close(p.theta, PI / 2.0, 1e-12));

        let p = step_kinematics(RobotPose::default(), VelocityCommand::new(1.0, 1.0), PI / 2.0);
        assert!(close(p.x, 1.0, 1e-12) && close(p.y, 1.0, 1e-12));
        assert!(close(p.theta, PI / 2.0, 1e-12));
    }

    #[test]
    fn arc_matches_euler_quarter_turn() {
        let cmd = VelocityCommand::new(1.0, 1.0);
        let dt = 1e-5;
        let n = (PI / 2.0 / dt).round() as usize;
        let (mut x, mut y, mut th) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..n {
            x += cmd.v * th.cos() * dt;
            y += cmd.v * th.sin() * dt;
            th += cmd.omega * dt;
        }
        let p = step_kinematics(RobotPose::default(), cmd, n as f64 * dt);
        assert!(close(p.x, x, 1e-4) && close(p.y, y, 1e-4));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!(close(wrap_angle(-PI), PI, 1e-15));
        assert!(close(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, 1e-12));
        assert!(close(wrap_angle(7.0 * PI), PI, 1e-12));
        assert!(close(wrap_angle(0.25), 0.25, 1e-15));
    }

    #[test]
    fn clamp_examples() {
        let c = clamp_increments(VelocityCommand::new(0.9, 0.0), Action::new(0.3, 0.0));
        assert!(close(c.v, 1.0, 1e-12) && c.omega == 0.0);
        let c = clamp_increments(VelocityCommand::new(0.5, 0.2), Action::new(0.0, 0.0));
        assert_eq!(c, VelocityCommand::new(0.5, 0.2));
        let c = clamp_increments(VelocityCommand::new(0.0, -0.4), Action::new(-0.2, -0.5));
        assert_eq!(c, VelocityCommand::new(0.0, -0.5));
    }

    proptest! {
        #[test]
        fn clamp_respects_limits(v in -2.0f64..2.0, w in -2.0f64..2.0, dv in -5.0f64..5.0, dw in -5.0f64..5.0) {
            let prev = VelocityCommand::new(v, w).clamped();
            let next = clamp_increments(prev, Action::new(dv, dw));
            prop_assert!(next.within_limits());
            prop_assert!((next.v - prev.v).abs() <= MAX_DV_STEP + 1e-12);
            prop_assert!((next.omega - prev.omega).abs() <= MAX_DW_STEP + 1e-12);
        }

        #[test]
        fn wheel_round_trip(v in -3.0f64..3.0, w in -3.0f64..3.0, l in 0.01f64..1.0, b in 0.01f64..2.0) {
            let wheels = body_to_wheel(VelocityCommand::new(v, w), l, b).unwrap();
            let back = wheel_to_body(&wheels).unwrap();
            let again = body_to_wheel(back, l, b).unwrap();
            prop_assert!((again.omega[0] - wheels.omega[0]).abs() <= 1e-9 * (1.0 + wheels.omega[0].abs()));
            prop_assert!((again.omega[2] - wheels.omega[2]).abs() <= 1e-9 * (1.0 + wheels.omega[2].abs()));
        }

        #[test]
        fn pose_heading_stays_wrapped(th in -20.0f64..20.0, w in -0.5f64..0.5, dt in 0.001f64..5.0) {
            let p = step_kinematics(RobotPose::new(0.0, 0.0, th), VelocityCommand::new(0.5, w), dt);
            prop_assert!(p.theta > -PI && p.theta <= PI);
        }
    }
}
