use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::VelocityCommand;

use super::Action;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdGains {
    /// rad/s per pixel of horizontal error.
    pub kp_x: f64,
    pub kd_x: f64,
    /// m/s per meter of distance error.
    pub kp_d: f64,
    pub kd_d: f64,
    pub x_target: f64,
    pub d_target: f64,
}

impl Default for PdGains {
    fn default() -> Self {
        Self {
            kp_x: 0.005,
            kd_x: 0.001,
            kp_d: 1.0,
            kd_d: 0.1,
            x_target: 173.0,
            d_target: 2.0,
        }
    }
}

impl PdGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kp_x", self.kp_x),
            ("kd_x", self.kd_x),
            ("kp_d", self.kp_d),
            ("kd_d", self.kd_d),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("pd.{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Unclamped PD law: `omega = kp_x e_x + kd_x de_x`, `v = kp_d e_d + kd_d de_d`.
pub fn pd_raw(gains: &PdGains, e_x: f64, e_d: f64, de_x: f64, de_d: f64) -> VelocityCommand {
    VelocityCommand::new(
        gains.kp_d * e_d + gains.kd_d * de_d,
        gains.kp_x * e_x + gains.kd_x * de_x,
    )
}

/// Stateful PD follower that turns detections into velocity commands and
/// increments.
#[derive(Debug, Clone)]
pub struct PdController {
    pub gains: PdGains,
    prev_errors: Option<(f64, f64)>,
    last: VelocityCommand,
}

impl PdController {
    pub fn new(gains: PdGains) -> Self {
        Self {
            gains,
            prev_errors: None,
            last: VelocityCommand::default(),
        }
    }

    pub fn reset(&mut self) {
        self.prev_errors = None;
        self.last = VelocityCommand::default();
    }

    /// Clamped command for this tick. Without a detection the previous
    /// command is held and the derivative memory is cleared.
    pub fn command(&mut self, x_box: Option<f64>, d_ped: f64, dt: f64) -> Result<VelocityCommand> {
        if !(dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
        }
        let Some(x_box) = x_box else {
            self.prev_errors = None;
            return Ok(self.last);
        };
        let e_x = self.gains.x_target - x_box;
        let e_d = d_ped - self.gains.d_target;
        let (de_x, de_d) = match self.prev_errors {
            Some((px, pd)) => ((e_x - px) / dt, (e_d - pd) / dt),
            None => (0.0, 0.0),
        };
        self.prev_errors = Some((e_x, e_d));
        self.last = pd_raw(&self.gains, e_x, e_d, de_x, de_d).clamped();
        Ok(self.last)
    }

    /// Increment that moves `current` toward this tick's command.
    pub fn action(
        &mut self,
        current: VelocityCommand,
        x_box: Option<f64>,
        d_ped: f64,
        dt: f64,
    ) -> Result<Action> {
        let target = self.command(x_box, d_ped, dt)?;
        Ok(Action::new(target.v - current.v, target.omega - current.omega).clamped())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_zero_command() {
        let mut pd = PdController::new(PdGains::default());
        let c = pd.command(Some(173.0), 2.0, 0.1).unwrap();
        assert_eq!((c.v, c.omega), (0.0, 0.0));
    }

    #[test]
    fn proportional_terms() {
        let g = PdGains::default();
        assert!((pd_raw(&g, 0.0, 0.5, 0.0, 0.0).v - 0.5).abs() < 1e-15);
        assert!((pd_raw(&g, -80.0, 0.0, 0.0, 0.0).omega + 0.4).abs() < 1e-15);
    }

    #[test]
    fn derivative_uses_previous_error() {
        let mut pd = PdController::new(PdGains::default());
        pd.command(Some(173.0), 2.0, 0.1).unwrap();
        // e_d goes 0 -> 0.1 in 0.1 s: v = 1.0 * 0.1 + 0.1 * 1.0
        let c = pd.command(Some(173.0), 2.1, 0.1).unwrap();
        assert!((c.v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn missing_detection_holds() {
        let mut pd = PdController::new(PdGains::default());
        let c = pd.command(Some(150.0), 2.4, 0.1).unwrap();
        let held = pd.command(None, 9.0, 0.1).unwrap();
        assert_eq!(c, held);
        let a = pd.action(c, None, 9.0, 0.1).unwrap();
        assert_eq!(a, Action::new(0.0, 0.0));
    }

    #[test]
    fn output_is_clamped() {
        let mut pd = PdController::new(PdGains::default());
        let c = pd.command(Some(0.0), 10.0, 0.1).unwrap();
        assert!(c.within_limits());
        assert!(pd.command(Some(0.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn negative_gain_rejected() {
        let g = PdGains {
            kd_x: -1.0,
            ..Default::default()
        };
        assert!(g.validate().is_err());
    }
}
