use std::f64::consts::PI;

use crate::world::VelocityCommand;

pub const STATE_DIM: usize = 6;

/// Diagonal scaling applied to the raw state before it reaches a network:
/// velocities as-is, pixels over the sensor width, the pedestrian distance
/// over its 3 m bound, the obstacle distance over the LIDAR range and the
/// bearing over pi.
pub const STATE_SCALE: [f64; STATE_DIM] = [1.0, 1.0, 1.0 / 346.0, 1.0 / 3.0, 1.0 / 5.0, 1.0 / PI];

/// `[v_r, omega_r, x_box, d_ped, d_obs, theta_obs]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVector(pub [f64; STATE_DIM]);

impl StateVector {
    pub fn v_r(&self) -> f64 {
        self.0[0]
    }
    pub fn omega_r(&self) -> f64 {
        self.0[1]
    }
    pub fn x_box(&self) -> f64 {
        self.0[2]
    }
    pub fn d_ped(&self) -> f64 {
        self.0[3]
    }
    pub fn d_obs(&self) -> f64 {
        self.0[4]
    }
    pub fn theta_obs(&self) -> f64 {
        self.0[5]
    }

    pub fn normalized(&self) -> StateVector {
        let mut s = self.0;
        s.iter_mut().zip(STATE_SCALE).for_each(|(v, k)| *v *= k);
        StateVector(s)
    }

    pub fn denormalized(&self) -> StateVector {
        let mut s = self.0;
        s.iter_mut().zip(STATE_SCALE).for_each(|(v, k)| *v /= k);
        StateVector(s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.to_vec()
    }
}

/// Assemble the controller state. `x_box` and `d_ped` are whatever the
/// caller holds (the last detection while the pedestrian is lost).
pub fn build_state(
    cmd: VelocityCommand,
    x_box: f64,
    d_ped: f64,
    d_obs: f64,
    theta_obs: f64,
    normalize: bool,
) -> StateVector {
    let raw = StateVector([cmd.v, cmd.omega, x_box, d_ped, d_obs, theta_obs]);
    if normalize {
        raw.normalized()
    } else {
        raw
    }
}
