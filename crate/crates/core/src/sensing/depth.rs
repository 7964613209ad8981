use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::sensing::Homography;

/// Simulated depth camera co-mounted with the event camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthSensor {
    /// Standard deviation of the additive range noise (m).
    pub sigma: f64,
    pub min_range: f64,
    /// Event-camera pixel to depth-frame pixel.
    pub homography: Homography,
    pub width: usize,
    pub height: usize,
}

impl Default for DepthSensor {
    fn default() -> Self {
        Self {
            sigma: 0.02,
            min_range: 0.1,
            homography: Homography::identity(),
            width: super::SENSOR_WIDTH,
            height: super::SENSOR_HEIGHT,
        }
    }
}

impl DepthSensor {
    /// Range reading for the pedestrian whose box center is `pixel`.
    ///
    /// Returns `None` when the mapped pixel falls outside the depth frame.
    pub fn estimate<R: Rng + ?Sized>(
        &self,
        true_range: f64,
        pixel: (f64, f64),
        rng: &mut R,
    ) -> Option<f64> {
        let (u, v) = self.homography.apply(pixel).ok()?;
        let inside =
            u >= -0.5 && u < self.width as f64 - 0.5 && v >= -0.5 && v < self.height as f64 - 0.5;
        if !inside {
            return None;
        }
        let noise = if self.sigma > 0.0 {
            Normal::new(0.0, self.sigma).ok()?.sample(rng)
        } else {
            0.0
        };
        Some((true_range + noise).max(self.min_range))
    }
}
