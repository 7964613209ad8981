use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuParams {
    pub mu: f64,
    pub theta: f64,
    pub sigma: f64,
}

impl OuParams {
    pub fn new(mu: f64, theta: f64, sigma: f64) -> Self {
        Self { mu, theta, sigma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && (0.0..=1.0).contains(&self.theta) && self.sigma >= 0.0) {
            return Err(Error::Parameter(format!(
                "OU parameters need finite mu, theta in [0,1], sigma >= 0; got {self:?}"
            )));
        }
        Ok(())
    }

    /// Stationary variance of the unit-step recursion, `sigma^2 / (2 theta - theta^2)`.
    pub fn stationary_variance(&self) -> Option<f64> {
        (self.theta > 0.0).then(|| self.sigma * self.sigma / (2.0 * self.theta - self.theta * self.theta))
    }
}

/// `x + theta (mu - x) + sigma z` for a standard normal draw `z`.
pub fn ou_step(x: f64, p: &OuParams, z: f64) -> f64 {
    x + p.theta * (p.mu - x) + p.sigma * z
}

/// Independent OU channels, one per action component.
#[derive(Debug, Clone, PartialEq)]
pub struct OuNoise {
    params: Vec<OuParams>,
    state: Vec<f64>,
}

impl OuNoise {
    pub fn new(params: Vec<OuParams>) -> Self {
        let state = params.iter().map(|p| p.mu).collect();
        Self { params, state }
    }

    pub fn reset(&mut self) {
        for (x, p) in self.state.iter_mut().zip(&self.params) {
            *x = p.mu;
        }
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[f64] {
        for (x, p) in self.state.iter_mut().zip(&self.params) {
            let z: f64 = rng.sample(StandardNormal);
            *x = ou_step(*x, p, z);
        }
        &self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_reversion() {
        let p = OuParams::new(0.0, 0.5, 0.0);
        assert_eq!(ou_step(1.0, &p, 0.7), 0.5);
        let p = OuParams::new(0.3, 0.2, 0.0);
        let mut n = OuNoise::new(vec![p]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(n.sample(&mut rng)[0], 0.3);
        }
    }

    #[test]
    fn reset_returns_to_mean() {
        let mut n = OuNoise::new(vec![OuParams::new(0.1, 0.2, 0.3), OuParams::new(0.0, 0.0, 0.2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        n.sample(&mut rng);
        n.reset();
        assert_eq!(n.state(), &[0.1, 0.0]);
    }

    #[test]
    fn stationary_variance_formula() {
        let v = OuParams::new(0.0, 0.2, 0.3).stationary_variance().unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        assert!(OuParams::new(0.0, 0.0, 0.2).stationary_variance().is_none());
    }
}
