use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            ..Default::default()
        }
    }
}

/// Bias-corrected adaptive moment estimation over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub config: AdamConfig,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(config: AdamConfig, num_params: usize) -> Self {
        Self {
            config,
            step: 0,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Contract(format!(
                "optimizer tracks {} parameters, got {} params and {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some((i, g)) = grads.iter().enumerate().find(|(_, g)| !g.is_finite()) {
            let bad = grads.iter().filter(|g| !g.is_finite()).count();
            return Err(Error::TrainingFault(format!(
                "non-finite gradient at step {}: {bad} bad entries, first at index {i} ({g})",
                self.step + 1
            )));
        }
        self.step += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        let c1 = 1.0 - beta1.powi(self.step as i32);
        let c2 = 1.0 - beta2.powi(self.step as i32);
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut opt = Adam::new(AdamConfig::default(), 3);
        let mut p = vec![1.0, -2.0, 0.5];
        opt.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut opt = Adam::new(AdamConfig::default(), 1);
        let mut p = vec![0.0];
        opt.step(&mut p, &[1.0]).unwrap();
        assert!((p[0] + 1e-4).abs() < 1e-10, "{}", p[0]);
    }

    #[test]
    fn non_finite_gradient_is_fault() {
        let mut opt = Adam::new(AdamConfig::default(), 2);
        let mut p = vec![0.0, 0.0];
        let err = opt.step(&mut p, &[0.1, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::TrainingFault(ref m) if m.contains("index 1")));
        assert_eq!(p, vec![0.0, 0.0]);
        assert_eq!(opt.steps(), 0);
    }

    #[test]
    fn linear_regression_loss_non_increasing() {
        // y = 2x - 1 on a fixed batch, model y = w x + b
        let xs = [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
        let loss_grad = |p: &[f64]| {
            let n = xs.len() as f64;
            let mut l = 0.0;
            let mut g = [0.0, 0.0];
            for &x in &xs {
                let e = p[0] * x + p[1] - (2.0 * x - 1.0);
                l += e * e / n;
                g[0] += 2.0 * e * x / n;
                g[1] += 2.0 * e / n;
            }
            (l, g)
        };
        let mut opt = Adam::new(AdamConfig::default(), 2);
        let mut p = vec![0.0, 0.0];
        let mut prev = f64::INFINITY;
        for _ in 0..100 {
            let (l, g) = loss_grad(&p);
            assert!(l <= prev + 1e-15);
            prev = l;
            opt.step(&mut p, &g).unwrap();
        }
        assert!(prev < loss_grad(&[0.0, 0.0]).0);
    }
}
