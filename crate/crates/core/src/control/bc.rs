use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{mse_loss, Adam, AdamConfig, Mlp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Fraction of pairs held out for model selection.
    pub val_fraction: f64,
    /// Loss above which training is aborted as diverged.
    pub divergence_limit: f64,
}

impl Default for BcConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            batch_size: 64,
            lr: 1e-3,
            val_fraction: 0.1,
            divergence_limit: 1e6,
        }
    }
}

impl BcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Parameter("bc.batch_size must be > 0".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Parameter(format!("bc.lr must be > 0, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(Error::Parameter(format!(
                "bc.val_fraction must be in [0,1), got {}",
                self.val_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcReport {
    pub train_size: usize,
    pub val_size: usize,
    pub initial_train_loss: f64,
    pub initial_val_loss: f64,
    /// Full training-split loss after each epoch.
    pub train_losses: Vec<f64>,
    pub val_losses: Vec<f64>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

fn dataset_loss(net: &Mlp, states: &[Vec<f64>], actions: &[Vec<f64>], idx: &[usize]) -> Result<f64> {
    let pred = idx.iter().map(|&i| net.forward(&states[i])).collect::<Result<Vec<_>>>()?;
    let target: Vec<Vec<f64>> = idx.iter().map(|&i| actions[i].clone()).collect();
    Ok(mse_loss(&pred, &target)?.0)
}

/// Regress `actor` onto expert pairs by mini-batch Adam on the MSE loss.
///
/// Returns the parameters with the lowest held-out loss (training loss when
/// nothing is held out) together with the loss curves.
pub fn bc_train<R: Rng + ?Sized>(
    states: &[Vec<f64>],
    actions: &[Vec<f64>],
    mut actor: Mlp,
    cfg: &BcConfig,
    rng: &mut R,
) -> Result<(Mlp, BcReport)> {
    cfg.validate()?;
    if states.is_empty() {
        return Err(Error::Contract("behavior cloning needs a non-empty dataset".into()));
    }
    if states.len() != actions.len() {
        return Err(Error::Contract(format!(
            "{} states but {} actions",
            states.len(),
            actions.len()
        )));
    }
    if let Some(i) = states.iter().position(|s| s.len() != actor.input_dim()) {
        return Err(Error::Contract(format!("state {i} has wrong width")));
    }
    if let Some(i) = actions.iter().position(|a| a.len() != actor.output_dim()) {
        return Err(Error::Contract(format!("action {i} has wrong width")));
    }

    let mut order: Vec<usize> = (0..states.len()).collect();
    order.shuffle(rng);
    let n_val = (states.len() as f64 * cfg.val_fraction).floor() as usize;
    let (val_idx, train_idx) = order.split_at(n_val);
    let (val_idx, mut train_idx) = (val_idx.to_vec(), train_idx.to_vec());
    let select_idx = if val_idx.is_empty() { train_idx.clone() } else { val_idx.clone() };

    let initial_train_loss = dataset_loss(&actor, states, actions, &train_idx)?;
    let initial_val_loss = dataset_loss(&actor, states, actions, &select_idx)?;
    let mut report = BcReport {
        train_size: train_idx.len(),
        val_size: val_idx.len(),
        initial_train_loss,
        initial_val_loss,
        train_losses: Vec::with_capacity(cfg.epochs),
        val_losses: Vec::with_capacity(cfg.epochs),
        best_epoch: 0,
        best_val_loss: initial_val_loss,
    };
    let mut best = actor.clone();
    let mut opt = Adam::new(AdamConfig::with_lr(cfg.lr), actor.num_params());
    let mut grads = vec![0.0; actor.num_params()];

    for epoch in 1..=cfg.epochs {
        train_idx.shuffle(rng);
        for chunk in train_idx.chunks(cfg.batch_size) {
            grads.iter_mut().for_each(|g| *g = 0.0);
            let caches = chunk
                .iter()
                .map(|&i| actor.forward_cached(&states[i]))
                .collect::<Result<Vec<_>>>()?;
            let pred: Vec<Vec<f64>> = caches.iter().map(|c| c.output.clone()).collect();
            let target: Vec<Vec<f64>> = chunk.iter().map(|&i| actions[i].clone()).collect();
            let (_, d_out) = mse_loss(&pred, &target)?;
            for (c, d) in caches.iter().zip(&d_out) {
                actor.backward(c, d, &mut grads)?;
            }
            opt.step(actor.params_mut(), &grads)?;
        }
        let train_loss = dataset_loss(&actor, states, actions, &train_idx)?;
        let val_loss = dataset_loss(&actor, states, actions, &select_idx)?;
        if !train_loss.is_finite() || train_loss > cfg.divergence_limit {
            return Err(Error::TrainingFault(format!(
                "behavior cloning diverged at epoch {epoch}: train loss {train_loss}"
            )));
        }
        report.train_losses.push(train_loss);
        report.val_losses.push(val_loss);
        if val_loss < report.best_val_loss {
            report.best_val_loss = val_loss;
            report.best_epoch = epoch;
            best.params_mut().copy_from_slice(actor.params());
        }
        log::debug!("bc epoch {epoch}: train {train_loss:.6e} val {val_loss:.6e}");
    }
    Ok((best, report))
}
