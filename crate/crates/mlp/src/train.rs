//! The training loop: minibatch Adam on Huber loss with L2 weight decay,
//! a reduce-on-plateau learning-rate schedule, early stopping on validation
//! loss, and best-weights restoration. Deterministic for a fixed seed.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{stratified_split, TrainingSet};
use crate::error::MlpError;
use crate::model::{
    DroppedFeature, MlpModel, ModelMetadata, Normalization, TargetNormalization,
};
use crate::net::{huber_loss, LayerParams, Net};

/// Relative validation-loss improvement below which an epoch counts as
/// stagnant, for both the scheduler and early stopping.
pub const STAGNATION_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct TrainConfig {
    /// Hidden layer widths.
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    /// Huber delta in normalized target units.
    pub huber_delta: f64,
    /// L2 coefficient on weights (not biases).
    pub l2: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub early_stop_patience: usize,
    pub plateau_patience: usize,
    pub plateau_factor: f64,
    pub lr_floor: f64,
    pub seed: u64,
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: vec![32, 32],
            learning_rate: 1e-3,
            huber_delta: 1.0,
            l2: 1e-6,
            batch_size: 64,
            max_epochs: 5000,
            early_stop_patience: 250,
            plateau_patience: 75,
            plateau_factor: 0.75,
            lr_floor: 1e-6,
            seed: 0,
            validation_fraction: 0.2,
        }
    }
}

impl TrainConfig {
    /// Batch-size 32 variant used for the sparser shed target.
    pub fn for_shed() -> Self {
        TrainConfig { batch_size: 32, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), MlpError> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("huber_delta", self.huber_delta),
            ("plateau_factor", self.plateau_factor),
            ("lr_floor", self.lr_floor),
            ("validation_fraction", self.validation_fraction),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(MlpError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.l2 < 0.0 || !self.l2.is_finite() {
            return Err(MlpError::InvalidConfig(format!("l2 must be nonnegative, got {}", self.l2)));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(MlpError::InvalidConfig("batch_size and max_epochs must be positive".into()));
        }
        if self.hidden.is_empty() || self.hidden.iter().any(|&w| w == 0) {
            return Err(MlpError::InvalidConfig("hidden widths must be nonempty and positive".into()));
        }
        if self.validation_fraction >= 1.0 {
            return Err(MlpError::InvalidConfig("validation_fraction must be below 1".into()));
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "hidden={:?} lr={} delta={} l2={} batch={} seed={}",
            self.hidden, self.learning_rate, self.huber_delta, self.l2, self.batch_size, self.seed
        )
    }
}

/// Adam optimizer state over a net's parameter shapes.
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<LayerParams>,
    v: Vec<LayerParams>,
    t: i32,
}

impl Adam {
    pub fn new(net: &Net) -> Adam {
        let zeros: Vec<LayerParams> = net
            .layers
            .iter()
            .map(|l| LayerParams::zeros(l.in_dim, l.out_dim))
            .collect();
        Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8, m: zeros.clone(), v: zeros, t: 0 }
    }

    pub fn step(&mut self, net: &mut Net, grads: &[LayerParams], lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for ((layer, grad), (m, v)) in net
            .layers
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            for i in 0..layer.weights.len() {
                let g = grad.weights[i];
                m.weights[i] = self.beta1 * m.weights[i] + (1.0 - self.beta1) * g;
                v.weights[i] = self.beta2 * v.weights[i] + (1.0 - self.beta2) * g * g;
                let mhat = m.weights[i] / bc1;
                let vhat = v.weights[i] / bc2;
                layer.weights[i] -= lr * mhat / (vhat.sqrt() + self.eps);
            }
            for i in 0..layer.biases.len() {
                let g = grad.biases[i];
                m.biases[i] = self.beta1 * m.biases[i] + (1.0 - self.beta1) * g;
                v.biases[i] = self.beta2 * v.biases[i] + (1.0 - self.beta2) * g * g;
                let mhat = m.biases[i] / bc1;
                let vhat = v.biases[i] / bc2;
                layer.biases[i] -= lr * mhat / (vhat.sqrt() + self.eps);
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub lr_reductions: u32,
    pub stratified_split: bool,
}

impl TrainHistory {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), MlpError> {
        let mut text = String::from("epoch,train_loss,val_loss,learning_rate\n");
        for r in &self.epochs {
            text.push_str(&format!(
                "{},{},{},{}\n",
                r.epoch, r.train_loss, r.val_loss, r.learning_rate
            ));
        }
        std::fs::write(path.as_ref(), text).map_err(|source| MlpError::Io {
            path: path.as_ref().into(),
            source,
        })
    }
}

/// Learning rate after `reductions` plateau cuts.
pub fn scheduled_lr(initial: f64, factor: f64, reductions: u32, floor: f64) -> f64 {
    (initial * factor.powi(reductions as i32)).max(floor)
}

pub fn r_squared(preds: &[f64], ys: &[f64]) -> f64 {
    let n = ys.len().max(1) as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean) * (y - mean)).sum();
    let ss_res: f64 = preds.iter().zip(ys).map(|(p, y)| (p - y) * (p - y)).sum();
    if ss_tot <= 0.0 {
        if ss_res <= 1e-18 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Trains one model for the named target. Returns the model with the best
/// validation-loss weights restored, plus the per-epoch history.
pub fn train(
    set: &TrainingSet,
    config: &TrainConfig,
    target_name: &str,
) -> Result<(MlpModel, TrainHistory), MlpError> {
    config.validate()?;
    if set.rows() < 4 {
        return Err(MlpError::Data(format!("{} rows are too few to train on", set.rows())));
    }

    let constants = set.constant_features();
    let dropped: Vec<DroppedFeature> = constants
        .iter()
        .map(|&(index, value)| DroppedFeature {
            index,
            name: set.feature_names[index].clone(),
            value,
        })
        .collect();
    let kept: Vec<usize> =
        (0..set.dim).filter(|j| !constants.iter().any(|&(c, _)| c == *j)).collect();
    if kept.is_empty() {
        return Err(MlpError::Data("every feature is constant".into()));
    }

    let split = stratified_split(set, config.validation_fraction, config.seed);
    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<f64>) {
        let xs = idx
            .iter()
            .map(|&i| kept.iter().map(|&j| set.row(i)[j]).collect())
            .collect();
        let ys = idx.iter().map(|&i| set.targets[i]).collect();
        (xs, ys)
    };
    let (train_x_raw, train_y_raw) = gather(&split.train);
    let (val_x_raw, val_y_raw) = gather(&split.validation);

    let input_norm = Normalization::fit(train_x_raw.iter().cloned(), kept.len());
    let target_norm = TargetNormalization::fit(&train_y_raw);
    let normalize_all = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                let mut z = Vec::with_capacity(r.len());
                input_norm.apply(r, &mut z);
                z
            })
            .collect()
    };
    let train_x = normalize_all(&train_x_raw);
    let val_x = normalize_all(&val_x_raw);
    let train_y: Vec<f64> = train_y_raw.iter().map(|&y| target_norm.normalize(y)).collect();
    let val_y: Vec<f64> = val_y_raw.iter().map(|&y| target_norm.normalize(y)).collect();

    let mut dims = vec![kept.len()];
    dims.extend_from_slice(&config.hidden);
    dims.push(1);
    let mut net = Net::new_seeded(&dims, config.seed);
    let mut adam = Adam::new(&net);
    let mut grads: Vec<LayerParams> = net
        .layers
        .iter()
        .map(|l| LayerParams::zeros(l.in_dim, l.out_dim))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x5eed));

    let mut history = TrainHistory {
        stratified_split: split.stratified,
        best_val_loss: f64::INFINITY,
        ..Default::default()
    };
    let mut best_net = net.clone();
    let mut reductions: u32 = 0;
    let mut stale_for_stop = 0usize;
    let mut stale_for_plateau = 0usize;
    let mut order: Vec<usize> = (0..train_x.len()).collect();

    for epoch in 0..config.max_epochs {
        let lr = scheduled_lr(config.learning_rate, config.plateau_factor, reductions, config.lr_floor);
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let xs: Vec<Vec<f64>> = chunk.iter().map(|&i| train_x[i].clone()).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| train_y[i]).collect();
            let loss = net.batch_loss_and_grad(&xs, &ys, config.huber_delta, config.l2, &mut grads);
            if !loss.is_finite() {
                return Err(MlpError::Diverged(format!(
                    "non-finite training loss at epoch {epoch} ({})",
                    config.summary()
                )));
            }
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut net, &grads, lr);
        }
        epoch_loss /= train_x.len() as f64;

        let mut val_loss = 0.0;
        for (x, &y) in val_x.iter().zip(&val_y) {
            val_loss += huber_loss(net.forward(x) - y, config.huber_delta);
        }
        val_loss /= val_x.len().max(1) as f64;
        if !val_loss.is_finite() {
            return Err(MlpError::Diverged(format!("non-finite validation loss at epoch {epoch}")));
        }
        history.epochs.push(EpochRecord { epoch, train_loss: epoch_loss, val_loss, learning_rate: lr });

        let improved = !history.best_val_loss.is_finite()
            || val_loss
                < history.best_val_loss
                    - STAGNATION_REL_TOL * history.best_val_loss.abs().max(1e-12);
        if improved {
            history.best_val_loss = val_loss;
            history.best_epoch = epoch;
            best_net = net.clone();
            stale_for_stop = 0;
            stale_for_plateau = 0;
        } else {
            stale_for_stop += 1;
            stale_for_plateau += 1;
            if stale_for_plateau >= config.plateau_patience {
                reductions += 1;
                stale_for_plateau = 0;
            }
            if stale_for_stop >= config.early_stop_patience {
                break;
            }
        }
    }
    history.lr_reductions = reductions;

    // Validation metrics of the restored weights, in original units.
    let preds: Vec<f64> = val_x.iter().map(|x| target_norm.denormalize(best_net.forward(x))).collect();
    let val_r2 = r_squared(&preds, &val_y_raw);

    let model = MlpModel {
        net: best_net,
        feature_names: set.feature_names.clone(),
        kept,
        dropped,
        input_norm,
        target_norm,
        metadata: ModelMetadata {
            target: target_name.to_string(),
            trained_rows: train_x.len(),
            validation_loss: history.best_val_loss,
            validation_r2: val_r2,
            best_epoch: history.best_epoch,
            config_summary: config.summary(),
        },
    };
    Ok((model, history))
}
