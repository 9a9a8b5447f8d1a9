//! Budgeted random hyperparameter search: log-uniform over learning rate,
//! Huber delta and L2, uniform over depth and width. The winner (lowest
//! validation loss) is re-evaluated on a held-out test split carved from
//! the data before any trial sees it.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{stratified_split, TrainingSet};
use crate::error::MlpError;
use crate::model::MlpModel;
use crate::net::huber_loss;
use crate::train::{train, r_squared, TrainConfig, TrainHistory};

pub const LEARNING_RATE_RANGE: (f64, f64) = (1e-5, 1e-2);
pub const HUBER_DELTA_RANGE: (f64, f64) = (1e-4, 10.0);
pub const L2_RANGE: (f64, f64) = (1e-6, 1e-2);
pub const HIDDEN_LAYER_CHOICES: [usize; 2] = [2, 3];
pub const WIDTH_STEP: usize = 32;
pub const WIDTH_MAX: usize = 512;

fn log_uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    let (lo, hi) = range;
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Draws one candidate configuration within the documented search ranges.
pub fn sample_config(rng: &mut ChaCha8Rng, base: &TrainConfig) -> TrainConfig {
    let depth = HIDDEN_LAYER_CHOICES[rng.gen_range(0..HIDDEN_LAYER_CHOICES.len())];
    let width = WIDTH_STEP * rng.gen_range(1..=(WIDTH_MAX / WIDTH_STEP));
    TrainConfig {
        hidden: vec![width; depth],
        learning_rate: log_uniform(rng, LEARNING_RATE_RANGE),
        huber_delta: log_uniform(rng, HUBER_DELTA_RANGE),
        l2: log_uniform(rng, L2_RANGE),
        ..base.clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HpoTrial {
    pub trial: usize,
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub huber_delta: f64,
    pub l2: f64,
    pub val_loss: f64,
    pub outcome: String,
}

#[derive(Debug)]
pub struct HpoOutcome {
    pub best_model: MlpModel,
    pub best_config: TrainConfig,
    pub best_history: TrainHistory,
    /// Sorted by validation loss, diverged trials last.
    pub leaderboard: Vec<HpoTrial>,
    pub validation_loss: f64,
    /// Held-out re-evaluation of the winner, reported separately.
    pub test_loss: f64,
    pub test_r2: f64,
}

/// Runs `budget` random trials and re-evaluates the winner on a held-out
/// test split (a tenth of the data). Trials run in parallel with
/// independent seeds; the outcome is order-independent.
pub fn hpo_search(
    set: &TrainingSet,
    budget: usize,
    seed: u64,
    base: &TrainConfig,
    target_name: &str,
) -> Result<HpoOutcome, MlpError> {
    if budget == 0 {
        return Err(MlpError::InvalidConfig("hpo budget must be at least 1".into()));
    }
    // Carve the test split before any trial: a tenth of the rows.
    let carve = stratified_split(set, 0.1, seed.wrapping_mul(0x9e37_79b9).wrapping_add(1));
    let test_idx = carve.validation;
    let trial_idx = carve.train;
    let subset = |idx: &[usize]| -> TrainingSet {
        let mut features = Vec::with_capacity(idx.len() * set.dim);
        let mut targets = Vec::with_capacity(idx.len());
        let mut shed = Vec::with_capacity(idx.len());
        for &i in idx {
            features.extend_from_slice(set.row(i));
            targets.push(set.targets[i]);
            shed.push(set.shed_positive[i]);
        }
        TrainingSet::new(set.feature_names.clone(), features, targets, shed).unwrap()
    };
    let trial_set = subset(&trial_idx);
    let test_set = subset(&test_idx);

    let results: Vec<(usize, TrainConfig, Result<(MlpModel, TrainHistory), MlpError>)> = (0
        ..budget)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1 + t as u64));
            let mut config = sample_config(&mut rng, base);
            config.seed = seed.wrapping_mul(31).wrapping_add(t as u64);
            let outcome = train(&trial_set, &config, target_name);
            (t, config, outcome)
        })
        .collect();

    let mut leaderboard: Vec<HpoTrial> = Vec::with_capacity(budget);
    let mut best: Option<(f64, MlpModel, TrainConfig, TrainHistory)> = None;
    let mut failures: Vec<String> = Vec::new();
    for (t, config, outcome) in results {
        match outcome {
            Ok((model, history)) => {
                let val = history.best_val_loss;
                leaderboard.push(HpoTrial {
                    trial: t,
                    hidden: config.hidden.clone(),
                    learning_rate: config.learning_rate,
                    huber_delta: config.huber_delta,
                    l2: config.l2,
                    val_loss: val,
                    outcome: "ok".into(),
                });
                if best.as_ref().map_or(true, |(b, _, _, _)| val < *b) {
                    best = Some((val, model, config, history));
                }
            }
            Err(e) => {
                failures.push(format!("trial {t} ({}): {e}", config.summary()));
                leaderboard.push(HpoTrial {
                    trial: t,
                    hidden: config.hidden.clone(),
                    learning_rate: config.learning_rate,
                    huber_delta: config.huber_delta,
                    l2: config.l2,
                    val_loss: f64::INFINITY,
                    outcome: format!("failed: {e}"),
                });
            }
        }
    }
    leaderboard.sort_by(|a, b| a.val_loss.total_cmp(&b.val_loss).then(a.trial.cmp(&b.trial)));

    let Some((validation_loss, best_model, best_config, best_history)) = best else {
        return Err(MlpError::Diverged(format!(
            "all {budget} trials failed:\n{}",
            failures.join("\n")
        )));
    };

    // Held-out re-evaluation, in the winner's normalized target space so
    // the number is comparable with its validation loss.
    let mut test_loss = 0.0;
    let mut preds = Vec::with_capacity(test_set.rows());
    for i in 0..test_set.rows() {
        let pred = best_model.forward(test_set.row(i))?;
        preds.push(pred);
        let r = best_model.target_norm.normalize(pred) - best_model.target_norm.normalize(test_set.targets[i]);
        test_loss += huber_loss(r, best_config.huber_delta);
    }
    test_loss /= test_set.rows().max(1) as f64;
    let test_r2 = r_squared(&preds, &test_set.targets);

    Ok(HpoOutcome {
        best_model,
        best_config,
        best_history,
        leaderboard,
        validation_loss,
        test_loss,
        test_r2,
    })
}
