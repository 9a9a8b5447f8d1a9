//! Training correctness: analytic gradients against central finite
//! differences (away from ReLU kinks), exact-fit sanity on a noiseless
//! affine target, the early-stopping contract, and determinism.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gridplan_mlp::{train, LayerParams, Net, TrainConfig, TrainingSet};

fn affine_dataset(rows: usize, dim: usize, seed: u64, noise: f64) -> TrainingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefs: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let intercept = rng.gen_range(-1.0..1.0);
    let mut features = Vec::with_capacity(rows * dim);
    let mut targets = Vec::with_capacity(rows);
    for _ in 0..rows {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: f64 = intercept
            + x.iter().zip(&coefs).map(|(a, b)| a * b).sum::<f64>()
            + if noise > 0.0 { rng.gen_range(-noise..noise) } else { 0.0 };
        features.extend_from_slice(&x);
        targets.push(y);
    }
    let shed: Vec<bool> = targets.iter().map(|&y| y > 0.0).collect();
    let names = (0..dim).map(|j| format!("x{j}")).collect();
    TrainingSet::new(names, features, targets, shed).unwrap()
}

/// Sign pattern of every ReLU pre-activation over a batch. A central
/// difference is trusted only when the pattern is identical at both
/// evaluation points, i.e. the interval does not straddle a kink.
fn activation_pattern(net: &Net, xs: &[Vec<f64>]) -> Vec<bool> {
    let mut pattern = Vec::new();
    for x in xs {
        for layer in net.preactivations(x) {
            for v in layer {
                pattern.push(v > 0.0);
            }
        }
    }
    pattern
}

/// Which Huber branch (quadratic/linear) each residual falls in; the loss
/// is only C1 at the boundary, so straddling it also disqualifies a
/// coordinate.
fn huber_branches(net: &Net, xs: &[Vec<f64>], ys: &[f64], delta: f64) -> Vec<bool> {
    xs.iter()
        .zip(ys)
        .map(|(x, &y)| (net.forward(x) - y).abs() <= delta)
        .collect()
}

#[test]
fn analytic_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0;
    for config_idx in 0..10 {
        let dims: &[usize] = if config_idx % 2 == 0 { &[5, 12, 8, 1] } else { &[4, 16, 1] };
        let net_seed = 100 + config_idx as u64;
        let mut net = Net::new_seeded(dims, net_seed);
        let delta = [0.3, 1.0, 2.5][config_idx % 3];
        let l2 = [0.0, 1e-3, 1e-2][(config_idx / 3) % 3];

        let xs: Vec<Vec<f64>> = (0..16)
            .map(|_| (0..dims[0]).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect();
        let ys: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();

        let mut grads: Vec<LayerParams> = net
            .layers
            .iter()
            .map(|l| LayerParams::zeros(l.in_dim, l.out_dim))
            .collect();
        net.batch_loss_and_grad(&xs, &ys, delta, l2, &mut grads);
        let flat: Vec<f64> = grads
            .iter()
            .flat_map(|g| g.weights.iter().chain(g.biases.iter()).cloned())
            .collect();

        let n = net.param_count();
        let mut coords_done = 0;
        let mut attempts = 0;
        while coords_done < 100 && attempts < 400 {
            attempts += 1;
            let idx = rng.gen_range(0..n);
            let orig = net.get_param(idx);
            let scale = orig.abs().max(1.0);
            let h = 1e-5 * scale;

            // Guard: the difference interval must not straddle a ReLU kink
            // or a Huber branch boundary; the loss is non-smooth there and
            // central differences lie.
            net.set_param(idx, orig + h);
            let pat_plus = activation_pattern(&net, &xs);
            let branch_plus = huber_branches(&net, &xs, &ys, delta);
            let f_plus = net.batch_loss(&xs, &ys, delta, l2);
            net.set_param(idx, orig - h);
            let pat_minus = activation_pattern(&net, &xs);
            let branch_minus = huber_branches(&net, &xs, &ys, delta);
            let f_minus = net.batch_loss(&xs, &ys, delta, l2);
            net.set_param(idx, orig);
            if pat_plus != pat_minus || branch_plus != branch_minus {
                continue;
            }

            let fd = (f_plus - f_minus) / (2.0 * h);
            let analytic = flat[idx];
            let denom = analytic.abs().max(fd.abs()).max(1e-8);
            let rel = (fd - analytic).abs() / denom;
            assert!(
                rel < 1e-4,
                "config {config_idx} param {idx}: analytic {analytic} vs fd {fd} (rel {rel})"
            );
            coords_done += 1;
        }
        assert!(coords_done >= 50, "config {config_idx}: only {coords_done} usable coordinates");
        checked += coords_done;
    }
    assert!(checked >= 500);
}

#[test]
fn noiseless_affine_target_is_learned_to_high_r2() {
    let set = affine_dataset(2000, 12, 7, 0.0);
    let config = TrainConfig { max_epochs: 1500, seed: 3, ..Default::default() };
    let (model, history) = train(&set, &config, "cost").unwrap();
    assert!(
        model.metadata.validation_r2 >= 0.999,
        "validation R^2 {} after {} epochs",
        model.metadata.validation_r2,
        history.epochs.len()
    );
}

#[test]
fn early_stopping_restores_the_best_epoch() {
    let set = affine_dataset(300, 6, 9, 0.3);
    let config = TrainConfig {
        max_epochs: 400,
        early_stop_patience: 40,
        seed: 5,
        ..Default::default()
    };
    let (model, history) = train(&set, &config, "cost").unwrap();
    // The restored weights belong to the argmin validation epoch.
    let argmin = history
        .epochs
        .iter()
        .min_by(|a, b| a.val_loss.total_cmp(&b.val_loss))
        .unwrap();
    assert_eq!(history.best_epoch, argmin.epoch);
    assert!((history.best_val_loss - argmin.val_loss).abs() < 1e-15);
    assert_eq!(model.metadata.best_epoch, argmin.epoch);
    // And stopping actually triggered before the cap.
    assert!(history.epochs.len() < 400, "ran all {} epochs", history.epochs.len());
    // Patience accounting: no more than patience epochs after the best.
    assert!(history.epochs.len() - 1 - history.best_epoch <= 40);
}

#[test]
fn training_is_deterministic_for_a_seed() {
    let set = affine_dataset(400, 8, 21, 0.1);
    let config = TrainConfig { max_epochs: 120, seed: 77, ..Default::default() };
    let (a, ha) = train(&set, &config, "cost").unwrap();
    let (b, hb) = train(&set, &config, "cost").unwrap();
    assert_eq!(a.net, b.net, "weights differ across identical runs");
    assert_eq!(ha.epochs.len(), hb.epochs.len());
    for (x, y) in ha.epochs.iter().zip(&hb.epochs) {
        assert_eq!(x.val_loss.to_bits(), y.val_loss.to_bits());
    }
}

#[test]
fn constant_tau_columns_are_dropped_and_recorded() {
    let mut set = affine_dataset(200, 4, 13, 0.0);
    // Append a constant column by rebuilding the table.
    let rows = set.targets.len();
    let mut features = Vec::with_capacity(rows * 5);
    for i in 0..rows {
        features.extend_from_slice(set.row(i));
        features.push(3.8);
    }
    set = TrainingSet::new(
        vec!["x0".into(), "x1".into(), "x2".into(), "x3".into(), "tau_1".into()],
        features,
        set.targets.clone(),
        set.shed_positive.clone(),
    )
    .unwrap();
    let config = TrainConfig { max_epochs: 50, seed: 1, ..Default::default() };
    let (model, _) = train(&set, &config, "cost").unwrap();
    assert_eq!(model.dropped.len(), 1);
    assert_eq!(model.dropped[0].name, "tau_1");
    assert_eq!(model.dropped[0].value, 3.8);
    assert_eq!(model.kept, vec![0, 1, 2, 3]);
    // forward still takes the full-width vector.
    let x = [0.1, 0.2, 0.3, 0.4, 3.8];
    model.forward(&x).unwrap();
}

#[test]
fn reloaded_model_reproduces_validation_loss() {
    use gridplan_mlp::{huber_loss, stratified_split, MlpModel};
    let set = affine_dataset(300, 5, 17, 0.2);
    let config = TrainConfig { max_epochs: 150, seed: 2, ..Default::default() };
    let (model, history) = train(&set, &config, "cost").unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    model.save(&path).unwrap();
    let reloaded = MlpModel::load(&path).unwrap();

    // Recompute the normalized validation loss from the reloaded model.
    let split = stratified_split(&set, config.validation_fraction, config.seed);
    let mut val_loss = 0.0;
    for &i in &split.validation {
        let pred = reloaded.forward(set.row(i)).unwrap();
        let r = reloaded.target_norm.normalize(pred) - reloaded.target_norm.normalize(set.targets[i]);
        val_loss += huber_loss(r, config.huber_delta);
    }
    val_loss /= split.validation.len() as f64;
    assert!(
        (val_loss - history.best_val_loss).abs() <= 1e-12 * history.best_val_loss.max(1e-12),
        "reloaded {val_loss} vs recorded {}",
        history.best_val_loss
    );
}

#[test]
fn hpo_budget_one_equals_the_single_sampled_trial() {
    use gridplan_mlp::hpo_search;
    let set = affine_dataset(240, 4, 19, 0.1);
    let base = TrainConfig { max_epochs: 40, ..Default::default() };
    let outcome = hpo_search(&set, 1, 500, &base, "cost").unwrap();
    assert_eq!(outcome.leaderboard.len(), 1);
    assert_eq!(outcome.leaderboard[0].outcome, "ok");
    assert!((outcome.leaderboard[0].val_loss - outcome.validation_loss).abs() < 1e-15);
    // Test metrics are reported separately from the validation loss.
    assert!(outcome.test_loss.is_finite());
    assert!(outcome.test_r2.is_finite());
}
