//! Training data handling: the in-memory sample table, stratified
//! train/validation splitting keyed on shed events, and the
//! constant-feature scan.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::MlpError;

/// A flat regression table: row-major features and one target column.
/// `shed_positive` marks rows whose shed target is nonzero; stratified
/// splitting keeps those proportionally represented whichever target is
/// being trained.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub feature_names: Vec<String>,
    pub features: Vec<f64>,
    pub dim: usize,
    pub targets: Vec<f64>,
    pub shed_positive: Vec<bool>,
}

impl TrainingSet {
    pub fn new(
        feature_names: Vec<String>,
        features: Vec<f64>,
        targets: Vec<f64>,
        shed_positive: Vec<bool>,
    ) -> Result<Self, MlpError> {
        let dim = feature_names.len();
        if dim == 0 || targets.is_empty() {
            return Err(MlpError::Data("empty dataset".into()));
        }
        if features.len() != dim * targets.len() || shed_positive.len() != targets.len() {
            return Err(MlpError::Dimension(format!(
                "{} feature values for {} rows of dimension {dim}",
                features.len(),
                targets.len()
            )));
        }
        Ok(TrainingSet { feature_names, features, dim, targets, shed_positive })
    }

    pub fn rows(&self) -> usize {
        self.targets.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// Indices of features that never vary, with the constant value.
    pub fn constant_features(&self) -> Vec<(usize, f64)> {
        let mut result = Vec::new();
        for j in 0..self.dim {
            let first = self.features[j];
            if (0..self.rows()).all(|i| (self.row(i)[j] - first).abs() <= 1e-12) {
                result.push((j, first));
            }
        }
        result
    }
}

/// Outcome of a stratified split: row indices per side, plus whether a
/// too-small stratum forced a plain random split.
#[derive(Debug, Clone)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub stratified: bool,
}

/// Splits rows so the shed-positive fraction carries over to both sides
/// (exactly, up to rounding). A stratum with fewer than 2 rows falls back
/// to a plain random split.
pub fn stratified_split(set: &TrainingSet, fraction: f64, seed: u64) -> SplitIndices {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positives: Vec<usize> = (0..set.rows()).filter(|&i| set.shed_positive[i]).collect();
    let negatives: Vec<usize> = (0..set.rows()).filter(|&i| !set.shed_positive[i]).collect();

    let stratified = positives.len() >= 2 && negatives.len() >= 2;
    let mut train = Vec::new();
    let mut validation = Vec::new();
    if stratified {
        for stratum in [&positives, &negatives] {
            let mut order = stratum.clone();
            order.shuffle(&mut rng);
            let take = ((order.len() as f64) * fraction).round() as usize;
            let take = take.min(order.len().saturating_sub(1)).max(1);
            validation.extend_from_slice(&order[..take]);
            train.extend_from_slice(&order[take..]);
        }
    } else {
        let mut order: Vec<usize> = (0..set.rows()).collect();
        order.shuffle(&mut rng);
        let take = (((order.len() as f64) * fraction).round() as usize)
            .min(order.len().saturating_sub(1))
            .max(1);
        validation.extend_from_slice(&order[..take]);
        train.extend_from_slice(&order[take..]);
    }
    train.sort_unstable();
    validation.sort_unstable();
    SplitIndices { train, validation, stratified }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_with_positives(rows: usize, positives: usize) -> TrainingSet {
        let features: Vec<f64> = (0..rows * 2).map(|i| i as f64).collect();
        let targets: Vec<f64> = (0..rows).map(|i| i as f64).collect();
        let shed: Vec<bool> = (0..rows).map(|i| i < positives).collect();
        TrainingSet::new(vec!["a".into(), "b".into()], features, targets, shed).unwrap()
    }

    #[test]
    fn proportional_counts_are_exact() {
        let set = set_with_positives(100, 10);
        let split = stratified_split(&set, 0.2, 7);
        assert!(split.stratified);
        let val_pos = split.validation.iter().filter(|&&i| set.shed_positive[i]).count();
        assert_eq!(val_pos, 2);
        assert_eq!(split.validation.len(), 20);
        assert_eq!(split.train.len() + split.validation.len(), 100);
    }

    #[test]
    fn single_stratum_falls_back_to_random() {
        let set = set_with_positives(50, 0);
        let split = stratified_split(&set, 0.2, 7);
        assert!(!split.stratified);
        assert_eq!(split.validation.len(), 10);
    }

    #[test]
    fn same_seed_same_split() {
        let set = set_with_positives(80, 25);
        let a = stratified_split(&set, 0.25, 99);
        let b = stratified_split(&set, 0.25, 99);
        assert_eq!(a.train, b.train);
        assert_eq!(a.validation, b.validation);
        let c = stratified_split(&set, 0.25, 100);
        assert_ne!(a.validation, c.validation);
    }

    #[test]
    fn constant_columns_are_found() {
        let features = vec![
            1.0, 5.0, 0.0, //
            2.0, 5.0, 0.0, //
            3.0, 5.0, 0.0,
        ];
        let set = TrainingSet::new(
            vec!["x".into(), "tau".into(), "z".into()],
            features,
            vec![0.0; 3],
            vec![false; 3],
        )
        .unwrap();
        assert_eq!(set.constant_features(), vec![(1, 5.0), (2, 0.0)]);
    }
}
