//! The deployable model: the trained net plus the feature bookkeeping
//! (normalization statistics, dropped constant columns) and a versioned
//! JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::MlpError;
use crate::net::Net;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Per-feature standardization statistics over kept features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Normalization {
    pub fn fit(rows: impl Iterator<Item = Vec<f64>> + Clone, dim: usize) -> Normalization {
        let mut mean = vec![0.0; dim];
        let mut count = 0usize;
        for row in rows.clone() {
            for (m, v) in mean.iter_mut().zip(&row) {
                *m += v;
            }
            count += 1;
        }
        for m in mean.iter_mut() {
            *m /= count.max(1) as f64;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(&row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| (s / count.max(1) as f64).sqrt().max(1e-12))
            .collect();
        Normalization { mean, scale }
    }

    pub fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for ((v, m), s) in x.iter().zip(&self.mean).zip(&self.scale) {
            out.push((v - m) / s);
        }
    }
}

/// Scalar target standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetNormalization {
    pub mean: f64,
    pub scale: f64,
}

impl TargetNormalization {
    pub fn fit(values: &[f64]) -> TargetNormalization {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        TargetNormalization { mean, scale: var.sqrt().max(1e-12) }
    }

    pub fn normalize(&self, y: f64) -> f64 {
        (y - self.mean) / self.scale
    }

    pub fn denormalize(&self, z: f64) -> f64 {
        self.mean + self.scale * z
    }

    pub fn identity() -> TargetNormalization {
        TargetNormalization { mean: 0.0, scale: 1.0 }
    }
}

/// A feature column removed before training because it never varied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedFeature {
    pub index: usize,
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub target: String,
    pub trained_rows: usize,
    pub validation_loss: f64,
    pub validation_r2: f64,
    pub best_epoch: usize,
    pub config_summary: String,
}

/// A trained regression model in original units: `forward` takes the full
/// feature vector (dropped columns included) and returns the prediction in
/// target units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub net: Net,
    /// All feature names, in dataset order.
    pub feature_names: Vec<String>,
    /// Indices of the features the net actually consumes.
    pub kept: Vec<usize>,
    pub dropped: Vec<DroppedFeature>,
    pub input_norm: Normalization,
    pub target_norm: TargetNormalization,
    pub metadata: ModelMetadata,
}

impl MlpModel {
    pub fn input_dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Prediction in original target units for a full-width feature vector.
    pub fn forward(&self, x_full: &[f64]) -> Result<f64, MlpError> {
        if x_full.len() != self.feature_names.len() {
            return Err(MlpError::Dimension(format!(
                "input has {} features, model expects {}",
                x_full.len(),
                self.feature_names.len()
            )));
        }
        let kept: Vec<f64> = self.kept.iter().map(|&i| x_full[i]).collect();
        let mut z = Vec::with_capacity(kept.len());
        self.input_norm.apply(&kept, &mut z);
        Ok(self.target_norm.denormalize(self.net.forward(&z)))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MlpError> {
        let path = path.as_ref();
        let file = ModelFile { schema_version: MODEL_SCHEMA_VERSION, model: self.clone() };
        let text = serde_json::to_string_pretty(&file).expect("model serializes");
        std::fs::write(path, text).map_err(|source| MlpError::Io { path: path.into(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<MlpModel, MlpError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| MlpError::Io { path: path.into(), source })?;
        // Version gate first so a newer schema fails with the right error.
        let probe: VersionProbe = serde_json::from_str(&text).map_err(|e| MlpError::Parse {
            path: path.into(),
            message: e.to_string(),
        })?;
        if probe.schema_version != MODEL_SCHEMA_VERSION {
            return Err(MlpError::SchemaVersion {
                path: path.into(),
                found: probe.schema_version,
                expected: MODEL_SCHEMA_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| MlpError::Parse {
            path: path.into(),
            message: e.to_string(),
        })?;
        Ok(file.model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    model: MlpModel,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::LayerParams;

    fn tiny_model() -> MlpModel {
        MlpModel {
            net: Net {
                layers: vec![
                    LayerParams { in_dim: 2, out_dim: 2, weights: vec![1.0, -1.0, 0.5, 0.25], biases: vec![0.0, 0.1] },
                    LayerParams { in_dim: 2, out_dim: 1, weights: vec![1.0, 2.0], biases: vec![-0.3] },
                ],
            },
            feature_names: vec!["a".into(), "tau".into(), "b".into()],
            kept: vec![0, 2],
            dropped: vec![DroppedFeature { index: 1, name: "tau".into(), value: 3.8 }],
            input_norm: Normalization { mean: vec![0.5, 1.0], scale: vec![2.0, 0.5] },
            target_norm: TargetNormalization { mean: 10.0, scale: 4.0 },
            metadata: ModelMetadata::default(),
        }
    }

    #[test]
    fn forward_skips_dropped_features_and_denormalizes() {
        let m = tiny_model();
        let x = [1.5, 3.8, 1.25];
        // kept = (1.5, 1.25) -> normalized (0.5, 0.5)
        // h = relu([0.5*1 - 0.5*1, 0.5*0.5 + 0.5*0.25 + 0.1]) = [0, 0.475]
        // out = 0*1 + 0.475*2 - 0.3 = 0.65 -> 10 + 4*0.65 = 12.6
        let y = m.forward(&x).unwrap();
        assert!((y - 12.6).abs() < 1e-12, "{y}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = tiny_model();
        assert!(m.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn save_load_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let m = tiny_model();
        m.save(&path).unwrap();
        let loaded = MlpModel::load(&path).unwrap();
        assert_eq!(m, loaded);
        let x = [0.123456789101112, 3.8, -2.71828182845];
        assert_eq!(m.forward(&x).unwrap().to_bits(), loaded.forward(&x).unwrap().to_bits());
    }

    #[test]
    fn truncated_file_fails_to_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        tiny_model().save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(MlpModel::load(&path), Err(MlpError::Parse { .. })));
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        tiny_model().save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap().replace(
            "\"schema_version\": 1",
            "\"schema_version\": 99",
        );
        std::fs::write(&path, text).unwrap();
        assert!(matches!(MlpModel::load(&path), Err(MlpError::SchemaVersion { found: 99, .. })));
    }

    #[test]
    fn normalization_inverts() {
        let t = TargetNormalization { mean: 123.4, scale: 55.5 };
        for y in [-10.0, 0.0, 1e6, 123.4] {
            assert!((t.denormalize(t.normalize(y)) - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}
