//! The bare network: dense layers with ReLU hidden activations and an
//! affine scalar output, plus the Huber loss with L2 weight penalty and its
//! analytic gradient.
//!
//! Everything here operates in normalized feature/target space; the
//! surrounding `MlpModel` handles scaling.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One dense layer; weights are row-major with shape (out_dim, in_dim).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        LayerParams {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    pub fn weight(&self, out: usize, inp: usize) -> f64 {
        self.weights[out * self.in_dim + inp]
    }

    /// y = W x + b.
    pub fn affine(&self, x: &[f64], y: &mut Vec<f64>) {
        debug_assert_eq!(x.len(), self.in_dim);
        y.clear();
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = self.biases[o];
            for (w, xv) in row.iter().zip(x) {
                acc += w * xv;
            }
            y.push(acc);
        }
    }
}

/// Huber loss of a residual: quadratic within delta, linear outside.
pub fn huber_loss(residual: f64, delta: f64) -> f64 {
    let a = residual.abs();
    if a <= delta {
        0.5 * residual * residual
    } else {
        delta * (a - 0.5 * delta)
    }
}

/// d huber / d residual; continuous everywhere.
pub fn huber_grad(residual: f64, delta: f64) -> f64 {
    if residual.abs() <= delta {
        residual
    } else {
        delta * residual.signum()
    }
}

/// A feed-forward net: `layers[0..n-1]` are ReLU hidden layers, the last
/// layer is affine with a single output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub layers: Vec<LayerParams>,
}

impl Net {
    /// He-uniform initialization over the given dimensions
    /// (input, hidden..., 1).
    pub fn new_seeded(dims: &[usize], seed: u64) -> Net {
        assert!(dims.len() >= 2 && *dims.last().unwrap() == 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (in_dim, out_dim) = (w[0], w[1]);
            let limit = (6.0 / in_dim as f64).sqrt();
            let mut layer = LayerParams::zeros(in_dim, out_dim);
            for v in layer.weights.iter_mut() {
                *v = rng.gen_range(-limit..limit);
            }
            layers.push(layer);
        }
        Net { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim)
    }

    pub fn hidden_dims(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.out_dim)
            .collect()
    }

    /// Scalar output for one (normalized) input.
    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine(&cur, &mut next);
            if i + 1 < self.layers.len() {
                for v in next.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    }

    /// Pre-activations of every hidden neuron for one input, layer by layer.
    pub fn preactivations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut result = Vec::with_capacity(self.layers.len() - 1);
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers[..self.layers.len() - 1] {
            layer.affine(&cur, &mut next);
            result.push(next.clone());
            for v in next.iter_mut() {
                *v = v.max(0.0);
            }
            std::mem::swap(&mut cur, &mut next);
        }
        result
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn get_param(&self, idx: usize) -> f64 {
        let (layer, offset) = self.locate(idx);
        let l = &self.layers[layer];
        if offset < l.weights.len() {
            l.weights[offset]
        } else {
            l.biases[offset - l.weights.len()]
        }
    }

    pub fn set_param(&mut self, idx: usize, value: f64) {
        let (layer, offset) = self.locate(idx);
        let l = &mut self.layers[layer];
        if offset < l.weights.len() {
            l.weights[offset] = value;
        } else {
            l.biases[offset - l.weights.len()] = value;
        }
    }

    /// Whether flat parameter index `idx` is a weight (true) or bias.
    pub fn param_is_weight(&self, idx: usize) -> bool {
        let (layer, offset) = self.locate(idx);
        offset < self.layers[layer].weights.len()
    }

    fn locate(&self, mut idx: usize) -> (usize, usize) {
        for (i, l) in self.layers.iter().enumerate() {
            let size = l.weights.len() + l.biases.len();
            if idx < size {
                return (i, idx);
            }
            idx -= size;
        }
        panic!("parameter index out of range");
    }

    /// Mean Huber loss over a batch plus the L2 weight penalty
    /// (biases excluded).
    pub fn batch_loss(&self, xs: &[Vec<f64>], ys: &[f64], delta: f64, l2: f64) -> f64 {
        let mut data = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            data += huber_loss(self.forward(x) - y, delta);
        }
        data /= xs.len() as f64;
        let penalty: f64 = self
            .layers
            .iter()
            .map(|l| l.weights.iter().map(|w| w * w).sum::<f64>())
            .sum();
        data + l2 * penalty
    }

    /// Loss and its gradient with respect to every parameter, flattened in
    /// the same order as `get_param`.
    pub fn batch_loss_and_grad(
        &self,
        xs: &[Vec<f64>],
        ys: &[f64],
        delta: f64,
        l2: f64,
        grads: &mut [LayerParams],
    ) -> f64 {
        debug_assert_eq!(grads.len(), self.layers.len());
        for g in grads.iter_mut() {
            g.weights.iter_mut().for_each(|v| *v = 0.0);
            g.biases.iter_mut().for_each(|v| *v = 0.0);
        }
        let n = xs.len() as f64;
        let depth = self.layers.len();
        let mut loss = 0.0;

        // Per-sample forward caching post-activations, then backward.
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(depth + 1);
        for (x, &y) in xs.iter().zip(ys) {
            acts.clear();
            acts.push(x.clone());
            for (i, layer) in self.layers.iter().enumerate() {
                let mut out = Vec::new();
                layer.affine(acts.last().unwrap(), &mut out);
                if i + 1 < depth {
                    for v in out.iter_mut() {
                        *v = v.max(0.0);
                    }
                }
                acts.push(out);
            }
            let pred = acts[depth][0];
            let r = pred - y;
            loss += huber_loss(r, delta);
            // Backward pass: delta of the output layer.
            let mut grad_out = vec![huber_grad(r, delta) / n];
            for i in (0..depth).rev() {
                let layer = &self.layers[i];
                let input = &acts[i];
                let g = &mut grads[i];
                let mut grad_in = vec![0.0; layer.in_dim];
                for o in 0..layer.out_dim {
                    let go = grad_out[o];
                    if go != 0.0 {
                        let row = o * layer.in_dim;
                        for (j, xv) in input.iter().enumerate() {
                            g.weights[row + j] += go * xv;
                            grad_in[j] += go * layer.weights[row + j];
                        }
                        g.biases[o] += go;
                    }
                }
                if i > 0 {
                    // ReLU mask: the stored activation is max(0, pre), so a
                    // zero activation means a dead neuron (ties at exactly
                    // zero carry zero gradient).
                    for (j, v) in acts[i].iter().enumerate() {
                        if *v <= 0.0 {
                            grad_in[j] = 0.0;
                        }
                    }
                }
                grad_out = grad_in;
            }
        }
        loss /= n;

        let mut penalty = 0.0;
        for (layer, g) in self.layers.iter().zip(grads.iter_mut()) {
            for (w, gw) in layer.weights.iter().zip(g.weights.iter_mut()) {
                penalty += w * w;
                *gw += 2.0 * l2 * w;
            }
        }
        loss + l2 * penalty
    }
}
