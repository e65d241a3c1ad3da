//! Dense ReLU feedforward networks.
//!
//! A [`Network`] is an ordered list of affine layers `(A_1, b_1), ..., (A_L, b_L)`
//! stored in application order. Its realization is
//!
//! ```text
//! R(x) = A_L ρ(A_{L-1} ρ( ... ρ(A_1 x + b_1) ... ) + b_{L-1}) + b_L
//! ```
//!
//! with `ρ` the coordinatewise `max(·, 0)`; the last layer carries no activation.
//!
//! Weights are stored dense. Each layer also keeps a row-compressed copy of its
//! nonzero entries, used only to speed up evaluation of the very sparse
//! block-structured networks the combinators produce.

mod matrix;
mod validate;

use alloc::vec::Vec;

use thiserror::Error;

pub(crate) use matrix::negate as matrix_negate;
pub use matrix::Matrix;
pub use validate::{RawNetwork, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("layer {layer}: expected input of length {expected}, got {found}")]
    DimensionMismatch {
        /// 1-based layer index.
        layer: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid network: {0}")]
    Invalid(Violation),
    #[error("batch of length {len} is not a multiple of the input dimension {dim}")]
    RaggedBatch { len: usize, dim: usize },
}

/// The triple `(W, L, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityTriple {
    /// `W`: number of nonzero entries over all weights and biases.
    pub param_count: usize,
    /// `L`: number of affine layers.
    pub depth: usize,
    /// `B`: largest absolute entry.
    pub max_weight: f64,
}

#[derive(Debug, Clone)]
struct SparseRows {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseRows {
    fn from_dense(m: &Matrix) -> Self {
        let mut offsets = Vec::with_capacity(m.rows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for r in 0..m.rows() {
            for (c, &v) in m.row(r).iter().enumerate() {
                if v != 0.0 {
                    cols.push(c as u32);
                    vals.push(v);
                }
            }
            offsets.push(cols.len());
        }
        Self {
            offsets,
            cols,
            vals,
        }
    }
}

/// One affine map `x ↦ A x + b`.
#[derive(Debug, Clone)]
pub struct Layer {
    weight: Matrix,
    bias: Vec<f64>,
    sparse: SparseRows,
}

impl PartialEq for Layer {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.bias == other.bias
    }
}

impl Layer {
    pub fn new(weight: Matrix, bias: Vec<f64>) -> Result<Self, NetError> {
        if bias.len() != weight.rows() {
            return Err(NetError::Invalid(Violation::BiasLength {
                layer: 1,
                expected: weight.rows(),
                found: bias.len(),
            }));
        }
        if let Some(v) = validate::first_non_finite(1, &weight, &bias) {
            return Err(NetError::Invalid(v));
        }
        Ok(Self::new_unchecked(weight, bias))
    }

    /// Layer with zero bias.
    pub fn linear(weight: Matrix) -> Self {
        let rows = weight.rows();
        Self::new(weight, alloc::vec![0.0; rows]).expect("finite linear layer")
    }

    pub(crate) fn new_unchecked(weight: Matrix, bias: Vec<f64>) -> Self {
        debug_assert_eq!(bias.len(), weight.rows());
        let sparse = SparseRows::from_dense(&weight);
        Self {
            weight,
            bias,
            sparse,
        }
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn in_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    fn affine_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let s = &self.sparse;
        for r in 0..self.out_dim() {
            let mut acc = self.bias[r];
            for k in s.offsets[r]..s.offsets[r + 1] {
                acc += s.vals[k] * input[s.cols[k] as usize];
            }
            out.push(acc);
        }
    }
}

/// A ReLU network with at least one layer and a consistent dimension chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self, NetError> {
        let Some(first) = layers.first() else {
            return Err(NetError::Invalid(Violation::Empty));
        };
        let mut prev = first.out_dim();
        for (i, layer) in layers.iter().enumerate().skip(1) {
            if layer.in_dim() != prev {
                return Err(NetError::Invalid(Violation::Chain {
                    layer: i + 1,
                    expected: prev,
                    found: layer.in_dim(),
                }));
            }
            prev = layer.out_dim();
        }
        Ok(Self { layers })
    }

    /// Builds a network from `(weight, bias)` pairs in application order.
    pub fn from_parts(parts: Vec<(Matrix, Vec<f64>)>) -> Result<Self, NetError> {
        let input_dim = parts.first().map_or(0, |(w, _)| w.cols());
        RawNetwork {
            input_dim,
            layers: parts,
        }
        .build()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    /// Realization `R(Φ)(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, NetError> {
        if x.len() != self.input_dim() {
            return Err(NetError::DimensionMismatch {
                layer: 1,
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        self.forward(&mut cur, &mut next);
        Ok(cur)
    }

    /// Evaluates a flat row-major batch of points; returns outputs row-major.
    pub fn evaluate_batch(&self, points: &[f64]) -> Result<Vec<f64>, NetError> {
        let dim = self.input_dim();
        if points.len() % dim != 0 {
            return Err(NetError::RaggedBatch {
                len: points.len(),
                dim,
            });
        }
        let mut out = Vec::with_capacity(points.len() / dim * self.output_dim());
        let mut cur = Vec::new();
        let mut next = Vec::new();
        for x in points.chunks_exact(dim) {
            cur.clear();
            cur.extend_from_slice(x);
            self.forward(&mut cur, &mut next);
            out.extend_from_slice(&cur);
        }
        Ok(out)
    }

    /// Convenience for scalar-output networks.
    pub fn evaluate_scalar(&self, x: &[f64]) -> Result<f64, NetError> {
        Ok(self.evaluate(x)?[0])
    }

    fn forward(&self, cur: &mut Vec<f64>, next: &mut Vec<f64>) {
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine_into(cur, next);
            if i < last {
                for v in next.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            core::mem::swap(cur, next);
        }
    }

    pub fn complexity(&self) -> ComplexityTriple {
        let mut param_count = 0;
        let mut max_weight = 0.0f64;
        for layer in &self.layers {
            for &v in layer.weight.as_slice().iter().chain(layer.bias.iter()) {
                if v != 0.0 {
                    param_count += 1;
                    max_weight = max_weight.max(v.abs());
                }
            }
        }
        ComplexityTriple {
            param_count,
            depth: self.layers.len(),
            max_weight,
        }
    }

    pub fn to_raw(&self) -> RawNetwork {
        RawNetwork {
            input_dim: self.input_dim(),
            layers: self
                .layers
                .iter()
                .map(|l| (l.weight.clone(), l.bias.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scalar_layer(w: f64, b: f64) -> (Matrix, Vec<f64>) {
        (Matrix::from_row_major(1, 1, vec![w]), vec![b])
    }

    #[test]
    fn last_layer_has_no_activation() {
        let net = Network::from_parts(vec![scalar_layer(1.0, 0.0)]).unwrap();
        assert_eq!(net.evaluate(&[-3.0]).unwrap(), vec![-3.0]);
    }

    #[test]
    fn hidden_relu_kills_negative() {
        let net =
            Network::from_parts(vec![scalar_layer(1.0, 0.0), scalar_layer(1.0, 0.0)]).unwrap();
        assert_eq!(net.evaluate(&[-3.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn wrong_input_length_names_first_layer() {
        let net = Network::from_parts(vec![scalar_layer(1.0, 0.0)]).unwrap();
        assert_eq!(
            net.evaluate(&[1.0, 2.0]),
            Err(NetError::DimensionMismatch {
                layer: 1,
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn complexity_counts_nonzeros() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let net = Network::from_parts(vec![(a, vec![0.0, 0.0])]).unwrap();
        assert_eq!(
            net.complexity(),
            ComplexityTriple {
                param_count: 2,
                depth: 1,
                max_weight: 2.0
            }
        );
    }

    #[test]
    fn batch_matches_pointwise() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0], vec![0.5, 2.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let net = Network::from_parts(vec![(a, vec![0.1, -0.2]), (b, vec![0.3])]).unwrap();
        let pts = [0.2, 0.9, -1.0, 0.5, 3.0, 1.0];
        let batch = net.evaluate_batch(&pts).unwrap();
        for (i, x) in pts.chunks(2).enumerate() {
            assert_eq!(batch[i], net.evaluate_scalar(x).unwrap());
        }
        assert!(net.evaluate_batch(&pts[..5]).is_err());
    }
}
