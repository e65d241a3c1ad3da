use alloc::vec::Vec;
use core::fmt;

use super::{Layer, Matrix, NetError, Network};

/// Unchecked network description, e.g. freshly decoded from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNetwork {
    pub input_dim: usize,
    /// `(weight, bias)` pairs in application order.
    pub layers: Vec<(Matrix, Vec<f64>)>,
}

/// A broken invariant. Layer indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    BiasLength {
        layer: usize,
        expected: usize,
        found: usize,
    },
    /// `cols(A_layer)` differs from the previous layer's output width
    /// (or from `input_dim` for the first layer).
    Chain {
        layer: usize,
        expected: usize,
        found: usize,
    },
    /// Non-finite entry; `col == None` points at the bias.
    NonFinite {
        layer: usize,
        row: usize,
        col: Option<usize>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "network has no layers"),
            Violation::BiasLength {
                layer,
                expected,
                found,
            } => write!(
                f,
                "layer {layer}: bias has length {found}, weight has {expected} rows"
            ),
            Violation::Chain {
                layer,
                expected,
                found,
            } => write!(
                f,
                "layer {layer}: weight has {found} columns, previous width is {expected}"
            ),
            Violation::NonFinite {
                layer,
                row,
                col: Some(c),
            } => write!(f, "layer {layer}: weight[{row}][{c}] is not finite"),
            Violation::NonFinite {
                layer,
                row,
                col: None,
            } => write!(f, "layer {layer}: bias[{row}] is not finite"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub(crate) fn first_non_finite(layer: usize, weight: &Matrix, bias: &[f64]) -> Option<Violation> {
    non_finite(layer, weight, bias).next()
}

fn non_finite<'a>(
    layer: usize,
    weight: &'a Matrix,
    bias: &'a [f64],
) -> impl Iterator<Item = Violation> + 'a {
    let cols = weight.cols().max(1);
    let w = weight
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(move |(i, _)| Violation::NonFinite {
            layer,
            row: i / cols,
            col: Some(i % cols),
        });
    let b = bias
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(move |(row, _)| Violation::NonFinite {
            layer,
            row,
            col: None,
        });
    w.chain(b)
}

impl RawNetwork {
    /// Collects every invariant violation; the report is empty iff the
    /// description forms a valid [`Network`].
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.layers.is_empty() {
            violations.push(Violation::Empty);
        }
        let mut width = self.input_dim;
        for (i, (w, b)) in self.layers.iter().enumerate() {
            let layer = i + 1;
            if w.cols() != width {
                violations.push(Violation::Chain {
                    layer,
                    expected: width,
                    found: w.cols(),
                });
            }
            if b.len() != w.rows() {
                violations.push(Violation::BiasLength {
                    layer,
                    expected: w.rows(),
                    found: b.len(),
                });
            }
            violations.extend(non_finite(layer, w, b));
            width = w.rows();
        }
        ValidationReport { violations }
    }

    pub fn build(self) -> Result<Network, NetError> {
        if let Some(v) = self.validate().violations.into_iter().next() {
            return Err(NetError::Invalid(v));
        }
        let layers = self
            .layers
            .into_iter()
            .map(|(w, b)| Layer::new_unchecked(w, b))
            .collect();
        Ok(Network { layers })
    }
}
