//! Network combinators with exact realizations and auditable `(W, L, B)`.
//!
//! | combinator | realization | W | L | B |
//! |---|---|---|---|---|
//! | [`concat`] | `R(Φ²) ∘ R(Φ¹)` | `≤ 2W₁ + 2W₂` | `L₁ + L₂` | `max` |
//! | [`parallel_shared_input`] | `x ↦ (R(Φ¹)(x), …)` | `ΣWᵢ` | `L` | `max` |
//! | [`parallel_split_input`] | `(x¹, …) ↦ (R(Φ¹)(x¹), …)` | `ΣWᵢ` | `L` | `max` |
//!
//! Parallel combinators require equal depths; pad shorter networks with
//! `concat(&identity_net(..)?, &net)` first.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::net::matrix_negate;
use crate::net::{Layer, Matrix, NetError, Network};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("cannot compose: inner network outputs {inner_out} values, outer expects {outer_in}")]
    ComposeMismatch { inner_out: usize, outer_in: usize },
    #[error("network {index} has {found} layers, expected {expected}; pad it with identity_net before parallelizing")]
    DepthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("network {index} takes {found} inputs, expected {expected}")]
    InputMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("no networks to combine")]
    Empty,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cube index {0} is not assigned to any group")]
    Unassigned(usize),
    #[error("cube index {0} is assigned to more than one group")]
    DuplicateAssignment(usize),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// `second ⊙ first`: realizes `R(second) ∘ R(first)` for every input.
///
/// The last layer of `first` is doubled into `(A; -A)`, `(b; -b)` and the
/// first layer of `second` becomes `(A, -A)`, so the interface uses
/// `ρ(z) - ρ(-z) = z`.
pub fn concat(second: &Network, first: &Network) -> Result<Network, CalculusError> {
    if first.output_dim() != second.input_dim() {
        return Err(CalculusError::ComposeMismatch {
            inner_out: first.output_dim(),
            outer_in: second.input_dim(),
        });
    }
    let (inner_last, inner_rest) = first.layers().split_last().expect("non-empty");
    let (outer_first, outer_rest) = second.layers().split_first().expect("non-empty");

    let mut layers = Vec::with_capacity(first.depth() + second.depth());
    layers.extend(inner_rest.iter().cloned());

    let w = Matrix::vstack(&[inner_last.weight(), &inner_last.weight().negated()]);
    let mut b = inner_last.bias().to_vec();
    b.extend(matrix_negate(inner_last.bias()));
    layers.push(Layer::new_unchecked(w, b));

    let w = Matrix::hstack(&[outer_first.weight(), &outer_first.weight().negated()]);
    layers.push(Layer::new_unchecked(w, outer_first.bias().to_vec()));
    layers.extend(outer_rest.iter().cloned());

    Ok(Network::new(layers)?)
}

/// Concatenates a chain given in application order: `nets[0]` runs first.
pub fn concat_chain(nets: &[&Network]) -> Result<Network, CalculusError> {
    let (first, rest) = nets.split_first().ok_or(CalculusError::Empty)?;
    let mut acc = (*first).clone();
    for net in rest {
        acc = concat(net, &acc)?;
    }
    Ok(acc)
}

fn common_depth(nets: &[&Network]) -> Result<usize, CalculusError> {
    let depth = nets.first().ok_or(CalculusError::Empty)?.depth();
    for (index, n) in nets.iter().enumerate() {
        if n.depth() != depth {
            return Err(CalculusError::DepthMismatch {
                index,
                expected: depth,
                found: n.depth(),
            });
        }
    }
    Ok(depth)
}

fn stacked_bias(nets: &[&Network], layer: usize) -> Vec<f64> {
    nets.iter()
        .flat_map(|n| n.layers()[layer].bias().iter().copied())
        .collect()
}

/// `[Φ¹, …, Φᴷ]`: all networks read the same input; outputs are stacked.
pub fn parallel_shared_input(nets: &[&Network]) -> Result<Network, CalculusError> {
    let depth = common_depth(nets)?;
    let dim = nets[0].input_dim();
    for (index, n) in nets.iter().enumerate() {
        if n.input_dim() != dim {
            return Err(CalculusError::InputMismatch {
                index,
                expected: dim,
                found: n.input_dim(),
            });
        }
    }
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        let blocks: Vec<&Matrix> = nets.iter().map(|n| n.layers()[l].weight()).collect();
        let w = if l == 0 {
            Matrix::vstack(&blocks)
        } else {
            Matrix::block_diag(&blocks)
        };
        layers.push(Layer::new_unchecked(w, stacked_bias(nets, l)));
    }
    Ok(Network::new(layers)?)
}

/// `⟨Φ¹, …, Φᴷ⟩`: the input is the concatenation of the networks' inputs;
/// every layer is block-diagonal.
pub fn parallel_split_input(nets: &[&Network]) -> Result<Network, CalculusError> {
    let depth = common_depth(nets)?;
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        let blocks: Vec<&Matrix> = nets.iter().map(|n| n.layers()[l].weight()).collect();
        layers.push(Layer::new_unchecked(
            Matrix::block_diag(&blocks),
            stacked_bias(nets, l),
        ));
    }
    Ok(Network::new(layers)?)
}

/// Identity on `ℝ^dim` with exactly `depth` layers.
///
/// Depth 1 is `(I, 0)`; otherwise `(I; -I)`, `I_{2D}` repeated, `(I, -I)`,
/// giving `W = 2·dim·depth` and `B = 1`.
pub fn identity_net(dim: usize, depth: usize) -> Result<Network, CalculusError> {
    if dim == 0 || depth == 0 {
        return Err(CalculusError::InvalidArgument(
            "identity_net needs dim >= 1 and depth >= 1",
        ));
    }
    if depth == 1 {
        return Ok(Network::new(vec![Layer::linear(Matrix::identity(dim))])?);
    }
    let id = Matrix::identity(dim);
    let neg = id.negated();
    let mut layers = Vec::with_capacity(depth);
    layers.push(Layer::linear(Matrix::vstack(&[&id, &neg])));
    for _ in 0..depth - 2 {
        layers.push(Layer::linear(Matrix::identity(2 * dim)));
    }
    layers.push(Layer::linear(Matrix::hstack(&[&id, &neg])));
    Ok(Network::new(layers)?)
}

/// Pads `net` with an identity prefix on its output side until it has `depth`
/// layers. Returns a clone when no padding is needed.
pub fn pad_to_depth(net: &Network, depth: usize) -> Result<Network, CalculusError> {
    match depth.checked_sub(net.depth()) {
        Some(0) => Ok(net.clone()),
        Some(extra) => concat(&identity_net(net.output_dim(), extra)?, net),
        None => Err(CalculusError::InvalidArgument(
            "network is deeper than the requested depth",
        )),
    }
}

fn max2() -> Network {
    let a1 = Matrix::from_row_major(2, 2, vec![1.0, 0.0, -1.0, 1.0]);
    let a2 = Matrix::from_row_major(1, 2, vec![1.0, 1.0]);
    Network::new(vec![Layer::linear(a1), Layer::linear(a2)]).expect("valid max2")
}

/// Maximum of `arity` nonnegative inputs.
///
/// With `t = ⌈log₂ arity⌉` the input is zero-padded to `2^{t+1}` channels and
/// reduced by `t + 1` levels of pairwise `max(a, b) = ρ(a) + ρ(b - a)`
/// blocks, so `L = 2(t + 1) + 1` and `B = 1`. On inputs with negative
/// coordinates the result is the max over the ρ-rectified tree, not the max of
/// the inputs.
pub fn max_net(arity: usize) -> Result<Network, CalculusError> {
    if arity < 2 {
        return Err(CalculusError::InvalidArgument("max_net needs arity >= 2"));
    }
    let t = ceil_log2(arity);
    let width = 1usize << (t + 1);
    let mut dummy = Matrix::zeros(width, arity);
    for i in 0..arity {
        dummy.set(i, i, 1.0);
    }
    let mut net = Network::new(vec![Layer::linear(dummy)])?;
    let block = max2();
    for level in (0..=t).rev() {
        let copies: Vec<&Network> = (0..1usize << level).map(|_| &block).collect();
        let stage = parallel_split_input(&copies)?;
        net = concat(&stage, &net)?;
    }
    Ok(net)
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Gate `(x, y) ↦ (2M+2)·ρ(Σₗ Tₗ(xₗ) + y/(2M+2) − D)` for the cube of side
/// `gamma` centred at `center`, where `Tₗ` is the trapezoid that equals 1 on
/// `|z − ιₗ| ≤ γ/2`, vanishes for `|z − ιₗ| ≥ γ` and is linear in between.
///
/// Each trapezoid is written as `(|z₁| − |z₂| − |z₃| + |z₄|)/γ` with
/// `zₖ = z − ι + (γ, γ/2, −γ/2, −γ)ₖ` and `|z| = ρ(z) + ρ(−z)`; `y` passes as
/// `ρ(y) − ρ(−y)`. For a generic center this gives `W = 24D + 6` and `L = 3`;
/// a shift that lands exactly on zero drops its two bias entries from `W`.
pub fn cut_net(center: &[f64], gamma: f64, bound: f64) -> Result<Network, CalculusError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(CalculusError::InvalidArgument("cut_net needs gamma > 0"));
    }
    if !(bound > 0.0) || !bound.is_finite() {
        return Err(CalculusError::InvalidArgument("cut_net needs M > 0"));
    }
    let dim = center.len();
    if dim == 0 {
        return Err(CalculusError::InvalidArgument(
            "cut_net needs a non-empty center",
        ));
    }
    let scale = 2.0 * bound + 2.0;
    let shifts = [gamma, gamma / 2.0, -gamma / 2.0, -gamma];
    let signs = [1.0, -1.0, -1.0, 1.0];
    let half = 4 * dim + 1;

    let mut w1 = Matrix::zeros(half, dim + 1);
    let mut b1 = Vec::with_capacity(half);
    for (l, &iota) in center.iter().enumerate() {
        for (k, &s) in shifts.iter().enumerate() {
            w1.set(4 * l + k, l, 1.0);
            b1.push(s - iota);
        }
    }
    w1.set(4 * dim, dim, 1.0);
    b1.push(0.0);
    let first = Layer::new_unchecked(
        Matrix::vstack(&[&w1, &w1.negated()]),
        [b1.clone(), matrix_negate(&b1)].concat(),
    );

    let mut half_row = Vec::with_capacity(half);
    for _ in 0..dim {
        half_row.extend(signs.iter().map(|s| s / gamma));
    }
    let mut row = half_row.clone();
    row.push(1.0 / scale);
    row.extend_from_slice(&half_row);
    row.push(-1.0 / scale);
    let second = Layer::new_unchecked(Matrix::row_vector(&row), vec![-(dim as f64)]);
    let third = Layer::linear(Matrix::row_vector(&[scale]));
    Ok(Network::new(vec![first, second, third])?)
}

/// `x ↦ min(max(1, x), 2M+1) − (M+1)` as the three-layer chain
/// `(1, −1)`, `(−1, 2M)`, `(−1, M)`.
pub fn clip_net(bound: f64) -> Result<Network, CalculusError> {
    if !(bound > 0.0) || !bound.is_finite() {
        return Err(CalculusError::InvalidArgument("clip_net needs M > 0"));
    }
    let scalar = |w: f64, b: f64| Layer::new_unchecked(Matrix::row_vector(&[w]), vec![b]);
    Ok(Network::new(vec![
        scalar(1.0, -1.0),
        scalar(-1.0, 2.0 * bound),
        scalar(-1.0, bound),
    ])?)
}

/// Coordinatewise clamp of `width` values to `[lo, hi]`:
/// `y ↦ lo + ρ(y − lo) − ρ(y − hi)`.
pub fn clamp_net(width: usize, lo: f64, hi: f64) -> Result<Network, CalculusError> {
    if width == 0 || !(lo < hi) {
        return Err(CalculusError::InvalidArgument(
            "clamp_net needs width >= 1 and lo < hi",
        ));
    }
    let mut w1 = Matrix::zeros(2 * width, width);
    let mut b1 = Vec::with_capacity(2 * width);
    let mut w2 = Matrix::zeros(width, 2 * width);
    for i in 0..width {
        w1.set(2 * i, i, 1.0);
        w1.set(2 * i + 1, i, 1.0);
        b1.push(-lo);
        b1.push(-hi);
        w2.set(i, 2 * i, 1.0);
        w2.set(i, 2 * i + 1, -1.0);
    }
    Ok(Network::new(vec![
        Layer::new_unchecked(w1, b1),
        Layer::new_unchecked(w2, vec![lo; width]),
    ])?)
}

/// Single affine layer `ℝ^{dim+count} → ℝ^{dim+1}` keeping the first `dim`
/// coordinates and coordinate `dim + keep` (`keep` is 0-based).
pub fn filter_net(dim: usize, count: usize, keep: usize) -> Result<Network, CalculusError> {
    if keep >= count {
        return Err(CalculusError::IndexOutOfRange {
            index: keep,
            len: count,
        });
    }
    let mut w = Matrix::zeros(dim + 1, dim + count);
    for i in 0..dim {
        w.set(i, i, 1.0);
    }
    w.set(dim, dim + keep, 1.0);
    Ok(Network::new(vec![Layer::linear(w)])?)
}

/// Single affine layer `ℝ^m → ℝ^K` whose output `j` sums the coordinates listed
/// in `groups[j]`. Every index in `0..m` must appear in exactly one group; empty
/// groups yield exact zero outputs.
pub fn group_sum_net(groups: &[Vec<usize>], m: usize) -> Result<Network, CalculusError> {
    if groups.is_empty() || m == 0 {
        return Err(CalculusError::Empty);
    }
    let mut seen = vec![false; m];
    let mut w = Matrix::zeros(groups.len(), m);
    for (j, group) in groups.iter().enumerate() {
        for &idx in group {
            if idx >= m {
                return Err(CalculusError::IndexOutOfRange { index: idx, len: m });
            }
            if core::mem::replace(&mut seen[idx], true) {
                return Err(CalculusError::DuplicateAssignment(idx));
            }
            w.set(j, idx, 1.0);
        }
    }
    if let Some(idx) = seen.iter().position(|s| !s) {
        return Err(CalculusError::Unassigned(idx));
    }
    Ok(Network::new(vec![Layer::linear(w)])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(net: &Network, x: &[f64]) -> Vec<f64> {
        net.evaluate(x).unwrap()
    }

    #[test]
    fn identity_chain_has_summed_depth() {
        let id = identity_net(1, 2).unwrap();
        let net = concat(&id, &id).unwrap();
        assert_eq!(net.depth(), 4);
        assert_eq!(eval(&net, &[-2.5]), vec![-2.5]);
    }

    #[test]
    fn identity_counts() {
        let net = identity_net(3, 4).unwrap();
        let c = net.complexity();
        assert_eq!((c.param_count, c.depth, c.max_weight), (24, 4, 1.0));
        assert_eq!(eval(&net, &[-1.0, 2.0, -0.5]), vec![-1.0, 2.0, -0.5]);
        let one = identity_net(3, 1).unwrap();
        assert_eq!(one.layers()[0].weight(), &Matrix::identity(3));
        assert!(one.layers()[0].bias().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn shared_parallel_duplicates_input() {
        let id = identity_net(2, 3).unwrap();
        let net = parallel_shared_input(&[&id, &id]).unwrap();
        assert_eq!(eval(&net, &[1.0, -2.0]), vec![1.0, -2.0, 1.0, -2.0]);
    }

    #[test]
    fn split_parallel_passes_blocks() {
        let id = identity_net(1, 2).unwrap();
        let net = parallel_split_input(&[&id, &id]).unwrap();
        assert_eq!(eval(&net, &[3.0, -4.0]), vec![3.0, -4.0]);
        for layer in net.layers() {
            let w = layer.weight();
            let (rh, ch) = (w.rows() / 2, w.cols() / 2);
            for r in 0..w.rows() {
                for c in 0..w.cols() {
                    if (r < rh) != (c < ch) {
                        assert_eq!(w.get(r, c), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn unequal_depth_is_rejected() {
        let a = identity_net(1, 2).unwrap();
        let b = identity_net(1, 3).unwrap();
        let err = parallel_shared_input(&[&a, &b]).unwrap_err();
        assert!(matches!(
            err,
            CalculusError::DepthMismatch {
                index: 1,
                expected: 2,
                found: 3
            }
        ));
        assert!(parallel_split_input(&[&a, &b]).is_err());
        let c = identity_net(2, 2).unwrap();
        assert!(matches!(
            parallel_shared_input(&[&a, &c]),
            Err(CalculusError::InputMismatch { .. })
        ));
    }

    #[test]
    fn max_of_two() {
        let net = max_net(2).unwrap();
        assert_eq!(eval(&net, &[3.0, 5.0]), vec![5.0]);
        assert_eq!(net.depth(), 5);
    }

    #[test]
    fn max_of_five_counts() {
        let net = max_net(5).unwrap();
        assert_eq!(eval(&net, &[0.0; 5]), vec![0.0]);
        let c = net.complexity();
        assert_eq!(c.depth, 9);
        assert!(c.param_count <= 210, "W = {}", c.param_count);
        assert_eq!(c.max_weight, 1.0);
        assert!(max_net(1).is_err());
    }

    #[test]
    fn cut_at_center_passes_value() {
        let net = cut_net(&[0.3, 0.7], 0.2, 1.0).unwrap();
        assert!((eval(&net, &[0.3, 0.7, 1.0])[0] - 1.0).abs() < 1e-12);
        // One coordinate more than gamma away from the center.
        assert_eq!(eval(&net, &[0.3, 0.95, 3.0]), vec![0.0]);
    }

    #[test]
    fn cut_complexity() {
        for dim in [1usize, 2, 3, 5] {
            let center: Vec<f64> = (0..dim).map(|i| 0.137 + 0.1 * i as f64).collect();
            let net = cut_net(&center, 0.11, 1.5).unwrap();
            let c = net.complexity();
            assert_eq!(c.param_count, 24 * dim + 6);
            assert_eq!(c.depth, 3);
        }
        assert!(cut_net(&[0.5], 0.0, 1.0).is_err());
    }

    #[test]
    fn clip_closed_form() {
        let net = clip_net(1.0).unwrap();
        assert_eq!(eval(&net, &[0.0]), vec![-1.0]);
        assert_eq!(eval(&net, &[10.0]), vec![1.0]);
        assert_eq!(eval(&net, &[2.0]), vec![0.0]);
        let c = net.complexity();
        assert!(c.param_count <= 12);
        assert_eq!(c.depth, 3);
        assert!(c.max_weight <= 2.0);
    }

    #[test]
    fn clamp_limits_values() {
        let net = clamp_net(2, 0.0, 4.0).unwrap();
        assert_eq!(eval(&net, &[-1.0, 5.0]), vec![0.0, 4.0]);
        assert_eq!(eval(&net, &[2.5, 0.5]), vec![2.5, 0.5]);
    }

    #[test]
    fn filter_selects_coordinates() {
        let net = filter_net(2, 3, 1).unwrap();
        assert_eq!(eval(&net, &[1.0, 2.0, 3.0, 4.0, 5.0]), vec![1.0, 2.0, 4.0]);
        assert_eq!(net.complexity().param_count, 3);
        assert!(filter_net(2, 3, 3).is_err());
        let padded = concat(&identity_net(3, 2).unwrap(), &net).unwrap();
        assert_eq!(
            eval(&padded, &[1.0, 2.0, 3.0, 4.0, 5.0]),
            vec![1.0, 2.0, 4.0]
        );
    }

    #[test]
    fn group_sums() {
        let net = group_sum_net(&[vec![0, 2], vec![1]], 3).unwrap();
        assert_eq!(eval(&net, &[1.0, 2.0, 4.0]), vec![5.0, 2.0]);
        let all = group_sum_net(&[vec![0, 1, 2]], 3).unwrap();
        assert_eq!(eval(&all, &[1.0, 2.0, 4.0]), vec![7.0]);
        let w = net.layers()[0].weight();
        for c in 0..3 {
            let col: f64 = (0..2).map(|r| w.get(r, c)).sum();
            assert_eq!(col, 1.0);
        }
        assert_eq!(
            group_sum_net(&[vec![0]], 2),
            Err(CalculusError::Unassigned(1))
        );
        assert_eq!(
            group_sum_net(&[vec![0, 1], vec![1]], 2),
            Err(CalculusError::DuplicateAssignment(1))
        );
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4]);
    }
}
