//! Sawtooth squaring, products and monomials on `[0,1]`.

use alloc::vec;
use alloc::vec::Vec;

use super::{ApproxError, MultiIndex};
use crate::calculus::{concat, identity_net, parallel_split_input};
use crate::net::{Layer, Matrix, Network};

/// How `x ↦ x²` is approximated on `[0,1]`.
///
/// Both schemes produce the piecewise-linear interpolant of `x²` on `2^m`
/// equal pieces (`m` = refinement), with error at most `2^{−2m−2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SquareScheme {
    /// `x − Σ_{s ≤ m} g_s(x)/4^s` with `g_s` the `s`-fold composition of the
    /// hat function; `m + 1` layers.
    Composed,
    /// The same interpolant written as `Σ_k c_k ρ(x − k/2^m)`; two layers for
    /// every `m`.
    #[default]
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MulConfig {
    pub scheme: SquareScheme,
    pub refinement: u32,
}

pub const MAX_REFINEMENT: u32 = 24;

impl MulConfig {
    pub fn new(scheme: SquareScheme, refinement: u32) -> Result<Self, ApproxError> {
        if refinement == 0 || refinement > MAX_REFINEMENT {
            return Err(ApproxError::InvalidArgument("refinement must be in 1..=24"));
        }
        Ok(Self { scheme, refinement })
    }

    /// Sup error of the squaring network on `[0,1]`.
    pub fn square_error(&self) -> f64 {
        libm::ldexp(1.0, -2 * self.refinement as i32 - 2)
    }

    /// A priori bound on the sup error of [`monomial_net`] for degree `p` on
    /// `[0,1]^D`, allowing for intermediate values leaving `[0,1]` by the
    /// accumulated error.
    pub fn monomial_error_bound(&self, p: u32) -> f64 {
        if p <= 1 {
            return 0.0;
        }
        let e = self.square_error();
        let mut delta = 0.0;
        for _ in 0..ceil_log2(p) {
            let e_eff = e + delta + delta * delta;
            delta = 2.0 * delta + delta * delta + 3.0 * e_eff;
        }
        delta
    }
}

fn ceil_log2(p: u32) -> u32 {
    crate::calculus::ceil_log2(p as usize)
}

/// Approximation of `x ↦ x²` on `[0,1]`.
pub fn square_net(config: &MulConfig) -> Network {
    match config.scheme {
        SquareScheme::Flat => flat_square(config.refinement),
        SquareScheme::Composed => composed_square(config.refinement),
    }
}

fn flat_square(m: u32) -> Network {
    let n = 1usize << m;
    let step = 1.0 / n as f64;
    let w1 = Matrix::from_row_major(n, 1, vec![1.0; n]);
    let b1: Vec<f64> = (0..n).map(|k| -(k as f64) * step).collect();
    let mut out = vec![2.0 * step; n];
    out[0] = step;
    Network::new(vec![
        Layer::new_unchecked(w1, b1),
        Layer::linear(Matrix::row_vector(&out)),
    ])
    .expect("valid flat square")
}

// State after each hidden layer: (ρ(a), ρ(u), ρ(u − 1/2), ρ(u − 1)) with `a`
// the running approximation and `u` the current sawtooth; `g(u)` is
// `2ρ(u) − 4ρ(u − 1/2) + 2ρ(u − 1)`.
fn composed_square(m: u32) -> Network {
    let shifts = [0.0, 0.0, -0.5, -1.0];
    let first = Layer::new_unchecked(Matrix::from_row_major(4, 1, vec![1.0; 4]), shifts.to_vec());
    let mut layers = vec![first];
    let hat = [0.0, 2.0, -4.0, 2.0];
    for s in 1..=m {
        let scale = libm::ldexp(1.0, -2 * s as i32);
        // a' = a − g(u)/4^s
        let a_row: Vec<f64> = (0..4)
            .map(|j| if j == 0 { 1.0 } else { -hat[j] * scale })
            .collect();
        if s == m {
            layers.push(Layer::linear(Matrix::row_vector(&a_row)));
        } else {
            let mut w = Matrix::zeros(4, 4);
            for j in 0..4 {
                w.set(0, j, a_row[j]);
                for r in 1..4 {
                    w.set(r, j, hat[j]);
                }
            }
            layers.push(Layer::new_unchecked(w, shifts.to_vec()));
        }
    }
    Network::new(layers).expect("valid composed square")
}

/// `net` with a linear map `pre` applied before its first layer and `post`
/// after its last one; both are folded into the existing layers.
fn fuse_linear(pre: Option<&Matrix>, net: Network, post: Option<&Matrix>) -> Network {
    let mut layers = net.into_layers();
    if let Some(p) = pre {
        let l = &layers[0];
        layers[0] = Layer::new_unchecked(l.weight().matmul(p), l.bias().to_vec());
    }
    if let Some(q) = post {
        let last = layers.len() - 1;
        let l = &layers[last];
        layers[last] = Layer::new_unchecked(q.matmul(l.weight()), q.mul_vec(l.bias()));
    }
    Network::new(layers).expect("fused shapes agree")
}

/// `(x, y) ↦ xy` via `2S((x+y)/2) − S(x)/2 − S(y)/2` with `S` the squaring
/// network; error at most `3·square_error` on `[0,1]²`.
pub fn product_net(config: &MulConfig) -> Network {
    let sq = square_net(config);
    let stacked = parallel_split_input(&[&sq, &sq, &sq]).expect("equal depths");
    let pre = Matrix::from_row_major(3, 2, vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5]);
    let post = Matrix::row_vector(&[-0.5, -0.5, 2.0]);
    fuse_linear(Some(&pre), stacked, Some(&post))
}

/// Approximation of `x ↦ x^α` on `[0,1]^D`.
///
/// Degree 0 is the constant 1 and degree 1 a coordinate selection (both exact,
/// one layer). Higher degrees multiply the selected factors pairwise in a
/// balanced tree of `⌈log₂|α|⌉` levels.
pub fn monomial_net(alpha: &MultiIndex, config: &MulConfig) -> Network {
    let dim = alpha.dim();
    let factors: Vec<usize> = alpha
        .support()
        .flat_map(|(i, a)| core::iter::repeat_n(i, a as usize))
        .collect();
    let p = factors.len();
    if p == 0 {
        return Network::new(vec![
            Layer::new(Matrix::zeros(1, dim), vec![1.0]).expect("finite")
        ])
        .expect("valid constant");
    }
    let mut select = Matrix::zeros(p, dim);
    for (r, &i) in factors.iter().enumerate() {
        select.set(r, i, 1.0);
    }
    if p == 1 {
        return Network::new(vec![Layer::linear(select)]).expect("valid selection");
    }
    let prod = product_net(config);
    let pass = identity_net(1, prod.depth()).expect("positive depth");
    let mut width = p;
    let mut net: Option<Network> = None;
    while width > 1 {
        let mut blocks: Vec<&Network> = vec![&prod; width / 2];
        if width % 2 == 1 {
            blocks.push(&pass);
        }
        let level = parallel_split_input(&blocks).expect("equal depths");
        net = Some(match net {
            None => fuse_linear(Some(&select), level, None),
            Some(prev) => concat(&level, &prev).expect("chained widths agree"),
        });
        width = width.div_ceil(2);
    }
    net.expect("at least one level")
}

/// Monomial network with the smallest refinement whose error bound is at
/// most `epsilon`.
pub fn mul_net(
    alpha: &MultiIndex,
    epsilon: f64,
    scheme: SquareScheme,
) -> Result<(Network, MulConfig), ApproxError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ApproxError::InadmissibleEpsilon(epsilon));
    }
    let config = (1..=MAX_REFINEMENT)
        .map(|m| MulConfig {
            scheme,
            refinement: m,
        })
        .find(|c| c.monomial_error_bound(alpha.degree()) <= epsilon)
        .ok_or(ApproxError::InadmissibleEpsilon(epsilon))?;
    Ok((monomial_net(alpha, &config), config))
}
