use alloc::vec::Vec;

use super::mul::{MulConfig, SquareScheme, MAX_REFINEMENT};
use super::poly::{pol_net_with, pol_refinement};
use super::{simul_net, taylor_expand, ApproxError, HolderTarget, TaylorPolynomial};
use crate::calculus::{clip_net, concat_chain, group_sum_net, max_net};
use crate::fit::{least_squares, RateFit};
use crate::geometry::{grid_cover, partition_cover, PointCloud};
use crate::net::{ComplexityTriple, Network};

/// Largest ambient dimension the builder accepts; the max network has arity
/// `3^D`.
pub const MAX_BUILD_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub scheme: SquareScheme,
    /// Extra refinement levels tried when the measured error exceeds `ε`.
    pub max_retries: u32,
    /// Starting refinement; derived from the a priori error bound if `None`.
    pub refinement: Option<u32>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            scheme: SquareScheme::Flat,
            max_retries: 12,
            refinement: None,
        }
    }
}

/// What was built, and how well it did on the support sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximatorSpec {
    pub epsilon: f64,
    pub gamma: f64,
    pub intrinsic_dim_bound: f64,
    pub complexity: ComplexityTriple,
    pub cubes: usize,
    pub groups: usize,
    pub refinement: u32,
    pub attempts: u32,
    pub empirical_sup_error: f64,
}

/// `γ = D⁻¹ (3M)^{−1/β} ε^{1/β}`, capped at 1.
pub fn auto_gamma(dim: usize, beta: f64, bound: f64, epsilon: f64) -> f64 {
    let g = libm::pow(3.0 * bound, -1.0 / beta) * libm::pow(epsilon, 1.0 / beta) / dim as f64;
    g.min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupError {
    pub value: f64,
    pub index: usize,
    pub witness: Vec<f64>,
}

/// Largest `|R(net)(x) − f(x)|` over `points`, with the point attaining it
/// (the first one on ties).
pub fn verify_sup_error(
    net: &Network,
    target: &HolderTarget,
    points: &PointCloud,
) -> Result<SupError, ApproxError> {
    if points.is_empty() {
        return Err(ApproxError::EmptySupport);
    }
    let out = net.evaluate_batch(points.as_slice())?;
    let width = net.output_dim();
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, x) in points.iter().enumerate() {
        let err = (out[i * width] - target.value(x)).abs();
        if err > best.0 || err.is_nan() {
            best = (err, i);
            if err.is_nan() {
                break;
            }
        }
    }
    Ok(SupError {
        value: best.0,
        index: best.1,
        witness: points.point(best.1).to_vec(),
    })
}

/// Cube-wise approximator of `target` on the sampled support.
///
/// Pipeline: shift `f₁ = f₀ + M + 1`; grid cover of side `γ`; Taylor
/// polynomials of `f₁` at the cube centers (clamped into `[0,1]^D`); their
/// simultaneous network at accuracy `ε/2`; cut gates; sums over the groups of
/// the cover partition (padded to `3^D` groups); max over groups; clip to
/// `[−M, M]`. The empirical sup error over `support` is checked and the
/// multiplication refinement raised until it is at most `ε`.
pub fn build_approximator(
    target: &HolderTarget,
    support: &PointCloud,
    intrinsic_dim_bound: f64,
    epsilon: f64,
    options: &BuildOptions,
) -> Result<(Network, ApproximatorSpec), ApproxError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ApproxError::InadmissibleEpsilon(epsilon));
    }
    if support.is_empty() {
        return Err(ApproxError::EmptySupport);
    }
    let dim = target.dim();
    if support.dim() != dim {
        return Err(ApproxError::DimensionMismatch {
            expected: dim,
            found: support.dim(),
        });
    }
    if dim > MAX_BUILD_DIM {
        return Err(ApproxError::DimensionTooLarge(dim));
    }
    let bound = target.bound();
    let gamma = auto_gamma(dim, target.beta(), bound, epsilon);
    let cover = grid_cover(support, gamma)?;
    let partition = partition_cover(&cover);
    let arity = 3usize.pow(dim as u32);
    debug_assert!(partition.len() <= arity);

    let shift = bound + 1.0;
    let polys = (0..cover.len())
        .map(|i| {
            let center: Vec<f64> = cover.center(i).into_iter().map(|c| c.min(1.0)).collect();
            let mut p = taylor_expand(target, &center)?;
            p.terms[0].1 += shift;
            Ok(p)
        })
        .collect::<Result<Vec<TaylorPolynomial>, ApproxError>>()?;

    let mut groups = partition.groups.clone();
    groups.resize(arity, Vec::new());
    let sum = group_sum_net(&groups, cover.len())?;
    let max = max_net(arity)?;
    let clip = clip_net(bound)?;

    let mut refinement = match options.refinement {
        Some(r) => MulConfig::new(options.scheme, r)?.refinement,
        None => pol_refinement(&polys, epsilon / 2.0, options.scheme)?.refinement,
    };
    let mut attempts = 0;
    loop {
        attempts += 1;
        let config = MulConfig::new(options.scheme, refinement)?;
        let pol = pol_net_with(&polys, &config)?;
        let simul = simul_net(&cover, &pol, gamma, bound)?;
        let net = concat_chain(&[&simul, &sum, &max, &clip])?;
        let sup = verify_sup_error(&net, target, support)?;
        if sup.value <= epsilon {
            let spec = ApproximatorSpec {
                epsilon,
                gamma,
                intrinsic_dim_bound,
                complexity: net.complexity(),
                cubes: cover.len(),
                groups: partition.len(),
                refinement,
                attempts,
                empirical_sup_error: sup.value,
            };
            return Ok((net, spec));
        }
        if attempts > options.max_retries || refinement >= MAX_REFINEMENT {
            return Err(ApproxError::NotConverged {
                epsilon,
                achieved: sup.value,
                attempts,
            });
        }
        refinement += 1;
    }
}

/// Builds at every `ε` in `epsilons` and reports the specs in the same order.
///
/// With the composed squaring scheme the depth grows with the refinement, so
/// the refinement needed at the smallest `ε` is fixed for the whole sweep.
pub fn rate_sweep(
    target: &HolderTarget,
    support: &PointCloud,
    intrinsic_dim_bound: f64,
    epsilons: &[f64],
    options: &BuildOptions,
) -> Result<Vec<ApproximatorSpec>, ApproxError> {
    let mut options = *options;
    if options.scheme == SquareScheme::Composed && options.refinement.is_none() {
        if let Some(&smallest) = epsilons.iter().min_by(|a, b| a.total_cmp(b)) {
            let (_, spec) =
                build_approximator(target, support, intrinsic_dim_bound, smallest, &options)?;
            options.refinement = Some(spec.refinement);
            options.max_retries = 0;
        }
    }
    epsilons
        .iter()
        .map(|&eps| {
            build_approximator(target, support, intrinsic_dim_bound, eps, &options).map(|r| r.1)
        })
        .collect()
}

/// OLS of `ln W` on `ln(1/ε)` over a sweep; the slope estimates `d/β`.
pub fn complexity_slope(specs: &[ApproximatorSpec]) -> Option<RateFit> {
    least_squares(
        specs
            .iter()
            .map(|s| {
                (
                    -libm::log(s.epsilon),
                    libm::log(s.complexity.param_count as f64),
                )
            })
            .collect(),
    )
}

/// Measured `N(γ)·γ^d` for each spec; finite and roughly flat when `d`
/// exceeds the Minkowski dimension of the support.
pub fn cover_constants(specs: &[ApproximatorSpec], d: f64) -> Vec<f64> {
    specs
        .iter()
        .map(|s| s.cubes as f64 * libm::pow(s.gamma, d))
        .collect()
}
