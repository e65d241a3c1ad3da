use alloc::vec::Vec;

use super::mul::{monomial_net, MulConfig, SquareScheme, MAX_REFINEMENT};
use super::{ApproxError, MultiIndex, TaylorPolynomial};
use crate::calculus::{concat, pad_to_depth, parallel_shared_input};
use crate::net::{Layer, Matrix, Network};

/// Nonconstant monomials of degree at most `degree`, the input basis of
/// [`pol_net`].
pub fn monomial_basis(dim: usize, degree: u32) -> Vec<MultiIndex> {
    MultiIndex::up_to_degree(dim, degree)
        .into_iter()
        .filter(|a| a.degree() > 0)
        .collect()
}

fn check_polys(polys: &[TaylorPolynomial]) -> Result<(usize, u32), ApproxError> {
    let first = polys.first().ok_or(ApproxError::EmptySupport)?;
    let dim = first.center.len();
    if let Some(p) = polys.iter().find(|p| p.center.len() != dim) {
        return Err(ApproxError::DimensionMismatch {
            expected: dim,
            found: p.center.len(),
        });
    }
    Ok((
        dim,
        polys
            .iter()
            .map(TaylorPolynomial::degree)
            .max()
            .unwrap_or(0),
    ))
}

/// `max_λ Σ_γ |c̃_{λ,γ}|·err(|γ|)`, a bound on the sup error of
/// [`pol_net_with`] over `[0,1]^D`.
pub fn pol_error_bound(polys: &[TaylorPolynomial], config: &MulConfig) -> f64 {
    polys
        .iter()
        .map(|p| {
            p.rebased()
                .iter()
                .map(|(g, c)| c.abs() * config.monomial_error_bound(g.degree()))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Smallest refinement whose [`pol_error_bound`] is at most `epsilon`.
pub fn pol_refinement(
    polys: &[TaylorPolynomial],
    epsilon: f64,
    scheme: SquareScheme,
) -> Result<MulConfig, ApproxError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(ApproxError::InadmissibleEpsilon(epsilon));
    }
    (1..=MAX_REFINEMENT)
        .map(|refinement| MulConfig { scheme, refinement })
        .find(|c| pol_error_bound(polys, c) <= epsilon)
        .ok_or(ApproxError::InadmissibleEpsilon(epsilon))
}

/// Network with one output per polynomial, approximating
/// `x ↦ Σ_α c_{λ,α}(x − x_λ)^α` on `[0,1]^D` within `epsilon`.
pub fn pol_net(
    polys: &[TaylorPolynomial],
    epsilon: f64,
    scheme: SquareScheme,
) -> Result<(Network, MulConfig), ApproxError> {
    let config = pol_refinement(polys, epsilon, scheme)?;
    Ok((pol_net_with(polys, &config)?, config))
}

/// [`pol_net`] at a fixed refinement.
///
/// Every polynomial is rebased to monomials `x^γ`; the monomial networks are
/// shared by all outputs and combined by a final affine layer holding the
/// coefficients `c̃_{λ,γ}` (constants go into its bias).
pub fn pol_net_with(
    polys: &[TaylorPolynomial],
    config: &MulConfig,
) -> Result<Network, ApproxError> {
    let (dim, degree) = check_polys(polys)?;
    let basis = monomial_basis(dim, degree);
    let zero = MultiIndex::zero(dim);
    let bias: Vec<f64> = polys
        .iter()
        .map(|p| p.rebased().get(&zero).copied().unwrap_or(0.0))
        .collect();
    let m = polys.len();
    if basis.is_empty() {
        return Ok(Network::new(alloc::vec![Layer::new(
            Matrix::zeros(m, dim),
            bias
        )?])?);
    }
    let mut coef = Matrix::zeros(m, basis.len());
    for (r, p) in polys.iter().enumerate() {
        for (c, v) in p.rebased_on(&basis).into_iter().enumerate() {
            coef.set(r, c, v);
        }
    }
    let monos: Vec<Network> = basis.iter().map(|g| monomial_net(g, config)).collect();
    let depth = monos.iter().map(Network::depth).max().unwrap_or(1);
    let padded = monos
        .iter()
        .map(|n| pad_to_depth(n, depth))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&Network> = padded.iter().collect();
    let shared = parallel_shared_input(&refs)?;
    let combine = Network::new(alloc::vec![Layer::new(coef, bias)?])?;
    Ok(concat(&combine, &shared)?)
}
