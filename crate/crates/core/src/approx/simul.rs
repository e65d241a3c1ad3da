use alloc::vec::Vec;

use super::ApproxError;
use crate::calculus::{
    clamp_net, concat, cut_net, filter_net, identity_net, parallel_shared_input,
};
use crate::geometry::HypercubeCover;
use crate::net::Network;

/// One output per cube `I = ψ⁻¹(i)`: the cut network of `I` applied to `x` and
/// the `i`-th output of `pol`, after clamping that output to `[0, 2M+2]`.
///
/// Output `i` is the clamped polynomial value for `x ∈ I`, vanishes once some
/// coordinate is `gamma` or more from the center of `I`, and stays in
/// `[0, 2M+2]` everywhere.
pub fn simul_net(
    cover: &HypercubeCover,
    pol: &Network,
    gamma: f64,
    bound: f64,
) -> Result<Network, ApproxError> {
    let m = cover.len();
    let dim = cover.dim();
    if m == 0 {
        return Err(ApproxError::EmptySupport);
    }
    if pol.output_dim() != m {
        return Err(ApproxError::ArityMismatch {
            cubes: m,
            outputs: pol.output_dim(),
        });
    }
    if pol.input_dim() != dim {
        return Err(ApproxError::DimensionMismatch {
            expected: dim,
            found: pol.input_dim(),
        });
    }
    let clamped = concat(&clamp_net(m, 0.0, 2.0 * bound + 2.0)?, pol)?;
    let id = identity_net(dim, clamped.depth())?;
    let front = parallel_shared_input(&[&id, &clamped])?;

    let gates = (0..m)
        .map(|i| {
            Ok(concat(
                &cut_net(&cover.center(i), gamma, bound)?,
                &filter_net(dim, m, i)?,
            )?)
        })
        .collect::<Result<Vec<Network>, ApproxError>>()?;
    let refs: Vec<&Network> = gates.iter().collect();
    let gate_layer = parallel_shared_input(&refs)?;
    Ok(concat(&gate_layer, &front)?)
}
