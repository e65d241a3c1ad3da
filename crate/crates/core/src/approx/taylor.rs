use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{ApproxError, HolderTarget, MultiIndex};

/// `f̄(x) = Σ_α c_α (x − x̄)^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPolynomial {
    pub center: Vec<f64>,
    /// `(α, c_α)` ordered by degree, then lexicographically.
    pub terms: Vec<(MultiIndex, f64)>,
}

/// Taylor polynomial of degree `⌊β⌋` at `center ∈ [0,1]^D`, with
/// `c_α = ∂^α f(x̄)/α!`.
pub fn taylor_expand(
    target: &HolderTarget,
    center: &[f64],
) -> Result<TaylorPolynomial, ApproxError> {
    if center.len() != target.dim() {
        return Err(ApproxError::DimensionMismatch {
            expected: target.dim(),
            found: center.len(),
        });
    }
    if center.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(ApproxError::InvalidArgument(
            "Taylor center must lie in [0,1]^D",
        ));
    }
    let mut terms = Vec::new();
    for alpha in MultiIndex::up_to_degree(target.dim(), target.taylor_degree()) {
        let c = target.derivative(&alpha, center)? / alpha.factorial();
        terms.push((alpha, c));
    }
    Ok(TaylorPolynomial {
        center: center.to_vec(),
        terms,
    })
}

impl TaylorPolynomial {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut shifted = Vec::with_capacity(x.len());
        shifted.extend(x.iter().zip(&self.center).map(|(a, b)| a - b));
        self.terms
            .iter()
            .map(|(alpha, c)| c * alpha.monomial(&shifted))
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(a, _)| a.degree())
            .max()
            .unwrap_or(0)
    }

    /// Coefficients `c̃_γ` with `Σ_α c_α (x − x̄)^α = Σ_γ c̃_γ x^γ`, by the
    /// binomial expansion of every factor `(xᵢ − x̄ᵢ)^{αᵢ}`.
    pub fn rebased(&self) -> BTreeMap<MultiIndex, f64> {
        let dim = self.center.len();
        let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (alpha, c) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            // Expand one coordinate at a time.
            let mut partial: Vec<(Vec<u32>, f64)> = alloc::vec![(alloc::vec![0; dim], *c)];
            for (i, &a) in alpha.0.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (a as usize + 1));
                for (exp, coef) in &partial {
                    for k in 0..=a {
                        let w = binomial(a, k) * libm::pow(-self.center[i], f64::from(a - k));
                        let mut e = exp.clone();
                        e[i] = k;
                        next.push((e, coef * w));
                    }
                }
                partial = next;
            }
            for (exp, coef) in partial {
                *out.entry(MultiIndex(exp)).or_insert(0.0) += coef;
            }
        }
        out
    }

    /// Coefficients of [`Self::rebased`] laid out along `basis`; monomials
    /// missing from `basis` are dropped.
    pub fn rebased_on(&self, basis: &[MultiIndex]) -> Vec<f64> {
        let map = self.rebased();
        basis
            .iter()
            .map(|g| map.get(g).copied().unwrap_or(0.0))
            .collect()
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * f64::from(n + 1 - i) / f64::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{Constant, Polynomial};
    use alloc::sync::Arc;
    use alloc::vec;

    #[test]
    fn square_expands_exactly() {
        let f = Polynomial {
            dim: 1,
            terms: vec![(MultiIndex(vec![2]), 1.0)],
        };
        let t = HolderTarget::new(Arc::new(f), 2.0, 2.0).unwrap();
        let p = taylor_expand(&t, &[0.5]).unwrap();
        let coeffs: Vec<f64> = p.terms.iter().map(|(_, c)| *c).collect();
        assert_eq!(coeffs, vec![0.25, 1.0, 1.0]);
        for x in [0.0, 0.3, 1.0] {
            assert!((p.evaluate(&[x]) - x * x).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_has_only_degree_zero() {
        let t = HolderTarget::new(Arc::new(Constant { dim: 2, value: 3.0 }), 2.5, 3.0).unwrap();
        let p = taylor_expand(&t, &[0.2, 0.9]).unwrap();
        assert_eq!(p.terms[0].1, 3.0);
        assert!(p.terms[1..].iter().all(|(_, c)| *c == 0.0));
    }

    #[test]
    fn rebasing_matches_shifted_form() {
        let p = TaylorPolynomial {
            center: vec![0.3, 0.8],
            terms: vec![
                (MultiIndex(vec![0, 0]), 0.5),
                (MultiIndex(vec![1, 0]), -1.5),
                (MultiIndex(vec![1, 1]), 2.0),
                (MultiIndex(vec![0, 2]), 0.7),
            ],
        };
        let map = p.rebased();
        for x in [[0.1, 0.2], [0.9, 0.4], [0.5, 0.5]] {
            let direct: f64 = map.iter().map(|(g, c)| c * g.monomial(&x)).sum();
            assert!((direct - p.evaluate(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn center_outside_cube_is_rejected() {
        let t = HolderTarget::new(Arc::new(Constant { dim: 1, value: 0.0 }), 1.0, 1.0).unwrap();
        assert!(taylor_expand(&t, &[1.5]).is_err());
    }
}
