use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
use core::fmt;

use super::ApproxError;

/// Exponents `(α₁, …, α_D)` of a partial derivative or monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// `e_i` scaled by `order`.
    pub fn axis(dim: usize, i: usize, order: u32) -> Self {
        let mut m = Self::zero(dim);
        m.0[i] = order;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = Π αᵢ!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `x^α`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &v)| libm::pow(v, a as f64))
            .product()
    }

    /// Coordinates with nonzero exponent, as `(coordinate, exponent)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().copied().enumerate().filter(|&(_, a)| a > 0)
    }

    /// All multi-indices of dimension `dim` with `|α| ≤ max_degree`, ordered
    /// by degree and then lexicographically.
    pub fn up_to_degree(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for deg in 0..=max_degree {
            let mut cur = vec![0u32; dim];
            compositions(&mut cur, 0, deg, &mut out);
        }
        out
    }
}

fn compositions(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        compositions(cur, pos + 1, left - a, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Why a derivative oracle could not answer.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivativeFailure {
    /// The function is not differentiable to this order at the point.
    Kink {
        coordinate: usize,
    },
    /// Order not provided by the oracle.
    Unsupported {
        order: u32,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for DerivativeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Kink { coordinate } => {
                write!(
                    f,
                    "not differentiable across the kink in coordinate {coordinate}"
                )
            }
            Self::Unsupported { order } => write!(f, "derivatives of order {order} unavailable"),
            Self::DimensionMismatch { expected, found } => {
                write!(f, "expected a point of dimension {expected}, got {found}")
            }
        }
    }
}

/// Value and partial-derivative oracle on `[0,1]^D`.
pub trait SmoothFunction: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure>;
}

/// A function with its smoothness `β` and Hölder-norm radius `M`.
#[derive(Debug, Clone)]
pub struct HolderTarget {
    beta: f64,
    bound: f64,
    function: Arc<dyn SmoothFunction>,
}

impl HolderTarget {
    pub fn new(
        function: Arc<dyn SmoothFunction>,
        beta: f64,
        bound: f64,
    ) -> Result<Self, ApproxError> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(ApproxError::InvalidArgument("beta must be positive"));
        }
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(ApproxError::InvalidArgument("M must be positive"));
        }
        Ok(Self {
            beta,
            bound,
            function,
        })
    }

    pub fn dim(&self) -> usize {
        self.function.dim()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn function(&self) -> &Arc<dyn SmoothFunction> {
        &self.function
    }

    /// Degree of the Taylor expansions, `⌊β⌋`.
    pub fn taylor_degree(&self) -> u32 {
        libm::floor(self.beta) as u32
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.function.value(x)
    }

    pub fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, ApproxError> {
        if x.len() != self.dim() || alpha.dim() != self.dim() {
            return Err(ApproxError::Derivative(
                DerivativeFailure::DimensionMismatch {
                    expected: self.dim(),
                    found: if x.len() != self.dim() {
                        x.len()
                    } else {
                        alpha.dim()
                    },
                },
            ));
        }
        self.function
            .derivative(alpha, x)
            .map_err(ApproxError::Derivative)
    }

    /// Replaces `M` by the largest `|∂^α f(x)|`, `|α| ≤ ⌊β⌋`, over `points`
    /// (row-major, dimension `D`). Points where an oracle fails are skipped.
    pub fn with_sampled_bound(self, points: &[f64]) -> Result<Self, ApproxError> {
        let dim = self.dim();
        let mut bound = 0.0f64;
        let alphas = MultiIndex::up_to_degree(dim, self.taylor_degree());
        for x in points.chunks_exact(dim) {
            for alpha in &alphas {
                if let Ok(v) = self.function.derivative(alpha, x) {
                    bound = bound.max(v.abs());
                }
            }
        }
        Self::new(self.function, self.beta, bound)
    }
}

fn check_dim(dim: usize, x: &[f64]) -> Result<(), DerivativeFailure> {
    if x.len() == dim {
        Ok(())
    } else {
        Err(DerivativeFailure::DimensionMismatch {
            expected: dim,
            found: x.len(),
        })
    }
}

/// `f ≡ c`.
#[derive(Debug, Clone)]
pub struct Constant {
    pub dim: usize,
    pub value: f64,
}

impl SmoothFunction for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64]) -> f64 {
        self.value
    }

    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure> {
        check_dim(self.dim, x)?;
        Ok(if alpha.degree() == 0 { self.value } else { 0.0 })
    }
}

/// `f(x) = Σ c_γ x^γ`.
#[derive(Debug, Clone)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<(MultiIndex, f64)>,
}

impl SmoothFunction for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(g, c)| c * g.monomial(x)).sum()
    }

    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure> {
        check_dim(self.dim, x)?;
        let mut total = 0.0;
        for (g, c) in &self.terms {
            if g.0.iter().zip(&alpha.0).any(|(e, a)| a > e) {
                continue;
            }
            let mut term = *c;
            for ((&e, &a), &v) in g.0.iter().zip(&alpha.0).zip(x) {
                term *= falling(e, a) * libm::pow(v, f64::from(e - a));
            }
            total += term;
        }
        Ok(total)
    }
}

fn falling(e: u32, a: u32) -> f64 {
    ((e - a + 1)..=e).map(f64::from).product()
}

/// `f(x) = a·sin(ω Σ xᵢ)`.
#[derive(Debug, Clone)]
pub struct SinSum {
    pub dim: usize,
    pub amplitude: f64,
    pub frequency: f64,
}

impl SmoothFunction for SinSum {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * libm::sin(self.frequency * x.iter().sum::<f64>())
    }

    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure> {
        check_dim(self.dim, x)?;
        let k = alpha.degree();
        let t = self.frequency * x.iter().sum::<f64>();
        let d = match k % 4 {
            0 => libm::sin(t),
            1 => libm::cos(t),
            2 => -libm::sin(t),
            _ => -libm::cos(t),
        };
        Ok(self.amplitude * libm::pow(self.frequency, f64::from(k)) * d)
    }
}

/// `f(x) = a·exp(r Σ xᵢ)`.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub dim: usize,
    pub amplitude: f64,
    pub rate: f64,
}

impl SmoothFunction for Exponential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * libm::exp(self.rate * x.iter().sum::<f64>())
    }

    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure> {
        check_dim(self.dim, x)?;
        Ok(libm::pow(self.rate, f64::from(alpha.degree())) * self.value(x))
    }
}

const KINK: f64 = 0.5;
const INV_SQRT_2: f64 = 1.0 / SQRT_2;

/// Smooth-regime simulation target, `β = 2`, `D ≥ 2`:
///
/// ```text
/// f(x) = (D−1)⁻¹ Σᵢ xᵢ xᵢ₊₁ + D⁻¹ Σᵢ g(xᵢ),
/// g(t) = 2 sin(2πt)                                  for t ≤ 1/2,
///        4π(√2−1)⁻¹ (t − 2^{−1/2})² − π(√2−1)        for t > 1/2.
/// ```
///
/// `g` is `C¹`; its second derivative jumps at `t = 1/2`.
#[derive(Debug, Clone)]
pub struct Sim61 {
    pub dim: usize,
}

impl Sim61 {
    fn g(t: f64) -> [f64; 3] {
        if t <= KINK {
            let w = 2.0 * PI * t;
            [
                2.0 * libm::sin(w),
                4.0 * PI * libm::cos(w),
                -8.0 * PI * PI * libm::sin(w),
            ]
        } else {
            let a = 4.0 * PI / (SQRT_2 - 1.0);
            let u = t - INV_SQRT_2;
            [a * u * u - PI * (SQRT_2 - 1.0), 2.0 * a * u, 2.0 * a]
        }
    }

    /// Upper bound on `|f|` over `[0,1]^D`.
    pub const SUP: f64 = 3.0;

    /// Upper bound on `|∂^α f|`, `|α| ≤ 2`, over `[0,1]^D`.
    pub fn holder_bound(dim: usize) -> f64 {
        let d = dim as f64;
        let first = 2.0 / (d - 1.0) + 4.0 * PI / d;
        let second = (8.0 * PI * PI) / d + 1.0 / (d - 1.0);
        Self::SUP.max(first).max(second)
    }
}

impl SmoothFunction for Sim61 {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = self.dim as f64;
        let pairs: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
        let singles: f64 = x.iter().map(|&t| Self::g(t)[0]).sum();
        pairs / (d - 1.0) + singles / d
    }

    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure> {
        check_dim(self.dim, x)?;
        let d = self.dim as f64;
        let support: Vec<(usize, u32)> = alpha.support().collect();
        match support.as_slice() {
            [] => Ok(self.value(x)),
            [(i, 1)] => {
                let i = *i;
                let left = if i > 0 { x[i - 1] } else { 0.0 };
                let right = x.get(i + 1).copied().unwrap_or(0.0);
                Ok((left + right) / (d - 1.0) + Self::g(x[i])[1] / d)
            }
            [(i, 2)] => {
                if x[*i] == KINK {
                    Err(DerivativeFailure::Kink { coordinate: *i })
                } else {
                    Ok(Self::g(x[*i])[2] / d)
                }
            }
            [(i, 1), (j, 1)] => Ok(if j - i == 1 { 1.0 / (d - 1.0) } else { 0.0 }),
            _ if alpha.degree() > 2 => {
                if let Some(&(i, _)) = support.iter().find(|&&(i, _)| x[i] == KINK) {
                    Err(DerivativeFailure::Kink { coordinate: i })
                } else {
                    Err(DerivativeFailure::Unsupported {
                        order: alpha.degree(),
                    })
                }
            }
            _ => Ok(0.0),
        }
    }
}

/// Rough-regime simulation target, `β = 1`:
/// `f(x) = D⁻¹ Σᵢ [xᵢ² 1{xᵢ ≤ 1/2} + (3/4 − xᵢ) 1{xᵢ > 1/2}]`.
///
/// Continuous with a kink at `xᵢ = 1/2`, which belongs to the quadratic branch.
#[derive(Debug, Clone)]
pub struct Sim62 {
    pub dim: usize,
}

impl Sim62 {
    pub const SUP: f64 = 0.25;

    pub fn holder_bound(dim: usize) -> f64 {
        Self::SUP.max(1.0 / dim as f64)
    }
}

impl SmoothFunction for Sim62 {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s: f64 = x
            .iter()
            .map(|&t| if t <= KINK { t * t } else { 0.75 - t })
            .sum();
        s / self.dim as f64
    }

    fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64, DerivativeFailure> {
        check_dim(self.dim, x)?;
        let d = self.dim as f64;
        let support: Vec<(usize, u32)> = alpha.support().collect();
        if let Some(&(i, _)) = support.iter().find(|&&(i, _)| x[i] == KINK) {
            return Err(DerivativeFailure::Kink { coordinate: i });
        }
        match support.as_slice() {
            [] => Ok(self.value(x)),
            [(i, 1)] => Ok(if x[*i] < KINK {
                2.0 * x[*i] / d
            } else {
                -1.0 / d
            }),
            [(i, 2)] => Ok(if x[*i] < KINK { 2.0 / d } else { 0.0 }),
            _ => Ok(0.0),
        }
    }
}

/// The two simulation targets with `β` and `M` filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinTarget {
    Sim61,
    Sim62,
}

impl BuiltinTarget {
    pub fn parse(tag: &str) -> Result<Self, ApproxError> {
        match tag {
            "sim61" => Ok(Self::Sim61),
            "sim62" => Ok(Self::Sim62),
            _ => Err(ApproxError::UnknownTarget),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sim61 => "sim61",
            Self::Sim62 => "sim62",
        }
    }

    /// Upper bound on `|f|`, a valid clipping level for estimators.
    pub fn sup_bound(self) -> f64 {
        match self {
            Self::Sim61 => Sim61::SUP,
            Self::Sim62 => Sim62::SUP,
        }
    }

    pub fn target(self, dim: usize) -> Result<HolderTarget, ApproxError> {
        match self {
            Self::Sim61 => {
                if dim < 2 {
                    return Err(ApproxError::InvalidArgument("sim61 needs D >= 2"));
                }
                HolderTarget::new(Arc::new(Sim61 { dim }), 2.0, Sim61::holder_bound(dim))
            }
            Self::Sim62 => {
                if dim == 0 {
                    return Err(ApproxError::InvalidArgument("sim62 needs D >= 1"));
                }
                HolderTarget::new(Arc::new(Sim62 { dim }), 1.0, Sim62::holder_bound(dim))
            }
        }
    }
}

/// Looks up a builtin target by tag.
pub fn builtin_target(tag: &str, dim: usize) -> Result<HolderTarget, ApproxError> {
    BuiltinTarget::parse(tag)?.target(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_enumeration() {
        let all = MultiIndex::up_to_degree(2, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], MultiIndex(vec![0, 0]));
        assert_eq!(all[1], MultiIndex(vec![1, 0]));
        assert_eq!(MultiIndex::up_to_degree(3, 3).len(), 20);
        assert_eq!(MultiIndex(vec![2, 3]).factorial(), 12.0);
    }

    #[test]
    fn sim61_is_c1_at_the_kink() {
        let below = Sim61::g(0.5 - 1e-9);
        let above = Sim61::g(0.5 + 1e-9);
        assert!((below[0] - above[0]).abs() < 1e-7);
        assert!((below[1] - above[1]).abs() < 1e-6);
        assert!((below[1] + 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn sim61_values() {
        let f = Sim61 { dim: 4 };
        assert_eq!(f.value(&[0.0; 4]), 0.0);
        assert!(f
            .derivative(&MultiIndex::axis(4, 1, 2), &[0.1, 0.5, 0.2, 0.3])
            .is_err());
        let g = Sim61::g(1.0)[0];
        assert!(g < Sim61::SUP && g > 1.2);
    }

    #[test]
    fn sim62_values() {
        let f = Sim62 { dim: 3 };
        assert!((f.value(&[0.5; 3]) - 0.25).abs() < 1e-15);
        assert!((f.value(&[1.0; 3]) + 0.25).abs() < 1e-15);
        assert_eq!(f.value(&[0.0; 3]), 0.0);
        assert_eq!(
            f.derivative(&MultiIndex::axis(3, 0, 1), &[0.5, 0.1, 0.1]),
            Err(DerivativeFailure::Kink { coordinate: 0 })
        );
    }

    #[test]
    fn polynomial_derivatives() {
        // x² y
        let p = Polynomial {
            dim: 2,
            terms: vec![(MultiIndex(vec![2, 1]), 1.0)],
        };
        let x = [0.3, 0.7];
        assert!((p.derivative(&MultiIndex(vec![1, 1]), &x).unwrap() - 0.6).abs() < 1e-15);
        assert!((p.derivative(&MultiIndex(vec![2, 0]), &x).unwrap() - 1.4).abs() < 1e-15);
        assert_eq!(p.derivative(&MultiIndex(vec![0, 2]), &x).unwrap(), 0.0);
    }

    #[test]
    fn unknown_tag() {
        assert!(matches!(
            builtin_target("sim63", 3),
            Err(ApproxError::UnknownTarget)
        ));
        assert!(builtin_target("sim61", 1).is_err());
    }
}
