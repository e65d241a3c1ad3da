use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::{GeometryError, PointCloud};

/// Supports in `[0,1]^D` with a known intrinsic dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportKind {
    /// Uniform on the unit `d`-sphere scaled by 1/2 and centred at
    /// `(1/2, …, 1/2)` in the first `d + 1` coordinates; remaining coordinates
    /// are fixed at 1/2.
    Sphere { d: usize, dim: usize },
    /// Uniform on the level-`level` Koch polyline in `[0,1]²`.
    Koch { level: u32 },
    /// Equal mixture of the ℓ² sphere and the ℓ^{1/2} sphere (cone measure),
    /// both of radius 1/2 and centred at `(1/2, …)` in the first `d + 1`
    /// coordinates.
    LpBallUnion { d: usize, dim: usize },
    /// Uniform on `[0,1]^dim`.
    Cube { dim: usize },
}

pub const DEFAULT_KOCH_LEVEL: u32 = 7;
const KOCH_BASELINE: f64 = 0.1;

impl SupportKind {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            SupportKind::Sphere { dim, .. }
            | SupportKind::LpBallUnion { dim, .. }
            | SupportKind::Cube { dim } => dim,
            SupportKind::Koch { .. } => 2,
        }
    }

    /// Nominal intrinsic dimension.
    pub fn intrinsic_dim(&self) -> f64 {
        match *self {
            SupportKind::Sphere { d, .. } | SupportKind::LpBallUnion { d, .. } => d as f64,
            SupportKind::Koch { .. } => libm::log(4.0) / libm::log(3.0),
            SupportKind::Cube { dim } => dim as f64,
        }
    }

    fn check(&self) -> Result<(), GeometryError> {
        match *self {
            SupportKind::Sphere { d, dim } | SupportKind::LpBallUnion { d, dim } => {
                if d == 0 || dim == 0 {
                    Err(GeometryError::InvalidArgument("d and D must be positive"))
                } else if d + 1 > dim {
                    Err(GeometryError::DimTooLarge { d, dim })
                } else {
                    Ok(())
                }
            }
            SupportKind::Koch { level } if level > 12 => Err(GeometryError::InvalidArgument(
                "Koch level must be at most 12",
            )),
            SupportKind::Cube { dim: 0 } => Err(GeometryError::InvalidArgument(
                "cube dimension must be positive",
            )),
            _ => Ok(()),
        }
    }
}

/// `n` points from `kind`, deterministic in `seed`.
pub fn generate_support(
    kind: SupportKind,
    n: usize,
    seed: u64,
) -> Result<PointCloud, GeometryError> {
    kind.check()?;
    if n == 0 {
        return Err(GeometryError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = kind.ambient_dim();
    let mut data = Vec::with_capacity(n * dim);
    match kind {
        SupportKind::Sphere { d, dim } => {
            let mut z = Vec::with_capacity(d + 1);
            for _ in 0..n {
                l2_direction(&mut rng, d + 1, &mut z);
                push_embedded(&mut data, &z, dim);
            }
        }
        SupportKind::LpBallUnion { d, dim } => {
            let mut z = Vec::with_capacity(d + 1);
            for _ in 0..n {
                if rng.random::<bool>() {
                    l2_direction(&mut rng, d + 1, &mut z);
                } else {
                    l_half_direction(&mut rng, d + 1, &mut z);
                }
                push_embedded(&mut data, &z, dim);
            }
        }
        SupportKind::Koch { level } => {
            let poly = koch_polyline(level);
            let segments = poly.len() - 1;
            for _ in 0..n {
                let s = rng.random_range(0..segments);
                let t: f64 = rng.random();
                let (a, b) = (poly[s], poly[s + 1]);
                data.push(clamp01(a.0 + t * (b.0 - a.0)));
                data.push(clamp01(a.1 + t * (b.1 - a.1)));
            }
        }
        SupportKind::Cube { dim } => {
            data.extend((0..n * dim).map(|_| rng.random::<f64>()));
        }
    }
    PointCloud::new(dim, data)
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

fn push_embedded(data: &mut Vec<f64>, z: &[f64], dim: usize) {
    data.extend(z.iter().map(|&v| clamp01(0.5 + 0.5 * v)));
    data.extend(core::iter::repeat_n(0.5, dim - z.len()));
}

fn l2_direction<R: Rng>(rng: &mut R, k: usize, out: &mut Vec<f64>) {
    loop {
        out.clear();
        out.extend((0..k).map(|_| -> f64 { StandardNormal.sample(rng) }));
        let norm = libm::sqrt(out.iter().map(|v: &f64| v * v).sum());
        if norm > 1e-12 {
            out.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

/// Cone-measure sample on `{z : (Σ|zᵢ|^{1/2})² = 1}`: coordinates with density
/// `∝ exp(−|g|^{1/2})` (so `|g|^{1/2} ~ Gamma(2, 1)`) normalized by their
/// quasi-norm.
fn l_half_direction<R: Rng>(rng: &mut R, k: usize, out: &mut Vec<f64>) {
    let gamma = Gamma::new(2.0, 1.0).expect("valid gamma parameters");
    loop {
        out.clear();
        let mut s = 0.0;
        for _ in 0..k {
            let r: f64 = gamma.sample(rng);
            s += r;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            out.push(sign * r * r);
        }
        if s > 1e-12 {
            let q = s * s;
            out.iter_mut().for_each(|v| *v /= q);
            return;
        }
    }
}

/// Vertices of the level-`level` Koch curve from `(0, 0.1)` to `(1, 0.1)`,
/// bulging upwards. There are `4^level` segments of length `3^{-level}`.
pub fn koch_polyline(level: u32) -> Vec<(f64, f64)> {
    let (c, s) = (0.5, libm::sqrt(3.0) / 2.0);
    let mut pts = alloc::vec![(0.0, KOCH_BASELINE), (1.0, KOCH_BASELINE)];
    for _ in 0..level {
        let mut next = Vec::with_capacity(4 * (pts.len() - 1) + 1);
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let d = ((q.0 - p.0) / 3.0, (q.1 - p.1) / 3.0);
            let a = (p.0 + d.0, p.1 + d.1);
            let b = (p.0 + 2.0 * d.0, p.1 + 2.0 * d.1);
            let peak = (a.0 + c * d.0 - s * d.1, a.1 + s * d.0 + c * d.1);
            next.extend_from_slice(&[p, a, peak, b]);
        }
        next.push(*pts.last().expect("non-empty"));
        pts = next;
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_have_radius_half() {
        let pts = generate_support(SupportKind::Sphere { d: 1, dim: 2 }, 200, 3).unwrap();
        for x in pts.iter() {
            let r = libm::hypot(x[0] - 0.5, x[1] - 0.5);
            assert!((r - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn padding_coordinates_are_half() {
        let pts = generate_support(SupportKind::Sphere { d: 2, dim: 5 }, 50, 1).unwrap();
        assert!(pts.iter().all(|x| x[3] == 0.5 && x[4] == 0.5));
    }

    #[test]
    fn seeds_control_the_cloud() {
        let k = SupportKind::LpBallUnion { d: 2, dim: 5 };
        let a = generate_support(k, 100, 9).unwrap();
        assert_eq!(a, generate_support(k, 100, 9).unwrap());
        assert_ne!(a, generate_support(k, 100, 10).unwrap());
        a.check_unit_cube().unwrap();
    }

    #[test]
    fn l_half_points_lie_on_quasi_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut z = Vec::new();
        for _ in 0..100 {
            l_half_direction(&mut rng, 3, &mut z);
            let q: f64 = z.iter().map(|v| libm::sqrt(v.abs())).sum();
            assert!((q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn koch_geometry() {
        let poly = koch_polyline(3);
        assert_eq!(poly.len(), 65);
        for w in poly.windows(2) {
            let len = libm::hypot(w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!((len - 1.0 / 27.0).abs() < 1e-12);
        }
        let top = poly.iter().map(|p| p.1).fold(0.0, f64::max);
        assert!((top - KOCH_BASELINE - libm::sqrt(3.0) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_needs_room() {
        assert_eq!(
            generate_support(SupportKind::Sphere { d: 2, dim: 2 }, 1, 0),
            Err(GeometryError::DimTooLarge { d: 2, dim: 2 })
        );
    }
}
