mod common;

use std::collections::BTreeSet;

use common::*;
use lowdim_core::estimators::*;
use lowdim_core::geometry::*;
use lowdim_core::PointCloud;
use rand::Rng;

#[test]
fn partition_of_random_covers() {
    let mut rng = rng(30);
    for trial in 0..100 {
        let dim = 1 + trial % 3;
        let gamma = rng.random_range(0.04..0.4);
        let n = rng.random_range(5..300);
        let pts: Vec<f64> = (0..n * dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let cover = grid_cover(&PointCloud::new(dim, pts).unwrap(), gamma).unwrap();
        let part = partition_cover(&cover);
        assert!(part.len() <= 3usize.pow(dim as u32));
        assert!(part.len() <= 5usize.pow(dim as u32));

        let mut seen = BTreeSet::new();
        for group in &part.groups {
            for &i in group {
                assert!(seen.insert(i), "cube {i} in two groups");
            }
            for (a, &i) in group.iter().enumerate() {
                for &j in &group[a + 1..] {
                    assert!(
                        set_distance(cover.cell(i), cover.cell(j), gamma) >= gamma * (1.0 - 1e-12)
                    );
                }
            }
        }
        assert_eq!(seen, (0..cover.len()).collect());
    }
}

#[test]
fn cover_indexing_round_trips() {
    let cloud = generate_support(SupportKind::Sphere { d: 1, dim: 2 }, 500, 3).unwrap();
    let cover = grid_cover(&cloud, 0.1).unwrap();
    for x in cloud.iter() {
        let cell = cover.cell_of(x);
        let idx = cover.index_of(&cell).unwrap();
        let c = cover.center(idx);
        assert!(x.iter().zip(&c).all(|(a, b)| (a - b).abs() <= 0.05 + 1e-12));
    }
    assert!(grid_cover(&cloud, 0.0).is_err());
}

#[test]
fn koch_and_square_box_counting() {
    let koch = generate_support(SupportKind::Koch { level: 7 }, 200_000, 1).unwrap();
    let scales: Vec<f64> = (1..=6).map(|k| 3f64.powi(-k)).collect();
    let est = minkowski_dim(&koch, &scales).unwrap();
    assert!((1.11..=1.41).contains(&est.value), "koch {}", est.value);

    let square = generate_support(SupportKind::Cube { dim: 2 }, 200_000, 2).unwrap();
    let scales: Vec<f64> = (2..=7).map(|k| 2f64.powi(-k)).collect();
    let est = minkowski_dim(&square, &scales).unwrap();
    assert!((1.9..=2.1).contains(&est.value), "square {}", est.value);
}

#[test]
fn single_point_is_low_confidence() {
    let pts = PointCloud::new(2, vec![0.3, 0.3]).unwrap();
    let est = minkowski_dim(&pts, &[0.5, 0.25, 0.125]).unwrap();
    assert_eq!(est.value, 0.0);
    assert!(est.low_confidence);
}

#[test]
fn sphere_generator_lies_in_cube() {
    for (d, dim) in [(1, 2), (2, 5), (4, 16)] {
        let cloud = generate_support(SupportKind::Sphere { d, dim }, 2000, 9).unwrap();
        assert_eq!(cloud.dim(), dim);
        cloud.check_unit_cube().unwrap();
        assert_eq!(
            cloud,
            generate_support(SupportKind::Sphere { d, dim }, 2000, 9).unwrap()
        );
    }
    assert!(generate_support(SupportKind::Sphere { d: 5, dim: 5 }, 10, 0).is_err());
    let lp = generate_support(SupportKind::LpBallUnion { d: 2, dim: 5 }, 1000, 4).unwrap();
    lp.check_unit_cube().unwrap();
}

fn plane_in_r5(n: usize, seed: u64) -> PointCloud {
    let mut rng = rng(seed);
    let u = [0.3, -0.2, 0.5, 0.1, 0.4];
    let v = [0.1, 0.4, -0.1, 0.3, -0.2];
    let mut data = Vec::with_capacity(n * 5);
    for _ in 0..n {
        let (s, t): (f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        data.extend((0..5).map(|i| 0.3 + s * u[i] * 0.5 + t * v[i] * 0.5));
    }
    PointCloud::new(5, data).unwrap()
}

#[test]
fn lpca_on_plane_in_r5() {
    let cloud = plane_in_r5(1000, 31);
    assert_eq!(
        lpca_dim(&cloud, DEFAULT_K, DEFAULT_VARIANCE_THRESHOLD).unwrap(),
        2
    );
    let dims = lpca_local_dims(&cloud, DEFAULT_K, DEFAULT_VARIANCE_THRESHOLD).unwrap();
    assert_eq!(dims.len(), cloud.len());
    assert!(matches!(
        lpca_dim(&plane_in_r5(5, 1), 10, 0.95),
        Err(EstimatorError::TooFewPoints { .. })
    ));
}

fn segment(n: usize, seed: u64) -> PointCloud {
    let mut rng = rng(seed);
    let data = (0..n)
        .flat_map(|_| {
            let t: f64 = rng.random_range(0.0..1.0);
            [0.1 + 0.8 * t, 0.2 + 0.5 * t, 0.7 - 0.6 * t]
        })
        .collect();
    PointCloud::new(3, data).unwrap()
}

#[test]
fn ml_on_segment() {
    let est = ml_dim(&segment(5000, 32), DEFAULT_K).unwrap();
    assert!((est.value - 1.0).abs() <= 0.3, "ml {}", est.value);
    assert!(!est.has_warnings());
}

#[test]
fn estimators_are_invariant_under_rotation_and_scaling() {
    let cloud = segment(2000, 33);
    let base = ml_dim(&cloud, DEFAULT_K).unwrap().value;
    let (c, s) = (0.6f64, 0.8f64);
    let moved: Vec<f64> = cloud
        .iter()
        .flat_map(|p| {
            let x = 0.5 * (c * (p[0] - 0.5) - s * (p[1] - 0.5)) + 0.5;
            let y = 0.5 * (s * (p[0] - 0.5) + c * (p[1] - 0.5)) + 0.5;
            [x, y, 0.5 * p[2]]
        })
        .collect();
    let moved = PointCloud::new(3, moved).unwrap();
    let other = ml_dim(&moved, DEFAULT_K).unwrap().value;
    assert!((base - other).abs() < 1e-6 * base.max(1.0));

    let plane = plane_in_r5(600, 34);
    let scaled = PointCloud::new(5, plane.as_slice().iter().map(|v| v * 0.5).collect()).unwrap();
    assert_eq!(
        lpca_dim(&plane, 12, 0.95).unwrap(),
        lpca_dim(&scaled, 12, 0.95).unwrap()
    );
}

#[test]
fn ml_skips_duplicate_points() {
    let mut data = segment(300, 35).into_inner();
    let dup: Vec<f64> = data[..3].to_vec();
    data.extend(dup);
    let est = ml_dim(&PointCloud::new(3, data).unwrap(), 5).unwrap();
    assert!(est.excluded_pairs > 0);
    assert!(est.has_warnings());
    assert!(est.value.is_finite());
}

#[test]
fn knn_search_orders_by_distance_then_index() {
    let cloud = PointCloud::from_rows(&[vec![0.0], vec![1.0], vec![0.5], vec![1.0]]).unwrap();
    let nn = k_nearest(&cloud, &[0.9], 3, None);
    let idx: Vec<usize> = nn.iter().map(|p| p.1).collect();
    assert_eq!(idx, vec![1, 3, 2]);
}
