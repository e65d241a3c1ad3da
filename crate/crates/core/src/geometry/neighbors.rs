use alloc::vec::Vec;

use super::PointCloud;

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` points of `cloud` nearest to `query` in Euclidean distance, as
/// `(squared distance, index)` sorted by distance and then index. `skip`
/// leaves one index out (the query itself, usually).
pub fn k_nearest(
    cloud: &PointCloud,
    query: &[f64],
    k: usize,
    skip: Option<usize>,
) -> Vec<(f64, usize)> {
    let mut all: Vec<(f64, usize)> = cloud
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(i, x)| (squared_distance(x, query), i))
        .collect();
    let k = k.min(all.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < all.len() && k > 0 {
        all.select_nth_unstable_by(k - 1, cmp);
    }
    all.truncate(k);
    all.sort_unstable_by(cmp);
    all
}
