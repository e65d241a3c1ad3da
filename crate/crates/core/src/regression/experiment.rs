use alloc::vec::Vec;

use super::{
    cross_validate_knn, cross_validate_nw, default_knn_grid, default_nw_grid, generate_dataset,
    knn_regress, l2_error, l2_error_of, nw_regress, train_erm, RegressionError, TrainConfig,
};
use crate::approx::BuiltinTarget;
use crate::geometry::{generate_support, SupportKind};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Dnn,
    Knn,
    Nw,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dnn => "dnn",
            Method::Knn => "knn",
            Method::Nw => "nw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dnn" => Some(Method::Dnn),
            "knn" => Some(Method::Knn),
            "nw" => Some(Method::Nw),
            _ => None,
        }
    }
}

/// Hyper-parameters shared by all cells of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodParams {
    /// Template for the trainer; its seed is replaced per replication and an
    /// infinite clip bound is replaced by the target's bound.
    pub train: TrainConfig,
    pub knn_grid: Vec<f64>,
    pub nw_grid: Vec<f64>,
    pub folds: usize,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            knn_grid: default_knn_grid(),
            nw_grid: default_nw_grid(),
            folds: 5,
        }
    }
}

/// One `(target, support, n)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub target: BuiltinTarget,
    pub support: SupportKind,
    pub n: usize,
    pub sigma2: f64,
    /// Fresh support points for the Monte-Carlo error.
    pub validation_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub error: f64,
    /// Selected `k` or bandwidth.
    pub hyperparameter: Option<f64>,
    pub train_loss: Option<f64>,
    pub nw_fallbacks: usize,
}

fn support_components(kind: SupportKind) -> [u64; 3] {
    match kind {
        SupportKind::Sphere { d, dim } => [1, d as u64, dim as u64],
        SupportKind::Koch { level } => [2, u64::from(level), 2],
        SupportKind::LpBallUnion { d, dim } => [3, d as u64, dim as u64],
        SupportKind::Cube { dim } => [4, dim as u64, dim as u64],
    }
}

/// Seed of the data drawn for replication `rep` of a cell. It depends only on
/// the cell and `rep`, never on which other cells run.
pub fn dataset_seed(master: u64, cell: &CellSpec, rep: u64) -> u64 {
    let [kind, d, dim] = support_components(cell.support);
    derive_seed(master, &[dim, d, kind, cell.n as u64, rep])
}

/// Draws data, fits `method` and measures its `L²(μ)` error on a fresh
/// validation sample. All methods of a replication see the same data.
pub fn run_replication(
    cell: &CellSpec,
    method: Method,
    params: &MethodParams,
    master: u64,
    rep: u64,
) -> Result<ReplicationOutcome, RegressionError> {
    let dim = cell.support.ambient_dim();
    let target = cell.target.target(dim)?;
    let seed = dataset_seed(master, cell, rep);
    let data = generate_dataset(&target, cell.support, cell.n, cell.sigma2, seed)?;
    let validation = generate_support(cell.support, cell.validation_size, derive_seed(seed, &[1]))?;
    let method_seed = derive_seed(seed, &[2, method as u64]);
    let outcome = match method {
        Method::Dnn => {
            let mut cfg = params.train.clone();
            cfg.seed = method_seed;
            if !cfg.clip_bound.is_finite() {
                cfg.clip_bound = cell.target.sup_bound();
            }
            cfg.check_clip_bound(&target, &validation)?;
            let model = train_erm(&data, &cfg)?;
            ReplicationOutcome {
                error: l2_error(|x| model.predict(x), &target, &validation)?,
                hyperparameter: None,
                train_loss: Some(model.final_loss),
                nw_fallbacks: 0,
            }
        }
        Method::Knn => {
            let k = cross_validate_knn(&data, &params.knn_grid, params.folds, method_seed)?;
            let pred = knn_regress(&data, k, &validation)?;
            ReplicationOutcome {
                error: l2_error_of(&pred, &target, &validation)?,
                hyperparameter: Some(k as f64),
                train_loss: None,
                nw_fallbacks: 0,
            }
        }
        Method::Nw => {
            let h = cross_validate_nw(&data, &params.nw_grid, params.folds, method_seed)?;
            let pred = nw_regress(&data, h, &validation)?;
            ReplicationOutcome {
                error: l2_error_of(&pred.values, &target, &validation)?,
                hyperparameter: Some(h),
                train_loss: None,
                nw_fallbacks: pred.fallback_count(),
            }
        }
    };
    Ok(outcome)
}

/// Mean and sample standard deviation (`n − 1` denominator; 0 for a single
/// value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

/// Drops the `count` largest values (the outlier rule of the real-data runs).
pub fn discard_largest(values: &[f64], count: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.truncate(values.len().saturating_sub(count));
    sorted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(
            discard_largest(&[5.0, 1.0, 9.0, 3.0], 2),
            alloc::vec![1.0, 3.0]
        );
    }

    #[test]
    fn knn_replication_is_deterministic() {
        let cell = CellSpec {
            target: BuiltinTarget::Sim62,
            support: SupportKind::LpBallUnion { d: 2, dim: 5 },
            n: 40,
            sigma2: 0.1,
            validation_size: 200,
        };
        let p = MethodParams::default();
        let a = run_replication(&cell, Method::Knn, &p, 11, 0).unwrap();
        let b = run_replication(&cell, Method::Knn, &p, 11, 0).unwrap();
        assert_eq!(a, b);
        assert!(a.error >= 0.0);
    }
}
