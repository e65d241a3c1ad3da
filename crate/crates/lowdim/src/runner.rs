//! Full factorial sweep over methods × d × n with seeded replications.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use lowdim_core::regression::{
    dataset_seed, discard_largest, mean_std, run_replication, CellSpec, Method,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::io::{write_replications_csv, write_results_csv, ReplicationRow, ResultRow};
use crate::{plot, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    /// One row per cell, in config order (method, then d, then n).
    pub rows: Vec<ResultRow>,
    /// Successful replications, in the same order.
    pub replications: Vec<ReplicationRow>,
}

struct Cell {
    method: Method,
    d: usize,
    spec: CellSpec,
}

/// Runs every cell on the current rayon pool. The output does not depend on
/// the pool size. With `progress`, a counter goes to stderr.
pub fn run_experiment(cfg: &ExperimentConfig, progress: bool) -> Result<ExperimentResults> {
    cfg.validate()?;
    let target = cfg.builtin_target()?;
    let params = cfg.method_params()?;
    let mut cells = Vec::new();
    for method in cfg.methods()? {
        for &d in &cfg.d_list {
            for &n in &cfg.n_list {
                let spec = CellSpec {
                    target,
                    support: cfg.support_kind(d)?,
                    n,
                    sigma2: cfg.sigma2,
                    validation_size: cfg.validation_size,
                };
                cells.push(Cell { method, d, spec });
            }
        }
    }
    let reps = cfg.replications;
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let done = AtomicUsize::new(0);
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|&(c, rep)| {
            let cell = &cells[c];
            let out = run_replication(&cell.spec, cell.method, &params, cfg.master_seed, rep);
            if progress {
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                let mut err = std::io::stderr().lock();
                let _ = write!(err, "\r{k}/{} replications", jobs.len());
                if k == jobs.len() {
                    let _ = writeln!(err);
                }
            }
            out
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut replications = Vec::new();
    for (cell, chunk) in cells.iter().zip(outcomes.chunks(reps as usize)) {
        let mut row = ResultRow {
            method: cell.method.name().into(),
            ambient_dim: cfg.ambient_dim,
            d: cell.d,
            n: cell.spec.n,
            mean_error: f64::NAN,
            std_error: f64::NAN,
            replications: 0,
            status: "ok".into(),
        };
        if let Some((rep, e)) = chunk
            .iter()
            .enumerate()
            .find_map(|(r, o)| o.as_ref().err().map(|e| (r, e)))
        {
            row.status = format!("failed in replication {rep}: {e}");
            rows.push(row);
            continue;
        }
        let mut errors = Vec::with_capacity(chunk.len());
        for (rep, outcome) in chunk.iter().enumerate() {
            let o = outcome.as_ref().expect("failures handled above");
            errors.push(o.error);
            replications.push(ReplicationRow {
                method: row.method.clone(),
                ambient_dim: cfg.ambient_dim,
                d: cell.d,
                n: cell.spec.n,
                replication: rep as u64,
                seed: dataset_seed(cfg.master_seed, &cell.spec, rep as u64),
                error: o.error,
                hyperparameter: o.hyperparameter,
                train_loss: o.train_loss,
            });
        }
        let kept = match cfg.discard_largest {
            0 => errors,
            k => discard_largest(&errors, k),
        };
        let (mean, std) = mean_std(&kept);
        row.mean_error = mean;
        row.std_error = std;
        row.replications = kept.len();
        rows.push(row);
    }
    Ok(ExperimentResults { rows, replications })
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub results: PathBuf,
    pub replications: PathBuf,
    pub plots: Vec<PathBuf>,
}

pub fn write_outputs(cfg: &ExperimentConfig, results: &ExperimentResults) -> Result<WrittenFiles> {
    write_results_csv(&cfg.output, &results.rows)?;
    let replications = cfg.replications_path();
    write_replications_csv(&replications, &results.replications)?;
    let plots = match &cfg.plot_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            plot::plot_results(&results.rows, dir)?
        }
        None => Vec::new(),
    };
    Ok(WrittenFiles {
        results: cfg.output.clone(),
        replications,
        plots,
    })
}
