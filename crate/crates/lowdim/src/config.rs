//! Experiment configuration, read from TOML or JSON.

use std::fs;
use std::path::{Path, PathBuf};

use lowdim_core::approx::BuiltinTarget;
use lowdim_core::geometry::SupportKind;
use lowdim_core::regression::{
    default_knn_grid, default_nw_grid, Method, MethodParams, TrainConfig, WeightInit,
};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn default_support() -> String {
    "sphere".into()
}
fn default_sigma2() -> f64 {
    0.1
}
fn default_validation_size() -> usize {
    10_000
}
fn default_folds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `sim61` or `sim62`.
    pub target: String,
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    pub d_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub replications: u64,
    pub methods: Vec<String>,
    pub master_seed: u64,
    /// Results CSV. Relative paths are taken from the config file's directory.
    pub output: PathBuf,
    /// `sphere` or `lp_ball_union`.
    #[serde(default = "default_support")]
    pub support: String,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    #[serde(default = "default_validation_size")]
    pub validation_size: usize,
    /// Drop this many of the largest replication errors per cell.
    #[serde(default)]
    pub discard_largest: usize,
    /// Per-replication CSV; defaults to `<output stem>.replications.csv`.
    #[serde(default)]
    pub replications_output: Option<PathBuf>,
    /// Directory for SVG plots; none are written when absent.
    #[serde(default)]
    pub plot_dir: Option<PathBuf>,
    #[serde(default)]
    pub dnn: DnnParams,
    #[serde(default)]
    pub knn: GridParams,
    #[serde(default)]
    pub nw: GridParams,
    #[serde(default = "default_folds")]
    pub folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DnnParams {
    pub widths: Option<Vec<usize>>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: Option<usize>,
    /// `normal` (scaled by `init_scale`) or `he`.
    pub init: String,
    pub init_scale: f64,
    /// Defaults to the target's sup bound.
    pub clip_bound: Option<f64>,
}

impl Default for DnnParams {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            widths: None,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            batch_size: None,
            init: "normal".into(),
            init_scale: 1.0,
            clip_bound: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridParams {
    pub grid: Option<Vec<f64>>,
}

impl ExperimentConfig {
    /// Parses by extension: `.json` as JSON, anything else as TOML.
    /// Relative output paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.output);
        if let Some(p) = cfg.replications_output.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.plot_dir.as_mut() {
            resolve(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        self.builtin_target()?;
        self.methods()?;
        self.method_params()?;
        if self.d_list.is_empty() || self.n_list.is_empty() {
            return bad("d_list and n_list must not be empty");
        }
        if self.replications == 0 {
            return bad("replications must be positive");
        }
        if self.discard_largest as u64 >= self.replications {
            return bad("discard_largest must be below replications");
        }
        if self.n_list.contains(&0) || self.validation_size == 0 {
            return bad("sample sizes must be positive");
        }
        if !(self.sigma2 >= 0.0) {
            return bad("sigma2 must be nonnegative");
        }
        for &d in &self.d_list {
            self.support_kind(d)?;
        }
        Ok(())
    }

    pub fn builtin_target(&self) -> Result<BuiltinTarget> {
        BuiltinTarget::parse(&self.target)
            .map_err(|_| Error::Config(format!("unknown target {:?}", self.target)))
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        self.methods
            .iter()
            .map(|m| Method::parse(m).ok_or_else(|| Error::Config(format!("unknown method {m:?}"))))
            .collect()
    }

    pub fn support_kind(&self, d: usize) -> Result<SupportKind> {
        let dim = self.ambient_dim;
        if d == 0 || d + 1 > dim {
            return Err(Error::Config(format!("d = {d} needs 1 <= d < D = {dim}")));
        }
        match self.support.as_str() {
            "sphere" => Ok(SupportKind::Sphere { d, dim }),
            "lp_ball_union" => Ok(SupportKind::LpBallUnion { d, dim }),
            other => Err(Error::Config(format!("unknown support {other:?}"))),
        }
    }

    pub fn method_params(&self) -> Result<MethodParams> {
        let p = &self.dnn;
        let init = match p.init.as_str() {
            "normal" => WeightInit::Normal(p.init_scale),
            "he" => WeightInit::He,
            other => return Err(Error::Config(format!("unknown init {other:?}"))),
        };
        let train = TrainConfig {
            widths: p.widths.clone(),
            learning_rate: p.learning_rate,
            epochs: p.epochs,
            batch_size: p.batch_size,
            init,
            clip_bound: p.clip_bound.unwrap_or(f64::INFINITY),
            ..TrainConfig::default()
        };
        Ok(MethodParams {
            train,
            knn_grid: self.knn.grid.clone().unwrap_or_else(default_knn_grid),
            nw_grid: self.nw.grid.clone().unwrap_or_else(default_nw_grid),
            folds: self.folds,
        })
    }

    pub fn replications_path(&self) -> PathBuf {
        self.replications_output.clone().unwrap_or_else(|| {
            let stem = self
                .output
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("results");
            self.output
                .with_file_name(format!("{stem}.replications.csv"))
        })
    }
}
