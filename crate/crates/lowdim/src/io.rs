//! Point clouds (CSV, IDX), networks (JSON) and results tables (CSV).

use std::fs;
use std::path::Path;

use lowdim_core::estimators::parse_idx;
use lowdim_core::net::RawNetwork;
use lowdim_core::{Matrix, Network, PointCloud};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

/// Reads a CSV with header `x1,…,xD`.
pub fn read_points_csv(path: &Path) -> Result<PointCloud> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    let dim = header.len();
    if dim == 0 {
        return Err(Error::format(path, "empty header"));
    }
    for (i, name) in header.iter().enumerate() {
        if name != format!("x{}", i + 1) {
            return Err(Error::format(
                path,
                format!(
                    "header column {} is {name:?}, expected \"x{}\"",
                    i + 1,
                    i + 1
                ),
            ));
        }
    }
    let mut data = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                Error::format(path, format!("row {}: {field:?} is not a number", row + 1))
            })?;
            data.push(v);
        }
    }
    Ok(PointCloud::new(dim, data)?)
}

pub fn write_points_csv(path: &Path, points: &PointCloud) -> Result<()> {
    let mut w = csv_writer(path)?;
    let header: Vec<String> = (1..=points.dim()).map(|i| format!("x{i}")).collect();
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for p in points.iter() {
        w.write_record(p.iter().map(|&v| fmt_f64(v)))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// IDX unsigned-byte images, one flattened image per point, scaled by 1/255.
pub fn load_idx(path: &Path) -> Result<PointCloud> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_idx(&bytes)?)
}

/// `.idx` and `*-ubyte` files are decoded as IDX, everything else as CSV.
pub fn read_points(path: &Path) -> Result<PointCloud> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    if name.ends_with(".idx") || name.ends_with("-ubyte") {
        load_idx(path)
    } else {
        read_points_csv(path)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    input_dim: usize,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    weight: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

pub fn network_to_json(net: &Network) -> String {
    let file = NetworkFile {
        input_dim: net.input_dim(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerFile {
                weight: l.weight().to_rows(),
                bias: l.bias().to_vec(),
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("finite floats always serialize")
}

/// Decodes and validates a network. `origin` only labels errors.
pub fn network_from_json(text: &str, origin: &Path) -> Result<Network> {
    let file: NetworkFile =
        serde_json::from_str(text).map_err(|e| Error::format(origin, e.to_string()))?;
    let mut layers = Vec::with_capacity(file.layers.len());
    for (i, layer) in file.layers.into_iter().enumerate() {
        let width = layer.weight.first().map_or(0, Vec::len);
        if let Some(r) = layer.weight.iter().position(|row| row.len() != width) {
            return Err(Error::format(
                origin,
                format!(
                    "layer {}: weight row {} has {} entries, row 1 has {width}",
                    i + 1,
                    r + 1,
                    layer.weight[r].len()
                ),
            ));
        }
        if layer.weight.is_empty() || width == 0 {
            return Err(Error::format(
                origin,
                format!("layer {}: empty weight", i + 1),
            ));
        }
        let weight = Matrix::from_rows(&layer.weight).expect("rows checked rectangular");
        layers.push((weight, layer.bias));
    }
    let raw = RawNetwork {
        input_dim: file.input_dim,
        layers,
    };
    let report = raw.validate();
    if !report.is_valid() {
        let msg: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::format(origin, msg.join("; ")));
    }
    Ok(raw.build()?)
}

pub fn write_network(path: &Path, net: &Network) -> Result<()> {
    fs::write(path, network_to_json(net)).map_err(|e| Error::io(path, e))
}

pub fn read_network(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    network_from_json(&text, path)
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    pub d: usize,
    pub n: usize,
    pub mean_error: f64,
    pub std_error: f64,
    /// Replications that entered the mean (after any discarding).
    pub replications: usize,
    /// `ok`, or the error that aborted the cell.
    pub status: String,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// One replication of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub method: String,
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    pub d: usize,
    pub n: usize,
    pub replication: u64,
    pub seed: u64,
    pub error: f64,
    /// Selected `k` or bandwidth; empty for the network.
    pub hyperparameter: Option<f64>,
    pub train_loss: Option<f64>,
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    reader
        .deserialize()
        .map(|r| r.map_err(|e| csv_err(path, e)))
        .collect()
}

/// Columns `method,D,d,n,mean_error,std_error,replications,status`.
pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    read_rows(path)
}

pub fn write_replications_csv(path: &Path, rows: &[ReplicationRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_replications_csv(path: &Path) -> Result<Vec<ReplicationRow>> {
    read_rows(path)
}
