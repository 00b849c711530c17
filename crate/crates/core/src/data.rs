//! Core data types and their file formats.
//!
//! Ensembles are stored internally as N×T (nodes × time). On disk an ensemble
//! CSV may be laid out either way; matrices (causality scores, ground truth)
//! are written as CSV with a header of node names and one row per source
//! node, or as JSON `{"method", "nodes", "scores"}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// N×T matrix of node time-series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesEnsemble {
    pub data: DMatrix<f64>,
    pub node_names: Vec<String>,
    /// Seconds between samples; metadata only.
    pub sampling_interval: Option<f64>,
}

impl TimeSeriesEnsemble {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let names = default_names(data.nrows());
        Self::with_names(data, names)
    }

    pub fn with_names(data: DMatrix<f64>, node_names: Vec<String>) -> Result<Self> {
        if node_names.len() != data.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} node names for {} rows",
                node_names.len(),
                data.nrows()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % data.nrows(), pos / data.nrows());
            return Err(Error::NonFiniteInput(format!("entry ({r}, {c})")));
        }
        Ok(Self {
            data,
            node_names,
            sampling_interval: None,
        })
    }

    /// Build from row-major nested vectors, one inner vector per node.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let t = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != t) {
            return Err(Error::DimensionMismatch("rows differ in length".into()));
        }
        Self::new(DMatrix::from_fn(n, t, |i, j| rows[i][j]))
    }

    pub fn n_nodes(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }

    /// Reorder nodes so that new node `i` is old node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let data = DMatrix::from_fn(self.n_nodes(), self.n_samples(), |i, j| self.data[(perm[i], j)]);
        Self {
            data,
            node_names: perm.iter().map(|&p| self.node_names[p].clone()).collect(),
            sampling_interval: self.sampling_interval,
        }
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// N×N directed score matrix; entry (s, t) is the influence of s on t.
/// The diagonal is held at zero and never evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalityMatrix {
    pub scores: DMatrix<f64>,
    pub method: String,
    pub nodes: Vec<String>,
}

impl CausalityMatrix {
    pub fn new(method: impl Into<String>, mut scores: DMatrix<f64>, nodes: Vec<String>) -> Self {
        scores.fill_diagonal(0.0);
        Self {
            scores,
            method: method.into(),
            nodes,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.scores.nrows()
    }

    pub fn save(&self, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
        save_matrix(path, &self.method, &self.nodes, &self.scores, format)
    }
}

/// Directed adjacency: entry (s, t) is `true` when the generator wired s → t.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthGraph {
    pub adjacency: DMatrix<bool>,
    pub weights: Option<DMatrix<f64>>,
}

impl GroundTruthGraph {
    pub fn new(adjacency: DMatrix<bool>, weights: Option<DMatrix<f64>>) -> Result<Self> {
        if !adjacency.is_square() {
            return Err(Error::DimensionMismatch("adjacency must be square".into()));
        }
        if (0..adjacency.nrows()).any(|i| adjacency[(i, i)]) {
            return Err(Error::InvalidParams("ground truth has a self-loop".into()));
        }
        if !adjacency.iter().any(|&e| e) {
            return Err(Error::DegenerateGroundTruth);
        }
        Ok(Self { adjacency, weights })
    }

    /// Any nonzero off-diagonal entry becomes an edge.
    pub fn from_scores(m: &DMatrix<f64>) -> Result<Self> {
        let adj = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| i != j && m[(i, j)] != 0.0);
        Self::new(adj, None)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&e| e).count()
    }

    pub fn as_f64(&self) -> DMatrix<f64> {
        self.adjacency.map(|e| if e { 1.0 } else { 0.0 })
    }

    pub fn save(&self, path: impl AsRef<Path>, nodes: &[String], format: MatrixFormat) -> Result<()> {
        save_matrix(path, "ground_truth", nodes, &self.as_f64(), format)
    }
}

/// Which score orientation to report for the lsXGC index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexOrientation {
    /// log(var(e without source) / var(e with source)); positive = influence.
    #[default]
    Gain,
    /// log(var(e with source) / var(e without source)), sign-flipped.
    Literal,
}

/// How the source-free reduced representation is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedModel {
    /// Delete column s of the full-data loadings and row s of X.
    #[default]
    DropColumn,
    /// Fit a fresh PCA on X without row s.
    Refit,
}

/// Analysis parameters shared by all estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Principal components kept by lsXGC.
    pub p: usize,
    /// Autoregressive lag order.
    pub m: usize,
    /// Neighbour count for the k-NN estimators.
    pub k: usize,
    pub ridge: f64,
    /// z-score every node before estimation.
    pub standardize: bool,
    pub orientation: IndexOrientation,
    pub reduced_model: ReducedModel,
    /// Lag (in samples) applied to the target series for MI; 0 = zero-lag.
    pub mi_lag: usize,
    /// Amplitude of the tie-breaking jitter used by the k-NN estimators.
    pub knn_jitter: f64,
    pub knn_seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            p: 1,
            m: 2,
            k: 4,
            ridge: 0.0,
            standardize: true,
            orientation: IndexOrientation::Gain,
            reduced_model: ReducedModel::DropColumn,
            mi_lag: 0,
            knn_jitter: 1e-10,
            knn_seed: 0x5eed,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.m < 1 || self.k < 1 {
            return Err(Error::InvalidConfig("p, m and k must all be >= 1".into()));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::InvalidConfig("ridge must be a finite non-negative number".into()));
        }
        if !(self.knn_jitter >= 0.0 && self.knn_jitter.is_finite()) {
            return Err(Error::InvalidConfig("knn_jitter must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    RowsAreNodes,
    RowsAreTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Json => "json",
        }
    }
}

/// A parsed CSV table: optional header plus a rectangular numeric body.
struct Table {
    header: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_error)?;

    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if idx == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            header = Some(record.iter().map(str::to_owned).collect::<Vec<_>>());
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRows {
                line,
                expected,
                got: record.len(),
            });
        }
        let mut row = Vec::with_capacity(expected);
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::ParseError {
                line,
                column: col + 1,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { line, column: col + 1 });
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::ParseError {
            line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Load an ensemble from CSV, returning it in N×T orientation.
///
/// With [`Orientation::RowsAreTime`] the optional header names the nodes
/// (one column per node). With [`Orientation::RowsAreNodes`] each line is a
/// node and a header row, if present, is skipped.
pub fn load_ensemble_csv(path: impl AsRef<Path>, orientation: Orientation) -> Result<TimeSeriesEnsemble> {
    let table = read_table(path.as_ref())?;
    if table.rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (r, c) = (table.rows.len(), table.rows[0].len());
    let (data, names) = match orientation {
        Orientation::RowsAreTime => {
            let data = DMatrix::from_fn(c, r, |i, j| table.rows[j][i]);
            let names = table.header.unwrap_or_else(|| default_names(c));
            (data, names)
        }
        Orientation::RowsAreNodes => (DMatrix::from_fn(r, c, |i, j| table.rows[i][j]), default_names(r)),
    };
    TimeSeriesEnsemble::with_names(data, names)
}

/// Write an ensemble as CSV: header of node names, then one line per
/// time sample (or one line per node for [`Orientation::RowsAreNodes`],
/// without header).
pub fn save_ensemble_csv(ens: &TimeSeriesEnsemble, path: impl AsRef<Path>, orientation: Orientation) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match orientation {
        Orientation::RowsAreTime => {
            writeln!(w, "{}", ens.node_names.join(","))?;
            for t in 0..ens.n_samples() {
                write_row(&mut w, ens.data.column(t).iter())?;
            }
        }
        Orientation::RowsAreNodes => {
            for i in 0..ens.n_nodes() {
                write_row(&mut w, ens.data.row(i).iter())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_row<'a, W: Write>(w: &mut W, values: impl Iterator<Item = &'a f64>) -> Result<()> {
    let line: Vec<String> = values.map(|v| format!("{v}")).collect();
    writeln!(w, "{}", line.join(","))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    method: String,
    nodes: Vec<String>,
    scores: Vec<Vec<f64>>,
}

/// Write a square matrix with node labels.
///
/// Rust's `Display` for `f64` prints the shortest representation that
/// parses back to the same value, so both formats round-trip exactly.
pub fn save_matrix(
    path: impl AsRef<Path>,
    method: &str,
    nodes: &[String],
    matrix: &DMatrix<f64>,
    format: MatrixFormat,
) -> Result<()> {
    if nodes.len() != matrix.nrows() || !matrix.is_square() {
        return Err(Error::DimensionMismatch("matrix must be square with one name per node".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => {
            writeln!(w, "{}", nodes.join(","))?;
            for i in 0..matrix.nrows() {
                write_row(&mut w, matrix.row(i).iter())?;
            }
        }
        MatrixFormat::Json => {
            let doc = MatrixJson {
                method: method.to_owned(),
                nodes: nodes.to_vec(),
                scores: (0..matrix.nrows())
                    .map(|i| matrix.row(i).iter().copied().collect())
                    .collect(),
            };
            serde_json::to_writer(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Load a matrix written by [`save_matrix`]. The format is chosen from the
/// file extension (`.json`, anything else is CSV).
pub fn load_matrix(path: impl AsRef<Path>) -> Result<CausalityMatrix> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        let doc: MatrixJson = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
        let n = doc.scores.len();
        if doc.scores.iter().any(|r| r.len() != n) || doc.nodes.len() != n {
            return Err(Error::DimensionMismatch("scores must be N×N with N node names".into()));
        }
        let scores = DMatrix::from_fn(n, n, |i, j| doc.scores[i][j]);
        return Ok(CausalityMatrix {
            scores,
            method: doc.method,
            nodes: doc.nodes,
        });
    }
    let table = read_table(path)?;
    let n = table.rows.len();
    if n == 0 || table.rows[0].len() != n {
        return Err(Error::DimensionMismatch("matrix CSV must be square".into()));
    }
    let method = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(CausalityMatrix {
        scores: DMatrix::from_fn(n, n, |i, j| table.rows[i][j]),
        method,
        nodes: table.header.unwrap_or_else(|| default_names(n)),
    })
}
