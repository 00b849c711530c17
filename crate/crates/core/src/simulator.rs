//! Synthetic fMRI-like benchmark generator with known ground truth.
//!
//! Pipeline per realization: sparse directed graph → stable VAR(1) neural
//! dynamics on a fine time grid → double-gamma hemodynamic convolution →
//! decimation to the scan interval → additive white measurement noise at a
//! target SNR → z-scoring.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::baselines::mix_seed;
use crate::data::{
    default_names, load_ensemble_csv, load_matrix, save_ensemble_csv, GroundTruthGraph, MatrixFormat, Orientation,
    TimeSeriesEnsemble,
};
use crate::error::{Error, Result};
use crate::numerics::standardize;
use crate::parallel::{try_map_indices, Execution};

/// Companion-matrix spectral radius every emitted graph must stay below.
pub const MAX_SPECTRAL_RADIUS: f64 = 0.95;
pub const MAX_GRAPH_ATTEMPTS: usize = 1000;
pub const BURN_IN_STEPS: usize = 500;
pub const BLOWUP_LIMIT: f64 = 1e6;
/// HRF support in seconds.
pub const HRF_LENGTH_S: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub n_nodes: usize,
    pub n_realizations: usize,
    /// Output samples per realization.
    pub t_samples: usize,
    pub edge_density: f64,
    /// Uniform range of coupling weights on edges.
    pub coupling_strength: [f64; 2],
    pub snr_db: f64,
    /// Skip measurement noise entirely (infinite SNR).
    pub noiseless: bool,
    pub hrf_peak_s: f64,
    pub hrf_undershoot_s: f64,
    /// Undershoot amplitude relative to the peak lobe.
    pub hrf_ratio: f64,
    pub neural_dt_s: f64,
    pub tr_s: f64,
    /// Diagonal autoregressive coefficient of the neural VAR(1).
    pub self_decay: f64,
    /// Multiplier mapping edge weights onto VAR(1) cross-coefficients.
    pub coupling_scale: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_nodes: 15,
            n_realizations: 50,
            t_samples: 200,
            edge_density: 0.15,
            coupling_strength: [0.3, 0.9],
            snr_db: 20.0,
            noiseless: false,
            hrf_peak_s: 6.0,
            hrf_undershoot_s: 16.0,
            hrf_ratio: 1.0 / 6.0,
            neural_dt_s: 0.05,
            tr_s: 3.0,
            self_decay: 0.93,
            coupling_scale: 0.015,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.n_nodes < 2 {
            return bad("n_nodes must be >= 2");
        }
        if self.n_realizations < 1 {
            return bad("n_realizations must be >= 1");
        }
        if !(self.edge_density > 0.0 && self.edge_density < 1.0) {
            return bad("edge_density must lie in (0, 1)");
        }
        let [lo, hi] = self.coupling_strength;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return bad("coupling_strength must be an ordered non-negative range");
        }
        if !self.snr_db.is_finite() {
            return bad("snr_db must be finite (use noiseless for no noise)");
        }
        if self.t_samples < 50 {
            return bad("t_samples must be >= 50");
        }
        if !(self.neural_dt_s > 0.0 && self.tr_s > 0.0) {
            return bad("neural_dt_s and tr_s must be positive");
        }
        if !(self.self_decay.abs() < MAX_SPECTRAL_RADIUS) {
            return bad("self_decay must be below the stability bound");
        }
        if !(self.coupling_scale >= 0.0 && self.coupling_scale.is_finite()) {
            return bad("coupling_scale must be finite and non-negative");
        }
        Ok(())
    }

    pub fn dynamics(&self) -> NeuralDynamics {
        NeuralDynamics {
            self_decay: self.self_decay,
            coupling_scale: self.coupling_scale,
        }
    }
}

/// VAR(1) parameters: `x(k) = (ρ·I + c·Wᵀ) x(k−1) + η(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuralDynamics {
    pub self_decay: f64,
    pub coupling_scale: f64,
}

/// One simulated dataset with its generating graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub ensemble: TimeSeriesEnsemble,
    pub graph: GroundTruthGraph,
    pub seed_used: u64,
}

/// VAR(1) transition matrix; row t, column s carries the s → t coupling.
pub fn transition_matrix(graph: &GroundTruthGraph, dynamics: &NeuralDynamics) -> DMatrix<f64> {
    let n = graph.n_nodes();
    let w = graph.weights.clone().unwrap_or_else(|| graph.as_f64());
    let mut a = w.transpose() * dynamics.coupling_scale;
    for i in 0..n {
        a[(i, i)] += dynamics.self_decay;
    }
    a
}

pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    match Schur::try_new(a.clone(), f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => gelfand_radius(a),
    }
}

/// `‖A^(2^k)‖^(1/2^k)` by repeated normalized squaring; converges to the
/// spectral radius from above.
fn gelfand_radius(a: &DMatrix<f64>) -> f64 {
    let mut m = a.clone();
    let mut log_scale = 0.0;
    let mut power = 1.0;
    for _ in 0..40 {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        m /= norm;
        log_scale += norm.ln() / power;
        m = &m * &m;
        power *= 2.0;
    }
    (log_scale + m.norm().ln() / power).exp()
}

/// Directed Erdős–Rényi graph with positive uniform weights, redrawn until
/// it has an edge and its VAR(1) is comfortably stable.
pub fn generate_graph<R: Rng>(
    n: usize,
    density: f64,
    strength_range: [f64; 2],
    dynamics: &NeuralDynamics,
    rng: &mut R,
) -> Result<GroundTruthGraph> {
    if n < 2 || !(density > 0.0 && density < 1.0) || strength_range[0] > strength_range[1] {
        return Err(Error::InvalidParams("graph parameters out of range".into()));
    }
    let [lo, hi] = strength_range;
    for _ in 0..MAX_GRAPH_ATTEMPTS {
        let mut adj = DMatrix::from_element(n, n, false);
        let mut weights = DMatrix::zeros(n, n);
        for s in 0..n {
            for t in 0..n {
                if s != t && rng.random_bool(density) {
                    adj[(s, t)] = true;
                    weights[(s, t)] = if hi > lo { rng.random_range(lo..hi) } else { lo };
                }
            }
        }
        if !adj.iter().any(|&e| e) {
            continue;
        }
        let graph = GroundTruthGraph {
            adjacency: adj,
            weights: Some(weights),
        };
        if spectral_radius(&transition_matrix(&graph, dynamics)) < MAX_SPECTRAL_RADIUS {
            return Ok(graph);
        }
    }
    Err(Error::StabilityNotReached(MAX_GRAPH_ATTEMPTS))
}

/// Simulate `steps` samples of the neural VAR(1) after a discarded burn-in,
/// starting from the origin.
pub fn simulate_neural<R: Rng>(
    graph: &GroundTruthGraph,
    dynamics: &NeuralDynamics,
    steps: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    simulate_neural_from(graph, dynamics, steps, &vec![0.0; graph.n_nodes()], rng)
}

pub fn simulate_neural_from<R: Rng>(
    graph: &GroundTruthGraph,
    dynamics: &NeuralDynamics,
    steps: usize,
    initial: &[f64],
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let n = graph.n_nodes();
    if initial.len() != n {
        return Err(Error::DimensionMismatch("initial state length".into()));
    }
    let a = transition_matrix(graph, dynamics);
    let mut state = nalgebra::DVector::from_column_slice(initial);
    let mut out = DMatrix::zeros(n, steps);
    for k in 0..BURN_IN_STEPS + steps {
        let noise = nalgebra::DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        state = &a * &state + noise;
        if state.amax() > BLOWUP_LIMIT || state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup(BLOWUP_LIMIT));
        }
        if k >= BURN_IN_STEPS {
            out.set_column(k - BURN_IN_STEPS, &state);
        }
    }
    Ok(out)
}

fn gamma_pdf(t: f64, shape: f64, scale: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let ln = (shape - 1.0) * t.ln() - t / scale - statrs::function::gamma::ln_gamma(shape) - shape * scale.ln();
    ln.exp()
}

/// Double-gamma haemodynamic response sampled every `dt` seconds over
/// [0, 32) s and normalised to unit sum.
///
/// Both lobes use unit scale, with shapes chosen so their modes fall at
/// `peak_s` and `undershoot_s`.
pub fn hrf_kernel(peak_s: f64, undershoot_s: f64, ratio: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && peak_s > 0.0 && undershoot_s > peak_s && ratio >= 0.0 && dt < HRF_LENGTH_S) {
        return Err(Error::InvalidParams(format!(
            "hrf needs dt > 0, 0 < peak < undershoot, ratio >= 0 (got dt={dt}, peak={peak_s}, undershoot={undershoot_s}, ratio={ratio})"
        )));
    }
    let len = (HRF_LENGTH_S / dt).round() as usize;
    let raw: Vec<f64> = (0..len)
        .map(|i| {
            let t = i as f64 * dt;
            gamma_pdf(t, peak_s + 1.0, 1.0) - ratio * gamma_pdf(t, undershoot_s + 1.0, 1.0)
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::InvalidParams("hrf integrates to a non-positive value".into()));
    }
    Ok(raw.into_iter().map(|v| v / sum).collect())
}

/// Integer ratio `tr / dt`, or an error if `tr` is not a multiple of `dt`.
pub fn decimation_factor(dt: f64, tr: f64) -> Result<usize> {
    let ratio = tr / dt;
    let rounded = ratio.round();
    if !(dt > 0.0 && tr > 0.0) || rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * rounded {
        return Err(Error::IncompatibleSamplingRates { dt, tr });
    }
    Ok(rounded as usize)
}

/// Causal convolution of each row with `kernel` (input taken as zero before
/// the first sample), evaluated at every `tr/dt`-th sample starting from 0.
pub fn convolve_subsample(neural: &DMatrix<f64>, kernel: &[f64], dt: f64, tr: f64) -> Result<DMatrix<f64>> {
    let d = decimation_factor(dt, tr)?;
    let (n, steps) = neural.shape();
    let out_len = steps.div_ceil(d);
    Ok(DMatrix::from_fn(n, out_len, |i, j| {
        let k = j * d;
        kernel
            .iter()
            .take(k + 1)
            .enumerate()
            .map(|(lag, h)| h * neural[(i, k - lag)])
            .sum()
    }))
}

/// Add white Gaussian noise per row with variance
/// `signal_power / 10^(snr_db / 10)`, the power measured after mean removal.
pub fn add_noise_snr<R: Rng>(signals: &DMatrix<f64>, snr_db: Option<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    let Some(snr_db) = snr_db else {
        return Ok(signals.clone());
    };
    let t = signals.ncols();
    let mut out = signals.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let mean = row.sum() / t as f64;
        let power = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t as f64;
        if !(power > 0.0) {
            return Err(Error::ZeroPowerSignal(i));
        }
        let sd = (power / 10f64.powf(snr_db / 10.0)).sqrt();
        for v in row.iter_mut() {
            let e: f64 = StandardNormal.sample(rng);
            *v += sd * e;
        }
    }
    Ok(out)
}

/// Seed of realization `index`, independent of generation order.
pub fn realization_seed(seed: u64, index: usize) -> u64 {
    mix_seed(seed, index as u64 + 1)
}

pub fn simulate_realization(cfg: &SimulationConfig, index: usize) -> Result<Realization> {
    cfg.validate()?;
    let seed = realization_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dynamics = cfg.dynamics();
    let graph = generate_graph(cfg.n_nodes, cfg.edge_density, cfg.coupling_strength, &dynamics, &mut rng)?;

    let kernel = hrf_kernel(cfg.hrf_peak_s, cfg.hrf_undershoot_s, cfg.hrf_ratio, cfg.neural_dt_s)?;
    let d = decimation_factor(cfg.neural_dt_s, cfg.tr_s)?;
    // leading output samples whose kernel window reaches before the start
    let warm = kernel.len().div_ceil(d);
    let neural = simulate_neural(&graph, &dynamics, (cfg.t_samples + warm) * d, &mut rng)?;
    let bold = convolve_subsample(&neural, &kernel, cfg.neural_dt_s, cfg.tr_s)?;
    let bold = bold.columns(warm, cfg.t_samples).into_owned();
    let noisy = add_noise_snr(&bold, (!cfg.noiseless).then_some(cfg.snr_db), &mut rng)?;

    let mut ensemble = standardize(&TimeSeriesEnsemble::with_names(noisy, default_names(cfg.n_nodes))?)?;
    ensemble.sampling_interval = Some(cfg.tr_s);
    Ok(Realization {
        ensemble,
        graph,
        seed_used: seed,
    })
}

pub fn simulate_dataset(cfg: &SimulationConfig) -> Result<Vec<Realization>> {
    simulate_dataset_with(cfg, Execution::default())
}

pub fn simulate_dataset_with(cfg: &SimulationConfig, exec: Execution) -> Result<Vec<Realization>> {
    cfg.validate()?;
    try_map_indices(cfg.n_realizations, exec, |i| simulate_realization(cfg, i))
}

/// Contents of `manifest.json` next to a written dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub config: SimulationConfig,
    pub realizations: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub index: usize,
    pub seed: u64,
    pub timeseries: String,
    pub ground_truth: String,
}

pub fn timeseries_file(i: usize) -> String {
    format!("real_{i}_ts.csv")
}

pub fn ground_truth_file(i: usize) -> String {
    format!("real_{i}_gt.csv")
}

/// Write `real_<i>_ts.csv` (rows are time), `real_<i>_gt.csv` and
/// `manifest.json` into `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, cfg: &SimulationConfig, dataset: &[Realization]) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(dataset.len());
    for (i, r) in dataset.iter().enumerate() {
        let (ts, gt) = (timeseries_file(i), ground_truth_file(i));
        save_ensemble_csv(&r.ensemble, dir.join(&ts), Orientation::RowsAreTime)?;
        r.graph.save(dir.join(&gt), &r.ensemble.node_names, MatrixFormat::Csv)?;
        entries.push(ManifestEntry {
            index: i,
            seed: r.seed_used,
            timeseries: ts,
            ground_truth: gt,
        });
    }
    let manifest = Manifest {
        config: cfg.clone(),
        realizations: entries,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

/// Read a dataset directory. Uses `manifest.json` when present, otherwise
/// every consecutive `real_<i>_ts.csv` / `real_<i>_gt.csv` pair from 0.
pub fn read_dataset(dir: impl AsRef<Path>) -> Result<(Option<Manifest>, Vec<Realization>)> {
    let dir = dir.as_ref();
    let manifest_path = dir.join("manifest.json");
    let manifest: Option<Manifest> = if manifest_path.exists() {
        Some(serde_json::from_str(&fs::read_to_string(&manifest_path)?)?)
    } else {
        None
    };
    let entries: Vec<(String, String, u64)> = match &manifest {
        Some(m) => m
            .realizations
            .iter()
            .map(|e| (e.timeseries.clone(), e.ground_truth.clone(), e.seed))
            .collect(),
        None => (0..)
            .map(|i| (timeseries_file(i), ground_truth_file(i), 0))
            .take_while(|(ts, gt, _)| dir.join(ts).exists() && dir.join(gt).exists())
            .collect(),
    };
    if entries.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(entries.len());
    for (ts, gt, seed) in entries {
        let ensemble = load_ensemble_csv(dir.join(ts), Orientation::RowsAreTime)?;
        let graph = GroundTruthGraph::from_scores(&load_matrix(dir.join(gt))?.scores)?;
        if graph.n_nodes() != ensemble.n_nodes() {
            return Err(Error::DimensionMismatch("ground truth and ensemble disagree on N".into()));
        }
        out.push(Realization {
            ensemble,
            graph,
            seed_used: seed,
        });
    }
    Ok((manifest, out))
}
