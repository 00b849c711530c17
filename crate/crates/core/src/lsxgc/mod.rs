//! Large-scale extended Granger causality.
//!
//! For each candidate source `x_s` the ensemble is compressed to its first
//! `p` principal components, the compressed state is augmented with `x_s`,
//! and an affine VAR(m) predictor of every node is fitted on that state.
//! The same predictor is then fitted on the compressed state with the
//! contribution of `x_s` removed. The index `f(s → t)` compares the two
//! residual variances of target `t`.
//!
//! By default the index is `log(var(e_without) / var(e_with))`, so a source
//! that improves prediction scores positive. [`IndexOrientation::Literal`]
//! returns the opposite sign.

mod reference;

pub use reference::lsxgc_reference_oracle;

use nalgebra::DMatrix;

use crate::data::{AnalysisConfig, CausalityMatrix, IndexOrientation, ReducedModel, TimeSeriesEnsemble};
use crate::error::{Error, Result};
use crate::numerics::{fit_affine, pca_fit, pca_transform, row_variances, standardize_rows, PcaModel};
use crate::parallel::{try_map_indices, Execution};

/// Residual variances below this are treated as a deterministic fit.
pub const MIN_RESIDUAL_VARIANCE: f64 = 1e-15;

pub const METHOD_NAME: &str = "lsxgc";

/// Stacked lagged regressors: the column for time `t` is
/// `[Y(:, t−1); Y(:, t−2); …; Y(:, t−m)]`, for `t = m … T−1` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct LagDesign {
    pub matrix: DMatrix<f64>,
    pub lag: usize,
}

impl LagDesign {
    /// 0-based time index of the first design column.
    pub fn first_time(&self) -> usize {
        self.lag
    }
}

pub fn lag_embed(y: &DMatrix<f64>, m: usize) -> Result<LagDesign> {
    let (q, t) = y.shape();
    if m == 0 {
        return Err(Error::InvalidParams("lag order must be >= 1".into()));
    }
    if t <= m {
        return Err(Error::TooFewSamples { needed: m + 1, got: t });
    }
    let matrix = DMatrix::from_fn(m * q, t - m, |r, c| {
        let (lag, row) = (r / q + 1, r % q);
        y[(row, c + m - lag)]
    });
    Ok(LagDesign { matrix, lag: m })
}

/// Minimum series length for lsXGC with the given configuration.
pub fn min_samples(cfg: &AnalysisConfig) -> usize {
    cfg.m + cfg.m * (cfg.p + 1) + 2
}

/// Shared per-ensemble state: the (optionally standardized) data and the
/// PCA fitted on all nodes.
struct Prepared {
    x: DMatrix<f64>,
    pca: PcaModel,
    z: DMatrix<f64>,
}

fn prepare(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig) -> Result<Prepared> {
    cfg.validate().map_err(|e| Error::InvalidParams(e.to_string()))?;
    let (n, t) = ens.data.shape();
    if n < 2 {
        return Err(Error::DimensionMismatch("need at least two nodes".into()));
    }
    let needed = min_samples(cfg);
    if t < needed {
        return Err(Error::TooFewSamples { needed, got: t });
    }
    let x = if cfg.standardize {
        standardize_rows(&ens.data)?
    } else {
        ens.data.clone()
    };
    let pca = pca_fit(&x, cfg.p)?;
    let z = pca_transform(&pca, &x)?;
    Ok(Prepared { x, pca, z })
}

fn without_row(x: &DMatrix<f64>, s: usize) -> DMatrix<f64> {
    x.clone().remove_row(s)
}

fn target_residual_variances(
    state: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    cfg: &AnalysisConfig,
) -> Result<Vec<f64>> {
    let design = lag_embed(state, cfg.m)?;
    let fit = fit_affine(&design.matrix, targets, cfg.ridge)?;
    row_variances(&fit.residuals(&design.matrix, targets))
}

fn source_row(prep: &Prepared, s: usize, cfg: &AnalysisConfig) -> Result<Vec<f64>> {
    let (n, t) = prep.x.shape();
    if s >= n {
        return Err(Error::InvalidParams(format!("source index {s} out of range for {n} nodes")));
    }
    let m = cfg.m;
    let targets = prep.x.columns(m, t - m).into_owned();

    // compressed state augmented with the source
    let mut augmented = prep.z.clone().insert_row(prep.z.nrows(), 0.0);
    augmented.row_mut(prep.z.nrows()).copy_from(&prep.x.row(s));
    let with_source = target_residual_variances(&augmented, &targets, cfg)?;

    // compressed state without the source's contribution
    let reduced = match cfg.reduced_model {
        ReducedModel::DropColumn => {
            let w = prep.pca.w.clone().remove_column(s);
            let mut xs = without_row(&prep.x, s);
            let mean = prep.pca.mean.clone().remove_row(s);
            for mut col in xs.column_iter_mut() {
                col -= &mean;
            }
            w * xs
        }
        ReducedModel::Refit => {
            let xs = without_row(&prep.x, s);
            let pca = pca_fit(&xs, cfg.p)?;
            pca_transform(&pca, &xs)?
        }
    };
    let without_source = target_residual_variances(&reduced, &targets, cfg)?;

    let mut row = vec![0.0; n];
    for target in (0..n).filter(|&j| j != s) {
        let (with, without) = (with_source[target], without_source[target]);
        if with < MIN_RESIDUAL_VARIANCE || without < MIN_RESIDUAL_VARIANCE {
            return Err(Error::ZeroResidualVariance(target));
        }
        let gain = (without / with).ln();
        row[target] = match cfg.orientation {
            IndexOrientation::Gain => gain,
            IndexOrientation::Literal => -gain,
        };
    }
    Ok(row)
}

/// Index `f(s → t)` for every target `t`; entry `s` is zero.
pub fn lsxgc_source(ens: &TimeSeriesEnsemble, s: usize, cfg: &AnalysisConfig) -> Result<Vec<f64>> {
    let prep = prepare(ens, cfg)?;
    source_row(&prep, s, cfg)
}

/// Full lsXGC matrix using the default execution mode.
pub fn lsxgc_matrix(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig) -> Result<CausalityMatrix> {
    lsxgc_matrix_with(ens, cfg, Execution::default())
}

/// Full lsXGC matrix; source rows are computed independently under `exec`.
pub fn lsxgc_matrix_with(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig, exec: Execution) -> Result<CausalityMatrix> {
    let prep = prepare(ens, cfg)?;
    let n = ens.n_nodes();
    let rows = try_map_indices(n, exec, |s| source_row(&prep, s, cfg))?;
    let scores = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(CausalityMatrix::new(METHOD_NAME, scores, ens.node_names.clone()))
}
