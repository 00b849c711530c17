//! Conditional multivariate Granger causality.
//!
//! The full model regresses every node on `m` lags of all `N` nodes; the
//! restricted model for source `s` drops the lags of `s`. Entry (s, t) is
//! `log(var(restricted residual of t) / var(full residual of t))`.

use nalgebra::DMatrix;

use crate::data::{AnalysisConfig, CausalityMatrix, TimeSeriesEnsemble};
use crate::error::{Error, Result};
use crate::lsxgc::{lag_embed, MIN_RESIDUAL_VARIANCE};
use crate::numerics::{fit_affine, row_variances, standardize_rows};
use crate::parallel::{try_map_indices, Execution};

pub const METHOD_NAME: &str = "gc";

/// True when the full VAR(m) on N nodes has more observations than
/// free parameters per equation.
pub fn is_determined(n: usize, m: usize, t: usize) -> bool {
    t > m && t - m > n * m + 1
}

pub fn granger_matrix(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig) -> Result<CausalityMatrix> {
    granger_matrix_with(ens, cfg, Execution::default())
}

pub fn granger_matrix_with(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig, exec: Execution) -> Result<CausalityMatrix> {
    cfg.validate()?;
    let (n, t) = ens.data.shape();
    let m = cfg.m;
    if !is_determined(n, m, t) {
        return Err(Error::UnderdeterminedSystem { n, m, t });
    }
    let x = if cfg.standardize {
        standardize_rows(&ens.data)?
    } else {
        ens.data.clone()
    };
    let design = lag_embed(&x, m)?.matrix;
    let targets = x.columns(m, t - m).into_owned();

    let full_fit = fit_affine(&design, &targets, cfg.ridge)?;
    let full = row_variances(&full_fit.residuals(&design, &targets))?;

    let rows = try_map_indices(n, exec, |s| -> Result<Vec<f64>> {
        // design row lag·N + s holds x_s(t − lag − 1)
        let keep: Vec<usize> = (0..design.nrows()).filter(|r| r % n != s).collect();
        let restricted_design = design.select_rows(keep.iter());
        let fit = fit_affine(&restricted_design, &targets, cfg.ridge)?;
        let restricted = row_variances(&fit.residuals(&restricted_design, &targets))?;
        let mut row = vec![0.0; n];
        for j in (0..n).filter(|&j| j != s) {
            if full[j] < MIN_RESIDUAL_VARIANCE || restricted[j] < MIN_RESIDUAL_VARIANCE {
                return Err(Error::ZeroResidualVariance(j));
            }
            row[j] = (restricted[j] / full[j]).ln();
        }
        Ok(row)
    })?;
    let scores = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(CausalityMatrix::new(METHOD_NAME, scores, ens.node_names.clone()))
}
