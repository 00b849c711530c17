//! Dense linear-algebra primitives shared by the estimators.
//!
//! Matrices follow the N×T convention: one row per variable, one column per
//! sample.

use nalgebra::{DMatrix, DVector, SVD};

use crate::data::TimeSeriesEnsemble;
use crate::error::{Error, Result};

/// Singular values below `RANK_TOL * sigma_max` are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

/// z-score every node: zero mean, unit sample variance.
pub fn standardize(ens: &TimeSeriesEnsemble) -> Result<TimeSeriesEnsemble> {
    Ok(TimeSeriesEnsemble {
        data: standardize_rows(&ens.data)?,
        node_names: ens.node_names.clone(),
        sampling_interval: ens.sampling_interval,
    })
}

pub fn standardize_rows(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let t = x.ncols();
    if t < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: t });
    }
    let mut out = x.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let mean = row.iter().sum::<f64>() / t as f64;
        row.apply(|v| *v -= mean);
        let var = row.iter().map(|v| v * v).sum::<f64>() / (t - 1) as f64;
        // constant rows leave only rounding noise after centering
        if !(var > 1e-24 * (1.0 + mean * mean)) {
            return Err(Error::ZeroVarianceSeries(i));
        }
        let sd = var.sqrt();
        row.apply(|v| *v /= sd);
    }
    Ok(out)
}

/// Principal-component model of an N×T ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// Per-node temporal mean.
    pub mean: DVector<f64>,
    /// p×N loadings with orthonormal rows.
    pub w: DMatrix<f64>,
    /// Per-component variance, descending.
    pub explained_variance: DVector<f64>,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.w.nrows()
    }
}

pub fn row_means(x: &DMatrix<f64>) -> DVector<f64> {
    let t = x.ncols().max(1) as f64;
    DVector::from_iterator(x.nrows(), x.row_iter().map(|r| r.sum() / t))
}

fn center(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for mut col in c.column_iter_mut() {
        col -= mean;
    }
    c
}

/// Fit the top-`p` principal directions of `x` (columns are samples) by a
/// thin SVD of the centered data.
pub fn pca_fit(x: &DMatrix<f64>, p: usize) -> Result<PcaModel> {
    let (n, t) = x.shape();
    let max = n.min(t);
    if p < 1 || p > max {
        return Err(Error::InvalidComponentCount { p, max });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("pca input".into()));
    }
    let mean = row_means(x);
    let xc = center(x, &mean);
    let svd = SVD::new(xc, true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));

    let mut w = DMatrix::zeros(p, n);
    let mut explained = DVector::zeros(p);
    let denom = (t.max(2) - 1) as f64;
    for (row, &k) in order.iter().take(p).enumerate() {
        let col = u.column(k);
        // sign convention: largest-magnitude loading is positive
        let pivot = col
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if v.abs() > col[best].abs() { i } else { best });
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            w[(row, j)] = sign * col[j];
        }
        let s = svd.singular_values[k];
        explained[row] = s * s / denom;
    }
    Ok(PcaModel {
        mean,
        w,
        explained_variance: explained,
    })
}

/// Project onto the principal directions: `W · (X − mean)`.
pub fn pca_transform(model: &PcaModel, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != model.mean.len() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} nodes, data has {}",
            model.mean.len(),
            x.nrows()
        )));
    }
    Ok(&model.w * center(x, &model.mean))
}

/// `targets ≈ a · design + b`, one row of `a` per target.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineModel {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl AffineModel {
    pub fn predict(&self, design: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = &self.a * design;
        for mut col in out.column_iter_mut() {
            col += &self.b;
        }
        out
    }

    /// `targets − prediction`, N×S.
    pub fn residuals(&self, design: &DMatrix<f64>, targets: &DMatrix<f64>) -> DMatrix<f64> {
        targets - self.predict(design)
    }
}

/// Least-squares affine fit with optional ridge penalty on `a`.
///
/// Minimises `Σ_t ‖targets(t) − a·design(t) − b‖² + ridge·‖a‖²_F`. The bias
/// is handled by centering, and the centered problem is solved through the
/// SVD of the design, which gives the minimum-norm solution whenever the
/// design is rank deficient.
pub fn fit_affine(design: &DMatrix<f64>, targets: &DMatrix<f64>, ridge: f64) -> Result<AffineModel> {
    let (d, s) = design.shape();
    let n = targets.nrows();
    if targets.ncols() != s {
        return Err(Error::DimensionMismatch(format!(
            "design has {s} samples, targets have {}",
            targets.ncols()
        )));
    }
    if s == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if design.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("affine fit".into()));
    }
    if !(ridge >= 0.0) {
        return Err(Error::InvalidParams("ridge must be non-negative".into()));
    }

    let d_mean = row_means(design);
    let t_mean = row_means(targets);
    let mut a = DMatrix::zeros(n, d);
    if d > 0 {
        // S×D centered design, samples as rows
        let dc = center(design, &d_mean).transpose();
        let tc = center(targets, &t_mean).transpose();
        let svd = SVD::new(dc, true, true);
        let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let sigma = &svd.singular_values;
        let smax = sigma.max();
        if smax > 0.0 {
            // aᵀ = V · diag(σ / (σ² + ridge)) · Uᵀ · tc
            let mut proj = u.transpose() * &tc;
            for (k, mut row) in proj.row_iter_mut().enumerate() {
                let sk = sigma[k];
                let f = if sk <= RANK_TOL * smax { 0.0 } else { sk / (sk * sk + ridge) };
                row *= f;
            }
            a = (vt.transpose() * proj).transpose();
        }
    }
    let b = &t_mean - &a * &d_mean;
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("affine solution".into()));
    }
    Ok(AffineModel { a, b })
}

/// Unbiased sample variance (divides by S − 1).
pub fn residual_variance(errors: &[f64]) -> Result<f64> {
    let s = errors.len();
    if s < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: s });
    }
    // Welford
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &e) in errors.iter().enumerate() {
        let delta = e - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (e - mean);
    }
    Ok(m2 / (s - 1) as f64)
}

/// Per-row unbiased variance of a residual matrix.
pub fn row_variances(residuals: &DMatrix<f64>) -> Result<Vec<f64>> {
    residuals
        .row_iter()
        .map(|r| residual_variance(&r.iter().copied().collect::<Vec<_>>()))
        .collect()
}
