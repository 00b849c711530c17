//! Kraskov–Stögbauer–Grassberger mutual information (estimator 1).

use nalgebra::DMatrix;

use super::knn::{KdTree, SortedAxis};
use super::{digamma, jittered, prepared_rows, KnnEstimatorConfig};
use crate::data::{AnalysisConfig, CausalityMatrix, TimeSeriesEnsemble};
use crate::error::{Error, Result};
use crate::parallel::{try_map_indices, Execution};

pub const METHOD_NAME: &str = "mi";

/// `I(a; b)` in nats:
/// `ψ(k) + ψ(S) − ⟨ψ(n_a + 1) + ψ(n_b + 1)⟩`, where the averages run over
/// samples and `n_a`, `n_b` count marginal neighbours strictly inside the
/// joint-space k-th neighbour distance. Not clamped at zero.
pub fn knn_mutual_information(a: &[f64], b: &[f64], cfg: &KnnEstimatorConfig) -> Result<f64> {
    let s = a.len();
    if b.len() != s {
        return Err(Error::DimensionMismatch(format!("{s} vs {} samples", b.len())));
    }
    if cfg.k < 1 || s < cfg.k + 2 {
        return Err(Error::TooFewSamples {
            needed: cfg.k + 2,
            got: s,
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("mutual information input".into()));
    }
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if constant(a) && constant(b) {
        return Err(Error::DegenerateDistances);
    }

    let a = jittered(a, cfg.noise_jitter, cfg.seed, 0);
    let b = jittered(b, cfg.noise_jitter, cfg.seed, 1);
    let tree = KdTree::new(a.iter().zip(&b).map(|(&x, &y)| [x, y]).collect());
    let (ax, bx) = (SortedAxis::new(&a), SortedAxis::new(&b));

    let mut acc = 0.0;
    for i in 0..s {
        let eps = tree.kth_neighbor_distance(i, cfg.k);
        if !(eps > 0.0) {
            return Err(Error::DegenerateDistances);
        }
        let na = ax.count_within(a[i], eps);
        let nb = bx.count_within(b[i], eps);
        acc += digamma((na + 1) as f64) + digamma((nb + 1) as f64);
    }
    Ok(digamma(cfg.k as f64) + digamma(s as f64) - acc / s as f64)
}

pub fn mi_matrix(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig) -> Result<CausalityMatrix> {
    mi_matrix_with(ens, cfg, Execution::default())
}

/// Pairwise MI between `x_s(t)` and `x_t(t + mi_lag)`.
///
/// At zero lag the estimate is computed once per unordered pair and
/// mirrored, so the matrix is exactly symmetric.
pub fn mi_matrix_with(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig, exec: Execution) -> Result<CausalityMatrix> {
    cfg.validate()?;
    let rows = prepared_rows(ens, cfg)?;
    let n = rows.len();
    let lag = cfg.mi_lag;
    let t = ens.n_samples();
    if t <= lag + cfg.k + 1 {
        return Err(Error::TooFewSamples {
            needed: lag + cfg.k + 2,
            got: t,
        });
    }
    let base = KnnEstimatorConfig::from_analysis(cfg);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).map(move |j| (s, j)))
        .filter(|&(s, j)| if lag == 0 { s < j } else { s != j })
        .collect();
    let values = try_map_indices(pairs.len(), exec, |p| {
        let (s, j) = pairs[p];
        let src = &rows[s][..t - lag];
        let dst = &rows[j][lag..];
        knn_mutual_information(src, dst, &base.for_pair(s, j))
    })?;
    let mut scores = DMatrix::zeros(n, n);
    for (&(s, j), v) in pairs.iter().zip(values) {
        scores[(s, j)] = v;
        if lag == 0 {
            scores[(j, s)] = v;
        }
    }
    Ok(CausalityMatrix::new(METHOD_NAME, scores, ens.node_names.clone()))
}
