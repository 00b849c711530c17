//! Transfer entropy with embedding dimension 1 and lag 1, estimated as the
//! conditional mutual information `I(target(t); source(t−1) | target(t−1))`
//! using the Frenzel–Pompe k-NN estimator.

use nalgebra::DMatrix;

use super::knn::{KdTree, SortedAxis};
use super::{digamma, jittered, prepared_rows, KnnEstimatorConfig};
use crate::data::{AnalysisConfig, CausalityMatrix, TimeSeriesEnsemble};
use crate::error::{Error, Result};
use crate::parallel::{try_map_indices, Execution};

pub const METHOD_NAME: &str = "te";

/// `TE(source → target)` in nats.
pub fn transfer_entropy(source: &[f64], target: &[f64], cfg: &KnnEstimatorConfig) -> Result<f64> {
    let t = source.len();
    if target.len() != t {
        return Err(Error::DimensionMismatch(format!("{t} vs {} samples", target.len())));
    }
    if cfg.k < 1 || t < cfg.k + 3 {
        return Err(Error::TooFewSamples {
            needed: cfg.k + 3,
            got: t,
        });
    }
    if source.iter().chain(target).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("transfer entropy input".into()));
    }
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if constant(source) && constant(target) {
        return Err(Error::DegenerateDistances);
    }

    let src = jittered(source, cfg.noise_jitter, cfg.seed, 0);
    let dst = jittered(target, cfg.noise_jitter, cfg.seed, 1);
    let s = t - 1;
    // future, source past, target past
    let fut = &dst[1..];
    let sp = &src[..s];
    let tp = &dst[..s];

    let joint = KdTree::new((0..s).map(|i| [fut[i], sp[i], tp[i]]).collect());
    let fut_past = KdTree::new((0..s).map(|i| [fut[i], tp[i]]).collect());
    let src_past = KdTree::new((0..s).map(|i| [sp[i], tp[i]]).collect());
    let past = SortedAxis::new(tp);

    let mut acc = 0.0;
    for i in 0..s {
        let eps = joint.kth_neighbor_distance(i, cfg.k);
        if !(eps > 0.0) {
            return Err(Error::DegenerateDistances);
        }
        let n_xz = fut_past.count_within(i, eps);
        let n_yz = src_past.count_within(i, eps);
        let n_z = past.count_within(tp[i], eps);
        acc += digamma((n_xz + 1) as f64) + digamma((n_yz + 1) as f64) - digamma((n_z + 1) as f64);
    }
    Ok(digamma(cfg.k as f64) - acc / s as f64)
}

pub fn te_matrix(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig) -> Result<CausalityMatrix> {
    te_matrix_with(ens, cfg, Execution::default())
}

pub fn te_matrix_with(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig, exec: Execution) -> Result<CausalityMatrix> {
    cfg.validate()?;
    let rows = prepared_rows(ens, cfg)?;
    let n = rows.len();
    let base = KnnEstimatorConfig::from_analysis(cfg);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).map(move |j| (s, j)))
        .filter(|&(s, j)| s != j)
        .collect();
    let values = try_map_indices(pairs.len(), exec, |p| {
        let (s, j) = pairs[p];
        transfer_entropy(&rows[s], &rows[j], &base.for_pair(s, j))
    })?;
    let mut scores = DMatrix::zeros(n, n);
    for (&(s, j), v) in pairs.iter().zip(values) {
        scores[(s, j)] = v;
    }
    Ok(CausalityMatrix::new(METHOD_NAME, scores, ens.node_names.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{coupled_pair, white_noise};

    fn rows(e: &TimeSeriesEnsemble) -> Vec<Vec<f64>> {
        e.data.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    #[test]
    fn independent_pair_near_zero() {
        let r = rows(&white_noise(2, 2000, 1));
        let te = transfer_entropy(&r[0], &r[1], &KnnEstimatorConfig::default()).unwrap();
        assert!(te.abs() < 0.05, "{te}");
    }

    #[test]
    fn coupled_pair_matches_gaussian_oracle() {
        let coef: f64 = 0.8;
        let r = rows(&coupled_pair(2000, coef, 2));
        let cfg = KnnEstimatorConfig::default();
        // target past is independent of (future, source past) for this VAR, so
        // the partial correlation equals the plain correlation of x2(t) and x1(t−1)
        let rho2 = coef * coef / (1.0 + coef * coef);
        let truth = -0.5 * (1.0 - rho2).ln();
        let fwd = transfer_entropy(&r[0], &r[1], &cfg).unwrap();
        let back = transfer_entropy(&r[1], &r[0], &cfg).unwrap();
        assert!((fwd - truth).abs() < 0.1, "{fwd} vs {truth}");
        assert!(back < 0.05, "{back}");
    }

    #[test]
    fn matrix_is_directional() {
        let x = coupled_pair(1000, 0.8, 3);
        let m = te_matrix(&x, &AnalysisConfig::default()).unwrap();
        assert!(m.scores[(0, 1)] > 5.0 * m.scores[(1, 0)].abs().max(0.01), "{}", m.scores);
    }

    #[test]
    fn white_noise_matrix_small() {
        let x = white_noise(4, 1000, 4);
        let m = te_matrix(&x, &AnalysisConfig::default()).unwrap();
        assert!(m.scores.iter().all(|v| v.abs() < 0.05), "{}", m.scores);
    }

    #[test]
    fn permutation_equivariance() {
        let x = white_noise(4, 300, 5);
        let perm = [2, 0, 3, 1];
        let cfg = AnalysisConfig {
            knn_jitter: 0.0,
            ..Default::default()
        };
        let a = te_matrix(&x, &cfg).unwrap();
        let b = te_matrix(&x.permuted(&perm), &cfg).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((b.scores[(i, j)] - a.scores[(perm[i], perm[j])]).abs() < 1e-12);
            }
        }
    }
}
