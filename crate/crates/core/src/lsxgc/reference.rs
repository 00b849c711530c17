//! Naive re-implementation of the lsXGC index, used as a test oracle.
//!
//! Everything here is written with plain loops over `Vec`s: covariance
//! eigenvectors by cyclic Jacobi rotations, regression by normal equations
//! solved with Gaussian elimination, variance by the two-pass formula. It
//! shares no numerical code with the production path.

use crate::data::{AnalysisConfig, IndexOrientation, ReducedModel, TimeSeriesEnsemble};
use crate::error::{Error, Result};

use super::MIN_RESIDUAL_VARIANCE;

type Rows = Vec<Vec<f64>>;

fn zscore(rows: &Rows) -> Result<Rows> {
    let mut out = rows.clone();
    for (i, r) in out.iter_mut().enumerate() {
        let t = r.len() as f64;
        let mean = r.iter().sum::<f64>() / t;
        let var = r.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0);
        if var <= 0.0 {
            return Err(Error::ZeroVarianceSeries(i));
        }
        let sd = var.sqrt();
        for v in r.iter_mut() {
            *v = (*v - mean) / sd;
        }
    }
    Ok(out)
}

fn centered(rows: &Rows) -> Rows {
    rows.iter()
        .map(|r| {
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            r.iter().map(|v| v - mean).collect()
        })
        .collect()
}

/// Eigenpairs of a symmetric matrix by cyclic Jacobi sweeps, sorted by
/// descending eigenvalue. Eigenvectors are returned as rows.
fn jacobi_eigen(mut a: Rows) -> (Vec<f64>, Rows) {
    let n = a.len();
    let mut v: Rows = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let values = idx.iter().map(|&i| a[i][i]).collect();
    let vectors = idx.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// First `p` principal component time courses of `rows`.
fn principal_scores(rows: &Rows, p: usize) -> Rows {
    let c = centered(rows);
    let n = c.len();
    let t = c[0].len();
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            cov[i][j] = (0..t).map(|k| c[i][k] * c[j][k]).sum::<f64>() / (t as f64 - 1.0);
        }
    }
    let (_, vecs) = jacobi_eigen(cov);
    project(&vecs[..p], &c)
}

fn project(loadings: &[Vec<f64>], centered_rows: &Rows) -> Rows {
    let t = centered_rows[0].len();
    loadings
        .iter()
        .map(|w| (0..t).map(|k| w.iter().zip(centered_rows).map(|(wi, r)| wi * r[k]).sum()).collect())
        .collect()
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Rows, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::InvalidParams("singular normal equations".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}

/// Residual variance of each target regressed on `[1, lags of state]`.
fn residual_variances(state: &Rows, targets: &Rows, m: usize, ridge: f64) -> Result<Vec<f64>> {
    let t_len = targets[0].len();
    let q = state.len();
    let dim = 1 + m * q;
    // regressor vector at time t: [1, state(t-1), ..., state(t-m)]
    let regressors: Vec<Vec<f64>> = (m..t_len)
        .map(|t| {
            let mut g = vec![1.0];
            for lag in 1..=m {
                for row in state {
                    g.push(row[t - lag]);
                }
            }
            g
        })
        .collect();
    let mut gram = vec![vec![0.0; dim]; dim];
    for g in &regressors {
        for i in 0..dim {
            for j in 0..dim {
                gram[i][j] += g[i] * g[j];
            }
        }
    }
    for (i, row) in gram.iter_mut().enumerate().skip(1) {
        row[i] += ridge;
    }
    let mut out = Vec::with_capacity(targets.len());
    for target in targets {
        let rhs: Vec<f64> = (0..dim)
            .map(|i| regressors.iter().enumerate().map(|(k, g)| g[i] * target[k + m]).sum())
            .collect();
        let beta = solve(gram.clone(), rhs)?;
        let errors: Vec<f64> = regressors
            .iter()
            .enumerate()
            .map(|(k, g)| target[k + m] - g.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (errors.len() as f64 - 1.0);
        out.push(var);
    }
    Ok(out)
}

/// Independent implementation of `lsxgc_source` with the same contract.
pub fn lsxgc_reference_oracle(ens: &TimeSeriesEnsemble, s: usize, cfg: &AnalysisConfig) -> Result<Vec<f64>> {
    let n = ens.n_nodes();
    let t = ens.n_samples();
    let needed = super::min_samples(cfg);
    if t < needed {
        return Err(Error::TooFewSamples { needed, got: t });
    }
    if s >= n {
        return Err(Error::InvalidParams(format!("source index {s} out of range")));
    }
    let raw: Rows = (0..n).map(|i| (0..t).map(|k| ens.data[(i, k)]).collect()).collect();
    let x = if cfg.standardize { zscore(&raw)? } else { raw };

    let mut with_state = principal_scores(&x, cfg.p);
    with_state.push(x[s].clone());

    let others: Rows = x.iter().enumerate().filter(|&(i, _)| i != s).map(|(_, r)| r.clone()).collect();
    let without_state = match cfg.reduced_model {
        ReducedModel::Refit => principal_scores(&others, cfg.p),
        ReducedModel::DropColumn => {
            let c = centered(&x);
            let nn = c.len();
            let mut cov = vec![vec![0.0; nn]; nn];
            for i in 0..nn {
                for j in 0..nn {
                    cov[i][j] = (0..t).map(|k| c[i][k] * c[j][k]).sum::<f64>() / (t as f64 - 1.0);
                }
            }
            let (_, vecs) = jacobi_eigen(cov);
            let loadings: Rows = vecs[..cfg.p]
                .iter()
                .map(|w| w.iter().enumerate().filter(|&(i, _)| i != s).map(|(_, v)| *v).collect())
                .collect();
            let c_others: Rows = c.into_iter().enumerate().filter(|&(i, _)| i != s).map(|(_, r)| r).collect();
            project(&loadings, &c_others)
        }
    };

    let with = residual_variances(&with_state, &x, cfg.m, cfg.ridge)?;
    let without = residual_variances(&without_state, &x, cfg.m, cfg.ridge)?;
    let mut out = vec![0.0; n];
    for target in (0..n).filter(|&j| j != s) {
        if with[target] < MIN_RESIDUAL_VARIANCE || without[target] < MIN_RESIDUAL_VARIANCE {
            return Err(Error::ZeroResidualVariance(target));
        }
        let f = (without[target] / with[target]).ln();
        out[target] = match cfg.orientation {
            IndexOrientation::Gain => f,
            IndexOrientation::Literal => -f,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsxgc::lsxgc_source;
    use crate::testutil::{coupled_pair, white_noise};

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn jacobi_diagonalises() {
        let a = vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 1.0]];
        let (vals, vecs) = jacobi_eigen(a.clone());
        for (lam, v) in vals.iter().zip(&vecs) {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i][j] * v[j]).sum();
                assert!((av - lam * v[i]).abs() < 1e-12);
            }
        }
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn matches_production_on_random_ensemble() {
        let x = white_noise(6, 300, 11);
        let cfg = AnalysisConfig::default();
        for s in 0..6 {
            let a = lsxgc_source(&x, s, &cfg).unwrap();
            let b = lsxgc_reference_oracle(&x, s, &cfg).unwrap();
            assert!(max_diff(&a, &b) < 1e-8, "s={s}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn matches_production_on_coupled_pair() {
        let x = coupled_pair(1000, 0.8, 12);
        let cfg = AnalysisConfig::default();
        for s in 0..2 {
            let a = lsxgc_source(&x, s, &cfg).unwrap();
            let b = lsxgc_reference_oracle(&x, s, &cfg).unwrap();
            assert!(max_diff(&a, &b) < 1e-8);
        }
    }

    #[test]
    fn matches_production_with_refit_and_ridge() {
        let x = white_noise(5, 200, 13);
        let cfg = AnalysisConfig {
            p: 2,
            m: 3,
            ridge: 0.5,
            reduced_model: ReducedModel::Refit,
            ..Default::default()
        };
        for s in 0..5 {
            let a = lsxgc_source(&x, s, &cfg).unwrap();
            let b = lsxgc_reference_oracle(&x, s, &cfg).unwrap();
            assert!(max_diff(&a, &b) < 1e-8);
        }
    }

    #[test]
    fn white_noise_near_zero() {
        let x = white_noise(4, 500, 14);
        let row = lsxgc_reference_oracle(&x, 0, &AnalysisConfig::default()).unwrap();
        assert!(row.iter().all(|v| v.abs() < 0.1));
    }
}
