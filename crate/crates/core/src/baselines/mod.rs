//! Literature baselines: conditional multivariate Granger causality and the
//! k-NN (KSG) mutual information and transfer entropy estimators.

pub mod granger;
pub mod knn;
pub mod mi;
pub mod te;

pub use granger::{granger_matrix, granger_matrix_with};
pub use mi::{knn_mutual_information, mi_matrix, mi_matrix_with};
pub use te::{te_matrix, te_matrix_with, transfer_entropy};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{AnalysisConfig, TimeSeriesEnsemble};
use crate::error::Result;
use crate::numerics::standardize;

/// Parameters for the KSG-family estimators. The metric is always the
/// Chebyshev (max) norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnEstimatorConfig {
    pub k: usize,
    /// Amplitude of the uniform tie-breaking perturbation.
    pub noise_jitter: f64,
    pub seed: u64,
}

impl Default for KnnEstimatorConfig {
    fn default() -> Self {
        Self {
            k: 4,
            noise_jitter: 1e-10,
            seed: 0x5eed,
        }
    }
}

impl KnnEstimatorConfig {
    pub fn from_analysis(cfg: &AnalysisConfig) -> Self {
        Self {
            k: cfg.k,
            noise_jitter: cfg.knn_jitter,
            seed: cfg.knn_seed,
        }
    }

    /// Same configuration with a seed specific to the ordered pair (s, t).
    pub fn for_pair(&self, s: usize, t: usize) -> Self {
        Self {
            seed: mix_seed(self.seed, ((s as u64) << 32) | t as u64),
            ..*self
        }
    }
}

/// SplitMix64 finaliser applied to `seed ^ stream`.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Add `amplitude · U(−1, 1)` noise drawn from the given stream.
pub(crate) fn jittered(values: &[f64], amplitude: f64, seed: u64, stream: u64) -> Vec<f64> {
    if amplitude == 0.0 {
        return values.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, stream));
    values.iter().map(|v| v + amplitude * rng.random_range(-1.0..1.0)).collect()
}

pub(crate) fn digamma(x: f64) -> f64 {
    statrs::function::gamma::digamma(x)
}

pub(crate) fn prepared_rows(ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig) -> Result<Vec<Vec<f64>>> {
    let data = if cfg.standardize {
        standardize(ens)?.data
    } else {
        ens.data.clone()
    };
    Ok(data.row_iter().map(|r| r.iter().copied().collect()).collect())
}
