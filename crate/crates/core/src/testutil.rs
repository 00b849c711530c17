use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::TimeSeriesEnsemble;

pub fn white_noise(n: usize, t: usize, seed: u64) -> TimeSeriesEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TimeSeriesEnsemble::new(DMatrix::from_fn(n, t, |_, _| StandardNormal.sample(&mut rng))).unwrap()
}

/// Node 0 is white noise; node 1 is `coef · x0(t−1) + ε`.
pub fn coupled_pair(t: usize, coef: f64, seed: u64) -> TimeSeriesEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = DMatrix::zeros(2, t);
    for j in 0..t {
        data[(0, j)] = StandardNormal.sample(&mut rng);
        let e: f64 = StandardNormal.sample(&mut rng);
        data[(1, j)] = e + if j > 0 { coef * data[(0, j - 1)] } else { 0.0 };
    }
    TimeSeriesEnsemble::new(data).unwrap()
}
