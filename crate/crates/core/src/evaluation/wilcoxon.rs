use crate::error::{Error, Result};

/// Largest sample size (after dropping zero differences) that uses the
/// exact null distribution.
pub const EXACT_MAX_N: usize = 25;
pub const MIN_N: usize = 5;

/// Signed ranks of the non-zero paired differences, as doubled mid-ranks so
/// that ties stay integral.
fn doubled_signed_ranks(a: &[f64], b: &[f64]) -> Result<(Vec<u64>, Vec<bool>, Vec<usize>)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} paired samples", a.len(), b.len())));
    }
    let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFiniteInput("wilcoxon differences".into()));
    }
    if diffs.is_empty() {
        return Err(if a.is_empty() { Error::EmptyInput } else { Error::AllDifferencesZero });
    }
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let n = diffs.len();
    let mut ranks = vec![0u64; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && diffs[j].abs() == diffs[i].abs() {
            j += 1;
        }
        // doubled mid-rank of positions i+1 ..= j
        let r2 = (i + 1 + j) as u64;
        ranks[i..j].fill(r2);
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    let positive = diffs.iter().map(|d| *d > 0.0).collect();
    Ok((ranks, positive, ties))
}

/// Two-sided Wilcoxon signed-rank test of paired samples.
///
/// Zero differences are dropped. Up to [`EXACT_MAX_N`] remaining pairs the
/// p-value comes from the exact permutation distribution of the (mid-ranked)
/// statistic; above that, from the normal approximation with tie and
/// continuity corrections.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    let (ranks, positive, ties) = doubled_signed_ranks(a, b)?;
    let n = ranks.len();
    if n < MIN_N {
        return Err(Error::TooFewSamples { needed: MIN_N, got: n });
    }
    let w2: u64 = ranks.iter().zip(&positive).filter(|(_, p)| **p).map(|(r, _)| r).sum();
    let p = if n <= EXACT_MAX_N {
        exact_p(&ranks, w2)
    } else {
        normal_p(n, w2 as f64 / 2.0, &ties)
    };
    Ok(p.min(1.0))
}

/// `2·min(P(W ≤ w), P(W ≥ w))` under random signs.
fn exact_p(ranks: &[u64], w2: u64) -> f64 {
    let total: u64 = ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let lower: u64 = counts[..=w2 as usize].iter().sum();
    let upper: u64 = counts[w2 as usize..].iter().sum();
    let denom = 2f64.powi(ranks.len() as i32);
    2.0 * lower.min(upper) as f64 / denom
}

fn normal_p(n: usize, w: f64, ties: &[usize]) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_adj: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive_six() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [0.0; 6];
        assert_eq!(wilcoxon_signed_rank(&a, &b).unwrap(), 2.0 / 64.0);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(wilcoxon_signed_rank(&[1.0; 6], &[1.0; 6]), Err(Error::AllDifferencesZero)));
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0; 3]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(wilcoxon_signed_rank(&[], &[]), Err(Error::EmptyInput)));
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn zeros_are_dropped() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 7.0];
        let b = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 7.0, 7.0];
        assert_eq!(wilcoxon_signed_rank(&a, &b).unwrap(), 2.0 / 64.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = [0.3, 1.2, -0.4, 2.2, 0.9, 1.1, 0.05, 0.7, 1.9, -1.0, 0.3, 0.6];
        let b = [0.1, 0.2, 0.1, 0.3, 0.2, 0.3, 0.1, 0.0, 0.4, 0.0, 0.0, 0.1];
        assert_eq!(wilcoxon_signed_rank(&a, &b).unwrap(), wilcoxon_signed_rank(&b, &a).unwrap());
        let big_a: Vec<f64> = (0..40).map(|i| ((i * 37) % 17) as f64 - 6.0).collect();
        let big_b = vec![0.5; 40];
        assert_eq!(
            wilcoxon_signed_rank(&big_a, &big_b).unwrap(),
            wilcoxon_signed_rank(&big_b, &big_a).unwrap()
        );
    }

    #[test]
    fn normal_branch_reasonable() {
        // 30 positive differences: p is tiny but positive
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        let p = wilcoxon_signed_rank(&a, &vec![0.0; 30]).unwrap();
        assert!(p > 0.0 && p < 1e-5, "{p}");
    }
}
