use crate::data::{CausalityMatrix, GroundTruthGraph};
use crate::error::{Error, Result};

/// Area under the ROC curve of directed scores against a directed ground
/// truth, diagonal excluded.
///
/// Computed as the Mann–Whitney statistic: the fraction of (edge, non-edge)
/// pairs in which the edge scores higher, ties counting one half.
pub fn auroc(scores: &CausalityMatrix, gt: &GroundTruthGraph) -> Result<f64> {
    let n = scores.n_nodes();
    if gt.n_nodes() != n || !scores.scores.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "scores are {}×{}, ground truth has {} nodes",
            scores.scores.nrows(),
            scores.scores.ncols(),
            gt.n_nodes()
        )));
    }
    let mut cells: Vec<(f64, bool)> = Vec::with_capacity(n * n.saturating_sub(1));
    for s in 0..n {
        for t in (0..n).filter(|&t| t != s) {
            let v = scores.scores[(s, t)];
            if !v.is_finite() {
                return Err(Error::NonFiniteInput(format!("score ({s}, {t})")));
            }
            cells.push((v, gt.adjacency[(s, t)]));
        }
    }
    auroc_from_labels(&mut cells)
}

/// AUROC of `(score, is_positive)` samples; reorders the slice.
pub fn auroc_from_labels(cells: &mut [(f64, bool)]) -> Result<f64> {
    let pos = cells.iter().filter(|c| c.1).count();
    let neg = cells.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateGroundTruth);
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    // sum of mid-ranks (1-based) of the positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        while j < cells.len() && cells[j].0 == cells[i].0 {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0;
        let positives = cells[i..j].iter().filter(|c| c.1).count();
        rank_sum += mid * positives as f64;
        i = j;
    }
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos * neg) as f64)
}
