//! Scoring against ground truth and cross-method comparison.

mod auroc;
mod benchmark;
mod summary;
mod wilcoxon;

pub use auroc::{auroc, auroc_from_labels};
pub use benchmark::{pair_key, run_benchmark, run_benchmark_with, BenchmarkReport, MethodResult, ReportConfig};
pub use summary::{quantile_sorted, summary_stats, Summary};
pub use wilcoxon::{wilcoxon_signed_rank, EXACT_MAX_N};
