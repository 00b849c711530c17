use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{auroc, summary_stats, wilcoxon_signed_rank, Summary};
use crate::data::AnalysisConfig;
use crate::error::{Error, Result};
use crate::method::Method;
use crate::parallel::{map_indices, Execution};
use crate::simulator::{Realization, SimulationConfig};

/// Per-method outcome over a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub name: Method,
    /// One AUROC per realization, in dataset order.
    pub auroc: Vec<f64>,
    /// Wall-clock seconds spent in the estimator over the whole dataset.
    pub elapsed_s: f64,
    /// Sum of per-realization estimator durations (equals `elapsed_s` when
    /// realizations run sequentially).
    pub cpu_s: f64,
    pub summary: Option<Summary>,
    /// First estimator error, if the method failed on any realization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl MethodResult {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

/// Settings recorded alongside the results so a run can be repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub analysis: AnalysisConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    pub methods: Vec<Method>,
    pub n_realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub methods: Vec<MethodResult>,
    /// Two-sided Wilcoxon p-values keyed `"<a>_vs_<b>"`.
    pub wilcoxon_p: BTreeMap<String, f64>,
    pub config: ReportConfig,
}

pub fn pair_key(a: Method, b: Method) -> String {
    format!("{a}_vs_{b}")
}

impl BenchmarkReport {
    pub fn result(&self, m: Method) -> Option<&MethodResult> {
        self.methods.iter().find(|r| r.name == m)
    }

    /// p-value for a pair of methods in either order.
    pub fn p_value(&self, a: Method, b: Method) -> Option<f64> {
        self.wilcoxon_p
            .get(&pair_key(a, b))
            .or_else(|| self.wilcoxon_p.get(&pair_key(b, a)))
            .copied()
    }

    /// Symmetric matrix of p-values in `methods` order; 1 on the diagonal,
    /// NaN where no test was possible.
    pub fn pairwise_p(&self) -> DMatrix<f64> {
        let k = self.methods.len();
        DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                1.0
            } else {
                self.p_value(self.methods[i].name, self.methods[j].name).unwrap_or(f64::NAN)
            }
        })
    }

    /// Successful methods ordered by median AUROC, best first.
    pub fn ranked(&self) -> Vec<&MethodResult> {
        let mut rows: Vec<&MethodResult> = self.methods.iter().filter(|r| r.summary.is_some()).collect();
        rows.sort_by(|a, b| {
            let (ma, mb) = (a.summary.unwrap().median, b.summary.unwrap().median);
            mb.total_cmp(&ma).then(a.name.cmp(&b.name))
        });
        rows
    }

    /// One line per method: name, median AUROC, [Q1, Q3], elapsed seconds.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .ranked()
            .into_iter()
            .map(|r| {
                let s = r.summary.unwrap();
                format!(
                    "{:<6} median AUROC {:.3} [Q1 {:.3}, Q3 {:.3}]  {:.3} s",
                    r.name.name(),
                    s.median,
                    s.q1,
                    s.q3,
                    r.elapsed_s
                )
            })
            .collect();
        for r in self.methods.iter().filter(|r| !r.succeeded()) {
            lines.push(format!("{:<6} FAILED: {}", r.name.name(), r.error.as_deref().unwrap_or("")));
        }
        lines
    }

    /// Plain-text table: method, time, AUROC mean ± std, median and quartiles.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>14} {:>18} {:>8} {:>17}",
            "Method", "Time (seconds)", "AUROC (mean ± sd)", "Median", "[Q1, Q3]"
        );
        for r in &self.methods {
            match (&r.summary, &r.error) {
                (Some(s), None) => {
                    let _ = writeln!(
                        out,
                        "{:<8} {:>14.3} {:>11.3} ± {:.3} {:>8.3}   [{:.3}, {:.3}]",
                        r.name.name(),
                        r.elapsed_s,
                        s.mean,
                        s.std,
                        s.median,
                        s.q1,
                        s.q3
                    );
                }
                _ => {
                    let _ = writeln!(out, "{:<8} {:>14} {}", r.name.name(), "-", r.error.as_deref().unwrap_or("no data"));
                }
            }
        }
        if !self.wilcoxon_p.is_empty() {
            let _ = writeln!(out, "\nWilcoxon signed-rank p-values (two-sided):");
            for (k, p) in &self.wilcoxon_p {
                let _ = writeln!(out, "  {k:<14} {p:.3e}");
            }
        }
        out
    }
}

/// Score every method on every realization.
pub fn run_benchmark(dataset: &[Realization], methods: &[Method], cfg: &AnalysisConfig) -> Result<BenchmarkReport> {
    run_benchmark_with(dataset, methods, cfg, Execution::default())
}

/// As [`run_benchmark`]; realizations are processed under `exec`, while
/// each estimator call runs sequentially inside its task. Methods run one
/// after another so their wall-clock times do not overlap.
pub fn run_benchmark_with(
    dataset: &[Realization],
    methods: &[Method],
    cfg: &AnalysisConfig,
    exec: Execution,
) -> Result<BenchmarkReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput);
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods selected".into()));
    }
    cfg.validate()?;

    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let cells = map_indices(dataset.len(), exec, |i| {
            let r = &dataset[i];
            let t0 = Instant::now();
            let matrix = method.estimate(&r.ensemble, cfg, Execution::Sequential);
            let spent = t0.elapsed();
            (matrix.and_then(|m| auroc(&m, &r.graph)), spent)
        });
        let elapsed = start.elapsed();
        let cpu: Duration = cells.iter().map(|c| c.1).sum();

        let mut aurocs = Vec::with_capacity(cells.len());
        let mut error = None;
        for (i, (value, _)) in cells.into_iter().enumerate() {
            match value {
                Ok(v) => aurocs.push(v),
                Err(e) => {
                    error = Some(format!("realization {i}: {e}"));
                    aurocs.clear();
                    break;
                }
            }
        }
        let summary = if error.is_none() { Some(summary_stats(&aurocs)?) } else { None };
        results.push(MethodResult {
            name: method,
            auroc: aurocs,
            elapsed_s: elapsed.as_secs_f64(),
            cpu_s: cpu.as_secs_f64(),
            summary,
            error,
        });
    }

    let mut wilcoxon_p = BTreeMap::new();
    for (i, a) in results.iter().enumerate() {
        for b in &results[i + 1..] {
            if !(a.succeeded() && b.succeeded()) {
                continue;
            }
            match wilcoxon_signed_rank(&a.auroc, &b.auroc) {
                Ok(p) => {
                    wilcoxon_p.insert(pair_key(a.name, b.name), p);
                }
                Err(Error::AllDifferencesZero) => {
                    wilcoxon_p.insert(pair_key(a.name, b.name), 1.0);
                }
                Err(_) => {}
            }
        }
    }

    Ok(BenchmarkReport {
        methods: results,
        wilcoxon_p,
        config: ReportConfig {
            analysis: cfg.clone(),
            simulation: None,
            methods: methods.to_vec(),
            n_realizations: dataset.len(),
        },
    })
}
