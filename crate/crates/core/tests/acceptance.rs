//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use lsxgc_core::baselines::{granger_matrix, knn_mutual_information, KnnEstimatorConfig};
use lsxgc_core::evaluation::{auroc, run_benchmark_with, wilcoxon_signed_rank};
use lsxgc_core::lsxgc::{lsxgc_matrix, lsxgc_matrix_with, lsxgc_reference_oracle};
use lsxgc_core::simulator::{
    add_noise_snr, convolve_subsample, generate_graph, hrf_kernel, simulate_dataset, simulate_dataset_with,
    simulate_neural, spectral_radius, transition_matrix, Realization, SimulationConfig, MAX_SPECTRAL_RADIUS,
};
use lsxgc_core::{AnalysisConfig, CausalityMatrix, Error, Execution, GroundTruthGraph, Method, TimeSeriesEnsemble};

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn white_noise(n: usize, t: usize, rng: &mut ChaCha8Rng) -> TimeSeriesEnsemble {
    TimeSeriesEnsemble::new(DMatrix::from_fn(n, t, |_, _| gaussian(rng))).unwrap()
}

fn benchmark_dataset() -> Vec<Realization> {
    simulate_dataset(&SimulationConfig::default()).unwrap()
}

fn criterion_1(data: &[Realization]) -> Outcome {
    let report = run_benchmark_with(data, &Method::ALL, &AnalysisConfig::default(), Execution::default()).unwrap();
    let median = |m| report.result(m).and_then(|r| r.summary).map(|s| s.median).unwrap_or(f64::NAN);
    let ls = median(Method::Lsxgc);
    let others = [Method::Gc, Method::Te, Method::Mi].map(|m| (m, median(m)));
    let p = report.p_value(Method::Lsxgc, Method::Gc).unwrap_or(f64::NAN);
    let ordered = others.iter().all(|(_, v)| ls > *v);
    let detail = format!(
        "median AUROC lsxgc {ls:.3} vs {}; p(lsxgc, gc) = {p:.2e}",
        others.iter().map(|(m, v)| format!("{m} {v:.3}")).collect::<Vec<_>>().join(", ")
    );
    outcome(ordered && p < 0.05, detail)
}

fn criterion_2(data: &[Realization]) -> Outcome {
    let cfg = AnalysisConfig::default();
    let time = |method: Method| {
        let start = Instant::now();
        for r in data {
            method.estimate(&r.ensemble, &cfg, Execution::Sequential).unwrap();
        }
        start.elapsed().as_secs_f64()
    };
    // warm caches once so neither method pays first-touch costs
    time(Method::Lsxgc);
    let ls = time(Method::Lsxgc);
    let gc = time(Method::Gc);
    outcome(ls < gc && ls < 30.0, format!("sequential wall-clock lsxgc {ls:.3} s, gc {gc:.3} s"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = AnalysisConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(4..=8);
        let t = rng.random_range(100..=400);
        // weakly coupled VAR(1) so the indices are not all near zero
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.5 } else if rng.random_bool(0.3) { 0.3 } else { 0.0 });
        let mut x = DMatrix::zeros(n, t);
        for c in 1..t {
            let prev = x.column(c - 1).into_owned();
            let next = &a * prev * (0.9 / n as f64).sqrt() + DMatrix::from_fn(n, 1, |_, _| gaussian(&mut rng));
            x.set_column(c, &next.column(0));
        }
        let ens = TimeSeriesEnsemble::new(x).unwrap();
        let m = lsxgc_matrix(&ens, &cfg).unwrap();
        for s in 0..n {
            let oracle = lsxgc_reference_oracle(&ens, s, &cfg).unwrap();
            for (t, v) in oracle.iter().enumerate() {
                worst = worst.max((m.scores[(s, t)] - v).abs());
            }
        }
    }
    outcome(worst < 1e-8, format!("max |production − oracle| = {worst:.2e} over 20 ensembles"))
}

fn random_sparse_truth(n: usize, rng: &mut ChaCha8Rng) -> GroundTruthGraph {
    loop {
        let adj = DMatrix::from_fn(n, n, |i, j| i != j && rng.random_bool(0.15));
        if let Ok(g) = GroundTruthGraph::new(adj, None) {
            return g;
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = AnalysisConfig::default();
    let mut sums = [0.0; 4];
    const TRIALS: usize = 100;
    for trial in 0..TRIALS {
        let ens = white_noise(10, 500, &mut rng);
        let truth = random_sparse_truth(10, &mut rng);
        let cfg = AnalysisConfig {
            knn_seed: trial as u64,
            ..cfg.clone()
        };
        for (i, m) in Method::ALL.iter().enumerate() {
            let scores = m.estimate(&ens, &cfg, Execution::default()).unwrap();
            sums[i] += auroc(&scores, &truth).unwrap();
        }
    }
    let means = sums.map(|s| s / TRIALS as f64);
    let pass = means.iter().all(|m| (m - 0.5).abs() <= 0.05);
    let detail = Method::ALL
        .iter()
        .zip(means)
        .map(|(m, v)| format!("{m} {v:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, format!("mean null AUROC: {detail}"))
}

fn criterion_5() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for rho in [0.3f64, 0.6, 0.9] {
        let truth = -0.5 * (1.0 - rho * rho).ln();
        let mut total = 0.0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
            let (mut a, mut b) = (Vec::with_capacity(2000), Vec::with_capacity(2000));
            for _ in 0..2000 {
                let (u, v) = (gaussian(&mut rng), gaussian(&mut rng));
                a.push(u);
                b.push(rho * u + (1.0 - rho * rho).sqrt() * v);
            }
            let cfg = KnnEstimatorConfig {
                seed,
                ..Default::default()
            };
            total += knn_mutual_information(&a, &b, &cfg).unwrap();
        }
        let mean = total / 20.0;
        pass &= (mean - truth).abs() < 0.08;
        details.push(format!("ρ={rho}: {mean:.4} vs {truth:.4}"));
    }
    outcome(pass, details.join("; "))
}

/// Fraction of (edge, non-edge) pairs ranked correctly, ties counting half.
fn brute_force_auroc(scores: &DMatrix<f64>, truth: &DMatrix<bool>) -> f64 {
    let n = scores.nrows();
    let mut half_units = 0u64;
    let mut pairs = 0u64;
    for (pi, pj) in (0..n).flat_map(|i| (0..n).map(move |j| (i, j))) {
        if pi == pj || !truth[(pi, pj)] {
            continue;
        }
        for (ni, nj) in (0..n).flat_map(|i| (0..n).map(move |j| (i, j))) {
            if ni == nj || truth[(ni, nj)] {
                continue;
            }
            pairs += 1;
            let (sp, sn) = (scores[(pi, pj)], scores[(ni, nj)]);
            half_units += if sp > sn { 2 } else if sp == sn { 1 } else { 0 };
        }
    }
    (half_units as f64 / 2.0) / pairs as f64
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    for i in 0..1000 {
        let truth = loop {
            let adj = DMatrix::from_fn(6, 6, |r, c| r != c && rng.random_bool(0.3));
            if let Ok(g) = GroundTruthGraph::new(adj.clone(), None) {
                if g.edge_count() < 30 {
                    break g;
                }
            }
        };
        // every other instance uses a coarse grid so ties are common
        let scores = DMatrix::from_fn(6, 6, |_, _| {
            if i % 2 == 0 {
                rng.random_range(0..4) as f64
            } else {
                rng.random::<f64>()
            }
        });
        let m = CausalityMatrix::new("x", scores.clone(), (1..=6).map(|k| format!("x{k}")).collect());
        if auroc(&m, &truth).unwrap() != brute_force_auroc(&scores, &truth.adjacency) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in 1000 instances"))
}

/// Two-sided p-value by listing all 2ⁿ sign assignments of the mid-ranks.
fn enumerated_wilcoxon(diffs: &[f64]) -> f64 {
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    // doubled mid-ranks: 2·rank = (#smaller)·2 + (#equal) + 1
    let ranks2: Vec<u64> = abs
        .iter()
        .map(|a| {
            let smaller = abs.iter().filter(|b| *b < a).count() as u64;
            let equal = abs.iter().filter(|b| *b == a).count() as u64;
            2 * smaller + equal + 1
        })
        .collect();
    let observed: u64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| ranks2[i]).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: u64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks2[i]).sum();
        le += (w <= observed) as u64;
        ge += (w >= observed) as u64;
    }
    (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    let mut cases = 0;
    for n in 5..=10 {
        for case in 0..200 {
            let diffs: Vec<f64> = (0..n)
                .map(|_| {
                    let mag = if case % 2 == 0 { rng.random_range(1..4) as f64 } else { rng.random::<f64>() + 0.01 };
                    if rng.random_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect();
            let zeros = vec![0.0; n];
            cases += 1;
            if wilcoxon_signed_rank(&diffs, &zeros).unwrap() != enumerated_wilcoxon(&diffs) {
                mismatches += 1;
            }
        }
    }
    let mut rejections = 0;
    for _ in 0..1000 {
        let a: Vec<f64> = (0..50).map(|_| gaussian(&mut rng)).collect();
        let b: Vec<f64> = (0..50).map(|_| gaussian(&mut rng)).collect();
        if wilcoxon_signed_rank(&a, &b).unwrap() < 0.05 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / 1000.0;
    outcome(
        mismatches == 0 && (0.03..=0.07).contains(&rate),
        format!("{mismatches}/{cases} exact mismatches (n = 5..10); null rejection rate {rate:.3} at α = 0.05"),
    )
}

fn criterion_8(data: &[Realization]) -> Outcome {
    let cfg = SimulationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let graph = generate_graph(cfg.n_nodes, cfg.edge_density, cfg.coupling_strength, &cfg.dynamics(), &mut rng).unwrap();
    let decimation = (cfg.tr_s / cfg.neural_dt_s).round() as usize;
    let kernel = hrf_kernel(cfg.hrf_peak_s, cfg.hrf_undershoot_s, cfg.hrf_ratio, cfg.neural_dt_s).unwrap();
    let neural = simulate_neural(&graph, &cfg.dynamics(), 10_000 * decimation, &mut rng).unwrap();
    let clean = convolve_subsample(&neural, &kernel, cfg.neural_dt_s, cfg.tr_s).unwrap();
    let noisy = add_noise_snr(&clean, Some(cfg.snr_db), &mut rng).unwrap();
    let mut worst_db = 0.0f64;
    for i in 0..clean.nrows() {
        let signal = clean.row(i);
        let noise = noisy.row(i) - signal;
        let mean = signal.mean();
        let ps = signal.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let pn = noise.iter().map(|v| v * v).sum::<f64>();
        worst_db = worst_db.max((10.0 * (ps / pn).log10() - cfg.snr_db).abs());
    }
    let max_radius = data
        .iter()
        .map(|r| spectral_radius(&transition_matrix(&r.graph, &cfg.dynamics())))
        .fold(0.0, f64::max);
    let rerun = simulate_dataset_with(&cfg, Execution::Sequential).unwrap();
    let identical = rerun.len() == data.len()
        && rerun.iter().zip(data).all(|(a, b)| {
            a.seed_used == b.seed_used
                && a.graph == b.graph
                && a.ensemble.data.iter().zip(b.ensemble.data.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
        });
    outcome(
        worst_db <= 0.5 && max_radius < MAX_SPECTRAL_RADIUS && identical,
        format!(
            "worst SNR error {worst_db:.3} dB; max spectral radius {max_radius:.4}; bit-identical rerun: {identical}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ens = white_noise(100, 150, &mut rng);
    let cfg = AnalysisConfig::default();
    let gc = granger_matrix(&ens, &cfg);
    let gc_rejected = matches!(gc, Err(Error::UnderdeterminedSystem { .. }));
    let ls = lsxgc_matrix_with(&ens, &cfg, Execution::default());
    let finite = ls.as_ref().map(|m| m.scores.iter().all(|v| v.is_finite())).unwrap_or(false);
    outcome(
        gc_rejected && finite,
        format!(
            "gc: {}; lsxgc: {}",
            gc.err().map(|e| e.to_string()).unwrap_or_else(|| "returned a matrix".into()),
            if finite { "finite 100×100 matrix".to_string() } else { format!("{:?}", ls.err()) }
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--list` or filters; honor
    // `--list` so test discovery tools see a single entry.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let data = benchmark_dataset();
    let criteria: Vec<(&str, Check)> = vec![
        ("method ordering", Box::new(|| criterion_1(&data))),
        ("timing ordering", Box::new(|| criterion_2(&data))),
        ("oracle equivalence", Box::new(criterion_3)),
        ("null calibration", Box::new(criterion_4)),
        ("KSG accuracy", Box::new(criterion_5)),
        ("AUROC exactness", Box::new(criterion_6)),
        ("Wilcoxon exactness", Box::new(criterion_7)),
        ("simulator fidelity", Box::new(|| criterion_8(&data))),
        ("large-N regime", Box::new(criterion_9)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failures += usize::from(!o.pass);
        println!(
            "{} criterion {} ({name}): {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
