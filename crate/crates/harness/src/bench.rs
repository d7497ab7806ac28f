//! Timing of the ESS estimators on pre-generated paths.
//!
//! Only estimation is timed: paths are drawn and standardized beforehand.

use std::hint::black_box;
use std::time::Instant;

use esscorr::corrstats::Estimator;
use esscorr::gpga::{self, derive_seed, GpgaSpec};
use esscorr::series;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::Artifacts;
use crate::table::Table;

pub const BENCH_METHODS: [Estimator; 3] = [Estimator::Derivative, Estimator::Fft, Estimator::Welch];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub n: usize,
    pub method: &'static str,
    /// Mean over runs of the per-call time.
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub loops: usize,
    pub runs: usize,
}

/// Per-call seconds of `loops` calls, for each of `runs` runs.
pub fn time_runs<T>(loops: usize, runs: usize, mut f: impl FnMut() -> T) -> Vec<f64> {
    (0..runs)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..loops {
                black_box(f());
            }
            (start.elapsed().as_secs_f64() / loops as f64).max(1e-12)
        })
        .collect()
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let m = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, var.sqrt())
}

/// Times each method at each length on one path pair at the first grid
/// roughness.
pub fn run_bench(config: &ExperimentConfig) -> Result<Vec<BenchResult>> {
    config.validate()?;
    let r = config.roughness_grid[0];
    let mut out = Vec::new();
    for (li, &n) in config.lengths.iter().enumerate() {
        let draw = |k: u64| -> Result<_> {
            let spec = GpgaSpec::new(r, n, derive_seed(config.master_seed, 2 * li as u64 + k))?;
            Ok(series::standardize(&gpga::sample(&spec)?)?)
        };
        let (x, y) = (draw(0)?, draw(1)?);
        for method in BENCH_METHODS {
            method.estimate(&x, &y)?;
            let samples = time_runs(config.loops, config.runs, || method.estimate(&x, &y));
            let (mean_seconds, std_seconds) = mean_std(&samples);
            out.push(BenchResult {
                n,
                method: method.tag(),
                mean_seconds,
                std_seconds,
                loops: config.loops,
                runs: config.runs,
            });
        }
    }
    Ok(out)
}

/// How many times slower `method` is than the derivative method at `n`.
pub fn speedup(results: &[BenchResult], n: usize, method: &str) -> Result<f64> {
    let find = |m: &str| {
        results
            .iter()
            .find(|b| b.n == n && b.method == m)
            .ok_or_else(|| HarnessError::Config(format!("no timing for {m} at n = {n}")))
    };
    Ok(find(method)?.mean_seconds / find(Estimator::Derivative.tag())?.mean_seconds)
}

pub fn table(results: &[BenchResult]) -> Table {
    let mut t = Table::new([
        "n",
        "method",
        "mean_seconds",
        "std_seconds",
        "loops",
        "runs",
        "speedup_vs_derivative",
    ]);
    for b in results {
        let s = speedup(results, b.n, b.method).unwrap_or(f64::NAN);
        t.push(vec![
            b.n.into(),
            b.method.into(),
            b.mean_seconds.into(),
            b.std_seconds.into(),
            b.loops.into(),
            b.runs.into(),
            s.into(),
        ]);
    }
    t
}

pub fn artifacts(results: &[BenchResult]) -> Artifacts {
    use crate::experiments::Plot;
    use crate::svg::{PlotSpec, Scale};

    let mut a = Artifacts::default();
    a.tables.push(("bench".into(), table(results)));
    let mut wide = Table::new(["n", "derivative", "fft", "welch"]);
    let mut lengths: Vec<usize> = results.iter().map(|b| b.n).collect();
    lengths.dedup();
    for n in lengths {
        let mut row = vec![n.into()];
        for m in BENCH_METHODS {
            let t = results.iter().find(|b| b.n == n && b.method == m.tag());
            row.push(t.map_or(f64::NAN, |b| b.mean_seconds).into());
        }
        wide.push(row);
    }
    a.plots.push(Plot {
        name: "bench".into(),
        table: wide,
        x: "n".into(),
        ys: vec!["derivative".into(), "fft".into(), "welch".into()],
        spec: PlotSpec {
            title: "seconds per ESS estimate".into(),
            x_scale: Scale::Log,
            y_scale: Scale::Log,
        },
    });
    a
}
