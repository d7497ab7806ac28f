use esscorr::corrstats::Estimator;
use esscorr_harness::bench;
use esscorr_harness::experiments::{AcfCurve, AcfFitReport};
use esscorr_harness::{
    run_acf_fit, run_ess_sweep, run_experiment, run_pp_calibration, Experiment, ExperimentConfig,
    Table,
};

fn config(
    experiment: Experiment,
    replicates: usize,
    lengths: &[usize],
    grid: &[f64],
) -> ExperimentConfig {
    ExperimentConfig {
        replicates,
        lengths: lengths.to_vec(),
        roughness_grid: grid.to_vec(),
        master_seed: 11,
        ..ExperimentConfig::full_size(experiment)
    }
}

#[test]
fn acf_fit_agrees_with_theory_at_high_roughness() {
    let r = 1e-1;
    let report = run_acf_fit(&config(Experiment::AcfFit, 200, &[2000], &[r])).unwrap();
    assert!(report.failures.is_empty());
    let cell = &report.cells[0];
    let theory = cell.mean_curve(AcfCurve::Theory);
    for curve in [AcfCurve::Sample, AcfCurve::GaussianFit] {
        let mean = cell.mean_curve(curve);
        for k in (0..mean.len()).take_while(|&k| k as f64 * r.sqrt() <= 2.0) {
            assert!((mean[k] - theory[k]).abs() < 0.05, "{curve:?} lag {k}");
        }
    }
}

#[test]
fn sample_acf_keeps_long_range_bias_at_low_roughness() {
    let r = 1e-4;
    let report = run_acf_fit(&config(Experiment::AcfFit, 100, &[2000], &[r])).unwrap();
    let cell = &report.cells[0];
    let (fit, sample) = (cell.mean_curve(AcfCurve::GaussianFit), cell.mean_curve(AcfCurve::Sample));
    let far: Vec<usize> = (0..=cell.max_lag()).filter(|&k| k as f64 * r.sqrt() > 4.0).collect();
    assert!(!far.is_empty());
    let mean_over = |c: &[f64]| far.iter().map(|&k| c[k].abs()).sum::<f64>() / far.len() as f64;
    assert!(mean_over(&fit) < 1e-3, "{}", mean_over(&fit));
    assert!(mean_over(&sample) > 0.01, "{}", mean_over(&sample));
}

#[test]
fn single_replicate_acf_table() {
    let report = run_acf_fit(&config(Experiment::AcfFit, 1, &[64], &[0.5])).unwrap();
    let t = report.long_table();
    let lags = report.cells[0].max_lag() + 1;
    assert_eq!(t.len(), 3 * lags);
    assert_eq!(t.header(), ["roughness", "length", "method", "replicate", "lag", "value"]);
    assert_eq!(AcfFitReport::mean_table(&report.cells[0]).len(), lags);
}

#[test]
fn ess_sweep_bias_and_band() {
    let report =
        run_ess_sweep(&config(Experiment::EssSweep, 300, &[500, 2000], &[1e-4, 1e-2])).unwrap();
    assert!(report.failures.is_empty());
    let d = report.cell(1e-2, 2000, "laplace-derivative").unwrap();
    assert!((d.reference - 0.056_418_958_354_775_63).abs() < 1e-15);
    assert!(d.bias().abs() < 0.1 * d.reference, "{d:?}");
    assert!(d.lower <= d.mean && d.mean <= d.upper);
    assert_eq!(d.count, 300);

    let bias = |n, q| report.cell(1e-4, n, q).unwrap().bias().abs();
    assert!(bias(2000, "laplace-derivative") < bias(2000, "quenouille-welch"));
    for q in ["laplace-derivative", "quenouille-fft", "quenouille-welch"] {
        assert!(bias(2000, q) < bias(500, q), "{q}: {} vs {}", bias(2000, q), bias(500, q));
    }
    let rough = report.cell(1e-2, 2000, "roughness").unwrap();
    assert_eq!(rough.reference, 1e-2);
    assert!((rough.mean / 1e-2 - 1.0).abs() < 0.05);
}

#[test]
fn pp_calibration_positions_and_ranges() {
    let report =
        run_pp_calibration(&config(Experiment::PpCalibration, 400, &[500], &[1e-2])).unwrap();
    assert_eq!(report.cells.len(), Estimator::ALL.len());
    for cell in &report.cells {
        let r = cell.p_values.len();
        assert_eq!(r, 400);
        assert!(cell.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
        let e = cell.empirical();
        for (i, v) in e.iter().enumerate() {
            assert_eq!(*v, (i as f64 + 0.5) / r as f64);
        }
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(cell.p_values.windows(2).all(|w| w[0] <= w[1]));
    }
    let d = report.cell(1e-2, 500, Estimator::Derivative).unwrap();
    assert!(d.ks() < 0.08, "{}", d.ks());
}

fn csv_of(config: &ExperimentConfig) -> Vec<(String, String)> {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig { output_dir: dir.path().to_owned(), ..config.clone() };
    let mut files: Vec<(String, String)> = run_experiment(&config)
        .unwrap()
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn serial_and_parallel_runs_write_identical_tables() {
    for (e, reps) in
        [(Experiment::AcfFit, 6), (Experiment::EssSweep, 8), (Experiment::PpCalibration, 8)]
    {
        let c = config(e, reps, &[200, 300], &[1e-2, 1e-1]);
        let parallel = csv_of(&ExperimentConfig { parallel: true, ..c.clone() });
        let serial = csv_of(&ExperimentConfig { parallel: false, ..c });
        assert_eq!(parallel, serial, "{e:?}");
    }
}

#[test]
fn written_tables_read_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let c = ExperimentConfig {
        output_dir: dir.path().to_owned(),
        emit_svg: true,
        ..config(Experiment::EssSweep, 20, &[256], &[3e-3, 3e-2])
    };
    let report = run_ess_sweep(&c).unwrap();
    let paths = report.artifacts().write(dir.path(), true).unwrap();
    assert!(paths.iter().any(|p| p.extension().unwrap() == "svg"));
    let back = Table::read_csv(&dir.path().join("ess_sweep.csv")).unwrap();
    let table = report.table();
    assert_eq!(back.len(), table.len());
    for col in ["roughness", "mean", "p2.5", "p97.5", "reference"] {
        let (a, b) = (table.numeric_column(col).unwrap(), back.numeric_column(col).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * x.abs(), "{col}: {x} vs {y}");
        }
    }
}

#[test]
fn short_series_show_no_large_slowdown() {
    let c =
        ExperimentConfig { lengths: vec![100], ..ExperimentConfig::full_size(Experiment::Bench) };
    let results = bench::run_bench(&c).unwrap();
    assert!(bench::speedup(&results, 100, "fft").unwrap() >= 0.5);
}

#[test]
fn bench_length_cap_is_a_resource_error() {
    let c = ExperimentConfig {
        lengths: vec![1000],
        max_length: 999,
        ..ExperimentConfig::full_size(Experiment::Bench)
    };
    let err = bench::run_bench(&c).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
