//! Monte-Carlo validation experiments on GPGA sample paths.
//!
//! Every replicate draws its paths from a seed derived from the master seed,
//! the grid cell and the replicate index, so results are identical whether
//! replicates run serially or on the rayon pool.

use std::fs;
use std::path::{Path, PathBuf};

use esscorr::corrstats::{self, Estimator};
use esscorr::gpga::{self, derive_seed, GpgaSpec};
use esscorr::numeric::{ks_uniform_statistic, mean, percentile};
use esscorr::{series, spectral, TimeSeries};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::svg::{self, PlotSpec, Scale};
use crate::table::Table;

pub(crate) fn map_replicates<T, F>(parallel: bool, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..count).into_par_iter().map(f).collect()
    } else {
        (0..count).map(f).collect()
    }
}

fn cell_seed(master: u64, roughness_index: usize, length_index: usize) -> u64 {
    derive_seed(derive_seed(master, roughness_index as u64), length_index as u64)
}

/// Two independent standardized paths for replicate `i` of a cell.
fn pair(
    roughness: f64,
    length: usize,
    cell: u64,
    i: usize,
) -> esscorr::Result<(TimeSeries, TimeSeries)> {
    let draw = |k: u64| {
        let spec = GpgaSpec::new(roughness, length, derive_seed(cell, 2 * i as u64 + k))?;
        series::standardize(&gpga::sample(&spec)?)
    };
    Ok((draw(0)?, draw(1)?))
}

fn cells(config: &ExperimentConfig) -> impl Iterator<Item = (usize, f64, usize, usize)> + '_ {
    config.roughness_grid.iter().enumerate().flat_map(move |(ri, &r)| {
        config.lengths.iter().enumerate().map(move |(li, &n)| (ri, r, li, n))
    })
}

/// A replicate that could not be estimated. Recorded, not fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub roughness: f64,
    pub length: usize,
    pub replicate: usize,
    pub method: String,
    pub error: String,
}

fn failures_table(failures: &[Failure]) -> Table {
    let mut t = Table::new(["roughness", "length", "replicate", "method", "error"]);
    for f in failures {
        t.push(vec![
            f.roughness.into(),
            f.length.into(),
            f.replicate.into(),
            f.method.as_str().into(),
            f.error.as_str().into(),
        ]);
    }
    t
}

pub struct Plot {
    pub name: String,
    pub table: Table,
    pub x: String,
    pub ys: Vec<String>,
    pub spec: PlotSpec,
}

/// Named tables and plots produced by one experiment.
#[derive(Default)]
pub struct Artifacts {
    pub tables: Vec<(String, Table)>,
    pub plots: Vec<Plot>,
}

impl Artifacts {
    /// Writes `<name>.csv` for each table and, if asked, `<name>.svg` for each plot.
    pub fn write(&self, dir: &Path, emit_svg: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let mut written = Vec::new();
        for (name, table) in &self.tables {
            let path = dir.join(format!("{name}.csv"));
            table.write_csv(&path)?;
            written.push(path);
        }
        if emit_svg {
            for plot in &self.plots {
                let path = dir.join(format!("{}.svg", plot.name));
                let ys: Vec<&str> = plot.ys.iter().map(String::as_str).collect();
                svg::emit_svg_lineplot(&plot.table, &plot.x, &ys, &plot.spec, &path)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

// ---------------------------------------------------------------- acf-fit

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfCurve {
    /// Squared FFT sample ACF.
    Sample,
    /// Squared Gaussian ACF at the path's estimated roughness.
    GaussianFit,
    /// Squared generator ACF.
    Theory,
}

impl AcfCurve {
    pub fn tag(self) -> &'static str {
        match self {
            AcfCurve::Sample => "sample",
            AcfCurve::GaussianFit => "gaussian-fit",
            AcfCurve::Theory => "theory",
        }
    }
}

/// Squared ACFs of every replicate in one (roughness, length) cell.
#[derive(Debug, Clone)]
pub struct AcfFitCell {
    pub roughness: f64,
    pub length: usize,
    /// Per replicate; `None` where estimation failed.
    pub sample: Vec<Option<Vec<f64>>>,
    pub fit: Vec<Option<Vec<f64>>>,
    pub theory: Vec<f64>,
}

impl AcfFitCell {
    pub fn max_lag(&self) -> usize {
        self.theory.len() - 1
    }

    /// Mean over the successful replicates.
    pub fn mean_curve(&self, curve: AcfCurve) -> Vec<f64> {
        let rows = match curve {
            AcfCurve::Theory => return self.theory.clone(),
            AcfCurve::Sample => &self.sample,
            AcfCurve::GaussianFit => &self.fit,
        };
        let ok: Vec<&Vec<f64>> = rows.iter().flatten().collect();
        (0..self.theory.len())
            .map(|k| ok.iter().map(|c| c[k]).sum::<f64>() / ok.len() as f64)
            .collect()
    }
}

pub struct AcfFitReport {
    pub cells: Vec<AcfFitCell>,
    pub failures: Vec<Failure>,
}

/// Lags covering six correlation lengths, or the whole series if shorter.
pub fn acf_fit_max_lag(roughness: f64, length: usize) -> usize {
    ((6.0 / roughness.sqrt()).ceil() as usize).clamp(1, length - 1)
}

pub fn run_acf_fit(config: &ExperimentConfig) -> Result<AcfFitReport> {
    config.validate()?;
    let mut report = AcfFitReport { cells: Vec::new(), failures: Vec::new() };
    for (ri, r, li, n) in cells(config) {
        let seed = cell_seed(config.master_seed, ri, li);
        let max_lag = acf_fit_max_lag(r, n);
        let outcomes = map_replicates(config.parallel, config.replicates, |i| {
            let spec = GpgaSpec::new(r, n, derive_seed(seed, i as u64))?;
            let x = gpga::sample(&spec)?;
            let rho = spectral::acf_fft(&x)?;
            let sample: Vec<f64> = rho.rho()[..=max_lag].iter().map(|v| v * v).collect();
            let rhat = series::roughness(&x)?.value;
            let fit = (0..=max_lag).map(|k| (-rhat * (k * k) as f64).exp()).collect();
            Ok::<_, esscorr::Error>((sample, fit))
        });
        let mut cell = AcfFitCell {
            roughness: r,
            length: n,
            sample: Vec::with_capacity(config.replicates),
            fit: Vec::with_capacity(config.replicates),
            theory: (0..=max_lag).map(|k| (-r * (k * k) as f64).exp()).collect(),
        };
        for (i, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok((s, f)) => {
                    cell.sample.push(Some(s));
                    cell.fit.push(Some(f));
                }
                Err(e) => {
                    report.failures.push(Failure {
                        roughness: r,
                        length: n,
                        replicate: i,
                        method: "fft".into(),
                        error: e.to_string(),
                    });
                    cell.sample.push(None);
                    cell.fit.push(None);
                }
            }
        }
        report.cells.push(cell);
    }
    Ok(report)
}

impl AcfFitReport {
    /// Long format: one row per (cell, curve, replicate, lag). Theory rows are
    /// replicate-independent and carry replicate 0.
    pub fn long_table(&self) -> Table {
        let mut t = Table::new(["roughness", "length", "method", "replicate", "lag", "value"]);
        for cell in &self.cells {
            for (curve, rows) in
                [(AcfCurve::Sample, &cell.sample), (AcfCurve::GaussianFit, &cell.fit)]
            {
                for (i, values) in rows.iter().enumerate() {
                    for (k, v) in values.iter().flatten().enumerate() {
                        t.push(vec![
                            cell.roughness.into(),
                            cell.length.into(),
                            curve.tag().into(),
                            i.into(),
                            k.into(),
                            (*v).into(),
                        ]);
                    }
                }
            }
            for (k, v) in cell.theory.iter().enumerate() {
                t.push(vec![
                    cell.roughness.into(),
                    cell.length.into(),
                    AcfCurve::Theory.tag().into(),
                    0usize.into(),
                    k.into(),
                    (*v).into(),
                ]);
            }
        }
        t
    }

    /// Mean curves of one cell against lag in correlation lengths.
    pub fn mean_table(cell: &AcfFitCell) -> Table {
        let mut t = Table::new(["lag", "scaled_lag", "sample", "gaussian-fit", "theory"]);
        let (s, f) = (cell.mean_curve(AcfCurve::Sample), cell.mean_curve(AcfCurve::GaussianFit));
        for k in 0..=cell.max_lag() {
            t.push(vec![
                k.into(),
                (k as f64 * cell.roughness.sqrt()).into(),
                s[k].into(),
                f[k].into(),
                cell.theory[k].into(),
            ]);
        }
        t
    }

    pub fn artifacts(&self) -> Artifacts {
        let mut a = Artifacts::default();
        a.tables.push(("acf_fit".into(), self.long_table()));
        a.tables.push(("acf_fit_failures".into(), failures_table(&self.failures)));
        for cell in &self.cells {
            let name = format!("acf_fit_r{:e}_n{}", cell.roughness, cell.length);
            a.plots.push(Plot {
                name,
                table: Self::mean_table(cell),
                x: "scaled_lag".into(),
                ys: vec!["sample".into(), "gaussian-fit".into(), "theory".into()],
                spec: PlotSpec {
                    title: format!("squared ACF, r = {:e}, n = {}", cell.roughness, cell.length),
                    ..Default::default()
                },
            });
        }
        a
    }
}

// ---------------------------------------------------------------- ess-sweep

/// Quantities summarized per sweep cell: three ESS factors and the roughness.
pub const SWEEP_QUANTITIES: [&str; 4] =
    ["laplace-derivative", "quenouille-fft", "quenouille-welch", "roughness"];

const SWEEP_ESTIMATORS: [Estimator; 3] = [Estimator::Derivative, Estimator::Fft, Estimator::Welch];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub roughness: f64,
    pub length: usize,
    pub quantity: &'static str,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    /// `sqrt(r / π)` for ESS factors, `r` for the roughness.
    pub reference: f64,
    pub count: usize,
}

impl SweepCell {
    pub fn bias(&self) -> f64 {
        self.mean - self.reference
    }
}

pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    pub failures: Vec<Failure>,
}

/// Per-replicate ESS factors `ν_raw / n` (unclamped, so the bias is not
/// masked by the lower clamp) and roughness of the first path of each pair.
pub fn run_ess_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let mut report = SweepReport { cells: Vec::new(), failures: Vec::new() };
    for (ri, r, li, n) in cells(config) {
        let seed = cell_seed(config.master_seed, ri, li);
        let outcomes = map_replicates(config.parallel, config.replicates, |i| {
            let (x, y) = pair(r, n, seed, i).map_err(|e| ("gpga", e))?;
            let mut values = [f64::NAN; 4];
            for (slot, est) in values.iter_mut().zip(SWEEP_ESTIMATORS) {
                *slot = est.estimate(&x, &y).map_err(|e| (est.tag(), e))?.nu_raw / n as f64;
            }
            values[3] = series::roughness(&x).map_err(|e| ("roughness", e))?.value;
            Ok::<_, (&str, esscorr::Error)>(values)
        });
        let mut samples: [Vec<f64>; 4] = Default::default();
        for (i, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(v) => samples.iter_mut().zip(v).for_each(|(s, v)| s.push(v)),
                Err((method, e)) => report.failures.push(Failure {
                    roughness: r,
                    length: n,
                    replicate: i,
                    method: method.into(),
                    error: e.to_string(),
                }),
            }
        }
        let factor = gpga::theoretical_ess_factor(r)?;
        for (q, data) in SWEEP_QUANTITIES.into_iter().zip(&samples) {
            report.cells.push(SweepCell {
                roughness: r,
                length: n,
                quantity: q,
                mean: if data.is_empty() { f64::NAN } else { mean(data) },
                lower: percentile(data, 2.5),
                upper: percentile(data, 97.5),
                reference: if q == "roughness" { r } else { factor },
                count: data.len(),
            });
        }
    }
    Ok(report)
}

impl SweepReport {
    pub fn cell(&self, roughness: f64, length: usize, quantity: &str) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.roughness == roughness && c.length == length && c.quantity == quantity)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new([
            "roughness",
            "length",
            "quantity",
            "mean",
            "p2.5",
            "p97.5",
            "reference",
            "count",
        ]);
        for c in &self.cells {
            t.push(vec![
                c.roughness.into(),
                c.length.into(),
                c.quantity.into(),
                c.mean.into(),
                c.lower.into(),
                c.upper.into(),
                c.reference.into(),
                c.count.into(),
            ]);
        }
        t
    }

    /// Mean factors against roughness for one length.
    fn factor_table(&self, length: usize) -> Table {
        let mut header = vec!["roughness".to_string()];
        header.extend(SWEEP_QUANTITIES[..3].iter().map(|s| s.to_string()));
        header.push("theory".into());
        let mut t = Table::new(header);
        let mut grid: Vec<f64> = self.cells.iter().map(|c| c.roughness).collect();
        grid.dedup();
        for r in grid {
            let mut row = vec![r.into()];
            let mut reference = f64::NAN;
            for q in &SWEEP_QUANTITIES[..3] {
                let c = self.cell(r, length, q);
                row.push(c.map_or(f64::NAN, |c| c.mean).into());
                reference = c.map_or(reference, |c| c.reference);
            }
            row.push(reference.into());
            t.push(row);
        }
        t
    }

    pub fn artifacts(&self) -> Artifacts {
        let mut a = Artifacts::default();
        a.tables.push(("ess_sweep".into(), self.table()));
        a.tables.push(("ess_sweep_failures".into(), failures_table(&self.failures)));
        let mut lengths: Vec<usize> = self.cells.iter().map(|c| c.length).collect();
        lengths.sort_unstable();
        lengths.dedup();
        for n in lengths {
            let mut ys: Vec<String> = SWEEP_QUANTITIES[..3].iter().map(|s| s.to_string()).collect();
            ys.push("theory".into());
            a.plots.push(Plot {
                name: format!("ess_sweep_n{n}"),
                table: self.factor_table(n),
                x: "roughness".into(),
                ys,
                spec: PlotSpec {
                    title: format!("ESS factor, n = {n}"),
                    x_scale: Scale::Log,
                    y_scale: Scale::Log,
                },
            });
        }
        a
    }
}

// ---------------------------------------------------------------- pp-calibration

/// Null p-values of one estimator in one (roughness, length) cell.
#[derive(Debug, Clone)]
pub struct PpCell {
    pub roughness: f64,
    pub length: usize,
    pub method: Estimator,
    /// Sorted ascending.
    pub p_values: Vec<f64>,
    pub alpha: f64,
    pub failures: usize,
}

impl PpCell {
    /// Plotting positions `(i - 0.5) / R` for sorted index `i = 1..=R`.
    pub fn empirical(&self) -> Vec<f64> {
        let r = self.p_values.len() as f64;
        (1..=self.p_values.len()).map(|i| (i as f64 - 0.5) / r).collect()
    }

    pub fn ks(&self) -> f64 {
        ks_uniform_statistic(&self.p_values)
    }

    pub fn rejection_rate(&self) -> f64 {
        let rejected = self.p_values.iter().filter(|&&p| p < self.alpha).count();
        rejected as f64 / self.p_values.len() as f64
    }
}

pub struct PpReport {
    pub cells: Vec<PpCell>,
    pub failures: Vec<Failure>,
}

pub fn run_pp_calibration(config: &ExperimentConfig) -> Result<PpReport> {
    config.validate()?;
    let mut report = PpReport { cells: Vec::new(), failures: Vec::new() };
    for (ri, r, li, n) in cells(config) {
        let seed = cell_seed(config.master_seed, ri, li);
        let outcomes = map_replicates(config.parallel, config.replicates, |i| {
            let (x, y) = match pair(r, n, seed, i) {
                Ok(p) => p,
                Err(e) => return Estimator::ALL.map(|_| Err(e.clone())),
            };
            let rho = corrstats::pearson(&x, &y);
            Estimator::ALL.map(|est| {
                let nu = est.estimate(&x, &y)?;
                Ok::<_, esscorr::Error>(
                    corrstats::fisher_test(rho.clone()?, &nu, config.alpha)?.p_two_sided,
                )
            })
        });
        for (m, est) in Estimator::ALL.into_iter().enumerate() {
            let mut p_values = Vec::with_capacity(config.replicates);
            let mut failed = 0;
            for (i, o) in outcomes.iter().enumerate() {
                match &o[m] {
                    Ok(p) => p_values.push(*p),
                    Err(e) => {
                        failed += 1;
                        report.failures.push(Failure {
                            roughness: r,
                            length: n,
                            replicate: i,
                            method: est.tag().into(),
                            error: e.to_string(),
                        });
                    }
                }
            }
            p_values.sort_by(f64::total_cmp);
            report.cells.push(PpCell {
                roughness: r,
                length: n,
                method: est,
                p_values,
                alpha: config.alpha,
                failures: failed,
            });
        }
    }
    Ok(report)
}

impl PpReport {
    pub fn cell(&self, roughness: f64, length: usize, method: Estimator) -> Option<&PpCell> {
        self.cells
            .iter()
            .find(|c| c.roughness == roughness && c.length == length && c.method == method)
    }

    pub fn pp_table(&self) -> Table {
        let mut t = Table::new(["roughness", "length", "method", "empirical", "estimated"]);
        for c in &self.cells {
            for (e, p) in c.empirical().into_iter().zip(&c.p_values) {
                t.push(vec![
                    c.roughness.into(),
                    c.length.into(),
                    c.method.tag().into(),
                    e.into(),
                    (*p).into(),
                ]);
            }
        }
        t
    }

    pub fn summary_table(&self) -> Table {
        let mut t = Table::new([
            "roughness",
            "length",
            "method",
            "ks",
            "rejection_rate",
            "alpha",
            "replicates",
            "failures",
        ]);
        for c in &self.cells {
            t.push(vec![
                c.roughness.into(),
                c.length.into(),
                c.method.tag().into(),
                c.ks().into(),
                c.rejection_rate().into(),
                c.alpha.into(),
                c.p_values.len().into(),
                c.failures.into(),
            ]);
        }
        t
    }

    pub fn artifacts(&self) -> Artifacts {
        let mut a = Artifacts::default();
        a.tables.push(("pp_calibration".into(), self.pp_table()));
        a.tables.push(("pp_calibration_summary".into(), self.summary_table()));
        a.tables.push(("pp_calibration_failures".into(), failures_table(&self.failures)));
        let mut keys: Vec<(f64, usize)> =
            self.cells.iter().map(|c| (c.roughness, c.length)).collect();
        keys.dedup();
        for (r, n) in keys {
            let group: Vec<&PpCell> =
                self.cells.iter().filter(|c| c.roughness == r && c.length == n).collect();
            // Columns share the empirical axis only when no replicate failed.
            if group.iter().any(|c| c.failures > 0 || c.p_values.is_empty()) {
                continue;
            }
            let mut header = vec!["empirical".to_string()];
            header.extend(group.iter().map(|c| c.method.tag().to_string()));
            let mut t = Table::new(header.clone());
            for (i, e) in group[0].empirical().into_iter().enumerate() {
                let mut row = vec![e.into()];
                row.extend(group.iter().map(|c| c.p_values[i].into()));
                t.push(row);
            }
            a.plots.push(Plot {
                name: format!("pp_r{r:e}_n{n}"),
                table: t,
                x: "empirical".into(),
                ys: header[1..].to_vec(),
                spec: PlotSpec {
                    title: format!("p-p plot, r = {r:e}, n = {n}"),
                    ..Default::default()
                },
            });
        }
        a
    }
}

/// Runs the configured experiment and writes its tables (and plots) into
/// `config.output_dir`. Returns the written paths.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let artifacts = match config.experiment {
        Experiment::AcfFit => run_acf_fit(config)?.artifacts(),
        Experiment::EssSweep => run_ess_sweep(config)?.artifacts(),
        Experiment::PpCalibration => run_pp_calibration(config)?.artifacts(),
        Experiment::Bench => crate::bench::artifacts(&crate::bench::run_bench(config)?),
    };
    artifacts.write(&config.output_dir, config.emit_svg)
}
