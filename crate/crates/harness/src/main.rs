use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esscorr::corrstats::{self, CoefficientKind, Estimator};
use esscorr::gpga::{self, GpgaSpec};
use esscorr::TimeSeries;
use esscorr_harness::report::{CorrReport, EssReport};
use esscorr_harness::{
    bench, input, run_experiment, Column, Experiment, ExperimentConfig, HarnessError, Result,
};

/// Correlation tests for autocorrelated time series, with the effective
/// sample size estimated from the variance of temporal derivatives.
#[derive(Parser)]
#[command(name = "esscorr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Gaussian process with Gaussian autocorrelation to CSV.
    Gen {
        #[arg(long)]
        roughness: f64,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Effective sample size of one series (paired with itself) or a pair.
    Ess {
        x: PathBuf,
        y: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Method::Derivative)]
        method: Method,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Significance test of the correlation between two series.
    CorrTest {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Method::Derivative)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Coef::Pearson)]
        coef: Coef,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte-Carlo validation experiment and write its tables.
    Validate {
        #[arg(value_enum)]
        experiment: Experiment,
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
        /// Run replicates on one thread (results are identical).
        #[arg(long)]
        serial: bool,
    },
    /// Time the ESS estimators on pre-generated paths.
    Bench {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        json: bool,
        /// Directory for bench.csv and bench.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Sampling interval of the input series.
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, value_enum, default_value_t = Detrend::None)]
    detrend: Detrend,
    /// Column to read: zero-based index or header name.
    #[arg(long)]
    column: Option<Column>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    length: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    roughness: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    loops: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
}

impl GridArgs {
    fn config(&self, experiment: Experiment) -> ExperimentConfig {
        let mut c = ExperimentConfig::full_size(experiment);
        c.master_seed = self.seed;
        if let Some(v) = self.replicates {
            c.replicates = v;
        }
        if let Some(v) = &self.length {
            c.lengths = v.clone();
        }
        if let Some(v) = &self.roughness {
            c.roughness_grid = v.clone();
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.loops {
            c.loops = v;
        }
        if let Some(v) = self.runs {
            c.runs = v;
        }
        c
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Derivative,
    Fft,
    Welch,
    Rice,
}

impl From<Method> for Estimator {
    fn from(m: Method) -> Self {
        match m {
            Method::Derivative => Estimator::Derivative,
            Method::Fft => Estimator::Fft,
            Method::Welch => Estimator::Welch,
            Method::Rice => Estimator::Rice,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Coef {
    Pearson,
    Spearman,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Detrend {
    None,
    Linear,
}

fn load(path: &Path, args: &InputArgs) -> Result<TimeSeries> {
    let column = args.column.clone().unwrap_or_default();
    let ts = input::read_series_csv(path, &column)?.with_dt(args.dt)?;
    let ts = ts.with_label(path.display().to_string());
    match args.detrend {
        Detrend::None => Ok(ts),
        Detrend::Linear => input::detrend_linear(&ts),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| HarnessError::Io { path: path.into(), source: e }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| HarnessError::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { roughness, length, seed, out } => {
            let ts = gpga::sample(&GpgaSpec::new(roughness, length, seed)?)?;
            emit(out.as_deref(), &input::series_csv_string(&ts))
        }
        Command::Ess { x, y, input, method, json, out } => {
            let xs = load(&x, &input)?;
            let ys = match &y {
                Some(p) => load(p, &input)?,
                None => xs.clone(),
            };
            let nu = Estimator::from(method).estimate(&xs, &ys)?;
            let report = EssReport::from(&nu);
            let text = if json { report.to_json() + "\n" } else { report.to_text() };
            emit(out.as_deref(), &text)
        }
        Command::CorrTest { x, y, input, method, coef, alpha, json, out } => {
            let (xs, ys) = (load(&x, &input)?, load(&y, &input)?);
            let coef = match coef {
                Coef::Pearson => CoefficientKind::Pearson,
                Coef::Spearman => CoefficientKind::Spearman,
            };
            let test = corrstats::corr_test(&xs, &ys, coef, method.into(), alpha)?;
            let report = CorrReport::from(&test);
            let text = if json { report.to_json() + "\n" } else { report.to_text() };
            emit(out.as_deref(), &text)
        }
        Command::Validate { experiment, grid, out, svg, serial } => {
            let config = ExperimentConfig {
                output_dir: out,
                emit_svg: svg,
                parallel: !serial,
                ..grid.config(experiment)
            };
            for path in run_experiment(&config)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Bench { grid, json, out } => {
            let config = grid.config(Experiment::Bench);
            let results = bench::run_bench(&config)?;
            if let Some(dir) = &out {
                for path in bench::artifacts(&results).write(dir, true)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            let text = if json {
                serde_json::to_string(&results).expect("bench results serialize") + "\n"
            } else {
                let mut s = format!(
                    "{:>10}  {:<10}  {:>12}  {:>12}  {:>8}\n",
                    "n", "method", "mean [s]", "std [s]", "speedup"
                );
                for b in &results {
                    let speedup = bench::speedup(&results, b.n, b.method)?;
                    s += &format!(
                        "{:>10}  {:<10}  {:>12.4e}  {:>12.4e}  {:>8.2}\n",
                        b.n, b.method, b.mean_seconds, b.std_seconds, speedup
                    );
                }
                s
            };
            emit(None, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("esscorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
