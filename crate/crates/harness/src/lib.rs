//! Command-line front end, data tables and Monte-Carlo validation
//! experiments for [`esscorr`].
//!
//! The experiments draw GPGA sample paths and check the estimators against
//! known population values: squared ACF fits (`acf-fit`), ESS factor bias
//! across roughness (`ess-sweep`), calibration of null p-values
//! (`pp-calibration`) and estimator timing (`bench`). Each writes CSV tables
//! and, optionally, SVG line plots.
//!
//! ```no_run
//! use esscorr_harness::{run_experiment, Experiment, ExperimentConfig};
//!
//! let config = ExperimentConfig {
//!     replicates: 200,
//!     output_dir: "out/pp".into(),
//!     emit_svg: true,
//!     ..ExperimentConfig::full_size(Experiment::PpCalibration)
//! };
//! for path in run_experiment(&config)? {
//!     println!("{}", path.display());
//! }
//! # Ok::<(), esscorr_harness::HarnessError>(())
//! ```

pub mod bench;
mod config;
mod error;
pub mod experiments;
pub mod input;
pub mod report;
pub mod svg;
pub mod table;

pub use bench::{run_bench, BenchResult};
pub use config::{Experiment, ExperimentConfig, DEFAULT_MAX_LENGTH};
pub use error::{HarnessError, Result};
pub use experiments::{run_acf_fit, run_ess_sweep, run_experiment, run_pp_calibration};
pub use input::{detrend_linear, read_series_csv, Column};
pub use svg::{emit_svg_lineplot, PlotSpec, Scale};
pub use table::{Cell, Table};
