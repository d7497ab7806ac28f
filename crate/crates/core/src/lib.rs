//! Effective sample size (ESS) estimation for pairs of autocorrelated time
//! series, and ESS-corrected significance tests for their correlation.
//!
//! The central estimator models each series' autocorrelation as a Gaussian
//! `exp(-r τ² / 2)` whose single parameter, the roughness `r`, is the
//! variance of the temporal derivative of the standardized series. The ESS
//! of a pair then has the closed form
//!
//! ```text
//! ν = n · sqrt((r_x + r_y) / (2π))
//! ```
//!
//! which costs two passes over the data instead of an FFT. Classical
//! estimators that sum products of sample autocorrelations are provided
//! alongside it for comparison.
//!
//! ```
//! use esscorr::{gpga::{self, GpgaSpec}, ess, corrstats};
//!
//! let x = gpga::sample(&GpgaSpec::new(1e-2, 2000, 1)?)?;
//! let y = gpga::sample(&GpgaSpec::new(1e-2, 2000, 2)?)?;
//! let nu = ess::ess_laplace(&x, &y)?;
//! assert!((nu.factor() - gpga::theoretical_ess_factor(1e-2)?).abs() < 0.02);
//!
//! let r = corrstats::pearson(&x, &y)?;
//! let test = corrstats::fisher_test(r, &nu, 0.05)?;
//! assert!((0.0..=1.0).contains(&test.p_two_sided));
//! # Ok::<(), esscorr::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corrstats;
mod error;
pub mod ess;
pub mod gpga;
pub mod numeric;
pub mod series;
pub mod spectral;

pub use crate::corrstats::{CoefficientKind, CorrelationTest, Estimator};
pub use crate::error::{Error, Result};
pub use crate::ess::{EssEstimate, EssMethod};
pub use crate::series::{Roughness, RoughnessSource, TimeSeries};
pub use crate::spectral::{AcfEstimate, AcfMethod};
