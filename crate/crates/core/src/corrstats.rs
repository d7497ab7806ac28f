//! Correlation coefficients and their ESS-corrected significance.
//!
//! Under the null hypothesis of no correlation, `sqrt(ν - 3) · atanh(r)` is
//! approximately standard normal, where `ν` is the effective sample size of
//! the pair rather than its length.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ess::{self, EssEstimate};
use crate::numeric::{normal_quantile, normal_sf};
use crate::series::{self, TimeSeries};
use crate::spectral::{self, WelchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    Pearson,
    Spearman,
}

impl CoefficientKind {
    pub fn tag(self) -> &'static str {
        match self {
            CoefficientKind::Pearson => "pearson",
            CoefficientKind::Spearman => "spearman",
        }
    }
}

/// Which ESS estimator a test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Variance of temporal derivatives ([`ess::ess_laplace`]).
    Derivative,
    /// Quenouille sum over FFT sample ACFs.
    Fft,
    /// Quenouille sum over Welch sample ACFs (256-sample segments, 128 overlap).
    Welch,
    /// Zero-crossing counts ([`ess::ess_rice`]).
    Rice,
}

impl Estimator {
    pub const ALL: [Estimator; 4] =
        [Estimator::Derivative, Estimator::Fft, Estimator::Welch, Estimator::Rice];

    pub fn tag(self) -> &'static str {
        match self {
            Estimator::Derivative => "derivative",
            Estimator::Fft => "fft",
            Estimator::Welch => "welch",
            Estimator::Rice => "rice",
        }
    }

    pub fn estimate(self, x: &TimeSeries, y: &TimeSeries) -> Result<EssEstimate> {
        match self {
            Estimator::Derivative => ess::ess_laplace(x, y),
            Estimator::Rice => ess::ess_rice(x, y),
            Estimator::Fft | Estimator::Welch => {
                if x.len() != y.len() {
                    return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
                }
                let acf = |ts| match self {
                    Estimator::Fft => spectral::acf_fft(ts),
                    _ => spectral::acf_welch(ts, WelchConfig::default()),
                };
                ess::ess_quenouille(&acf(x)?, &acf(y)?, x.len())
            }
        }
    }
}

/// Result of an ESS-corrected correlation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTest {
    pub r: f64,
    pub coefficient: CoefficientKind,
    pub ess: EssEstimate,
    /// Fisher statistic `sqrt(ν - 3) · atanh(r)`; infinite when `|r| = 1`.
    pub z: f64,
    pub p_two_sided: f64,
    /// Correlation magnitude needed for significance at `alpha`.
    pub quantile: f64,
    pub alpha: f64,
    /// `|r| = 1`: p is exactly zero and z is not finite.
    pub degenerate: bool,
}

impl CorrelationTest {
    pub fn p_one_sided(&self) -> f64 {
        0.5 * self.p_two_sided
    }

    pub fn is_significant(&self) -> bool {
        self.p_two_sided < self.alpha
    }
}

fn require_pair(x: &TimeSeries, y: &TimeSeries) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::degenerate(format!(
            "correlation needs at least 3 samples, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Pearson product-moment correlation.
pub fn pearson(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    require_pair(x, y)?;
    let (mx, my) = (x.mean(), y.mean());
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.values().iter().zip(y.values()) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::degenerate("correlation with a constant series"));
    }
    // sqrt(a * a) == a exactly, so x against itself gives exactly 1
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation (Pearson on average-tie ranks).
pub fn spearman(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    require_pair(x, y)?;
    pearson(&series::rank_transform(x)?, &series::rank_transform(y)?)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Two-sided Fisher test of `r` against zero with effective sample size `nu`.
pub fn fisher_test(r: f64, nu: &EssEstimate, alpha: f64) -> Result<CorrelationTest> {
    fisher_test_with(r, CoefficientKind::Pearson, nu, alpha)
}

fn fisher_test_with(
    r: f64,
    coefficient: CoefficientKind,
    nu: &EssEstimate,
    alpha: f64,
) -> Result<CorrelationTest> {
    check_alpha(alpha)?;
    if !(r.abs() <= 1.0) {
        return Err(Error::parameter(format!("correlation must lie in [-1, 1], got {r}")));
    }
    if !(nu.nu > 3.0) {
        return Err(Error::parameter(format!("Fisher test needs ESS > 3, got {}", nu.nu)));
    }
    let quantile = significance_quantile(nu, alpha)?;
    let degenerate = r.abs() == 1.0;
    let (z, p_two_sided) = if degenerate {
        (r.signum() * f64::INFINITY, 0.0)
    } else {
        let z = (nu.nu - 3.0).sqrt() * r.atanh();
        (z, (2.0 * normal_sf(z.abs())).min(1.0))
    };
    Ok(CorrelationTest { r, coefficient, ess: *nu, z, p_two_sided, quantile, alpha, degenerate })
}

/// Smallest `|r|` significant at level `alpha`: `tanh(z_{1-α/2} / sqrt(ν))`.
///
/// Note the `sqrt(ν)`, whereas [`fisher_test`] uses `sqrt(ν - 3)`; the two
/// agree to within `1e-3` in p for `ν ≥ 500`. See
/// [`significance_quantile_adjusted`] for the form consistent with the test.
pub fn significance_quantile(nu: &EssEstimate, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(nu.nu > 0.0) {
        return Err(Error::parameter(format!("ESS must be positive, got {}", nu.nu)));
    }
    Ok((normal_quantile(1.0 - alpha / 2.0)? / nu.nu.sqrt()).tanh())
}

/// `tanh(z_{1-α/2} / sqrt(ν - 3))`, the exact inverse of [`fisher_test`].
pub fn significance_quantile_adjusted(nu: &EssEstimate, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(nu.nu > 3.0) {
        return Err(Error::parameter(format!("ESS must exceed 3, got {}", nu.nu)));
    }
    Ok((normal_quantile(1.0 - alpha / 2.0)? / (nu.nu - 3.0).sqrt()).tanh())
}

/// Full test of two series: coefficient, ESS, Fisher statistic and quantile.
///
/// Pearson works on the standardized series. Spearman computes both the
/// coefficient and the ESS on the standardized ranks, since the temporal
/// dependence of the rank series is what discounts the sample size.
pub fn corr_test(
    x: &TimeSeries,
    y: &TimeSeries,
    coefficient: CoefficientKind,
    estimator: Estimator,
    alpha: f64,
) -> Result<CorrelationTest> {
    check_alpha(alpha)?;
    require_pair(x, y)?;
    let (xs, ys) = match coefficient {
        CoefficientKind::Pearson => (series::standardize(x)?, series::standardize(y)?),
        CoefficientKind::Spearman => (
            series::standardize(&series::rank_transform(x)?)?,
            series::standardize(&series::rank_transform(y)?)?,
        ),
    };
    let r = pearson(&xs, &ys)?;
    let nu = estimator.estimate(&xs, &ys)?;
    fisher_test_with(r, coefficient, &nu, alpha)
}
