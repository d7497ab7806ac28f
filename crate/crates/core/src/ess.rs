//! Effective sample size estimators for the correlation of two series.
//!
//! | estimator | input | cost |
//! |---|---|---|
//! | [`ess_quenouille`] | two ACFs | sum over lags |
//! | [`ess_laplace`] | two series | two variance passes |
//! | [`ess_rice`] | two series | zero-crossing counts |
//! | [`ess_asymptotic_integral`] | two roughness values | quadrature |
//! | [`ess_wavelet`] | Morlet frequencies and cycle count | closed form |
//!
//! All of them clamp the result to `[NU_MIN, n]` and keep the raw value.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::integrate_adaptive;
use crate::series::{self, Roughness, RoughnessSource, TimeSeries, MIN_ESTIMATION_LEN};
use crate::spectral::{AcfEstimate, AcfMethod};

/// Lower clamp for ν. The Fisher statistic needs `ν > 3`.
pub const NU_MIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EssMethod {
    QuenouilleFft,
    QuenouilleWelch,
    LaplaceDerivative,
    Rice,
    Wavelet,
    Analytic,
}

impl EssMethod {
    pub fn tag(self) -> &'static str {
        match self {
            EssMethod::QuenouilleFft => "quenouille-fft",
            EssMethod::QuenouilleWelch => "quenouille-welch",
            EssMethod::LaplaceDerivative => "laplace-derivative",
            EssMethod::Rice => "rice",
            EssMethod::Wavelet => "wavelet",
            EssMethod::Analytic => "analytic",
        }
    }
}

impl std::fmt::Display for EssMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// An effective sample size, clamped to `[NU_MIN, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EssEstimate {
    pub nu: f64,
    pub nu_raw: f64,
    pub method: EssMethod,
    pub clamped: bool,
    pub n: usize,
}

impl EssEstimate {
    /// Clamps a raw estimate into `[NU_MIN, n]`.
    pub fn from_raw(nu_raw: f64, n: usize, method: EssMethod) -> Result<Self> {
        if !(nu_raw.is_finite() && nu_raw > 0.0) {
            return Err(Error::parameter(format!("raw ESS must be positive, got {nu_raw}")));
        }
        let nu = nu_raw.clamp(NU_MIN, (n as f64).max(NU_MIN));
        Ok(Self { nu, nu_raw, method, clamped: nu != nu_raw, n })
    }

    /// ESS factor `ν / n`.
    pub fn factor(&self) -> f64 {
        self.nu / self.n as f64
    }
}

fn require_n(n: usize) -> Result<()> {
    if n < MIN_ESTIMATION_LEN {
        return Err(Error::degenerate(format!(
            "ESS needs at least {MIN_ESTIMATION_LEN} samples, got {n}"
        )));
    }
    Ok(())
}

fn require_pair(x: &TimeSeries, y: &TimeSeries) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.dt() != y.dt() {
        return Err(Error::parameter(format!(
            "sampling intervals differ: {} vs {}",
            x.dt(),
            y.dt()
        )));
    }
    require_n(x.len())?;
    Ok(x.len())
}

/// Finite-sum ESS from two autocorrelation sequences:
///
/// ```text
/// ν = n / (ρ₀γ₀ + 2 Σ_{k=1}^{L-1} w_k ρ_k γ_k)
/// ```
///
/// The `(n - k) / n` weight is applied only when both ACFs are parametric;
/// sample ACFs from [`crate::spectral`] are biased estimates that already
/// contain it. `L` is the shortest of the two ACFs and `n`.
pub fn ess_quenouille(acf_x: &AcfEstimate, acf_y: &AcfEstimate, n: usize) -> Result<EssEstimate> {
    require_n(n)?;
    for acf in [acf_x, acf_y] {
        let r0 = acf.rho()[0];
        if (r0 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidAcf(format!("lag-0 value is {r0}, expected 1")));
        }
    }
    let taper = !acf_x.method().is_sample_estimate() && !acf_y.method().is_sample_estimate();
    let lags = acf_x.len().min(acf_y.len()).min(n);
    let nf = n as f64;
    let tail: f64 = (1..lags)
        .map(|k| {
            let w = if taper { (nf - k as f64) / nf } else { 1.0 };
            w * acf_x.rho()[k] * acf_y.rho()[k]
        })
        .sum();
    let denominator = acf_x.rho()[0] * acf_y.rho()[0] + 2.0 * tail;
    if !(denominator > 0.0) {
        return Err(Error::NonPositiveDenominator(denominator));
    }
    let method = match (acf_x.method(), acf_y.method()) {
        (AcfMethod::Welch, _) | (_, AcfMethod::Welch) => EssMethod::QuenouilleWelch,
        (AcfMethod::Fft, _) | (_, AcfMethod::Fft) => EssMethod::QuenouilleFft,
        _ => EssMethod::Analytic,
    };
    EssEstimate::from_raw(nf / denominator, n, method)
}

/// Where the integrand `exp(-s τ² / 2)` falls below this, it is dropped.
const INTEGRAND_FLOOR: f64 = 1e-16;
const QUADRATURE_REL_TOL: f64 = 1e-12;

/// `∫ exp(-(r_x + r_y) τ² / 2) dτ` over the real line by adaptive quadrature.
pub fn gaussian_product_integral(rho_xx: f64, rho_yy: f64) -> Result<f64> {
    if !(rho_xx > 0.0 && rho_yy > 0.0 && rho_xx.is_finite() && rho_yy.is_finite()) {
        return Err(Error::parameter(format!(
            "roughness values must be positive, got {rho_xx} and {rho_yy}"
        )));
    }
    let s = rho_xx + rho_yy;
    let cutoff = (-2.0 * INTEGRAND_FLOOR.ln() / s).sqrt();
    let (half, _) =
        integrate_adaptive(|t| (-0.5 * s * t * t).exp(), 0.0, cutoff, QUADRATURE_REL_TOL, 10_000)?;
    Ok(2.0 * half)
}

/// Asymptotic ESS `n / ∫ ρ(τ)γ(τ) dτ` for two Gaussian autocorrelations,
/// with the integral evaluated numerically. This is the independent check
/// on the closed form used by [`ess_laplace`].
pub fn ess_asymptotic_integral(rho_xx: f64, rho_yy: f64, n: usize) -> Result<EssEstimate> {
    require_n(n)?;
    let q = gaussian_product_integral(rho_xx, rho_yy)?;
    EssEstimate::from_raw(n as f64 / q, n, EssMethod::Analytic)
}

/// Closed-form ESS `n · sqrt((r_x + r_y) / 2π)`, roughness in per-sample² units.
pub fn laplace_ess_raw(rho_xx: f64, rho_yy: f64, n: usize) -> f64 {
    n as f64 * ((rho_xx + rho_yy) / (2.0 * PI)).sqrt()
}

/// ESS from two roughness values given in per-sample² units.
pub fn ess_from_roughness(rx: Roughness, ry: Roughness, n: usize) -> Result<EssEstimate> {
    require_n(n)?;
    if rx.is_degenerate() && ry.is_degenerate() {
        return Err(Error::degenerate("both roughness values are zero"));
    }
    let method =
        if rx.source == RoughnessSource::Prescribed && ry.source == RoughnessSource::Prescribed {
            EssMethod::Analytic
        } else {
            EssMethod::LaplaceDerivative
        };
    EssEstimate::from_raw(laplace_ess_raw(rx.value, ry.value, n), n, method)
}

/// ESS from the variance of the temporal derivatives of both series.
///
/// Roughness is estimated as `var(diff(x)) / var(x)` by
/// [`series::roughness`]. With a sampling interval `dt` the roughness is per
/// time², and `n · dt` converts the result back to a dimensionless count.
pub fn ess_laplace(x: &TimeSeries, y: &TimeSeries) -> Result<EssEstimate> {
    let n = require_pair(x, y)?;
    let rx = series::roughness(x)?;
    let ry = series::roughness(y)?;
    let dt2 = x.dt() * x.dt();
    let raw = laplace_ess_raw(rx.value * dt2, ry.value * dt2, n);
    EssEstimate::from_raw(raw, n, EssMethod::LaplaceDerivative)
}

/// Per-sample² roughness implied by `crossings` zero crossings in `n` samples
/// (inverse of N₀ = n·sqrt(r)/π).
pub fn rice_roughness(crossings: usize, n: usize) -> f64 {
    let per_sample = PI * crossings as f64 / n as f64;
    per_sample * per_sample
}

/// ESS from zero-crossing counts.
///
/// Each count is turned into an equivalent roughness and the pair is
/// combined with the same closed form as [`ess_laplace`], which keeps the
/// heterogeneous-roughness reduction intact.
pub fn ess_rice(x: &TimeSeries, y: &TimeSeries) -> Result<EssEstimate> {
    let n = require_pair(x, y)?;
    let mut roughness = [0.0; 2];
    for (slot, ts) in roughness.iter_mut().zip([x, y]) {
        let crossings = series::zero_crossings(ts)?;
        if crossings == 0 {
            return Err(Error::degenerate("series never crosses its mean"));
        }
        *slot = rice_roughness(crossings, n);
    }
    EssEstimate::from_raw(laplace_ess_raw(roughness[0], roughness[1], n), n, EssMethod::Rice)
}

/// Roughness `π² f² / N_c²` of Morlet wavelet power at normalized
/// frequency `f` (cycles per sample) with `N_c` cycles.
pub fn wavelet_roughness(frequency: f64, n_cycles: f64) -> f64 {
    (PI * frequency / n_cycles).powi(2)
}

/// ESS for correlating two Morlet wavelet power series at normalized
/// frequencies `f1`, `f2` (cycles per sample) computed with `n_cycles` cycles:
/// `ν = (n / N_c) · sqrt(π/2) · sqrt(f1² + f2²)`.
///
/// Frequencies in Hz must be divided by the sampling rate first.
pub fn ess_wavelet(n: usize, f1: f64, f2: f64, n_cycles: f64) -> Result<EssEstimate> {
    require_n(n)?;
    for f in [f1, f2] {
        if !(f > 0.0 && f < 0.5) {
            return Err(Error::parameter(format!(
                "normalized frequency must lie in (0, 0.5), got {f}"
            )));
        }
    }
    if !(n_cycles > 0.0 && n_cycles.is_finite()) {
        return Err(Error::parameter(format!("cycle count must be positive, got {n_cycles}")));
    }
    let raw = n as f64 / n_cycles * (PI / 2.0).sqrt() * f1.hypot(f2);
    EssEstimate::from_raw(raw, n, EssMethod::Wavelet)
}
