//! Sample autocorrelation estimators (FFT periodogram and Welch periodogram)
//! and the parametric Gaussian autocorrelation.
//!
//! Both sample estimators return the *biased* ACF, where lag `k` carries the
//! implicit `(n - k) / n` taper of dividing by `n`. The ESS sums in
//! [`crate::ess`] rely on this and do not re-apply that taper to sample ACFs.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{Roughness, TimeSeries, MIN_ESTIMATION_LEN};

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcfMethod {
    Fft,
    Welch,
    GaussianParametric,
}

impl AcfMethod {
    /// Sample ACFs already carry the `(n - k) / n` taper.
    pub fn is_sample_estimate(self) -> bool {
        !matches!(self, AcfMethod::GaussianParametric)
    }
}

/// Autocorrelation values `ρ_0, ρ_1, ...` with `ρ_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfEstimate {
    rho: Vec<f64>,
    method: AcfMethod,
    n_source: usize,
}

impl AcfEstimate {
    /// Wraps a normalized autocorrelation sequence, checking `ρ_0 = 1` and `|ρ_k| ≤ 1`.
    pub fn new(rho: Vec<f64>, method: AcfMethod, n_source: usize) -> Result<Self> {
        match rho.first() {
            None => return Err(Error::InvalidAcf("empty autocorrelation".into())),
            Some(r0) if (r0 - 1.0).abs() > NORMALIZATION_TOL => {
                return Err(Error::InvalidAcf(format!("lag-0 value is {r0}, expected 1")));
            }
            _ => {}
        }
        if let Some((k, r)) = rho
            .iter()
            .enumerate()
            .find(|(_, r)| !r.is_finite() || r.abs() > 1.0 + NORMALIZATION_TOL)
        {
            return Err(Error::InvalidAcf(format!("|rho[{k}]| = {r} exceeds 1")));
        }
        Ok(Self { rho, method, n_source })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn method(&self) -> AcfMethod {
        self.method
    }

    pub fn n_source(&self) -> usize {
        self.n_source
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

/// Sums `Σ_t x_t x_{t+k}` for `k = 0..x.len()`, by zero-padded FFT.
fn lagged_products(x: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = x.len();
    let nfft = (2 * n - 1).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    planner.plan_fft_forward(nfft).process(&mut buf);
    buf.iter_mut().for_each(|c| *c = Complex::new(c.norm_sqr(), 0.0));
    planner.plan_fft_inverse(nfft).process(&mut buf);
    let scale = 1.0 / nfft as f64;
    buf[..n].iter().map(|c| c.re * scale).collect()
}

/// Biased sample autocovariance (divide by `n`) for lags `0..n`, via FFT.
pub fn autocovariance_fft(ts: &TimeSeries) -> Result<Vec<f64>> {
    ts.require_len(2, "autocovariance")?;
    let m = ts.mean();
    let centered: Vec<f64> = ts.values().iter().map(|v| v - m).collect();
    let n = centered.len() as f64;
    let mut planner = FftPlanner::new();
    Ok(lagged_products(&centered, &mut planner).into_iter().map(|s| s / n).collect())
}

fn normalize(cov: Vec<f64>, method: AcfMethod, n_source: usize) -> Result<AcfEstimate> {
    let c0 = cov[0];
    if !(c0 > 0.0) {
        return Err(Error::degenerate("zero variance, autocorrelation undefined"));
    }
    let rho = cov.into_iter().map(|c| (c / c0).clamp(-1.0, 1.0)).collect();
    AcfEstimate::new(rho, method, n_source)
}

/// Biased sample ACF for lags `0..n` from the periodogram of the
/// mean-centered series (linear correlation: zero-padded to ≥ `2n - 1`).
pub fn acf_fft(ts: &TimeSeries) -> Result<AcfEstimate> {
    ts.require_len(MIN_ESTIMATION_LEN, "FFT autocorrelation")?;
    normalize(autocovariance_fft(ts)?, AcfMethod::Fft, ts.len())
}

/// Which mean is removed from each Welch segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WelchDetrend {
    /// Each segment's own mean (the conventional Welch default). Biases the
    /// ACF down by roughly the variance of a segment mean, which is large
    /// when the correlation length is not small against the segment.
    #[default]
    Segment,
    /// The mean of the whole series.
    Series,
}

/// Segmenting for the Welch estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WelchConfig {
    pub segment: usize,
    pub overlap: usize,
    pub detrend: WelchDetrend,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self { segment: 256, overlap: 128, detrend: WelchDetrend::Segment }
    }
}

impl WelchConfig {
    /// Segment and overlap actually used for a series of length `n`: a
    /// series shorter than one segment becomes a single segment with half
    /// overlap.
    pub fn effective(self, n: usize) -> Self {
        if n < self.segment {
            Self { segment: n, overlap: n / 2, ..self }
        } else {
            self
        }
    }
}

/// Number of full segments of length `segment` that fit in `n` samples.
pub fn welch_segment_count(n: usize, segment: usize, overlap: usize) -> usize {
    if n < segment || overlap >= segment {
        return 0;
    }
    (n - overlap) / (segment - overlap)
}

/// ACF from a Welch power spectral density estimate.
///
/// Each segment is mean-detrended (see [`WelchDetrend`]) and Hann-windowed
/// (periodic Hann). Segments
/// are zero-padded to twice their length before the transform so that the
/// inverse transform of the averaged PSD is a linear, not circular,
/// autocorrelation; lags `0..segment` are returned, normalized at lag 0.
pub fn acf_welch(ts: &TimeSeries, config: WelchConfig) -> Result<AcfEstimate> {
    ts.require_len(MIN_ESTIMATION_LEN, "Welch autocorrelation")?;
    let WelchConfig { segment, overlap, detrend } = config.effective(ts.len());
    if segment < 2 {
        return Err(Error::parameter(format!("Welch segment must be >= 2, got {segment}")));
    }
    if overlap >= segment {
        return Err(Error::parameter(format!(
            "Welch overlap {overlap} must be smaller than segment {segment}"
        )));
    }
    let count = welch_segment_count(ts.len(), segment, overlap);
    let step = segment - overlap;
    let nfft = 2 * segment;
    let window: Vec<f64> = (0..segment)
        .map(|j| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / segment as f64).cos())
        .collect();

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(nfft);
    let mut psd = vec![0.0; nfft];
    let mut buf = vec![Complex::new(0.0, 0.0); nfft];
    let series_mean = ts.mean();
    for s in 0..count {
        let seg = &ts.values()[s * step..s * step + segment];
        let m = match detrend {
            WelchDetrend::Segment => seg.iter().sum::<f64>() / segment as f64,
            WelchDetrend::Series => series_mean,
        };
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = if j < segment {
                Complex::new((seg[j] - m) * window[j], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        forward.process(&mut buf);
        for (p, c) in psd.iter_mut().zip(&buf) {
            *p += c.norm_sqr();
        }
    }
    let mut spectrum: Vec<Complex<f64>> = psd.into_iter().map(|p| Complex::new(p, 0.0)).collect();
    planner.plan_fft_inverse(nfft).process(&mut spectrum);
    let cov = spectrum[..segment].iter().map(|c| c.re).collect();
    normalize(cov, AcfMethod::Welch, ts.len())
}

/// Gaussian autocorrelation `exp(-r k² / 2)` for lags `0..max_lag`.
pub fn acf_gaussian(roughness: Roughness, max_lag: usize) -> Result<AcfEstimate> {
    if roughness.is_degenerate() {
        return Err(Error::degenerate("Gaussian ACF of zero roughness"));
    }
    if max_lag < 1 {
        return Err(Error::parameter("max_lag must be >= 1"));
    }
    let r = roughness.value;
    let rho = (0..max_lag).map(|k| (-0.5 * r * (k * k) as f64).exp()).collect();
    AcfEstimate::new(rho, AcfMethod::GaussianParametric, max_lag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Roughness;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn white_noise(n: usize, seed: u64) -> TimeSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TimeSeries::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
    }

    // O(n·L) direct sum, independent of the FFT path.
    fn direct_biased_acf(x: &[f64], lags: usize) -> Vec<f64> {
        let n = x.len();
        let m = x.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = x.iter().map(|v| v - m).collect();
        let cov: Vec<f64> = (0..lags)
            .map(|k| (0..n - k).map(|t| c[t] * c[t + k]).sum::<f64>() / n as f64)
            .collect();
        cov.iter().map(|v| v / cov[0]).collect()
    }

    #[test]
    fn fft_matches_direct_sum() {
        let x = white_noise(300, 3);
        let acf = acf_fft(&x).unwrap();
        assert_eq!(acf.len(), 300);
        for (a, b) in acf.rho().iter().zip(direct_biased_acf(x.values(), 300)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_white_noise() {
        let acf = acf_fft(&white_noise(10_000, 11)).unwrap();
        assert_eq!(acf.rho()[0], 1.0);
        assert_eq!(acf.method(), AcfMethod::Fft);
        assert_eq!(acf.n_source(), 10_000);
        assert!(acf.rho()[1..=20].iter().all(|r| r.abs() < 0.05));
    }

    #[test]
    fn fft_cosine_taper() {
        let n = 10_000;
        let x: Vec<f64> =
            (0..n).map(|t| (2.0 * std::f64::consts::PI * t as f64 / 100.0).cos()).collect();
        let acf = acf_fft(&TimeSeries::new(x).unwrap()).unwrap();
        assert!((acf.rho()[100] - 0.99).abs() < 0.01);
    }

    #[test]
    fn fft_is_time_reversal_symmetric() {
        let x = white_noise(777, 5);
        let mut rev = x.values().to_vec();
        rev.reverse();
        let a = acf_fft(&x).unwrap();
        let b = acf_fft(&TimeSeries::new(rev).unwrap()).unwrap();
        for (p, q) in a.rho().iter().zip(b.rho()) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn fft_lag0_is_biased_variance() {
        let x = white_noise(1000, 8);
        let cov = autocovariance_fft(&x).unwrap();
        let m = x.mean();
        let direct = x.values().iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 1000.0;
        assert!(((cov[0] - direct) / direct).abs() < 1e-9);
    }

    #[test]
    fn sample_acfs_reject_constant() {
        let c = TimeSeries::new(vec![4.0; 64]).unwrap();
        assert!(matches!(acf_fft(&c), Err(Error::Degenerate(_))));
        assert!(matches!(acf_welch(&c, WelchConfig::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn welch_white_noise() {
        let acf = acf_welch(&white_noise(10_000, 12), WelchConfig::default()).unwrap();
        assert_eq!(acf.len(), 256);
        assert_eq!(acf.rho()[0], 1.0);
        assert!(acf.rho()[1..=20].iter().all(|r| r.abs() < 0.05));
    }

    #[test]
    fn welch_segment_arithmetic() {
        assert_eq!(welch_segment_count(300, 256, 128), 1);
        assert_eq!(welch_segment_count(10_000, 256, 128), (10_000 - 128) / 128);
        assert_eq!(welch_segment_count(100, 256, 128), 0);
        let short = WelchConfig::default().effective(100);
        assert_eq!((short.segment, short.overlap), (100, 50));
        let acf = acf_welch(&white_noise(100, 1), WelchConfig::default()).unwrap();
        assert_eq!(acf.len(), 100);
    }

    #[test]
    fn welch_rejects_bad_overlap() {
        let x = white_noise(1000, 2);
        let bad = WelchConfig { segment: 64, overlap: 64, ..Default::default() };
        assert!(matches!(acf_welch(&x, bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn gaussian_values() {
        let r = Roughness::prescribed(1e-2).unwrap();
        let acf = acf_gaussian(r, 11).unwrap();
        assert_eq!(acf.rho()[0], 1.0);
        assert!((acf.rho()[10] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((acf.rho()[10] - 0.60653).abs() < 1e-5);
        let fine = acf_gaussian(Roughness::prescribed(1e-4).unwrap(), 101).unwrap();
        assert!((fine.rho()[100] - 0.60653).abs() < 1e-5);
        assert!(fine.rho().windows(2).all(|w| w[1] < w[0]));
        assert!(acf_gaussian(Roughness::prescribed(0.0).unwrap(), 5).is_err());
        assert!(acf_gaussian(r, 0).is_err());
    }

    #[test]
    fn invalid_acf_rejected() {
        assert!(matches!(
            AcfEstimate::new(vec![0.9, 0.1], AcfMethod::Fft, 2),
            Err(Error::InvalidAcf(_))
        ));
        assert!(matches!(
            AcfEstimate::new(vec![1.0, 1.5], AcfMethod::Fft, 2),
            Err(Error::InvalidAcf(_))
        ));
        assert!(AcfEstimate::new(vec![], AcfMethod::Fft, 0).is_err());
    }
}
