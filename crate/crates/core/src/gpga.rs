//! Sample paths of stationary Gaussian processes with Gaussian
//! autocorrelation `exp(-r τ² / 2)` (GPGA), the null model used to validate
//! the estimators.
//!
//! Paths are white Gaussian noise filtered by a Gaussian kernel. Filtering
//! with a kernel of standard deviation `σ` yields an autocorrelation
//! `exp(-τ² / (4σ²))`, so roughness `r` needs `σ² = 1 / (2r)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::series::{TimeSeries, MIN_ESTIMATION_LEN};

/// Kernel truncation in units of the kernel standard deviation.
pub const TRUNCATION_SIGMAS: f64 = 6.0;

/// Default cap on the kernel half-width, in samples.
pub const DEFAULT_MAX_RADIUS: usize = 10_000_000;

/// Largest roughness a unit-step sampled path can carry.
pub const MAX_ROUGHNESS: f64 = 4.0;

/// Parameters of one generated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpgaSpec {
    roughness: f64,
    length: usize,
    seed: u64,
}

impl GpgaSpec {
    pub fn new(roughness: f64, length: usize, seed: u64) -> Result<Self> {
        if !(roughness > 0.0 && roughness <= MAX_ROUGHNESS) {
            return Err(Error::parameter(format!(
                "GPGA roughness must lie in (0, {MAX_ROUGHNESS}], got {roughness}"
            )));
        }
        if length < MIN_ESTIMATION_LEN {
            return Err(Error::parameter(format!(
                "GPGA length must be >= {MIN_ESTIMATION_LEN}, got {length}"
            )));
        }
        Ok(Self { roughness, length, seed })
    }

    pub fn roughness(&self) -> f64 {
        self.roughness
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same process and length, different seed.
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn kernel_sigma(&self) -> f64 {
        (1.0 / (2.0 * self.roughness)).sqrt()
    }

    pub fn kernel_radius(&self) -> usize {
        (TRUNCATION_SIGMAS * self.kernel_sigma()).ceil() as usize
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a batch, a fixed mix of both inputs so that
/// replicates can be generated in any order.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

/// Truncated Gaussian kernel with unit ℓ² norm, so filtered unit white
/// noise has unit variance.
pub fn kernel(spec: &GpgaSpec) -> Vec<f64> {
    let sigma = spec.kernel_sigma();
    let radius = spec.kernel_radius() as i64;
    let mut k: Vec<f64> =
        (-radius..=radius).map(|j| (-((j * j) as f64) / (2.0 * sigma * sigma)).exp()).collect();
    let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    k.iter_mut().for_each(|v| *v /= norm);
    k
}

/// Kernels at or below this many taps are applied by direct summation.
const DIRECT_TAPS: usize = 64;

/// "Valid" linear convolution: output length `signal.len() - kernel.len() + 1`.
pub(crate) fn convolve_valid(signal: &[f64], kernel: &[f64]) -> Vec<f64> {
    let taps = kernel.len();
    assert!(taps >= 1 && signal.len() >= taps);
    let out_len = signal.len() - taps + 1;
    if taps <= DIRECT_TAPS {
        return (0..out_len)
            .map(|t| kernel.iter().rev().zip(&signal[t..t + taps]).map(|(k, s)| k * s).sum())
            .collect();
    }

    // Overlap-save.
    let nfft = (4 * taps).max(1024).next_power_of_two();
    let block = nfft - taps + 1;
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(nfft);
    let inverse = planner.plan_fft_inverse(nfft);
    let mut kernel_spec: Vec<Complex<f64>> =
        (0..nfft).map(|j| Complex::new(kernel.get(j).copied().unwrap_or(0.0), 0.0)).collect();
    forward.process(&mut kernel_spec);

    let scale = 1.0 / nfft as f64;
    let mut out = Vec::with_capacity(out_len);
    let mut buf = vec![Complex::new(0.0, 0.0); nfft];
    let mut start = 0;
    while out.len() < out_len {
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(signal.get(start + j).copied().unwrap_or(0.0), 0.0);
        }
        forward.process(&mut buf);
        buf.iter_mut().zip(&kernel_spec).for_each(|(b, k)| *b *= k);
        inverse.process(&mut buf);
        let take = block.min(out_len - out.len());
        out.extend(buf[taps - 1..taps - 1 + take].iter().map(|c| c.re * scale));
        start += block;
    }
    out
}

/// Draws one path. Identical specs give bitwise-identical paths.
pub fn sample(spec: &GpgaSpec) -> Result<TimeSeries> {
    sample_with_cap(spec, DEFAULT_MAX_RADIUS)
}

/// [`sample`] with an explicit cap on the kernel half-width.
pub fn sample_with_cap(spec: &GpgaSpec, max_radius: usize) -> Result<TimeSeries> {
    let radius = spec.kernel_radius();
    if radius > max_radius {
        return Err(Error::Resource(format!(
            "kernel half-width {radius} exceeds cap {max_radius} (roughness {})",
            spec.roughness
        )));
    }
    let k = kernel(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise: Vec<f64> =
        (0..spec.length + 2 * radius).map(|_| StandardNormal.sample(&mut rng)).collect();
    let path = convolve_valid(&noise, &k);
    debug_assert_eq!(path.len(), spec.length);
    TimeSeries::new(path)
}

/// ESS factor `ν / n = sqrt(r / π)` of a pair of paths with equal roughness `r`.
pub fn theoretical_ess_factor(roughness: f64) -> Result<f64> {
    if !(roughness > 0.0 && roughness.is_finite()) {
        return Err(Error::parameter(format!("roughness must be positive, got {roughness}")));
    }
    Ok((roughness / std::f64::consts::PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{roughness, variance};

    #[test]
    fn spec_validation() {
        assert!(GpgaSpec::new(0.0, 100, 0).is_err());
        assert!(GpgaSpec::new(4.5, 100, 0).is_err());
        assert!(GpgaSpec::new(f64::NAN, 100, 0).is_err());
        assert!(GpgaSpec::new(1e-2, 7, 0).is_err());
        assert!(GpgaSpec::new(4.0, 8, 0).is_ok());
    }

    #[test]
    fn kernel_geometry() {
        let spec = GpgaSpec::new(1e-2, 100, 0).unwrap();
        assert!((spec.kernel_sigma() - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(spec.kernel_radius(), 43);
        let k = kernel(&spec);
        assert_eq!(k.len(), 87);
        assert!((k.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(k[0], k[86]);
    }

    #[test]
    fn overlap_save_matches_direct() {
        let signal: Vec<f64> = (0..5000).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let kernel: Vec<f64> = (0..301).map(|j| 1.0 / (1.0 + (j as f64 - 120.0).abs())).collect();
        let fast = convolve_valid(&signal, &kernel);
        assert_eq!(fast.len(), 5000 - 300);
        for (t, v) in fast.iter().enumerate() {
            let direct: f64 = (0..301).map(|j| kernel[j] * signal[t + 300 - j]).sum();
            assert!((v - direct).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn exact_length_and_determinism() {
        let spec = GpgaSpec::new(1e-2, 1234, 99).unwrap();
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        assert_eq!(a.len(), 1234);
        assert_eq!(a, b);
        assert_ne!(a, sample(&spec.with_seed(100)).unwrap());
    }

    #[test]
    fn radius_cap() {
        let spec = GpgaSpec::new(1e-6, 100, 0).unwrap();
        assert!(matches!(sample_with_cap(&spec, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    #[test]
    fn roughness_recovered_at_large_n() {
        let spec = GpgaSpec::new(1e-2, 100_000, 2024).unwrap();
        let r = roughness(&sample(&spec).unwrap()).unwrap().value;
        assert!((r - 1e-2).abs() < 5e-4, "{r}");
    }

    #[test]
    fn unit_variance() {
        let spec = GpgaSpec::new(1e-1, 50_000, 5).unwrap();
        let v = variance(&sample(&spec).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn ess_factor_values() {
        assert!((theoretical_ess_factor(std::f64::consts::PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((theoretical_ess_factor(1e-2).unwrap() - 0.056419).abs() < 1e-6);
        assert!((theoretical_ess_factor(1e-4).unwrap() - 0.0056419).abs() < 1e-7);
        assert!(theoretical_ess_factor(0.0).is_err());
        assert!(theoretical_ess_factor(-1.0).is_err());
    }
}
