//! Numerical helpers shared by the estimators and the validation harness:
//! the standard normal distribution, adaptive quadrature, and a few
//! empirical-distribution summaries.

// Published constants and reference values are kept at full printed precision.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

/// Complementary error function, absolute error below 1e-15 on the real line.
///
/// Uses the positive-term series `erf(x) = 2/√π · e^{-x²} Σ (2x²)^k x / (2k+1)!!`
/// for `|x| < 2`, and a continued fraction (modified Lentz) beyond, which keeps
/// full relative accuracy in the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term > sum * 1e-17 {
            k += 1.0;
            term *= 2.0 * x2 / (2.0 * k + 1.0);
            sum += term;
        }
        1.0 - 2.0 / PI.sqrt() * (-x2).exp() * sum
    } else if x < 27.0 {
        // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for j in 1..5000 {
            let a = j as f64 / 2.0;
            d = x + a * d;
            d = if d.abs() < tiny { tiny } else { d };
            c = x + a / c;
            c = if c.abs() < tiny { tiny } else { c };
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / PI.sqrt() / f
    } else {
        0.0
    }
}

/// Standard normal CDF, `Φ(z)`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal survival function, `1 - Φ(z)`, without cancellation in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Standard normal quantile, the inverse of [`normal_cdf`].
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!("probability {p} outside (0, 1)")));
    }
    // Start from statrs' inverse erfc and polish with Newton steps on the
    // tail that does not cancel.
    let mut z = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        let density = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        if density == 0.0 {
            break;
        }
        let residual = if z > 0.0 { (1.0 - p) - normal_sf(z) } else { normal_cdf(z) - p };
        z -= residual / density;
    }
    Ok(z)
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        // Odd Kronrod indices are the embedded Gauss nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Intervals are bisected (largest error first) until the summed error
/// estimate drops below `rel_tol · |integral|`. Returns the integral and the
/// final error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::parameter(format!("invalid integration bounds [{a}, {b}]")));
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut intervals = vec![(a, b, value, error)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= rel_tol * total.abs() || total_err < f64::MIN_POSITIVE {
            return Ok((total, total_err));
        }
        if intervals.len() >= max_intervals {
            return Err(Error::Resource(format!(
                "quadrature did not reach relative tolerance {rel_tol:e} in {max_intervals} intervals"
            )));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|l, r| l.1 .3.total_cmp(&r.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (lv, le) = gauss_kronrod_15(&f, lo, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, hi);
        intervals.push((lo, mid, lv, le));
        intervals.push((mid, hi, rv, re));
    }
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// the uniform distribution on `[0, 1]`.
pub fn ks_uniform_statistic(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let u = u.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - u).max(u - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Linear-interpolation percentile (`q` in `[0, 100]`) of unsorted data.
pub fn percentile(data: &[f64], q: f64) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (q / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn mean(data: &[f64]) -> f64 {
    data.iter().sum::<f64>() / data.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit mpmath reference values.
    #[test]
    fn erfc_matches_reference() {
        let cases = [
            (0.01, 0.98871658444415038285),
            (0.3, 0.67137324054087258381),
            (1.0, 0.15729920705028513066),
            (1.5, 0.033894853524689272933),
            (2.2, 0.0018628462979818898586),
            (2.9, 0.000041097878099458857996),
            (2.999, 0.000022230168599834056915),
            (3.0, 0.000022090496998585441373),
            (3.5, 7.4309837234141274552e-7),
            (4.5, 1.9661604415428874763e-10),
            (6.0, 2.1519736712498913117e-17),
            (10.0, 2.088487583762544757e-45),
            (20.0, 5.3958656116079009289e-176),
            (26.0, 5.6631924088561428465e-296),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!((got - want).abs() < 1e-15, "erfc({x}) = {got:e}, want {want:e}");
            if x >= 2.0 {
                assert!(((got - want) / want).abs() < 1e-13, "erfc({x}) = {got:e}, want {want:e}");
            }
            assert!((erfc(-x) - (2.0 - want)).abs() < 1e-15);
        }
        assert_eq!(erfc(0.0), 1.0);
    }

    #[test]
    fn normal_cdf_is_monotone() {
        let grid: Vec<f64> = (-800..=800).map(|i| normal_cdf(i as f64 / 100.0)).collect();
        assert!(grid.windows(2).all(|w| w[1] >= w[0]));
    }

    // Reference values from scipy.stats.norm.
    #[test]
    fn normal_tail_matches_reference() {
        let cases = [
            (0.5, 0.3085375387259869),
            (1.0, 0.15865525393145707),
            (2.0, 0.022750131948179195),
            (3.0, 0.0013498980316300933),
            (5.0, 2.866515718791933e-07),
            (8.0, 6.22096057427174e-16),
        ];
        for (z, sf) in cases {
            assert!((normal_sf(z) - sf).abs() < 1e-12, "sf({z})");
            assert!((normal_cdf(-z) - sf).abs() < 1e-12, "cdf(-{z})");
        }
        assert_eq!(normal_cdf(0.0), 0.5);
    }

    #[test]
    fn normal_quantile_matches_reference() {
        let cases =
            [(0.975, 1.959963984540054), (0.995, 2.5758293035489004), (0.9, 1.2815515655446004)];
        for (p, z) in cases {
            assert!((normal_quantile(p).unwrap() - z).abs() < 1e-10);
            assert!((normal_quantile(1.0 - p).unwrap() + z).abs() < 1e-10);
        }
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
    }

    #[test]
    fn quadrature_integrates_gaussian() {
        let (v, _) =
            integrate_adaptive(|t| (-t * t / 2.0).exp(), -12.0, 12.0, 1e-12, 1000).unwrap();
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_polynomial_is_exact() {
        let (v, _) = integrate_adaptive(|t| t.powi(5) - 2.0 * t, 0.0, 2.0, 1e-14, 10).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn ks_of_plotting_positions() {
        let r = 100;
        let u: Vec<f64> = (0..r).map(|i| (i as f64 + 0.5) / r as f64).collect();
        assert!((ks_uniform_statistic(&u) - 0.5 / r as f64).abs() < 1e-15);
        assert!((ks_uniform_statistic(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn percentile_interpolates() {
        let d = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(percentile(&d, 0.0), 1.0);
        assert_eq!(percentile(&d, 100.0), 4.0);
        assert!((percentile(&d, 50.0) - 2.5).abs() < 1e-15);
    }
}
