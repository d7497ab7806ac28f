//! The time-series value type and the sample statistics every estimator is
//! built from.

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite, regularly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
    label: Option<String>,
}

impl TimeSeries {
    /// Builds a series sampled at unit interval. Rejects NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, dt: 1.0, label: None })
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::parameter(format!("sampling interval must be positive, got {dt}")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Same metadata, new samples. The samples must already be finite.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { values, dt: self.dt, label: self.label.clone() }
    }

    pub(crate) fn require_len(&self, min: usize, what: &str) -> Result<()> {
        if self.values.len() < min {
            return Err(Error::degenerate(format!(
                "{what} needs at least {min} samples, got {}",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// Where a roughness value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoughnessSource {
    DerivativeVariance,
    Prescribed,
}

/// Second spectral moment `|ρ''(0)|` of a process, i.e. the curvature of its
/// autocorrelation at lag zero.
///
/// Units are inverse squared time: per sample² when `dt = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Roughness {
    pub value: f64,
    pub source: RoughnessSource,
}

impl Roughness {
    pub fn prescribed(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::parameter(format!(
                "roughness must be finite and >= 0, got {value}"
            )));
        }
        Ok(Self { value, source: RoughnessSource::Prescribed })
    }

    pub fn is_degenerate(&self) -> bool {
        self.value == 0.0
    }
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Two-pass unbiased variance of a slice with at least two elements.
pub(crate) fn slice_variance(values: &[f64]) -> f64 {
    let m = mean_of(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    ss / (values.len() - 1) as f64
}

/// Unbiased variance of the forward differences `(v[k+1] - v[k]) / dt`,
/// without materializing the differenced series.
pub(crate) fn slice_diff_variance(values: &[f64], dt: f64) -> f64 {
    let m = values.len() - 1;
    let mean = (values[m] - values[0]) / (m as f64 * dt);
    let ss: f64 = values
        .windows(2)
        .map(|w| {
            let d = (w[1] - w[0]) / dt - mean;
            d * d
        })
        .sum();
    ss / (m - 1) as f64
}

/// Unbiased sample variance (divides by `n - 1`).
pub fn variance(ts: &TimeSeries) -> Result<f64> {
    ts.require_len(2, "variance")?;
    Ok(slice_variance(ts.values()))
}

/// Forward difference scaled by the sampling interval.
///
/// ```
/// # use esscorr::{TimeSeries, series::diff};
/// let ts = TimeSeries::new(vec![0.0, 1.0, 2.0])?.with_dt(0.5)?;
/// assert_eq!(diff(&ts)?.values(), &[2.0, 2.0]);
/// # Ok::<(), esscorr::Error>(())
/// ```
pub fn diff(ts: &TimeSeries) -> Result<TimeSeries> {
    ts.require_len(2, "differencing")?;
    let dt = ts.dt();
    let d = ts.values().windows(2).map(|w| (w[1] - w[0]) / dt).collect();
    Ok(ts.with_values(d))
}

/// Minimum length accepted by the roughness and ESS estimators.
pub const MIN_ESTIMATION_LEN: usize = 8;

/// Roughness estimate `var(diff(x)) / var(x)`.
///
/// Dividing by the sample variance makes this the second spectral moment
/// of the autocorrelation rather than the autocovariance, so the estimate is
/// unchanged by any affine map `a·x + b` with `a ≠ 0`.
pub fn roughness(ts: &TimeSeries) -> Result<Roughness> {
    ts.require_len(MIN_ESTIMATION_LEN, "roughness estimation")?;
    let var = slice_variance(ts.values());
    if var <= 0.0 {
        return Err(Error::degenerate("roughness of a constant series"));
    }
    let value = slice_diff_variance(ts.values(), ts.dt()) / var;
    Ok(Roughness { value, source: RoughnessSource::DerivativeVariance })
}

/// Number of strict sign changes of the mean-centered series.
///
/// A sample exactly at the mean keeps the sign of the last nonzero sample, so
/// a tangential touch is not counted; leading zeros are skipped.
pub fn zero_crossings(ts: &TimeSeries) -> Result<usize> {
    ts.require_len(2, "zero-crossing count")?;
    let m = ts.mean();
    let mut previous: Option<bool> = None;
    let mut count = 0;
    for &v in ts.values() {
        let c = v - m;
        if c == 0.0 {
            continue;
        }
        let positive = c > 0.0;
        if previous.is_some_and(|p| p != positive) {
            count += 1;
        }
        previous = Some(positive);
    }
    if previous.is_none() {
        return Err(Error::degenerate("every centered sample is zero"));
    }
    Ok(count)
}

/// Replaces values by their 1-based ranks; tied values share their average rank.
pub fn rank_transform(ts: &TimeSeries) -> Result<TimeSeries> {
    ts.require_len(2, "rank transform")?;
    let values = ts.values();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    Ok(ts.with_values(ranks))
}

/// Centers to zero mean and scales to unit unbiased variance.
pub fn standardize(ts: &TimeSeries) -> Result<TimeSeries> {
    ts.require_len(2, "standardization")?;
    let m = ts.mean();
    let sd = slice_variance(ts.values()).sqrt();
    if sd == 0.0 {
        return Err(Error::degenerate("cannot standardize a constant series"));
    }
    let mut out: Vec<f64> = ts.values().iter().map(|v| (v - m) / sd).collect();
    // One correction pass removes the rounding residue of the first.
    let m2 = mean_of(&out);
    let sd2 = slice_variance(&out).sqrt();
    out.iter_mut().for_each(|v| *v = (*v - m2) / sd2);
    Ok(ts.with_values(out))
}
