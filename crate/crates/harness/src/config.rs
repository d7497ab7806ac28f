use std::path::PathBuf;

use clap::ValueEnum;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    AcfFit,
    EssSweep,
    PpCalibration,
    Bench,
}

impl Experiment {
    pub fn tag(self) -> &'static str {
        match self {
            Experiment::AcfFit => "acf-fit",
            Experiment::EssSweep => "ess-sweep",
            Experiment::PpCalibration => "pp-calibration",
            Experiment::Bench => "bench",
        }
    }
}

/// Parameters of one validation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub replicates: usize,
    pub lengths: Vec<usize>,
    pub roughness_grid: Vec<f64>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    /// Spread replicates over the rayon pool. Output does not depend on it.
    pub parallel: bool,
    /// Calls per timed run (bench only).
    pub loops: usize,
    /// Timed runs per method and length (bench only).
    pub runs: usize,
    /// Significance level for rejection rates.
    pub alpha: f64,
    /// Longest series any experiment will allocate.
    pub max_length: usize,
}

pub const DEFAULT_MAX_LENGTH: usize = 100_000_000;

impl ExperimentConfig {
    /// Replicate counts, lengths and grids of the original study.
    pub fn full_size(experiment: Experiment) -> Self {
        let (replicates, lengths, roughness_grid) = match experiment {
            Experiment::AcfFit => (2000, vec![2000], vec![1e-1, 1e-2, 1e-4]),
            Experiment::EssSweep => (
                1000,
                vec![500, 1000, 2000],
                (0..=12).map(|i| 10f64.powf(-6.0 + 0.5 * i as f64)).collect(),
            ),
            Experiment::PpCalibration => (5000, vec![2000], vec![1e-2, 1e-4]),
            Experiment::Bench => (1, (2..=7).map(|e| 10usize.pow(e)).collect(), vec![1e-3]),
        };
        Self {
            experiment,
            replicates,
            lengths,
            roughness_grid,
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            emit_svg: false,
            parallel: true,
            loops: 100,
            runs: 7,
            alpha: 0.05,
            max_length: DEFAULT_MAX_LENGTH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.lengths.is_empty() || self.roughness_grid.is_empty() {
            return bad("length and roughness grids must be non-empty".into());
        }
        if let Some(n) = self.lengths.iter().find(|&&n| n < esscorr::series::MIN_ESTIMATION_LEN) {
            return bad(format!("length {n} is below {}", esscorr::series::MIN_ESTIMATION_LEN));
        }
        if let Some(n) = self.lengths.iter().find(|&&n| n > self.max_length) {
            return Err(HarnessError::Resource(format!(
                "length {n} exceeds the cap of {} samples",
                self.max_length
            )));
        }
        if let Some(r) = self.roughness_grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return bad(format!("roughness must be positive, got {r}"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.experiment == Experiment::Bench && (self.loops == 0 || self.runs < 2) {
            return bad("bench needs loops >= 1 and runs >= 2".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for e in Experiment::value_variants() {
            ExperimentConfig::full_size(*e).validate().unwrap();
        }
        let sweep = ExperimentConfig::full_size(Experiment::EssSweep);
        assert!((sweep.roughness_grid[0] - 1e-6).abs() < 1e-18);
        assert!((sweep.roughness_grid.last().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ExperimentConfig::full_size(Experiment::PpCalibration).replicates, 5000);
    }

    #[test]
    fn invalid_configs() {
        let base = ExperimentConfig::full_size(Experiment::AcfFit);
        let cases = [
            ExperimentConfig { replicates: 0, ..base.clone() },
            ExperimentConfig { lengths: vec![], ..base.clone() },
            ExperimentConfig { lengths: vec![7], ..base.clone() },
            ExperimentConfig { roughness_grid: vec![0.0], ..base.clone() },
            ExperimentConfig { roughness_grid: vec![], ..base.clone() },
            ExperimentConfig { alpha: 1.0, ..base.clone() },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(HarnessError::Config(_))), "{c:?}");
        }
        let long = ExperimentConfig { lengths: vec![10], max_length: 9, ..base };
        assert!(matches!(long.validate(), Err(HarnessError::Resource(_))));

        let bench = ExperimentConfig::full_size(Experiment::Bench);
        assert!(ExperimentConfig { runs: 1, ..bench.clone() }.validate().is_err());
        assert!(ExperimentConfig { loops: 0, ..bench.clone() }.validate().is_err());
        ExperimentConfig { loops: 1, runs: 2, ..bench }.validate().unwrap();
    }
}
