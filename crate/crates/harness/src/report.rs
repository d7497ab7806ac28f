//! Machine-readable and human-readable command output.

use esscorr::{CorrelationTest, EssEstimate};
use serde::Serialize;

/// JSON form of a correlation test. Field names are stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrReport {
    pub r: f64,
    pub coefficient: &'static str,
    pub ess: f64,
    pub ess_raw: f64,
    pub ess_method: &'static str,
    pub clamped: bool,
    /// Infinite for `|r| = 1`, which serializes as `null`.
    pub z: f64,
    pub p_two_sided: f64,
    pub quantile: f64,
    pub alpha: f64,
    pub n: usize,
}

impl From<&CorrelationTest> for CorrReport {
    fn from(t: &CorrelationTest) -> Self {
        Self {
            r: t.r,
            coefficient: t.coefficient.tag(),
            ess: t.ess.nu,
            ess_raw: t.ess.nu_raw,
            ess_method: t.ess.method.tag(),
            clamped: t.ess.clamped,
            z: t.z,
            p_two_sided: t.p_two_sided,
            quantile: t.quantile,
            alpha: t.alpha,
            n: t.ess.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssReport {
    pub ess: f64,
    pub ess_raw: f64,
    pub ess_method: &'static str,
    pub clamped: bool,
    pub factor: f64,
    pub n: usize,
}

impl From<&EssEstimate> for EssReport {
    fn from(e: &EssEstimate) -> Self {
        Self {
            ess: e.nu,
            ess_raw: e.nu_raw,
            ess_method: e.method.tag(),
            clamped: e.clamped,
            factor: e.factor(),
            n: e.n,
        }
    }
}

fn rows(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

impl CorrReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        rows(&[
            ("coefficient", format!("{} r = {:.6}", self.coefficient, self.r)),
            ("n", self.n.to_string()),
            (
                "ess",
                format!(
                    "{:.3} ({}{})",
                    self.ess,
                    self.ess_method,
                    if self.clamped { ", clamped" } else { "" }
                ),
            ),
            ("ess raw", format!("{:.3}", self.ess_raw)),
            ("z", format!("{:.4}", self.z)),
            ("p (two-sided)", format!("{:.6e}", self.p_two_sided)),
            ("|r| threshold", format!("{:.6} at alpha = {}", self.quantile, self.alpha)),
        ])
    }
}

impl EssReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        rows(&[
            ("n", self.n.to_string()),
            (
                "ess",
                format!(
                    "{:.3} ({}{})",
                    self.ess,
                    self.ess_method,
                    if self.clamped { ", clamped" } else { "" }
                ),
            ),
            ("ess raw", format!("{:.3}", self.ess_raw)),
            ("factor", format!("{:.6}", self.factor)),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use esscorr::corrstats::fisher_test;
    use esscorr::ess::EssMethod;

    #[test]
    fn json_fields_stable() {
        let nu = EssEstimate::from_raw(100.0, 2000, EssMethod::LaplaceDerivative).unwrap();
        let t = fisher_test(0.3, &nu, 0.05).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&CorrReport::from(&t).to_json()).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec![
            "r",
            "coefficient",
            "ess",
            "ess_raw",
            "ess_method",
            "clamped",
            "z",
            "p_two_sided",
            "quantile",
            "alpha",
            "n",
        ];
        expected.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, expected);
        assert_eq!(json["ess_method"], "laplace-derivative");
        assert_eq!(json["n"], 2000);
    }

    #[test]
    fn infinite_z_is_null() {
        let nu = EssEstimate::from_raw(50.0, 100, EssMethod::Analytic).unwrap();
        let t = fisher_test(1.0, &nu, 0.05).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&CorrReport::from(&t).to_json()).unwrap();
        assert!(json["z"].is_null());
        assert_eq!(json["p_two_sided"], 0.0);
    }

    #[test]
    fn clamped_estimate_reported() {
        let nu = EssEstimate::from_raw(2.0, 100, EssMethod::QuenouilleFft).unwrap();
        let e = EssReport::from(&nu);
        assert_eq!((e.ess, e.ess_raw, e.clamped), (5.0, 2.0, true));
        assert!(e.to_text().contains("clamped"));
    }
}
