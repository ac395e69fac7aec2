//! One line of a verification report.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::norms::ScalingFit;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    /// Predicted exponent, or the target value of a scalar check.
    pub predicted: f64,
    /// Fitted slope, or the measured value of a scalar check.
    pub measured: f64,
    /// `|measured - predicted|`.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub detail: String,
    pub error: Option<String>,
}

impl ResultRecord {
    /// Scalar check: passes iff `|measured - predicted| ≤ tolerance`.
    pub fn check(id: impl Into<String>, experiment: &str, predicted: f64, measured: f64, tolerance: f64) -> Self {
        let residual = (measured - predicted).abs();
        ResultRecord {
            id: id.into(),
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            predicted,
            measured,
            residual,
            tolerance,
            pass: residual <= tolerance,
            wall_time_s: 0.0,
            detail: String::new(),
            error: None,
        }
    }

    /// Slope check against a fitted power law; the fitted points go into `detail`.
    pub fn slope(id: impl Into<String>, experiment: &str, predicted: f64, fit: &ScalingFit, tolerance: f64) -> Self {
        let pts: Vec<String> = fit.points.iter().map(|(l, v)| format!("({l:e}, {v:.6e})")).collect();
        Self::check(id, experiment, predicted, fit.slope, tolerance).detail(format!(
            "fit residual {:.3e}; points {}",
            fit.max_residual,
            pts.join(" ")
        ))
    }

    /// A check that could not be carried out.
    pub fn failed(id: impl Into<String>, experiment: &str, predicted: f64, tolerance: f64, err: &Error) -> Self {
        let mut r = Self::check(id, experiment, predicted, f64::NAN, tolerance);
        r.residual = f64::NAN;
        r.pass = false;
        r.error = Some(err.to_string());
        r
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        let text = text.into();
        if self.detail.is_empty() {
            self.detail = text;
        } else if !text.is_empty() {
            self.detail = format!("{}; {}", self.detail, text);
        }
        self
    }

    /// One-line human summary.
    pub fn summary_line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        match &self.error {
            Some(e) => format!("{status} {} error: {e}", self.id),
            None => format!(
                "{status} {} predicted {:.6} measured {:.6} residual {:.3e} tol {:.3e}",
                self.id, self.predicted, self.measured, self.residual, self.tolerance
            ),
        }
    }
}

/// Builds a record from a fallible measurement.
pub fn record_from(id: impl Into<String>, experiment: &str, predicted: f64, tolerance: f64, measured: crate::Result<(f64, String)>) -> ResultRecord {
    let id = id.into();
    match measured {
        Ok((m, detail)) => ResultRecord::check(id, experiment, predicted, m, tolerance).detail(detail),
        Err(e) => ResultRecord::failed(id, experiment, predicted, tolerance, &e),
    }
}
