//! Run configuration shared by the experiment suites and the command-line driver.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Projector,
    Resolvent,
    Extension,
    Smallfreq,
    Smoothing,
    Kernels,
    Identities,
}

impl Suite {
    pub const ALL: [Suite; 8] =
        [Suite::All, Suite::Projector, Suite::Resolvent, Suite::Extension, Suite::Smallfreq, Suite::Smoothing, Suite::Kernels, Suite::Identities];

    /// The concrete suites `self` expands to.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => {
                vec![Suite::Identities, Suite::Kernels, Suite::Extension, Suite::Projector, Suite::Smallfreq, Suite::Resolvent, Suite::Smoothing]
            }
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Projector => "projector",
            Suite::Resolvent => "resolvent",
            Suite::Extension => "extension",
            Suite::Smallfreq => "smallfreq",
            Suite::Smoothing => "smoothing",
            Suite::Kernels => "kernels",
            Suite::Identities => "identities",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| invalid(format!("unknown suite '{s}'")))
    }
}

/// Quadrature knobs exposed to users.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureOverrides {
    /// Outer radius of the grids carrying `Φ_λ` and projector outputs.
    pub r_max: f64,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Lower end of the `s`-range in the Knapp experiments.
    pub knapp_s_min: f64,
    /// Per-panel order of the cap grid; defaults to 16 on S¹ and 12 on S².
    pub knapp_sphere_order: Option<usize>,
    /// Relative agreement required of the closed-form identities.
    pub identity_tol: f64,
}

impl Default for QuadratureOverrides {
    fn default() -> Self {
        QuadratureOverrides { r_max: 30.0, order: 16, knapp_s_min: -30.0, knapp_sphere_order: None, identity_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    pub lambdas: Vec<f64>,
    /// Frequencies of the small-frequency check, all in (0, 1].
    pub small_lambdas: Vec<f64>,
    /// Frequencies of the small-frequency check on H², where the Λ² regime starts lower.
    pub small_lambdas_2d: Vec<f64>,
    /// Projector p-grid; `None` picks two values below p_ST and one above for each d.
    pub p: Option<Vec<f64>>,
    /// Target exponents of the extension lower bounds.
    pub q: Vec<f64>,
    /// Source exponents for off-duality tables.
    pub s: Vec<f64>,
    /// Slope tolerance; `None` uses the per-experiment defaults.
    pub tolerance: Option<f64>,
    pub quadrature: QuadratureOverrides,
    pub out: Option<String>,
    pub seed: u64,
    /// Record wall times; off by default so that reports are reproducible byte for byte.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dims: vec![2, 3],
            lambdas: vec![8.0, 16.0, 32.0, 64.0],
            small_lambdas: vec![1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0],
            small_lambdas_2d: vec![1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0],
            p: None,
            q: vec![6.0],
            s: vec![1.0, 1.25, 1.5],
            tolerance: None,
            quadrature: QuadratureOverrides::default(),
            out: None,
            seed: 0,
            timing: false,
        }
    }
}

/// Default slope tolerance.
pub const DEFAULT_SLOPE_TOL: f64 = 0.15;

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(invalid(format!("dimensions must be ≥ 2, got {:?}", self.dims)));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(invalid(format!("λ values must be positive, got {:?}", self.lambdas)));
        }
        for grid in [&self.small_lambdas, &self.small_lambdas_2d] {
            if grid.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
                return Err(invalid(format!("small frequencies must lie in (0, 1], got {grid:?}")));
            }
        }
        for (name, grid) in [("p", self.p.as_deref().unwrap_or(&[])), ("q", &self.q), ("s", &self.s)] {
            if grid.iter().any(|&x| !(x >= 1.0)) {
                return Err(invalid(format!("{name} values must be ≥ 1, got {grid:?}")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(format!("tolerance must be positive, got {t}")));
            }
        }
        let q = &self.quadrature;
        if !(q.r_max > 1.0 && q.r_max.is_finite()) || !(4..=64).contains(&q.order) || !(q.knapp_s_min < -1.0) || !(q.identity_tol > 0.0) {
            return Err(invalid("quadrature overrides out of range"));
        }
        if let Some(o) = q.knapp_sphere_order {
            if !(4..=64).contains(&o) {
                return Err(invalid("knapp_sphere_order must lie in 4..=64"));
            }
        }
        Ok(())
    }

    /// `explicit` unless the user fixed a global tolerance.
    pub fn slope_tol(&self, explicit: f64) -> f64 {
        self.tolerance.unwrap_or(explicit)
    }

    /// Small-frequency grid for dimension d.
    pub fn small_lambdas_for(&self, d: usize) -> &[f64] {
        if d == 2 {
            &self.small_lambdas_2d
        } else {
            &self.small_lambdas
        }
    }

    /// Projector p-grid for dimension d.
    pub fn projector_ps(&self, d: usize) -> Vec<f64> {
        if let Some(p) = &self.p {
            return p.clone();
        }
        match d {
            2 => vec![3.0, 5.0, 8.0],
            3 => vec![2.5, 3.5, 6.0],
            _ => {
                let pst = super::p_st(d);
                vec![0.5 * (2.0 + pst), 0.5 * (pst + super::p_radial(d)), 2.0 * pst]
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.p = Some(vec![3.0, 7.5]);
        cfg.tolerance = Some(0.2);
        cfg.quadrature.knapp_sphere_order = Some(10);
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        assert!(RunConfig::from_json(r#"{"dimz": [2]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"quadrature": {"rmax": 3}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"dims": [1]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"lambdas": [0.0, 2.0]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"q": [0.5]}"#).is_err());
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::All.members().len(), 7);
        assert!("everything".parse::<Suite>().is_err());
    }
}
