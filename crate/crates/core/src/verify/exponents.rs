//! Predicted λ- and τ-exponents.

use crate::error::{domain, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentContext {
    ProjectorDuality,
    ProjectorOffduality,
    Resolvent,
    Dresolvent,
    Smallfreq,
    KnappLower,
    RadialLower,
    ExtensionLower,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExponentPrediction {
    pub context: ExponentContext,
    pub d: usize,
    pub p: Option<f64>,
    pub s: Option<f64>,
    pub q: Option<f64>,
    pub exponent: f64,
    pub p_st: f64,
    /// Exponent-independent factor that blows up at an endpoint, e.g. `(p-2)^{-1}`.
    pub constant_blowup: Option<String>,
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

fn rho(d: usize) -> f64 {
    0.5 * (d as f64 - 1.0)
}

/// Stein–Tomas exponent `2(d+1)/(d-1)`.
pub fn p_st(d: usize) -> f64 {
    let df = d as f64;
    2.0 * (df + 1.0) / (df - 1.0)
}

/// `2d/(d-1)`, where the spherical function enters `L^p`-integrability of its core.
pub fn p_radial(d: usize) -> f64 {
    let df = d as f64;
    2.0 * df / (df - 1.0)
}

/// The two branches of α(p, d), high (`p ≥ p_ST`) first.
pub fn alpha_branches(p: f64, d: usize) -> (f64, f64) {
    let df = d as f64;
    let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
    (df - 1.0 - 2.0 * df * inv, (df - 1.0) * (0.5 - inv))
}

/// Exponent α(p, d) of `‖P_λ‖_{L^{p'} → L^p}`.
pub fn predicted_alpha(p: f64, d: usize) -> Result<f64> {
    check_d(d)?;
    if !(p > 2.0) {
        return Err(domain(format!("α(p, d) needs p > 2, got {p}")));
    }
    let (high, low) = alpha_branches(p, d);
    Ok(if p >= p_st(d) { high } else { low })
}

pub fn alpha_prediction(p: f64, d: usize) -> Result<ExponentPrediction> {
    let exponent = predicted_alpha(p, d)?;
    let blowup = (p < p_st(d)).then(|| "(p-2)^{-1}".to_string());
    Ok(ExponentPrediction {
        context: ExponentContext::ProjectorDuality,
        d,
        p: Some(p),
        s: None,
        q: None,
        exponent,
        p_st: p_st(d),
        constant_blowup: blowup,
    })
}

/// Exponent of the product bound for `‖P_λ‖_{L^s → L^q}`, taking the larger power in each bracket.
pub fn predicted_offduality_projector(s: f64, q: f64, d: usize) -> Result<ExponentPrediction> {
    check_d(d)?;
    if !((1.0..2.0).contains(&s) && q > 2.0) {
        return Err(domain(format!("off-duality bound needs s ∈ [1, 2), q ∈ (2, ∞], got s = {s}, q = {q}")));
    }
    let (df, r) = (d as f64, rho(d));
    let iq = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let is = 1.0 / s;
    let (q_plain, q_blow) = (r - df * iq, r * (0.5 - iq));
    let (s_plain, s_blow) = (df * is - 0.5 * (df + 1.0), r * (is - 0.5));
    let mut blowups = Vec::new();
    if q_blow >= q_plain {
        blowups.push("(q-2)^{-1/2}");
    }
    if s_blow >= s_plain {
        blowups.push("(2-s)^{-1/2}");
    }
    Ok(ExponentPrediction {
        context: ExponentContext::ProjectorOffduality,
        d,
        p: None,
        s: Some(s),
        q: Some(q),
        exponent: q_plain.max(q_blow) + s_plain.max(s_blow),
        p_st: p_st(d),
        constant_blowup: (!blowups.is_empty()).then(|| blowups.join(" ")),
    })
}

/// λ-exponent of `‖Φ_λ‖_{L^p}`; `None` for `p ≤ 2`, where the norm is infinite.
pub fn phi_norm_exponent(p: f64, d: usize) -> Option<f64> {
    if !(p > 2.0) {
        return None;
    }
    Some(if p > p_radial(d) { -(d as f64) / p } else { -rho(d) })
}

/// Slope of `‖P_λ f_λ‖_p / ‖f_λ‖_{p'}` for the concentrated radial family `f_λ(r) = e^{-(λr)²}`.
pub fn radial_projector_exponent(p: f64, d: usize) -> f64 {
    let df = d as f64;
    if p > p_radial(d) {
        2.0 * rho(d) - 2.0 * df / p
    } else {
        rho(d) - df / p
    }
}

/// Slope of `(‖E_λ φ_δ‖_p / ‖φ_δ‖_2)²` at `δ = λ^{-1/2}`.
pub fn knapp_projector_exponent(p: f64, d: usize) -> f64 {
    rho(d) - 2.0 * rho(d) / p
}

/// Slope of `‖E_λ 1‖_q / ‖1‖_{L^p(S)}`.
pub fn extension_radial_exponent(q: f64, d: usize) -> Result<f64> {
    if !(q > 2.0) {
        return Err(domain(format!("E_λ 1 = |c|^{{-1}} Φ_λ is not in L^q for q = {q} ≤ 2")));
    }
    Ok(if q > p_radial(d) { rho(d) - d as f64 / q } else { 0.0 })
}

/// Slope of `‖E_λ φ_δ‖_q / ‖φ_δ‖_{L^p(S)}` at `δ = λ^{-1/2}`.
pub fn extension_knapp_exponent(p: f64, q: f64, d: usize) -> f64 {
    rho(d) / p - rho(d) / q
}
