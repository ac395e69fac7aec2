//! `‖D^{γ_p} e^{itΔ} f‖_{L^p_x L^2_t}` for radial data.
//!
//! For radial f, `D^γ e^{itΔ} f(x) = e^{-itρ²} κ_d ∫ e^{-itλ²} a_x(λ) dλ` with
//! `a_x(λ) = λ^γ f̃(λ) Φ_λ(x) |c(λ)|^{-2}`. Substituting `μ = λ²` and applying Plancherel in t,
//! `∫ |∫ e^{itλ²} a(λ) dλ|² dt = π ∫ |a(λ)|² λ^{-1} dλ`.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{gauss_legendre, uniform_edges};
use crate::specfun::{plancherel_density, SphericalTable};
use crate::transform::{forward_radial_ft, volume_density, RadialFunction, RadialGrid, SpectralFunction, SpectralGrid};

/// Relative agreement required between the closed-form time weight and brute-force time quadrature.
pub const ORACLE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothingExponent {
    pub p: f64,
    pub d: usize,
    pub gamma_p: f64,
}

impl SmoothingExponent {
    pub fn new(p: f64, d: usize) -> Result<Self> {
        if !(p > 2.0 && p.is_finite()) {
            return Err(invalid(format!("smoothing needs 2 < p < ∞, got {p}")));
        }
        if d < 2 {
            return Err(invalid("dimension must be at least 2"));
        }
        let df = d as f64;
        if d >= 3 && 1.0 - 2.0 / p > 2.0 / df + 1e-15 {
            return Err(invalid(format!("p = {p} violates 1/p' - 1/p ≤ 2/d for d = {d}")));
        }
        let p_st = 2.0 * (df + 1.0) / (df - 1.0);
        let high = |p: f64| 1.0 - df * (0.5 - 1.0 / p);
        let low = |p: f64| 0.5 - 0.5 * (df - 1.0) * (0.5 - 1.0 / p);
        let gap = (high(p_st) - low(p_st)).abs();
        if gap > 1e-12 {
            return Err(Error::Consistency(format!("γ_p branches disagree by {gap} at p_ST")));
        }
        let gamma_p = if p > p_st { high(p) } else { low(p) };
        Ok(SmoothingExponent { p, d, gamma_p })
    }
}

/// Time-Plancherel weight `w(λ)` in `∫ |∫ e^{itλ²} a dλ|² dt = ∫ |a|² w dλ`.
pub fn smoothing_weight(lambda: f64) -> f64 {
    PI / lambda
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothingResult {
    pub value: f64,
    /// Brute-force time integral divided by the weighted λ-integral, at the oracle radius.
    pub oracle_ratio: f64,
    pub oracle_radius: f64,
    /// Share of the L^p_x integral carried by the last radial panel.
    pub tail_fraction: f64,
}

/// The functional for radial `f`, transformed on the spectral grid `lg` and measured on `xg`.
pub fn smoothing_functional(f: &RadialFunction, se: &SmoothingExponent, lg: &Arc<SpectralGrid>, xg: &Arc<RadialGrid>) -> Result<SmoothingResult> {
    let ft = forward_radial_ft(f, lg)?;
    smoothing_functional_spectral(&ft, se, xg)
}

/// The functional for data given through its transform.
pub fn smoothing_functional_spectral(ft: &SpectralFunction, se: &SmoothingExponent, xg: &Arc<RadialGrid>) -> Result<SmoothingResult> {
    let mp = ft.params;
    if se.d != mp.d {
        return Err(invalid("smoothing exponent was built for another dimension"));
    }
    if !(2..=3).contains(&mp.d) {
        return Err(invalid("the smoothing functional is implemented for d = 2, 3"));
    }
    let lg = &ft.grid;
    let table = SphericalTable::new(&lg.nodes, &xg.nodes, &mp)?;
    // b(λ) = λ^γ f̃(λ) |c(λ)|^{-2}, so that a_x(λ) = b(λ) Φ_λ(x).
    let b: Vec<Complex64> = lg.nodes.iter().zip(&ft.values).map(|(&l, v)| v * (l.powf(se.gamma_p) * plancherel_density(l, &mp))).collect();
    let wb: Vec<f64> = lg.nodes.iter().zip(&lg.weights).zip(&b).map(|((&l, w), v)| w * v.norm_sqr() * smoothing_weight(l)).collect();
    let kappa = mp.inversion_constant();
    let time_l2: Vec<f64> = (0..xg.len()).map(|i| kappa * kappa * table.row(i).iter().zip(&wb).map(|(phi, w)| w * phi * phi).sum::<f64>()).collect();

    let mut total = 0.0;
    let mut last = 0.0;
    let tail_start = xg.edges()[xg.edges().len() - 2];
    for ((&r, w), t) in xg.nodes.iter().zip(&xg.weights).zip(&time_l2) {
        let c = w * volume_density(r, &mp) * t.powf(0.5 * se.p);
        total += c;
        if r >= tail_start {
            last += c;
        }
    }
    let value = (mp.omega_sphere * total).powf(1.0 / se.p);

    let oracle_index = time_l2.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    let a: Vec<Complex64> = b.iter().zip(table.row(oracle_index)).map(|(v, phi)| v * *phi).collect();
    let closed = time_l2[oracle_index] / (kappa * kappa);
    let brute = time_l2_bruteforce(|l| lg.interpolate(&a, l), support(lg, &a))?;
    let oracle_ratio = brute / closed;
    if !((oracle_ratio - 1.0).abs() <= ORACLE_TOL) {
        return Err(Error::Consistency(format!("time-Plancherel weight disagrees with time quadrature: ratio {oracle_ratio}")));
    }
    Ok(SmoothingResult { value, oracle_ratio, oracle_radius: xg.nodes[oracle_index], tail_fraction: last / total.max(f64::MIN_POSITIVE) })
}

/// Smallest panel-aligned interval of `lg` outside which `a` is negligible.
fn support(lg: &SpectralGrid, a: &[Complex64]) -> (f64, f64) {
    let peak = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edges = lg.edges();
    let order = lg.order();
    let live: Vec<usize> = (0..edges.len() - 1).filter(|&p| a[p * order..(p + 1) * order].iter().any(|v| v.norm() > 1e-13 * peak)).collect();
    match (live.first(), live.last()) {
        (Some(&lo), Some(&hi)) => (edges[lo], edges[hi + 1]),
        _ => (edges[0], edges[edges.len() - 1]),
    }
}

/// `∫_{-∞}^{∞} |∫_lo^hi e^{itλ²} a(λ) dλ|² dt` by direct quadrature over a growing time window.
pub fn time_l2_bruteforce(a: impl Fn(f64) -> Complex64, (lo, hi): (f64, f64)) -> Result<f64> {
    if !(hi > lo && lo >= 0.0) {
        return Err(invalid("time quadrature needs 0 ≤ lo < hi"));
    }
    let band = hi * hi - lo * lo;
    let order = 16;
    let rule = gauss_legendre(order);
    let mut window = 8.0 * PI / band;
    let mut prev: Option<f64> = None;
    for _ in 0..24 {
        // Inner integral resolved for every |t| ≤ window.
        let lpanels =
            ((2.0 * hi * window * (hi - lo) / (2.0 * PI) * 12.0 / order as f64).ceil() as usize).max(8 * ((hi - lo).ceil() as usize).max(1));
        let ledges = uniform_edges(lo, hi, lpanels);
        let mut lnodes = Vec::with_capacity(lpanels * order);
        for e in ledges.windows(2) {
            let (m, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let l = m + h * x;
                lnodes.push((l * l, a(l) * (w * h)));
            }
        }
        let tpanels = ((2.0 * window * band / (2.0 * PI) * 12.0 / order as f64).ceil() as usize).max(4);
        let tedges = uniform_edges(-window, window, tpanels);
        let mut acc = 0.0;
        for e in tedges.windows(2) {
            let (m, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = m + h * x;
                let g: Complex64 = lnodes.iter().map(|(mu, av)| av * Complex64::from_polar(1.0, t * mu)).sum();
                acc += g.norm_sqr() * w * h;
            }
        }
        if let Some(p) = prev {
            if (acc - p).abs() <= 1e-8 * acc {
                return Ok(acc);
            }
        }
        prev = Some(acc);
        window *= 2.0;
    }
    Err(Error::Truncation { what: "time integral did not settle".into(), estimate: f64::NAN })
}
