//! L^p norms on H^d in the polar and Iwasawa charts, on S^{d-1}, and log-log slope fits.

use num_complex::Complex64;

use crate::error::{domain, invalid, Result};
use crate::geometry::{sphere_area, IwasawaPoint};
use crate::operators::{PolarGridFunction, SphereFunction};
use crate::quadrature::{composite_from_edges, uniform_edges};
use crate::transform::{volume_density, RadialFunction};

/// Tail envelope exponents at or above this are treated as non-integrable.
pub const DIVERGENCE_THRESHOLD: f64 = -0.05;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormResult {
    /// The norm, or `+∞` when the tail does not decay.
    pub value: f64,
    pub divergent: bool,
    /// Fitted exponent β of the envelope `e^{βr}` of `|f|^p (sh r)^{2ρ}` on the outer half of the grid.
    pub tail_exponent: Option<f64>,
    /// Share of `‖f‖_p^p` supplied by extrapolation past the grid.
    pub tail_correction: f64,
}

impl NormResult {
    fn finite(value: f64) -> Self {
        NormResult { value, divergent: false, tail_exponent: None, tail_correction: 0.0 }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(domain(format!("L^p needs p ≥ 1, got {p}")));
    }
    Ok(())
}

/// Per-panel masses of `|f|^p (sh r)^{2ρ}` (without the sphere factor).
fn panel_masses(f: &RadialFunction, p: f64) -> Vec<f64> {
    let g = &f.grid;
    let order = g.order();
    g.nodes
        .chunks(order)
        .zip(g.weights.chunks(order))
        .zip(f.values.chunks(order))
        .map(|((r, w), v)| r.iter().zip(w).zip(v).map(|((r, w), v)| w * v.norm().powf(p) * volume_density(*r, &f.params)).sum())
        .collect()
}

/// `‖f‖_{L^p(H^d)}` for radial f, with tail extrapolation and divergence detection.
pub fn lp_norm_polar(f: &RadialFunction, p: f64) -> Result<NormResult> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(NormResult::finite(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max)));
    }
    let masses = panel_masses(f, p);
    let total: f64 = masses.iter().sum();
    let edges = f.grid.edges();
    let omega = f.params.omega_sphere;
    let half = 0.5 * f.grid.upper();
    let tail: Vec<(f64, f64)> = masses
        .iter()
        .enumerate()
        .map(|(k, &m)| (0.5 * (edges[k] + edges[k + 1]), m / (edges[k + 1] - edges[k])))
        .filter(|&(c, m)| c >= half && m > 1e-300 && m > 1e-14 * total)
        .collect();
    if tail.len() < 3 {
        return Ok(NormResult::finite((omega * total).powf(1.0 / p)));
    }
    let (beta, intercept) = least_squares(tail.iter().map(|&(c, m)| (c, m.ln())));
    if beta >= DIVERGENCE_THRESHOLD {
        return Ok(NormResult { value: f64::INFINITY, divergent: true, tail_exponent: Some(beta), tail_correction: f64::INFINITY });
    }
    let extra = (intercept + beta * f.grid.upper()).exp() / -beta;
    let sum = total + extra;
    Ok(NormResult {
        value: (omega * sum).powf(1.0 / p),
        divergent: false,
        tail_exponent: Some(beta),
        tail_correction: extra / sum.max(f64::MIN_POSITIVE),
    })
}

/// `‖f‖_{L^p}` over the grid's ball only, with no extrapolation.
pub fn lp_norm_polar_truncated(f: &RadialFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let total: f64 = panel_masses(f, p).iter().sum();
    Ok((f.params.omega_sphere * total).powf(1.0 / p))
}

/// `‖f‖_{L^p(H²)}` for a function sampled on a polar tensor grid.
pub fn lp_norm_polar_grid(f: &PolarGridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut acc = 0.0;
    for i in 0..f.radial.len() {
        let w = f.weight(i);
        acc += w * f.values[i * f.n_theta..(i + 1) * f.n_theta].iter().map(|v| v.norm().powf(p)).sum::<f64>();
    }
    Ok(acc.powf(1.0 / p))
}

/// A bounded region `s_lo ≤ s ≤ s_hi`, `|v|_∞ ≤ v_max` (tensor layout) or `|v| ≤ v_max` (radial layout).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IwasawaBox {
    pub s_lo: f64,
    pub s_hi: f64,
    pub v_max: f64,
}

/// Product quadrature over an Iwasawa region.
#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaGrid {
    pub d: usize,
    pub region: IwasawaBox,
    pub s_nodes: Vec<f64>,
    pub s_weights: Vec<f64>,
    pub v_nodes: Vec<Vec<f64>>,
    pub v_weights: Vec<f64>,
}

impl IwasawaGrid {
    fn s_rule(region: &IwasawaBox, s_panels: usize, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(region.s_hi > region.s_lo && region.v_max > 0.0) || !region.s_lo.is_finite() || !region.s_hi.is_finite() {
            return Err(invalid("Iwasawa region must be bounded and non-empty"));
        }
        Ok(composite_from_edges(&uniform_edges(region.s_lo, region.s_hi, s_panels.max(1)), order))
    }

    /// Full tensor grid over the cube `[-v_max, v_max]^{d-1}`.
    pub fn tensor(d: usize, region: IwasawaBox, s_panels: usize, v_panels: usize, order: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(invalid("Iwasawa grids are available for d = 2, 3"));
        }
        let (s_nodes, s_weights) = Self::s_rule(&region, s_panels, order)?;
        let (x, wx) = composite_from_edges(&uniform_edges(-region.v_max, region.v_max, v_panels.max(1)), order);
        let (v_nodes, v_weights) = if d == 2 {
            (x.iter().map(|&a| vec![a]).collect(), wx)
        } else {
            let mut n = Vec::new();
            let mut w = Vec::new();
            for (a, wa) in x.iter().zip(&wx) {
                for (b, wb) in x.iter().zip(&wx) {
                    n.push(vec![*a, *b]);
                    w.push(wa * wb);
                }
            }
            (n, w)
        };
        Ok(IwasawaGrid { d, region, s_nodes, s_weights, v_nodes, v_weights })
    }

    /// Grid for integrands depending on v only through |v|: nodes on the ray `v = (t, 0, ...)`,
    /// weights `ω_{d-2} t^{d-2} dt` over the ball `|v| ≤ v_max`.
    pub fn radial(d: usize, region: IwasawaBox, s_panels: usize, v_panels: usize, order: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid("dimension must be at least 2"));
        }
        let (s_nodes, s_weights) = Self::s_rule(&region, s_panels, order)?;
        let (t, wt) = composite_from_edges(&uniform_edges(0.0, region.v_max, v_panels.max(1)), order);
        let shell = sphere_area(d - 1);
        let v_weights = t.iter().zip(&wt).map(|(t, w)| w * shell * t.powi(d as i32 - 2)).collect();
        let v_nodes = t
            .iter()
            .map(|&a| {
                let mut v = vec![0.0; d - 1];
                v[0] = a;
                v
            })
            .collect();
        Ok(IwasawaGrid { d, region, s_nodes, s_weights, v_nodes, v_weights })
    }

    pub fn len(&self) -> usize {
        self.s_nodes.len() * self.v_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes, s-major.
    pub fn points(&self) -> Vec<IwasawaPoint> {
        self.s_nodes.iter().flat_map(|&s| self.v_nodes.iter().map(move |v| IwasawaPoint { s, v: v.clone() })).collect()
    }
}

/// `(∫_region |F|^p e^{-(d-1)s} dv ds)^{1/p}` for samples in `IwasawaGrid::points` order.
pub fn lp_norm_iwasawa(grid: &IwasawaGrid, values: &[Complex64], p: f64) -> Result<f64> {
    check_p(p)?;
    if values.len() != grid.len() {
        return Err(invalid("sample count does not match the Iwasawa grid"));
    }
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let nv = grid.v_nodes.len();
    let k = (grid.d - 1) as f64;
    let mut acc = 0.0;
    for (i, (s, ws)) in grid.s_nodes.iter().zip(&grid.s_weights).enumerate() {
        let row: f64 = values[i * nv..(i + 1) * nv].iter().zip(&grid.v_weights).map(|(f, w)| w * f.norm().powf(p)).sum();
        acc += ws * (-k * s).exp() * row;
    }
    Ok(acc.powf(1.0 / p))
}

/// `lp_norm_iwasawa` of a function given in closed form.
pub fn lp_norm_iwasawa_fn(grid: &IwasawaGrid, f: impl Fn(f64, &[f64]) -> Complex64, p: f64) -> Result<f64> {
    let values: Vec<Complex64> = grid.s_nodes.iter().flat_map(|&s| grid.v_nodes.iter().map(move |v| (s, v))).map(|(s, v)| f(s, v)).collect();
    lp_norm_iwasawa(grid, &values, p)
}

/// `(∫_{S^{d-1}} |g|^p dω)^{1/p}` with the unnormalized surface measure.
pub fn sphere_lp_norm(g: &SphereFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(g.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    Ok(g.values.iter().zip(&g.grid.weights).map(|(v, w)| w * v.norm().powf(p)).sum::<f64>().powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub points: Vec<(f64, f64)>,
}

fn least_squares(pts: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = pts.clone().count() as f64;
    let (mx, my) = pts.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares line through `(ln λ, ln value)`.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(invalid(format!("a scaling fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(l, v)) = points.iter().find(|&&(l, v)| !(v > 0.0 && v.is_finite() && l > 0.0 && l.is_finite())) {
        return Err(domain(format!("scaling fits need positive finite data, got ({l}, {v})")));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi < 4.0 * lo * (1.0 - 1e-12) {
        return Err(invalid(format!("λ values must span a factor 4, got [{lo}, {hi}]")));
    }
    let logs = points.iter().map(|&(l, v)| (l.ln(), v.ln()));
    let (slope, intercept) = least_squares(logs.clone());
    let max_residual = logs.map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    Ok(ScalingFit { slope, intercept, max_residual, points: points.to_vec() })
}
