//! Region diagrams in the `(1/s, 1/q)` square for the resolvent, the derivative of the
//! resolvent and the off-duality projector bounds.
//!
//! With `x = 1/s`, `y = 1/q`, regions live in `x ≥ 1/2`, `y ≤ 1/2`, `y ≤ x` (minus the corner
//! `(1/2, 1/2)`). The half `x + y ≥ 1` is classified directly; the other half is its mirror
//! under `(x, y) ↦ (1 - y, 1 - x)`, which keeps region labels and exponents. Lines:
//! duality `x + y = 1`, yellow `y = (d-1)/(2d)`, purple `x + (d-1)/(d+1) y = 1`,
//! green `x - y = 2/d` (resolvent) or `1/d` (derivative), blue `x = 1/2` and `y = 1/2`.

use crate::error::{domain, invalid, Result};
use crate::verify::exponents::{p_st, predicted_alpha};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagram {
    /// `(D² - z)^{-1}`, exponent of τ.
    Resolvent,
    /// `D (D² - z)^{-1}`, exponent of τ.
    Dresolvent,
    /// `P_Λ` off the duality line, exponent of Λ; same regions as the resolvent, no green line.
    Projector,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegionPoint {
    pub inv_s: f64,
    pub inv_q: f64,
    pub diagram: Diagram,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegionClass {
    pub region: Region,
    /// `None` outside every region.
    pub exponent: Option<f64>,
    /// The point lies on a drawn line; the exponent is the least of the adjacent ones.
    pub boundary: bool,
    /// Adjacent `(region, exponent)` pairs considered for boundary points.
    pub candidates: Vec<(Region, f64)>,
}

const SNAP: f64 = 1099511627776.0; // 2^40
const ON_LINE: f64 = 1e-12;
const NUDGE: f64 = 1e-7;

/// Rounds to a multiple of 2^{-40}, so that `1 - y` and `x - y` are exact.
fn snap(x: f64) -> f64 {
    (x * SNAP).round() / SNAP
}

fn green(diagram: Diagram, d: usize) -> Option<f64> {
    let df = d as f64;
    match diagram {
        Diagram::Resolvent => Some(2.0 / df),
        Diagram::Dresolvent => Some(1.0 / df),
        Diagram::Projector => None,
    }
}

fn yellow(d: usize) -> f64 {
    (d as f64 - 1.0) / (2.0 * d as f64)
}

fn purple(x: f64, y: f64, d: usize) -> f64 {
    let df = d as f64;
    x + (df - 1.0) / (df + 1.0) * y - 1.0
}

fn mirror(x: f64, y: f64) -> (f64, f64) {
    if x + y < 1.0 {
        (1.0 - y, 1.0 - x)
    } else {
        (x, y)
    }
}

/// Label of a point that is assumed to lie off every line.
fn label(x: f64, y: f64, d: usize, diagram: Diagram) -> Region {
    let (x, y) = mirror(x, y);
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) || y > x || x < 0.5 || y > 0.5 {
        return Region::Outside;
    }
    if let Some(g) = green(diagram, d) {
        if x - y > g {
            return Region::Outside;
        }
    }
    match (purple(x, y, d) >= 0.0, y >= yellow(d)) {
        (true, true) => Region::IV,
        (true, false) => Region::III,
        (false, true) => Region::I,
        (false, false) => Region::II,
    }
}

/// Exponent attached to a region at a point of the upper half.
pub fn region_exponent(region: Region, x: f64, y: f64, d: usize, diagram: Diagram) -> Option<f64> {
    let df = d as f64;
    let r = 0.5 * (df - 1.0);
    let (x, y) = mirror(x, y);
    let tau = |shift: f64| -> Option<f64> {
        let base = match region {
            Region::I => 0.5 * r * (x - y) - 0.5,
            Region::II => 0.5 * r * (x - y) + 0.5 * df * (0.5 - y) - 0.75,
            Region::III => 0.5 * df * (x - y) - 1.0,
            Region::IV => 0.5 * df * (x - 0.5) - 0.75,
            Region::Outside => return None,
        };
        Some(base + shift)
    };
    match diagram {
        Diagram::Resolvent => tau(0.0),
        Diagram::Dresolvent => match region {
            Region::III => None,
            _ => tau(0.5),
        },
        Diagram::Projector => match region {
            Region::I => Some(r * (x - y)),
            Region::II => Some(r * (x - y) + df * (0.5 - y) - 0.5),
            Region::III => Some(df * (x - y) - 1.0),
            Region::IV => Some(df * (x - 0.5) - 0.5),
            Region::Outside => None,
        },
    }
}

/// Value from the duality-line theorems at `y = 1/p`, with the matching region label.
fn duality_value(y: f64, d: usize, diagram: Diagram) -> Option<(Region, f64)> {
    if !(y < 0.5) {
        return None;
    }
    let x = 1.0 - y;
    let p = if y == 0.0 { f64::INFINITY } else { 1.0 / y };
    let df = d as f64;
    let upper = if d > 2 { 2.0 * df / (df - 2.0) } else { f64::INFINITY };
    match diagram {
        Diagram::Resolvent => {
            if p <= p_st(d) {
                region_exponent(Region::I, x, y, d, diagram).map(|e| (Region::I, e))
            } else if p <= upper {
                region_exponent(Region::III, x, y, d, diagram).map(|e| (Region::III, e))
            } else {
                None
            }
        }
        Diagram::Dresolvent => (x - y <= 1.0 / df + ON_LINE).then(|| region_exponent(Region::I, x, y, d, diagram).map(|e| (Region::I, e))).flatten(),
        Diagram::Projector => {
            let a = predicted_alpha(p, d).ok()?;
            Some((if p >= p_st(d) { Region::III } else { Region::I }, a))
        }
    }
}

/// Classifies `(1/s, 1/q)` and returns the bound's exponent.
pub fn classify_region(pt: &RegionPoint, d: usize) -> Result<RegionClass> {
    if d < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {d}")));
    }
    let (x, y) = (snap(pt.inv_s), snap(pt.inv_q));
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) || y > x {
        return Err(domain(format!("(1/s, 1/q) = ({}, {}) is not in the unit square with 1/q ≤ 1/s", pt.inv_s, pt.inv_q)));
    }
    let diagram = pt.diagram;
    let (xc, yc) = mirror(x, y);
    let outside = RegionClass { region: Region::Outside, exponent: None, boundary: false, candidates: Vec::new() };
    if xc == 0.5 && yc == 0.5 {
        return Ok(outside);
    }
    let mut lines = vec![xc + yc - 1.0, purple(xc, yc, d), yc - yellow(d), xc - 0.5, yc - 0.5, xc - yc];
    if let Some(g) = green(diagram, d) {
        lines.push(xc - yc - g);
    }
    if lines.iter().all(|l| l.abs() > ON_LINE) {
        let region = label(xc, yc, d, diagram);
        let exponent = region_exponent(region, xc, yc, d, diagram);
        return Ok(RegionClass {
            region: if exponent.is_some() { region } else { Region::Outside },
            exponent,
            boundary: false,
            candidates: Vec::new(),
        });
    }
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
    let mut candidates: Vec<(Region, f64)> = Vec::new();
    for (dx, dy) in dirs {
        let r = label(xc + NUDGE * dx, yc + NUDGE * dy, d, diagram);
        if let Some(e) = region_exponent(r, xc, yc, d, diagram) {
            if !candidates.contains(&(r, e)) {
                candidates.push((r, e));
            }
        }
    }
    if (xc + yc - 1.0).abs() <= ON_LINE {
        if let Some(c) = duality_value(yc, d, diagram) {
            if !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    match candidates.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
        Some(&(region, e)) => Ok(RegionClass { region, exponent: Some(e), boundary: true, candidates }),
        None => Ok(outside),
    }
}
