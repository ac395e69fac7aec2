//! Convolution kernels of even radial multipliers.
//!
//! With the unitary Fourier transform `m̂(r) = (2π)^{-1/2} ∫ m(λ) e^{-iλr} dλ` and
//! `L = (1/sh r) ∂_r`:
//! - odd d: `K(r) = (2π)^{-1/2} (-1/(2π))^ρ L^ρ m̂(r)`;
//! - even d: `K(r) = π^{-1/2} ∫_r^∞ (-1/(2π))^{d/2} (L^{d/2} m̂)(s) (ch s - ch r)^{-1/2} sh s ds`.
//!
//! `L^n` is expanded once into `Σ_j a_{n,j}(r) ∂^j` with coefficients that are sums of
//! `ch^a sh^e` monomials, so no numerical differentiation is involved.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::ModelParams;
use crate::jet::{Jet, ORDER};
use crate::quadrature::{composite_from_edges, gauss_legendre, uniform_edges};

use super::{RadialFunction, RadialGrid};

/// Ratio between the odd-d kernel formula and the inversion formula, measured in d = 3.
pub const ODD_KERNEL_CALIBRATION: f64 = 1.0;
/// Ratio between the even-d kernel formula and the inversion formula, measured in d = 2.
pub const EVEN_KERNEL_CALIBRATION: f64 = 1.0;

type SymbolFn = dyn Fn(f64) -> Complex64 + Send + Sync;
type ProfileFn = dyn Fn(Jet) -> Jet + Send + Sync;

/// Closed-form Fourier profile of a real even symbol.
#[derive(Clone)]
pub struct FourierProfile {
    jet: Arc<ProfileFn>,
    /// m̂ vanishes for |r| outside this interval.
    pub support: (f64, f64),
    /// Highest oscillation frequency of m̂, used to size quadratures.
    pub frequency: f64,
}

/// An even radial multiplier `m(λ)` with the data needed to synthesize its kernel.
#[derive(Clone)]
pub struct MultiplierSymbol {
    pub label: String,
    pub even: bool,
    /// Interval of λ ≥ 0 outside which m is negligible.
    pub band: Option<(f64, f64)>,
    eval: Arc<SymbolFn>,
    profile: Option<FourierProfile>,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("label", &self.label)
            .field("even", &self.even)
            .field("band", &self.band)
            .field("closed_form_fourier", &self.profile.is_some())
            .finish()
    }
}

impl MultiplierSymbol {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        MultiplierSymbol { label: label.into(), even: true, band: None, eval: Arc::new(eval), profile: None }
    }

    pub fn with_band(mut self, lo: f64, hi: f64) -> Self {
        self.band = Some((lo, hi));
        self
    }

    /// Attach a closed-form m̂ given as a function on jets.
    pub fn with_fourier_profile(mut self, support: (f64, f64), frequency: f64, jet: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        self.profile = Some(FourierProfile { jet: Arc::new(jet), support, frequency });
        self
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        (self.eval)(lambda)
    }

    pub fn profile(&self) -> Option<&FourierProfile> {
        self.profile.as_ref()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant {c}"), move |_| Complex64::new(c, 0.0))
    }

    /// `e^{-(λ-Λ)²/(2σ²)} + e^{-(λ+Λ)²/(2σ²)}`, with `m̂(r) = 2σ cos(Λr) e^{-σ²r²/2}`.
    pub fn gaussian_pair(center: f64, sigma: f64) -> Self {
        let g = move |l: f64| (-(l - center).powi(2) / (2.0 * sigma * sigma)).exp() + (-(l + center).powi(2) / (2.0 * sigma * sigma)).exp();
        let reach = 9.0 / sigma;
        MultiplierSymbol::new(format!("gaussian pair Λ={center} σ={sigma}"), move |l| Complex64::new(g(l), 0.0))
            .with_band(0.0, center + 9.0 * sigma)
            .with_fourier_profile((0.0, reach), center + 9.0 * sigma, move |r| {
                let (_, c) = (r * center).sin_cos();
                c * (r * r * (-0.5 * sigma * sigma)).exp() * (2.0 * sigma)
            })
    }

    /// Spot check of evenness at a few points.
    pub fn check_even(&self) -> bool {
        [0.37, 1.9, 7.3, 22.1].iter().all(|&l| {
            let (a, b) = (self.eval(l), self.eval(-l));
            (a - b).norm() <= 1e-12 * a.norm().max(1.0)
        })
    }
}

/// `coef · ch^a · sh^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Monomial {
    coef: f64,
    ch: i32,
    sh: i32,
}

/// `L^n = Σ_j a_j ∂^j`, stored as monomial lists per derivative order.
#[derive(Debug, Clone)]
struct OperatorExpansion {
    terms: Vec<Vec<Monomial>>,
}

impl OperatorExpansion {
    fn power(n: usize) -> Self {
        let mut terms: Vec<Vec<Monomial>> = vec![vec![Monomial { coef: 1.0, ch: 0, sh: 0 }]];
        for _ in 0..n {
            let mut next: Vec<Vec<Monomial>> = vec![Vec::new(); terms.len() + 1];
            for (j, monos) in terms.iter().enumerate() {
                for m in monos {
                    // d/dr (ch^a sh^e) = a ch^{a-1} sh^{e+1} + e ch^{a+1} sh^{e-1}; then divide by sh.
                    if m.ch != 0 {
                        push(&mut next[j], Monomial { coef: m.coef * m.ch as f64, ch: m.ch - 1, sh: m.sh });
                    }
                    if m.sh != 0 {
                        push(&mut next[j], Monomial { coef: m.coef * m.sh as f64, ch: m.ch + 1, sh: m.sh - 2 });
                    }
                    push(&mut next[j + 1], Monomial { coef: m.coef, ch: m.ch, sh: m.sh - 1 });
                }
            }
            terms = next;
        }
        OperatorExpansion { terms }
    }

    fn max_order(&self) -> usize {
        self.terms.len() - 1
    }

    /// Coefficients a_j(r) for j = 0..=n.
    fn coefficients(&self, r: f64) -> Vec<f64> {
        let (c, s) = (r.cosh(), r.sinh());
        self.terms.iter().map(|monos| monos.iter().map(|m| m.coef * c.powi(m.ch) * s.powi(m.sh)).sum()).collect()
    }
}

fn push(list: &mut Vec<Monomial>, m: Monomial) {
    if let Some(e) = list.iter_mut().find(|e| e.ch == m.ch && e.sh == m.sh) {
        e.coef += m.coef;
    } else {
        list.push(m);
    }
}

/// m̂ and its first n derivatives at r, either from the closed form or by λ-quadrature.
enum FourierSource<'a> {
    Closed(&'a FourierProfile),
    Quadrature { nodes: Vec<f64>, weighted: Vec<Complex64> },
}

impl FourierSource<'_> {
    fn derivatives(&self, r: f64, n: usize) -> Vec<Complex64> {
        match self {
            FourierSource::Closed(p) => {
                if r < p.support.0 || r > p.support.1 {
                    return vec![Complex64::new(0.0, 0.0); n + 1];
                }
                let j = (p.jet)(Jet::variable(r));
                (0..=n).map(|k| Complex64::new(j.derivative(k), 0.0)).collect()
            }
            FourierSource::Quadrature { nodes, weighted } => {
                // ∂^j m̂(r) = (2/√(2π)) ∫_0^∞ m(λ) λ^j cos(λr + jπ/2) dλ for even m.
                let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
                for (l, w) in nodes.iter().zip(weighted) {
                    let (s, c) = (l * r).sin_cos();
                    let mut p = 1.0;
                    for (j, o) in out.iter_mut().enumerate() {
                        let trig = match j % 4 {
                            0 => c,
                            1 => -s,
                            2 => -c,
                            _ => s,
                        };
                        *o += w * (p * trig);
                        p *= l;
                    }
                }
                out
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            FourierSource::Closed(p) => p.support,
            FourierSource::Quadrature { .. } => (0.0, f64::INFINITY),
        }
    }
}

const MAX_SPECTRAL_NODES: usize = 1 << 20;

fn quadrature_source(m: &MultiplierSymbol, reach: f64) -> Result<FourierSource<'static>> {
    let (lo, hi) = m.band.ok_or_else(|| invalid(format!("symbol '{}' has neither a closed-form m̂ nor a band", m.label)))?;
    let order = 16;
    // 12 nodes per period of cos(λ r) at the largest r needed.
    let per_unit = 12.0 * reach / (2.0 * PI);
    let panels = (((hi - lo) * per_unit / order as f64).ceil() as usize).max(8);
    if panels * order > MAX_SPECTRAL_NODES {
        return Err(Error::Accuracy { what: format!("m̂ of '{}' needs {} λ-nodes", m.label, panels * order), estimate: f64::NAN });
    }
    let (nodes, w) = composite_from_edges(&uniform_edges(lo, hi, panels), order);
    let pref = 2.0 / (2.0 * PI).sqrt();
    let weighted = nodes.iter().zip(&w).map(|(&l, &w)| m.eval(l) * (w * pref)).collect();
    Ok(FourierSource::Quadrature { nodes, weighted })
}

/// Kernel `K = F̃^{-1} m` on the nodes of `rg`, by the odd-d or even-d formula.
pub fn multiplier_kernel(m: &MultiplierSymbol, rg: &Arc<RadialGrid>, mp: &ModelParams) -> Result<RadialFunction> {
    if !m.even {
        return Err(invalid("kernel synthesis needs an even symbol"));
    }
    if mp.d > 6 {
        return Err(invalid("kernel synthesis is implemented for d ≤ 6"));
    }
    let odd = mp.d % 2 == 1;
    let n = if odd { (mp.d - 1) / 2 } else { mp.d / 2 };
    debug_assert!(n <= ORDER);
    let expansion = OperatorExpansion::power(n);
    let scale = (-1.0 / (2.0 * PI)).powi(n as i32);
    let rmax = rg.upper();
    let (source, frequency, cutoff) = match m.profile() {
        Some(p) => (FourierSource::Closed(p), p.frequency, p.support.1),
        None => {
            let reach = if odd { rmax } else { 2.0 * rmax };
            let hi = m.band.map(|b| b.1).unwrap_or(0.0);
            (quadrature_source(m, reach)?, hi, reach)
        }
    };
    let lm = |s: f64| -> Complex64 {
        let a = expansion.coefficients(s);
        let der = source.derivatives(s, expansion.max_order());
        a.iter().zip(&der).map(|(c, d)| d * *c).sum::<Complex64>() * scale
    };
    let values: Vec<Complex64> = if odd {
        let pref = ODD_KERNEL_CALIBRATION / (2.0 * PI).sqrt();
        rg.nodes.iter().map(|&r| lm(r) * pref).collect()
    } else {
        let (s_lo, _) = source.support();
        if matches!(source, FourierSource::Quadrature { .. }) {
            check_profile_decay(&lm, cutoff)?;
        }
        rg.nodes.iter().map(|&r| even_kernel_at(r, s_lo, cutoff, frequency, &lm)).collect()
    };
    RadialFunction::new(rg.clone(), values, *mp)
}

fn check_profile_decay(lm: &dyn Fn(f64) -> Complex64, cutoff: f64) -> Result<()> {
    let near = (0..16).map(|k| lm(cutoff * (0.05 + 0.06 * k as f64)).norm()).fold(0.0, f64::max);
    let far = (0..8).map(|k| lm(cutoff * (0.95 + 0.005 * k as f64)).norm()).fold(0.0, f64::max);
    if far > 1e-10 * near.max(f64::MIN_POSITIVE) {
        return Err(Error::Truncation { what: "m̂ has not decayed at the kernel cutoff".into(), estimate: far / near });
    }
    Ok(())
}

/// `(2/√π) ∫ G(s(u)) du` with `u = √(ch s - ch r)` over `s ∈ [max(r, s_lo), s_hi]`.
fn even_kernel_at(r: f64, s_lo: f64, s_hi: f64, frequency: f64, g: &dyn Fn(f64) -> Complex64) -> Complex64 {
    let sa = r.max(s_lo);
    if sa >= s_hi {
        return Complex64::new(0.0, 0.0);
    }
    let order = 16;
    let panels = (((s_hi - sa) * frequency / (2.0 * PI) * 12.0 / order as f64).ceil() as usize).max(12);
    let u_of = |s: f64| (2.0 * (0.5 * (s + r)).sinh() * (0.5 * (s - r)).sinh()).max(0.0).sqrt();
    let sh_half_r2 = 2.0 * (0.5 * r).sinh().powi(2);
    let rule = gauss_legendre(order);
    let mut total = Complex64::new(0.0, 0.0);
    let mut u0 = u_of(sa);
    for k in 1..=panels {
        let s1 = sa + (s_hi - sa) * k as f64 / panels as f64;
        let u1 = u_of(s1);
        let h = 0.5 * (u1 - u0);
        let mid = 0.5 * (u1 + u0);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let u = mid + h * t;
            // ch s - 1 = 2 sh²(r/2) + u²
            let s = 2.0 * ((0.5 * (sh_half_r2 + u * u)).sqrt()).asinh();
            total += g(s) * (w * h);
        }
        u0 = u1;
    }
    total * (EVEN_KERNEL_CALIBRATION * 2.0 / PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_of_first_powers() {
        // L m = m'/sh ; L² m = m''/sh² - ch m'/sh³.
        let l1 = OperatorExpansion::power(1);
        let r = 0.9f64;
        let c1 = l1.coefficients(r);
        assert!((c1[0]).abs() < 1e-15 && (c1[1] - 1.0 / r.sinh()).abs() < 1e-15);
        let c2 = OperatorExpansion::power(2).coefficients(r);
        assert!((c2[2] - 1.0 / r.sinh().powi(2)).abs() < 1e-14);
        assert!((c2[1] + r.cosh() / r.sinh().powi(3)).abs() < 1e-14);
    }

    #[test]
    fn zero_symbol_gives_zero_kernel() {
        let rg = Arc::new(RadialGrid::uniform(4.0, 8, 8).unwrap());
        for d in [2, 3] {
            let mp = ModelParams::new(d).unwrap();
            let m = MultiplierSymbol::constant(0.0).with_band(0.0, 4.0);
            let k = multiplier_kernel(&m, &rg, &mp).unwrap();
            assert!(k.values.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn closed_form_and_quadrature_profiles_agree() {
        let rg = Arc::new(RadialGrid::uniform(6.0, 12, 8).unwrap());
        let mp = ModelParams::new(3).unwrap();
        let closed = MultiplierSymbol::gaussian_pair(3.0, 1.0);
        let mut quad = closed.clone();
        quad.profile = None;
        let a = multiplier_kernel(&closed, &rg, &mp).unwrap();
        let b = multiplier_kernel(&quad, &rg, &mp).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-10, "{x} {y}");
        }
    }
}
