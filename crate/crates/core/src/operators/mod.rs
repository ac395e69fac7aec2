//! Operators at a fixed frequency: extension `E_λ`, restriction `R_λ`, the spectral projector
//! on radial data, radial multipliers, resolvent symbols and the smoothing functional.
//!
//! `E_λ g(x) = |c(λ)|^{-1} (1/ω_{d-1}) ∫ g(ω) conj(h_{λ,ω}(x)) dω` and
//! `R_λ f(ω) = |c(λ)|^{-1} ∫ f(x) h_{λ,ω}(x) dx`; they are adjoint for the normalized
//! sphere pairing `SphereFunction::pairing`.

pub mod resolvent;
pub mod smoothing;
pub mod sphere;

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{iwasawa_bracket, plane_wave_from_bracket, AmbientPoint, IwasawaPoint, ModelParams};
use crate::specfun::{plancherel_density, spherical_value};
use crate::transform::{radial_ft_at, MultiplierSymbol, RadialFunction, RadialGrid, RadialTransform, SpectralGrid};

pub use resolvent::{dresolvent_symbol, resolvent_split, resolvent_symbol, ResolventParams};
pub use smoothing::{smoothing_functional, smoothing_functional_spectral, time_l2_bruteforce, SmoothingExponent, SmoothingResult};
pub use sphere::{cap_angle, SphereFunction, SphereGrid};

/// Minimum number of samples per oscillation period accepted by the direct quadratures.
pub const NODES_PER_PERIOD: f64 = 12.0;

/// `|c(λ)|^{-1}`.
pub fn c_inverse_modulus(lambda: f64, mp: &ModelParams) -> f64 {
    plancherel_density(lambda, mp).sqrt()
}

/// `m(D) f`, computed as the inverse transform of `m f̃` on the spectral grid `lg`.
pub fn apply_multiplier(m: &MultiplierSymbol, f: &RadialFunction, lg: &Arc<SpectralGrid>) -> Result<RadialFunction> {
    RadialTransform::new(f.grid.clone(), lg.clone(), f.params)?.apply_symbol(m, f)
}

/// `P_λ f(r) = |c(λ)|^{-2} f̃(λ) Φ_λ(r)` for radial f.
pub fn spectral_projector_radial(lambda: f64, f: &RadialFunction) -> Result<RadialFunction> {
    if !(lambda > 0.0) {
        return Err(invalid("the projector needs λ > 0"));
    }
    let mp = f.params;
    let coef = radial_ft_at(f, lambda)? * plancherel_density(lambda, &mp);
    let values = f.grid.nodes.iter().map(|&r| spherical_value(lambda, r, &mp).map(|p| coef * p)).collect::<Result<Vec<_>>>()?;
    RadialFunction::new(f.grid.clone(), values, mp)
}

/// `P_λ f` evaluated on `out`, a grid other than the one carrying `f`.
pub fn spectral_projector_radial_on(lambda: f64, f: &RadialFunction, out: &Arc<RadialGrid>) -> Result<RadialFunction> {
    if !(lambda > 0.0) {
        return Err(invalid("the projector needs λ > 0"));
    }
    let mp = f.params;
    let coef = radial_ft_at(f, lambda)? * plancherel_density(lambda, &mp);
    let values = out.nodes.iter().map(|&r| spherical_value(lambda, r, &mp).map(|p| coef * p)).collect::<Result<Vec<_>>>()?;
    RadialFunction::new(out.clone(), values, mp)
}

fn check_sphere(g: &SphereFunction, mp: &ModelParams) -> Result<()> {
    if g.grid.d != mp.d {
        return Err(invalid(format!("sphere grid is for d = {}, model has d = {}", g.grid.d, mp.d)));
    }
    if !(2..=3).contains(&mp.d) {
        return Err(invalid("extension is implemented for d = 2, 3"));
    }
    Ok(())
}

/// Nodes where `g` is nonzero, together with their grid neighbours.
fn active_nodes(g: &SphereFunction) -> Vec<usize> {
    let zero = Complex64::new(0.0, 0.0);
    let mut mark: Vec<bool> = g.values.iter().map(|v| *v != zero).collect();
    for (a, b) in g.grid.neighbours() {
        if g.values[a] != zero || g.values[b] != zero {
            mark[a] = true;
            mark[b] = true;
        }
    }
    mark.iter().enumerate().filter(|(_, m)| **m).map(|(j, _)| j).collect()
}

/// Core of the extension operator for one point, given `ln[x, b(ω_j)]` at every node.
fn extend_one(lambda: f64, g: &SphereFunction, logs: &[f64], mp: &ModelParams) -> Result<Complex64> {
    let freq = lambda.hypot(mp.rho);
    let mut step: f64 = 0.0;
    for (a, b) in g.grid.neighbours() {
        if g.values[a] != Complex64::new(0.0, 0.0) || g.values[b] != Complex64::new(0.0, 0.0) {
            step = step.max(freq * (logs[a] - logs[b]).abs());
        }
    }
    if step > 2.0 * PI / NODES_PER_PERIOD {
        return Err(Error::Accuracy {
            what: format!("sphere grid under-resolves the plane wave at λ = {lambda} (phase step {step:.3})"),
            estimate: step,
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ((v, w), l) in g.values.iter().zip(&g.grid.weights).zip(logs) {
        if *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        // conj(h) = exp((-iλ - ρ) ln[x, b]).
        acc += v * plane_wave_from_bracket(-lambda, mp.rho, l.exp()) * *w;
    }
    Ok(acc * (c_inverse_modulus(lambda, mp) / mp.omega_sphere))
}

/// `E_λ g` at ambient points.
pub fn extension_operator(lambda: f64, g: &SphereFunction, points: &[AmbientPoint], mp: &ModelParams) -> Result<Vec<Complex64>> {
    check_sphere(g, mp)?;
    let active = active_nodes(g);
    let mut logs = vec![0.0; g.grid.len()];
    points
        .iter()
        .map(|x| {
            if x.dim() != mp.d {
                return Err(invalid("point dimension does not match the model"));
            }
            for &j in &active {
                logs[j] = x.bracket(&g.grid.nodes[j]).ln();
            }
            extend_one(lambda, g, &logs, mp)
        })
        .collect()
}

/// `E_λ g` at points given in Iwasawa coordinates, accurate for very negative `s`.
pub fn extension_operator_iwasawa(lambda: f64, g: &SphereFunction, points: &[IwasawaPoint], mp: &ModelParams) -> Result<Vec<Complex64>> {
    check_sphere(g, mp)?;
    let active = active_nodes(g);
    let mut logs = vec![0.0; g.grid.len()];
    points
        .iter()
        .map(|p| {
            if p.v.len() != mp.d - 1 {
                return Err(invalid("horocyclic coordinate has the wrong length"));
            }
            for &j in &active {
                logs[j] = iwasawa_bracket(p.s, &p.v, &g.grid.nodes[j]).ln();
            }
            extend_one(lambda, g, &logs, mp)
        })
        .collect()
}

/// A function on H² sampled on a polar tensor grid: composite Gauss–Legendre in r,
/// trapezoid with `n_theta` nodes in θ ∈ [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGridFunction {
    pub radial: Arc<RadialGrid>,
    pub n_theta: usize,
    /// Row-major: `values[i * n_theta + j]` at `(r_i, θ_j)`.
    pub values: Vec<Complex64>,
}

impl PolarGridFunction {
    pub fn from_fn(radial: Arc<RadialGrid>, n_theta: usize, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let h = 2.0 * PI / n_theta as f64;
        let values = radial.nodes.iter().flat_map(|&r| (0..n_theta).map(move |j| (r, h * j as f64))).map(|(r, t)| f(r, t)).collect();
        PolarGridFunction { radial, n_theta, values }
    }

    pub fn from_radial(f: &RadialFunction, n_theta: usize) -> Self {
        let values = f.values.iter().flat_map(|v| std::iter::repeat(*v).take(n_theta)).collect();
        PolarGridFunction { radial: f.grid.clone(), n_theta, values }
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// Quadrature weight of node `(i, j)` including the area element `sh r`.
    pub fn weight(&self, i: usize) -> f64 {
        self.radial.weights[i] * self.radial.nodes[i].sinh() * 2.0 * PI / self.n_theta as f64
    }

    /// Largest radius at which the samples are not negligible.
    pub fn support_radius(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut rmax: f64 = 0.0;
        for (i, &r) in self.radial.nodes.iter().enumerate() {
            let row = &self.values[i * self.n_theta..(i + 1) * self.n_theta];
            if row.iter().any(|v| v.norm() > 1e-14 * peak) {
                rmax = rmax.max(r);
            }
        }
        rmax
    }

    /// `∫ f ḡ dx` against values of `g` at the same nodes.
    pub fn inner_with(&self, g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.radial.len() {
            let w = self.weight(i);
            for j in 0..self.n_theta {
                let k = i * self.n_theta + j;
                acc += self.values[k] * g[k].conj() * w;
            }
        }
        acc
    }

    /// Ambient points of the grid, in storage order.
    pub fn points(&self) -> Vec<AmbientPoint> {
        let mut out = Vec::with_capacity(self.values.len());
        for &r in &self.radial.nodes {
            let (sh, ch) = (r.sinh(), r.cosh());
            for j in 0..self.n_theta {
                let (s, c) = self.theta(j).sin_cos();
                out.push(AmbientPoint::new(vec![ch, sh * c, sh * s]).expect("polar chart yields points of H²"));
            }
        }
        out
    }
}

/// `[x, b(ω)]` for `x = (ch r, sh r (cos θ, sin θ))`, free of cancellation.
fn polar_bracket_d2(r: f64, theta: f64, omega: &[f64]) -> f64 {
    let (s, c) = theta.sin_cos();
    let gap = (c - omega[0]).powi(2) + (s - omega[1]).powi(2);
    (-r).exp() + 0.5 * r.sinh() * gap
}

/// `R_λ f(ω) = |c(λ)|^{-1} ∫ f h_{λ,ω} dx` on H² by direct polar quadrature.
pub fn restriction_operator_d2(lambda: f64, f: &PolarGridFunction, sphere: &Arc<SphereGrid>) -> Result<SphereFunction> {
    if sphere.d != 2 {
        return Err(invalid("restriction by direct quadrature is implemented for d = 2"));
    }
    let mp = ModelParams::new(2)?;
    let rs = f.support_radius();
    // Angular phase speed of h is at most λ sh r; radially it is at most λ.
    let angular = lambda * rs.sinh() * 2.0 * PI / f.n_theta as f64;
    let edges = f.radial.edges();
    let radial = edges.windows(2).filter(|w| w[0] <= rs).map(|w| lambda * (w[1] - w[0]) / f.radial.order() as f64).fold(0.0, f64::max);
    let step = angular.max(radial);
    if step > 2.0 * PI / NODES_PER_PERIOD {
        return Err(Error::Accuracy { what: format!("polar grid under-resolves h at λ = {lambda} up to r = {rs:.3}"), estimate: step });
    }
    let scale = c_inverse_modulus(lambda, &mp);
    let mut out = vec![Complex64::new(0.0, 0.0); sphere.len()];
    for (i, &r) in f.radial.nodes.iter().enumerate() {
        let w = f.weight(i);
        for j in 0..f.n_theta {
            let v = f.values[i * f.n_theta + j];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let t = f.theta(j);
            for (o, om) in out.iter_mut().zip(&sphere.nodes) {
                *o += v * plane_wave_from_bracket(lambda, mp.rho, polar_bracket_d2(r, t, om)) * w;
            }
        }
    }
    out.iter_mut().for_each(|o| *o *= scale);
    SphereFunction::new(sphere.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{polar_to_ambient, PolarPoint};
    use crate::transform::PanelGrid;

    #[test]
    fn projector_on_another_grid_agrees_with_same_grid() {
        let mp = ModelParams::new(2).unwrap();
        let g = Arc::new(PanelGrid::uniform(8.0, 32, 16).unwrap());
        let f = RadialFunction::from_real_fn(g.clone(), mp, |r| (-r * r).exp());
        let same = spectral_projector_radial(3.0, &f).unwrap();
        let other = spectral_projector_radial_on(3.0, &f, &g).unwrap();
        assert_eq!(same.values, other.values);
        let coarse = Arc::new(PanelGrid::uniform(2.0, 4, 8).unwrap());
        let moved = spectral_projector_radial_on(3.0, &f, &coarse).unwrap();
        let a = same.values[0] / spherical_value(3.0, g.nodes[0], &mp).unwrap();
        for (r, v) in coarse.nodes.iter().zip(&moved.values) {
            assert!((v - a * spherical_value(3.0, *r, &mp).unwrap()).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn extension_of_one_is_spherical_function() {
        for d in [2, 3] {
            let mp = ModelParams::new(d).unwrap();
            let lambda = 3.0;
            let g = SphereFunction::constant(Arc::new(SphereGrid::uniform(d, 256).unwrap()), 1.0);
            let mut omega = vec![0.0; d];
            omega[d - 1] = 1.0;
            for r in [0.0, 0.3, 1.0, 2.0] {
                let x = polar_to_ambient(&PolarPoint { r, omega: omega.clone() }, &mp).unwrap();
                let e = extension_operator(lambda, &g, &[x], &mp).unwrap()[0];
                let want = c_inverse_modulus(lambda, &mp) * spherical_value(lambda, r, &mp).unwrap();
                assert!((e - want).norm() < 1e-10 * want.abs().max(1.0), "d={d} r={r}: {e} vs {want}");
            }
        }
    }

    #[test]
    fn extension_at_origin_is_the_mean() {
        let mp = ModelParams::new(2).unwrap();
        let grid = Arc::new(SphereGrid::circle(64).unwrap());
        let g = SphereFunction::from_fn(grid, |w| Complex64::new(1.0 + w[0] + w[1] * w[1], 0.5 * w[1]));
        let e = extension_operator(4.0, &g, &[AmbientPoint::origin(2)], &mp).unwrap()[0];
        let want = g.integral() * (c_inverse_modulus(4.0, &mp) / mp.omega_sphere);
        assert!((e - want).norm() < 1e-13);
    }

    #[test]
    fn underresolved_sphere_is_rejected() {
        let mp = ModelParams::new(2).unwrap();
        let g = SphereFunction::constant(Arc::new(SphereGrid::circle(16).unwrap()), 1.0);
        let x = polar_to_ambient(&PolarPoint { r: 3.0, omega: vec![1.0, 0.0] }, &mp).unwrap();
        assert!(matches!(extension_operator(20.0, &g, &[x], &mp), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn restriction_of_radial_function_is_constant() {
        let mp = ModelParams::new(2).unwrap();
        let rg = Arc::new(PanelGrid::uniform(2.5, 20, 16).unwrap());
        let bump = |r: f64| if r < 2.0 { (-1.0 / (1.0 - (r / 2.0).powi(2))).exp() } else { 0.0 };
        let f = RadialFunction::from_real_fn(rg, mp, bump);
        let lambda = 2.5;
        let want = radial_ft_at(&f, lambda).unwrap() * c_inverse_modulus(lambda, &mp);
        let sphere = Arc::new(SphereGrid::circle(24).unwrap());
        let rf = restriction_operator_d2(lambda, &PolarGridFunction::from_radial(&f, 128), &sphere).unwrap();
        for v in &rf.values {
            assert!((v - want).norm() < 1e-6 * want.norm(), "{v} vs {want}");
        }
    }

    fn small_bump(r: f64) -> f64 {
        if r < 1.5 {
            (-1.0 / (1.0 - (r / 1.5).powi(2))).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn restriction_and_extension_are_adjoint() {
        let mp = ModelParams::new(2).unwrap();
        let lambda = 2.5;
        let rg = Arc::new(PanelGrid::uniform(2.0, 8, 16).unwrap());
        let f = PolarGridFunction::from_fn(rg, 96, |r, t| {
            Complex64::new(small_bump(r) * (1.0 + 0.5 * r.sinh() * t.cos()), 0.3 * small_bump(r) * (2.0 * t).sin())
        });
        let sphere = Arc::new(SphereGrid::circle(128).unwrap());
        let g = SphereFunction::from_fn(sphere.clone(), |w| Complex64::new(1.0 + w[0] - 0.4 * w[1] * w[1], 0.2 * w[1]));
        let rf = restriction_operator_d2(lambda, &f, &sphere).unwrap();
        let lhs = rf.pairing(&g).unwrap();
        let eg = extension_operator(lambda, &g, &f.points(), &mp).unwrap();
        let rhs = f.inner_with(&eg);
        assert!((lhs - rhs).norm() < 1e-6 * lhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn projector_factors_through_the_sphere() {
        let mp = ModelParams::new(2).unwrap();
        let lambda = 2.5;
        let rg = Arc::new(PanelGrid::uniform(2.0, 8, 16).unwrap());
        let f = RadialFunction::from_real_fn(rg, mp, small_bump);
        let sphere = Arc::new(SphereGrid::circle(128).unwrap());
        let rf = restriction_operator_d2(lambda, &PolarGridFunction::from_radial(&f, 96), &sphere).unwrap();
        let p = spectral_projector_radial(lambda, &f).unwrap();
        let rs = [0.0, 0.4, 1.1, 1.9];
        let pts: Vec<AmbientPoint> = rs.iter().map(|&r| polar_to_ambient(&PolarPoint { r, omega: vec![0.6, 0.8] }, &mp).unwrap()).collect();
        let erf = extension_operator(lambda, &rf, &pts, &mp).unwrap();
        let scale = p.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (&r, e) in rs.iter().zip(&erf) {
            let want = radial_ft_at(&f, lambda).unwrap() * plancherel_density(lambda, &mp) * spherical_value(lambda, r, &mp).unwrap();
            assert!((e - want).norm() < 1e-5 * scale, "r={r}: {e} vs {want}");
        }
    }

    #[test]
    fn projector_pairing() {
        for d in [2, 3] {
            let mp = ModelParams::new(d).unwrap();
            let rg = Arc::new(PanelGrid::uniform(8.0, 32, 16).unwrap());
            let f = RadialFunction::from_real_fn(rg.clone(), mp, |r| (-r * r).exp());
            let g = RadialFunction::from_fn(rg, mp, |r| Complex64::new(1.0 + r, -0.5 * r * r) * (-1.5 * r * r).exp());
            for lambda in [0.7, 3.0] {
                let lhs = spectral_projector_radial(lambda, &f).unwrap().inner(&g);
                let rhs = radial_ft_at(&f, lambda).unwrap() * radial_ft_at(&g, lambda).unwrap().conj() * plancherel_density(lambda, &mp);
                assert!((lhs - rhs).norm() < 1e-6 * rhs.norm(), "d={d} λ={lambda}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn lambda_squared_multiplier_is_shifted_laplacian() {
        for d in [2, 3] {
            let mp = ModelParams::new(d).unwrap();
            let rg = Arc::new(PanelGrid::uniform(7.0, 28, 16).unwrap());
            let lg = Arc::new(PanelGrid::uniform(20.0, 20, 16).unwrap());
            let f = RadialFunction::from_real_fn(rg.clone(), mp, |r| (-r * r).exp());
            let m = MultiplierSymbol::new("λ²", |l| Complex64::new(l * l, 0.0));
            let got = apply_multiplier(&m, &f, &lg).unwrap();
            // -Δf - ρ²f with Δ = ∂² + (d-1) coth r ∂ on radial functions.
            let rho2 = mp.rho * mp.rho;
            let n = (d - 1) as f64;
            let want = |r: f64| {
                let e = (-r * r).exp();
                let lap = if r == 0.0 { -2.0 * d as f64 * e } else { (4.0 * r * r - 2.0) * e + n * (r.cosh() / r.sinh()) * (-2.0 * r * e) };
                -lap - rho2 * e
            };
            let err = rg.nodes.iter().zip(&got.values).map(|(&r, v)| (v - want(r)).norm()).fold(0.0, f64::max);
            assert!(err < 1e-4, "d={d}: {err}");

            let one = apply_multiplier(&MultiplierSymbol::new("1", |_| Complex64::new(1.0, 0.0)), &f, &lg).unwrap();
            let e1 = one.values.iter().zip(&f.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(e1 < 1e-6, "d={d}: identity {e1}");

            // z = (7 + 6i)², so the output decays like e^{-(ρ + 6) r}.
            let rp = ResolventParams::new(13.0, 84.0).unwrap();
            let z = rp.z();
            let long = Arc::new(PanelGrid::uniform(10.0, 40, 16).unwrap());
            let f = RadialFunction::from_real_fn(long, mp, |r| (-r * r).exp());
            let u = apply_multiplier(&resolvent_symbol(&rp), &f, &lg).unwrap();
            let back = apply_multiplier(&MultiplierSymbol::new("λ² - z", move |l| Complex64::new(l * l, 0.0) - z), &u, &lg).unwrap();
            let e2 = back.values.iter().zip(&f.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(e2 < 1e-6, "d={d}: resolvent round trip {e2}");
        }
    }
}
