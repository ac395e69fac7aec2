//! Hyperboloid model of H^d: the Minkowski form, polar and Iwasawa charts,
//! plane waves and the boost action on the boundary sphere.
//!
//! Points of H^d are vectors `x = (x^0, ..., x^d)` with `[x, x] = 1` and `x^0 > 0`.
//! Boundary directions `ω ∈ S^{d-1}` enter through the light-cone vector `b(ω) = (1, ω)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Dimension-dependent constants.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    pub d: usize,
    pub rho: f64,
    pub omega_sphere: f64,
}

impl ModelParams {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {d}")));
        }
        let rho = (d as f64 - 1.0) / 2.0;
        Ok(ModelParams { d, rho, omega_sphere: sphere_area(d) })
    }

    /// Constant κ_d in the inversion formula `f(r) = κ_d ∫ f̃(λ) Φ_λ(r) |c(λ)|^{-2} dλ`
    /// for the transform `f̃(λ) = ω_{d-1} ∫ f Φ_λ sh^{2ρ} dr`.
    pub fn inversion_constant(&self) -> f64 {
        2f64.powi(self.d as i32 - 1) / (2.0 * PI * self.omega_sphere)
    }
}

/// Area of the unit sphere S^{n-1} in R^n; `sphere_area(1) = 2` counts the two points of S^0.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Γ(n/2) for a positive integer n.
pub(crate) fn gamma_half_integer(n: usize) -> f64 {
    let mut g = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while x < n as f64 / 2.0 - 1e-9 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `x^0 y^0 - x^1 y^1 - ... - x^d y^d`.
pub fn minkowski_form(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(invalid(format!("vectors of length {} and {} cannot be paired", x.len(), y.len())));
    }
    Ok(minkowski_unchecked(x, y))
}

pub(crate) fn minkowski_unchecked(x: &[f64], y: &[f64]) -> f64 {
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// A point on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    coords: Vec<f64>,
}

impl AmbientPoint {
    /// Renormalizes onto the hyperboloid when `|[x,x] - 1| < 1e-10`; larger drift is rejected.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(invalid("an ambient point needs at least 3 coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) || coords[0] <= 0.0 {
            return Err(invalid("ambient point must be finite with x^0 > 0"));
        }
        let q = minkowski_unchecked(&coords, &coords);
        let scale = coords[0].powi(2);
        if (q - 1.0).abs() > 1e-10 * scale.max(1.0) {
            return Err(Error::Consistency(format!("[x,x] = {q}, not on the hyperboloid")));
        }
        let s = q.sqrt();
        Ok(AmbientPoint { coords: coords.into_iter().map(|c| c / s).collect() })
    }

    pub fn origin(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[0] = 1.0;
        AmbientPoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `[x, b(ω)] = x^0 - x'·ω`, always positive on H^d.
    ///
    /// Evaluated as `1/(x^0 + n) + n|x̂ - ω|²/2` with `n = |x'|`, which stays accurate
    /// when ω points along x' far from the origin.
    pub fn bracket(&self, omega: &[f64]) -> f64 {
        let sp = &self.coords[1..];
        let n = sp.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n == 0.0 {
            return self.coords[0];
        }
        let gap: f64 = sp.iter().zip(omega).map(|(a, w)| (a / n - w).powi(2)).sum();
        1.0 / (self.coords[0] + n) + 0.5 * n * gap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub omega: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaPoint {
    pub s: f64,
    pub v: Vec<f64>,
}

pub fn geodesic_distance(x: &AmbientPoint, y: &AmbientPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(invalid("points live in different dimensions"));
    }
    let b = minkowski_unchecked(&x.coords, &y.coords);
    if b < 1.0 - 1e-10 * x.coords[0] * y.coords[0] {
        return Err(Error::Consistency(format!("[x,y] = {b} < 1")));
    }
    // Spatial difference form avoids cancellation at short range: ch d - 1 = 2 sh^2(d/2).
    let diff: Vec<f64> = x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect();
    let n2 = -minkowski_unchecked(&diff, &diff); // = 2(ch d - 1)
    if n2 <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (0.5 * n2.sqrt()).asinh())
}

pub fn polar_to_ambient(p: &PolarPoint, mp: &ModelParams) -> Result<AmbientPoint> {
    if p.omega.len() != mp.d {
        return Err(invalid("direction has the wrong length"));
    }
    if !(p.r >= 0.0) {
        return Err(invalid("polar radius must be non-negative"));
    }
    let norm = p.omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(invalid("direction is not a unit vector"));
    }
    let (sh, ch) = (p.r.sinh(), p.r.cosh());
    let mut coords = Vec::with_capacity(mp.d + 1);
    coords.push(ch);
    coords.extend(p.omega.iter().map(|w| sh * w));
    Ok(AmbientPoint { coords })
}

/// Inverse of the polar chart; at the origin the direction defaults to e_1.
pub fn ambient_to_polar(x: &AmbientPoint) -> PolarPoint {
    let sp = &x.coords[1..];
    let n = sp.iter().map(|a| a * a).sum::<f64>().sqrt();
    let r = n.asinh();
    let omega = if n > 0.0 {
        sp.iter().map(|a| a / n).collect()
    } else {
        let mut e = vec![0.0; sp.len()];
        e[0] = 1.0;
        e
    };
    PolarPoint { r, omega }
}

/// `n_v a_s · 𝟎 = (ch s + e^{-s}|v|^2/2, sh s + e^{-s}|v|^2/2, e^{-s} v)`.
pub fn iwasawa_to_ambient(p: &IwasawaPoint, mp: &ModelParams) -> Result<AmbientPoint> {
    if p.v.len() != mp.d - 1 {
        return Err(invalid("horocyclic coordinate has the wrong length"));
    }
    let e = (-p.s).exp();
    let v2: f64 = p.v.iter().map(|a| a * a).sum();
    let mut coords = Vec::with_capacity(mp.d + 1);
    coords.push(p.s.cosh() + 0.5 * e * v2);
    coords.push(p.s.sinh() + 0.5 * e * v2);
    coords.extend(p.v.iter().map(|a| e * a));
    Ok(AmbientPoint { coords })
}

/// `[x, b(ω)]` at an Iwasawa point, free of cancellation for very negative `s`.
///
/// With `ω = (ω_1, ω')`, `a = (1-ω_1)/2`, `b = (1+ω_1)/2`:
/// `[x,b(ω)] = a e^s + e^{-s} (b + a|v|^2 - v·ω')`, and the second bracket is a sum of squares.
pub fn iwasawa_bracket(s: f64, v: &[f64], omega: &[f64]) -> f64 {
    let w1 = omega[0];
    let a = 0.5 * (1.0 - w1);
    let b = 0.5 * (1.0 + w1);
    let v2: f64 = v.iter().map(|x| x * x).sum();
    let vw: f64 = v.iter().zip(&omega[1..]).map(|(x, y)| x * y).sum();
    // b + a|v|^2 - v·ω' = |√a v - ω'/(2√a)|^2 because |ω'|^2 = 4ab.
    let inner = if a > 1e-3 {
        let sa = a.sqrt();
        v.iter().zip(&omega[1..]).map(|(x, y)| (sa * x - y / (2.0 * sa)).powi(2)).sum::<f64>()
    } else {
        b + a * v2 - vw
    };
    s.exp() * a + (-s).exp() * inner
}

/// Hyperbolic plane wave `h_{λ,ω}(x) = [x, b(ω)]^{iλ - ρ}`, computed as `exp((iλ - ρ) ln[x,b])`.
pub fn plane_wave(lambda: f64, omega: &[f64], x: &AmbientPoint, mp: &ModelParams) -> Complex64 {
    plane_wave_from_bracket(lambda, mp.rho, x.bracket(omega))
}

/// `a^{iλ - ρ}` for a positive real `a`, using the real logarithm.
#[inline]
pub fn plane_wave_from_bracket(lambda: f64, rho: f64, a: f64) -> Complex64 {
    let l = a.ln();
    let m = (-rho * l).exp();
    let (s, c) = (lambda * l).sin_cos();
    Complex64::new(m * c, m * s)
}

/// Boost of rapidity `t` in the (x^0, x^1) plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzBoost {
    pub t: f64,
    pub matrix: Vec<Vec<f64>>,
}

impl LorentzBoost {
    pub fn new(t: f64, d: usize) -> Self {
        let n = d + 1;
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let (sh, ch) = (t.sinh(), t.cosh());
        m[0][0] = ch;
        m[1][1] = ch;
        m[0][1] = sh;
        m[1][0] = sh;
        LorentzBoost { t, matrix: m }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(0.0, d)
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.t, self.matrix.len() - 1)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_point(&self, x: &AmbientPoint) -> AmbientPoint {
        AmbientPoint { coords: self.apply(&x.coords) }
    }
}

/// Action on the boundary: `b(ω') = U b(ω) / (U b(ω))_0`, together with the factor
/// `[U^{-1} 𝟎, b(ω)]`, which coincides with `(U b(ω))_0`.
pub fn boost_action(u: &LorentzBoost, omega: &[f64]) -> (Vec<f64>, f64) {
    let mut b = Vec::with_capacity(omega.len() + 1);
    b.push(1.0);
    b.extend_from_slice(omega);
    let ub = u.apply(&b);
    let omega_prime = ub[1..].iter().map(|c| c / ub[0]).collect();
    let origin = AmbientPoint::origin(omega.len());
    let factor = u.inverse().apply_point(&origin).bracket(omega);
    (omega_prime, factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inversion_constant_low_dimensions() {
        for d in [2, 3] {
            let mp = ModelParams::new(d).unwrap();
            assert!((mp.inversion_constant() - 1.0 / (2.0 * PI * PI)).abs() < 1e-16);
        }
    }

    #[test]
    fn form_examples() {
        let o = AmbientPoint::origin(2);
        assert_eq!(minkowski_form(o.coords(), o.coords()).unwrap(), 1.0);
        assert_eq!(minkowski_form(o.coords(), &[1.0, 0.6, 0.8]).unwrap(), 1.0);
        let x = [1f64.cosh(), 1f64.sinh(), 0.0];
        assert!((minkowski_form(&x, o.coords()).unwrap() - 1.5430806348152437).abs() < 1e-15);
        assert!(minkowski_form(&x, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn distance_examples() {
        let mp = ModelParams::new(2).unwrap();
        let o = AmbientPoint::origin(2);
        assert_eq!(geodesic_distance(&o, &o).unwrap(), 0.0);
        let a = polar_to_ambient(&PolarPoint { r: 1.0, omega: vec![1.0, 0.0] }, &mp).unwrap();
        let b = polar_to_ambient(&PolarPoint { r: 1.0, omega: vec![-1.0, 0.0] }, &mp).unwrap();
        assert!((geodesic_distance(&a, &b).unwrap() - 2.0).abs() < 1e-14);
        let c = polar_to_ambient(&PolarPoint { r: 2.0, omega: vec![0.6, 0.8] }, &mp).unwrap();
        assert!((geodesic_distance(&c, &o).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_points_off_the_hyperboloid() {
        assert!(AmbientPoint::new(vec![1.0, 0.5, 0.0]).is_err());
        let p = AmbientPoint::new(vec![1.0 + 1e-12, 0.0, 0.0]).unwrap();
        assert_eq!(minkowski_unchecked(p.coords(), p.coords()), 1.0);
    }

    #[test]
    fn iwasawa_bracket_matches_ambient() {
        let mp = ModelParams::new(3).unwrap();
        let omega = [0.3, -0.4, (1.0f64 - 0.25).sqrt()];
        for &(s, v1, v2) in &[(0.4, 0.2, -1.0), (-3.0, 0.01, 0.02), (2.0, 5.0, 1.0)] {
            let x = iwasawa_to_ambient(&IwasawaPoint { s, v: vec![v1, v2] }, &mp).unwrap();
            let direct = x.bracket(&omega);
            let stable = iwasawa_bracket(s, &[v1, v2], &omega);
            assert!((direct - stable).abs() < 1e-12 * direct.max(1.0), "{direct} {stable}");
        }
        // North pole: [x, b] = e^{-s}.
        let np = [1.0, 0.0, 0.0];
        assert!((iwasawa_bracket(-20.0, &[3.0, 1.0], &np) - 20f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn north_pole_plane_wave() {
        let mp = ModelParams::new(2).unwrap();
        let (s, lambda) = (0.7, 3.0);
        let x = iwasawa_to_ambient(&IwasawaPoint { s, v: vec![0.4] }, &mp).unwrap();
        let h = plane_wave(lambda, &[1.0, 0.0], &x, &mp);
        let e = Complex64::new(mp.rho * s, -lambda * s).exp();
        assert!((h - e).norm() < 1e-14);
    }

    #[test]
    fn boost_factor_and_jacobian() {
        let t = 0.8;
        let u = LorentzBoost::new(t, 2);
        let (w, f) = boost_action(&LorentzBoost::identity(2), &[0.6, 0.8]);
        assert_eq!((w, f), (vec![0.6, 0.8], 1.0));
        let theta = 1.1f64;
        let (_, f) = boost_action(&u, &[theta.cos(), theta.sin()]);
        assert!((f - (t.cosh() + t.sinh() * theta.cos())).abs() < 1e-14);
        let angle = |th: f64| {
            let (w, _) = boost_action(&u, &[th.cos(), th.sin()]);
            w[1].atan2(w[0])
        };
        let h = 1e-5;
        let jac = (angle(theta + h) - angle(theta - h)) / (2.0 * h);
        assert!((jac - 1.0 / f).abs() < 1e-6);
    }
}
