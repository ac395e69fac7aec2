//! Complex log-Gamma, the Harish-Chandra c-function and the spherical function Φ_λ.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::geometry::{gamma_half_integer, ModelParams};
use crate::quadrature::gauss_legendre;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// log Γ(z). Agrees with the principal branch up to multiples of 2πi in the left half-plane.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain("log-Gamma of a non-finite argument"));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(domain(format!("log-Gamma pole at z = {}", z.re)));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
        let ln_pi = Complex64::new(PI.ln(), 0.0);
        return ln_pi - ln_sin_pi(z) - log_gamma_unchecked(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new((PI * z.re).sin(), 0.0).ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{-iπz} (e^{2iπz} - 1) / (2i), with |e^{2iπz}| < 1.
    let i = Complex64::i();
    let e = (2.0 * i * PI * z).exp();
    -i * PI * z + (e - 1.0).ln() - (2.0 * i).ln()
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    log_gamma_unchecked(Complex64::new(x, 0.0)).re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFunctionEval {
    pub lambda: f64,
    pub c_value: Complex64,
    /// |c(λ)|^{-2}
    pub density: f64,
}

/// `A_d = 2^{2ρ-1} Γ(ρ+½) / √π`, the constant in front of Γ(iλ)/Γ(ρ+iλ).
pub fn c_prefactor(mp: &ModelParams) -> f64 {
    2f64.powf(2.0 * mp.rho - 1.0) * gamma_half_integer(mp.d) / PI.sqrt()
}

/// c(λ) = A_d Γ(iλ) / Γ(ρ + iλ).
pub fn harish_chandra_c(lambda: f64, mp: &ModelParams) -> Result<CFunctionEval> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("c(λ) requires λ > 0, got {lambda}")));
    }
    let ln_c = c_prefactor(mp).ln() + log_gamma_unchecked(Complex64::new(0.0, lambda)) - log_gamma_unchecked(Complex64::new(mp.rho, lambda));
    Ok(CFunctionEval { lambda, c_value: ln_c.exp(), density: (-2.0 * ln_c.re).exp() })
}

/// |c(λ)|^{-2}, extended evenly and by its limit 0 at λ = 0.
pub fn plancherel_density(lambda: f64, mp: &ModelParams) -> f64 {
    let l = lambda.abs();
    if l == 0.0 {
        return 0.0;
    }
    if mp.d == 3 {
        return l * l;
    }
    let ln_c = c_prefactor(mp).ln() + log_gamma_unchecked(Complex64::new(0.0, l)) - log_gamma_unchecked(Complex64::new(mp.rho, l));
    (-2.0 * ln_c.re).exp()
}

/// lim_{λ→∞} |c(λ)|^{-1} / λ^ρ, which equals 1/A_d.
pub fn c_inverse_growth_constant(mp: &ModelParams) -> f64 {
    1.0 / c_prefactor(mp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphericalMethod {
    ExactQuadrature,
    ClosedFormD3,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalEval {
    pub lambda: f64,
    pub r: f64,
    pub value: Complex64,
    pub method: SphericalMethod,
    /// Difference between the last two quadrature refinements (0 for closed forms).
    pub error_estimate: f64,
}

/// ln sh r without overflow.
pub(crate) fn ln_sinh(r: f64) -> f64 {
    if r > 20.0 {
        r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
    } else {
        r.sinh().ln()
    }
}

const PANEL_ORDER: usize = 8;
const MIN_PANELS: usize = 64;
const MAX_NODES: usize = 1 << 20;
const REFINE_TOL: f64 = 1e-11;

/// The non-oscillatory part of the integrand after `s = r - u^2`:
/// `2u (ch r - ch s)^{ρ-1} / (sh r)^{2ρ-1}`, with `ch r - ch s = 2 sh(r - u²/2) sh(u²/2)`.
struct PhiIntegrand {
    r: f64,
    rho: f64,
    ln_sh_r: f64,
}

impl PhiIntegrand {
    #[inline]
    fn weight(&self, u: f64) -> f64 {
        let h = 0.5 * u * u;
        let e = if self.rho == 1.0 {
            -self.ln_sh_r
        } else {
            (self.rho - 1.0) * (2.0 * (self.r - h).sinh() * h.sinh()).ln() - (2.0 * self.rho - 1.0) * self.ln_sh_r
        };
        2.0 * u * e.exp()
    }
}

fn spherical_prefactor(mp: &ModelParams) -> f64 {
    // 2 C_d with C_d = 2^{ρ-1} Γ(ρ+½) / (√π Γ(ρ)); the 2 folds the even integrand onto [0, r].
    2.0 * 2f64.powf(mp.rho - 1.0) * gamma_half_integer(mp.d) / (PI.sqrt() * gamma_half_integer(mp.d - 1))
}

fn initial_panels(lambda: f64, r: f64) -> usize {
    // The phase λ(r - u²) runs through λr/(2π) periods; require 12 nodes per period.
    let needed = (12.0 * lambda.abs() * r / (2.0 * PI) / PANEL_ORDER as f64).ceil() as usize;
    MIN_PANELS.max(needed)
}

fn phi_quadrature(lambda: f64, integrand: &PhiIntegrand, panels: usize) -> f64 {
    let rule = gauss_legendre(PANEL_ORDER);
    let umax = integrand.r.sqrt();
    let h = umax / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = h * (k as f64 + 0.5);
        let mut acc = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let u = mid + 0.5 * h * t;
            acc += w * integrand.weight(u) * (lambda * (integrand.r - u * u)).cos();
        }
        total += acc;
    }
    0.5 * h * total
}

/// Φ_λ(r) by Gauss–Legendre quadrature of the Laplace-type integral
/// `C_d (sh r)^{1-2ρ} ∫_{-r}^{r} e^{iλs} (ch r - ch s)^{ρ-1} ds`, after `s = r - u²`.
///
/// Panels double from 64 until successive results agree to 1e-11.
pub fn spherical_fn(lambda: f64, r: f64, mp: &ModelParams) -> Result<SphericalEval> {
    if !(r >= 0.0) || !r.is_finite() || !lambda.is_finite() {
        return Err(domain(format!("Φ_λ(r) needs finite λ and r ≥ 0, got λ={lambda}, r={r}")));
    }
    let done = |value: f64, err: f64| SphericalEval {
        lambda,
        r,
        value: Complex64::new(value, 0.0),
        method: SphericalMethod::ExactQuadrature,
        error_estimate: err,
    };
    if r == 0.0 {
        return Ok(done(1.0, 0.0));
    }
    let integrand = PhiIntegrand { r, rho: mp.rho, ln_sh_r: ln_sinh(r) };
    let pre = spherical_prefactor(mp);
    let mut panels = initial_panels(lambda, r);
    let mut prev = pre * phi_quadrature(lambda, &integrand, panels);
    loop {
        panels *= 2;
        let next = pre * phi_quadrature(lambda, &integrand, panels);
        let err = (next - prev).abs();
        if err <= REFINE_TOL {
            return Ok(done(next, err));
        }
        if panels * PANEL_ORDER * 2 > MAX_NODES {
            return Err(Error::Accuracy { what: format!("Φ_λ(r) at λ={lambda}, r={r}"), estimate: err });
        }
        prev = next;
    }
}

/// Closed form for d = 3: Φ_λ(r) = sin(λr) / (λ sh r), with series near λr = 0 and r = 0.
pub fn spherical_fn_d3(lambda: f64, r: f64) -> f64 {
    let x = lambda * r;
    let sinc = if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    };
    let r_over_sh = if r < 1e-3 {
        let r2 = r * r;
        1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0
    } else {
        r / r.sinh()
    };
    sinc * r_over_sh
}

/// Φ_λ(r) by the fastest exact route available: the closed form in d = 3, quadrature otherwise.
pub fn spherical_value(lambda: f64, r: f64, mp: &ModelParams) -> Result<f64> {
    if mp.d == 3 {
        return Ok(spherical_fn_d3(lambda, r));
    }
    Ok(spherical_fn(lambda, r, mp)?.value.re)
}

/// Leading term of Φ_λ(r) for large λ: `2^ρ Γ(ρ+½)/√π · cos(λr - ρπ/2) / (λ sh r)^ρ`.
pub fn spherical_asymptotic(lambda: f64, r: f64, mp: &ModelParams) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(domain(format!("asymptotic regime needs λ > 1, got {lambda}")));
    }
    if !(r > 1.0 / lambda) {
        return Err(domain(format!("asymptotic regime needs r > 1/λ, got r={r}")));
    }
    let rho = mp.rho;
    let amp = 2f64.powf(rho) * gamma_half_integer(mp.d) / PI.sqrt();
    Ok(amp * (lambda * r - rho * PI / 2.0).cos() / (lambda * r.sinh()).powf(rho))
}

/// Φ_λ(r_i) for all pairs of a spectral and a radial node set, stored row-major by radius.
#[derive(Debug, Clone)]
pub struct SphericalTable {
    pub lambdas: Vec<f64>,
    pub radii: Vec<f64>,
    values: Vec<f64>,
}

impl SphericalTable {
    /// For each radius one node set is refined at the largest λ and then shared by all λ.
    pub fn new(lambdas: &[f64], radii: &[f64], mp: &ModelParams) -> Result<Self> {
        let nl = lambdas.len();
        let mut values = vec![0.0; nl * radii.len()];
        let lmax = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let pre = spherical_prefactor(mp);
        for (i, &r) in radii.iter().enumerate() {
            let row = &mut values[i * nl..(i + 1) * nl];
            if mp.d == 3 || r == 0.0 {
                for (v, &l) in row.iter_mut().zip(lambdas) {
                    *v = spherical_fn_d3(l, r);
                }
                continue;
            }
            let integrand = PhiIntegrand { r, rho: mp.rho, ln_sh_r: ln_sinh(r) };
            let mut panels = initial_panels(lmax, r);
            let mut prev = phi_quadrature(lmax, &integrand, panels);
            loop {
                panels *= 2;
                let next = phi_quadrature(lmax, &integrand, panels);
                let err = pre * (next - prev).abs();
                if err <= REFINE_TOL {
                    break;
                }
                if panels * PANEL_ORDER * 2 > MAX_NODES {
                    return Err(Error::Accuracy { what: format!("Φ table row at r={r}"), estimate: err });
                }
                prev = next;
            }
            let rule = gauss_legendre(PANEL_ORDER);
            let h = r.sqrt() / panels as f64;
            let mut s_nodes = Vec::with_capacity(panels * PANEL_ORDER);
            let mut w_nodes = Vec::with_capacity(panels * PANEL_ORDER);
            for k in 0..panels {
                let mid = h * (k as f64 + 0.5);
                for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                    let u = mid + 0.5 * h * t;
                    s_nodes.push(r - u * u);
                    w_nodes.push(pre * 0.5 * h * w * integrand.weight(u));
                }
            }
            for (v, &l) in row.iter_mut().zip(lambdas) {
                *v = s_nodes.iter().zip(&w_nodes).map(|(s, w)| w * (l * s).cos()).sum();
            }
        }
        Ok(SphericalTable { lambdas: lambdas.to_vec(), radii: radii.to_vec(), values })
    }

    /// Φ at (radius index, spectral index).
    #[inline]
    pub fn get(&self, r_index: usize, lambda_index: usize) -> f64 {
        self.values[r_index * self.lambdas.len() + lambda_index]
    }

    pub fn row(&self, r_index: usize) -> &[f64] {
        let n = self.lambdas.len();
        &self.values[r_index * n..(r_index + 1) * n]
    }
}
