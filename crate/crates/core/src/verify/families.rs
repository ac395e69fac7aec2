//! Test families and the quantities measured on them.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{boost_action, IwasawaPoint, LorentzBoost, ModelParams};
use crate::norms::{lp_norm_iwasawa, lp_norm_polar, sphere_lp_norm, IwasawaBox, IwasawaGrid, NormResult};
use crate::operators::{
    c_inverse_modulus, extension_operator_iwasawa, restriction_operator_d2, smoothing_functional_spectral, PolarGridFunction, SmoothingExponent,
    SmoothingResult, SphereFunction, SphereGrid,
};
use crate::specfun::{plancherel_density, spherical_value};
use crate::transform::{radial_ft_at, PanelGrid, RadialFunction, RadialGrid, SpectralFunction};
use crate::verify::config::QuadratureOverrides;

/// Grid for `Φ_λ` on `[0, r_max]`: one panel per period, at most unit width.
pub fn phi_grid(lambda: f64, r_max: f64, order: usize) -> Result<Arc<RadialGrid>> {
    let width = (2.0 * PI / lambda).min(1.0);
    Ok(Arc::new(PanelGrid::uniform(r_max, (r_max / width).ceil() as usize, order)?))
}

/// `Φ_λ` sampled on `grid`.
pub fn phi_function(lambda: f64, mp: &ModelParams, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    let values = grid.nodes.iter().map(|&r| spherical_value(lambda, r, mp).map(|v| Complex64::new(v, 0.0))).collect::<Result<Vec<_>>>()?;
    RadialFunction::new(grid.clone(), values, *mp)
}

/// `‖Φ_λ‖_p` for each p.
pub fn phi_norms(phi: &RadialFunction, ps: &[f64]) -> Result<Vec<NormResult>> {
    ps.iter().map(|&p| lp_norm_polar(phi, p)).collect()
}

/// Concentrated radial input `e^{-(λr)²}` and the scalar `a` with `P_λ f = a Φ_λ`.
#[derive(Debug, Clone)]
pub struct RadialSample {
    pub lambda: f64,
    pub phi: RadialFunction,
    pub input: RadialFunction,
    pub coefficient: Complex64,
}

impl RadialSample {
    pub fn new(lambda: f64, width: f64, mp: &ModelParams, qd: &QuadratureOverrides) -> Result<Self> {
        Self::with_phi(lambda, width, phi_function(lambda, mp, &phi_grid(lambda, qd.r_max, qd.order)?)?, qd.order)
    }

    /// Input of width `width`, with `Φ_λ` already sampled.
    pub fn with_phi(lambda: f64, width: f64, phi: RadialFunction, order: usize) -> Result<Self> {
        let mp = phi.params;
        let fg = Arc::new(PanelGrid::uniform(7.0 * width, 14, order)?);
        let input = RadialFunction::from_real_fn(fg, mp, |r| (-(r / width).powi(2)).exp());
        let coefficient = radial_ft_at(&input, lambda)? * plancherel_density(lambda, &mp);
        Ok(RadialSample { lambda, phi, input, coefficient })
    }

    /// `‖P_λ f‖_p / ‖f‖_{p'}`.
    pub fn ratio(&self, p: f64) -> Result<f64> {
        let num = lp_norm_polar(&self.phi, p)?;
        if num.divergent {
            return Err(Error::Truncation { what: format!("Φ_λ is not in L^{p}"), estimate: f64::INFINITY });
        }
        let den = lp_norm_polar(&self.input, p / (p - 1.0))?.value;
        Ok(self.coefficient.norm() * num.value / den)
    }
}

/// Extension of the Knapp cap at `δ = λ^{-1/2}`, sampled over `s_min ≤ s ≤ 0`, `|v| ≤ 1/(λδ)`.
#[derive(Debug, Clone)]
pub struct KnappSample {
    pub lambda: f64,
    pub delta: f64,
    pub cap: SphereFunction,
    pub grid: IwasawaGrid,
    pub values: Vec<Complex64>,
    /// `min |E_λ φ_δ| / (λ^ρ δ^{d-1} e^{ρs})` over `|v| ≤ 0.01/(λδ)`.
    pub pointwise_constant: f64,
}

impl KnappSample {
    pub fn new(lambda: f64, d: usize, qd: &QuadratureOverrides) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(invalid("Knapp experiments are implemented for d = 2, 3"));
        }
        let mp = ModelParams::new(d)?;
        let delta = lambda.powf(-0.5);
        let order = qd.knapp_sphere_order.unwrap_or(if d == 2 { 16 } else { 12 });
        let sphere = Arc::new(SphereGrid::knapp(d, delta, order)?);
        let cap = SphereFunction::knapp_cap(sphere, delta);
        let reach = 1.0 / (lambda * delta);
        let s_panels = (-0.5 * qd.knapp_s_min).ceil() as usize;
        let grid = IwasawaGrid::radial(d, IwasawaBox { s_lo: qd.knapp_s_min, s_hi: 0.0, v_max: reach }, s_panels, 4, qd.order)?;
        let values = extension_operator_iwasawa(lambda, &cap, &grid.points(), &mp)?;

        let scale = lambda.powf(mp.rho) * delta.powi(d as i32 - 1);
        let probes: Vec<IwasawaPoint> = (0..=60)
            .flat_map(|i| {
                let s = qd.knapp_s_min * i as f64 / 60.0;
                [0.0, 0.005, 0.01].into_iter().map(move |t| {
                    let mut v = vec![0.0; d - 1];
                    v[0] = t * reach;
                    IwasawaPoint { s, v }
                })
            })
            .collect();
        let pv = extension_operator_iwasawa(lambda, &cap, &probes, &mp)?;
        let pointwise_constant = probes.iter().zip(&pv).map(|(pt, e)| e.norm() / (scale * (mp.rho * pt.s).exp())).fold(f64::INFINITY, f64::min);
        Ok(KnappSample { lambda, delta, cap, grid, values, pointwise_constant })
    }

    /// `‖E_λ φ_δ‖_{L^q(region)} / ‖φ_δ‖_{L^p(S)}`.
    pub fn ratio(&self, p: f64, q: f64) -> Result<f64> {
        Ok(lp_norm_iwasawa(&self.grid, &self.values, q)? / sphere_lp_norm(&self.cap, p)?)
    }
}

/// Smooth bump supported in `r < 1`.
pub fn unit_bump(r: f64) -> f64 {
    if r < 1.0 {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Relative sup-distance between `R_λ(f∘U)(ω)` and `|c(λ)|^{-1} F(ω)^{iλ-ρ} f̃(λ)` on H², where
/// f is the radial bump, U the boost of rapidity t and `F(ω) = [U^{-1}𝟎, b(ω)]`.
pub fn boost_covariance_error(t: f64, lambda: f64, n_omega: usize) -> Result<f64> {
    let mp = ModelParams::new(2)?;
    let u = LorentzBoost::new(t, 2);
    let reach = 1.0 + t.abs() + 0.2;
    let rg = Arc::new(PanelGrid::uniform(reach, (20.0 * reach).ceil() as usize, 16)?);
    let n_theta = ((lambda * reach.sinh() * 2.0 * PI / 0.4).ceil() as usize).max(64).next_power_of_two();
    let f = PolarGridFunction::from_fn(rg, n_theta, |r, th| {
        let x0 = t.cosh() * r.cosh() + t.sinh() * r.sinh() * th.cos();
        Complex64::new(unit_bump(x0.max(1.0).acosh()), 0.0)
    });
    let sphere = Arc::new(SphereGrid::circle(n_omega)?);
    let lhs = restriction_operator_d2(lambda, &f, &sphere)?;
    let fr = RadialFunction::from_real_fn(Arc::new(PanelGrid::uniform(1.25, 20, 16)?), mp, unit_bump);
    let ft = radial_ft_at(&fr, lambda)?;
    let scale = c_inverse_modulus(lambda, &mp);
    let mut err: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (w, l) in sphere.nodes.iter().zip(&lhs.values) {
        let (_, factor) = boost_action(&u, w);
        let want = ft * scale * Complex64::new(-mp.rho * factor.ln(), lambda * factor.ln()).exp();
        err = err.max((l - want).norm());
        peak = peak.max(want.norm());
    }
    Ok(err / peak)
}

/// `∫ F(ω)^{-ρp} |g(ω')|^p dω` on S¹ and the same integral after the change of variables
/// `ω' = U·ω`, `dω = F^{d-1} dω'`.
pub fn boost_denominator(t: f64, p: f64, g: impl Fn(&[f64]) -> f64, n: usize) -> Result<(f64, f64)> {
    let rho = 0.5;
    let sphere = SphereGrid::circle(n)?;
    let u = LorentzBoost::new(t, 2);
    let uinv = u.inverse();
    let mut direct = 0.0;
    let mut moved = 0.0;
    for (w, wt) in sphere.nodes.iter().zip(&sphere.weights) {
        let (image, factor) = boost_action(&u, w);
        direct += wt * factor.powf(-rho * p) * g(&image).abs().powf(p);
        // Here w plays the role of ω'; its preimage is U^{-1}·w.
        let (pre, _) = boost_action(&uinv, w);
        let (_, fpre) = boost_action(&u, &pre);
        moved += wt * fpre.powf(2.0 * rho - rho * p) * g(w).abs().powf(p);
    }
    Ok((direct.powf(1.0 / p), moved.powf(1.0 / p)))
}

/// Gaussian spectral bump at `l0` of width `sigma`, with its smoothing functional on H³.
pub fn smoothing_sample(l0: f64, sigma: f64, p: f64, d: usize) -> Result<(SmoothingResult, f64)> {
    let mp = ModelParams::new(d)?;
    let se = SmoothingExponent::new(p, d)?;
    let hi = l0 + 10.0 * sigma;
    let lg = Arc::new(PanelGrid::uniform(hi, (hi / (0.5 * sigma)).ceil() as usize, 16)?);
    let ft = SpectralFunction::from_fn(lg, mp, |l| Complex64::new((-(l - l0).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0));
    let xg = Arc::new(PanelGrid::uniform(30.0, (30.0 * (l0 / PI).max(8.0)).ceil() as usize, 16)?);
    let res = smoothing_functional_spectral(&ft, &se, &xg)?;
    let l2 = ft.plancherel_norm_sq().sqrt();
    Ok((res, l2))
}
