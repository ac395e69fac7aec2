//! Experiment suites: each turns a `RunConfig` into result records.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{polar_to_ambient, AmbientPoint, ModelParams, PolarPoint};
use crate::norms::{fit_scaling_exponent, ScalingFit};
use crate::operators::{
    dresolvent_symbol, extension_operator, resolvent_split, resolvent_symbol, restriction_operator_d2, spectral_projector_radial, PolarGridFunction,
    ResolventParams, SphereFunction, SphereGrid,
};
use crate::specfun::{harish_chandra_c, plancherel_density, spherical_fn, spherical_fn_d3, spherical_value};
use crate::transform::{
    dyadic_projector_kernels, multiplier_kernel, radial_convolution, radial_ft_at, DyadicKind, MultiplierSymbol, PanelGrid, RadialFunction,
    RadialTransform, SpectralFunction,
};
use crate::verify::config::{QuadratureOverrides, RunConfig, Suite, DEFAULT_SLOPE_TOL};
use crate::verify::exponents::*;
use crate::verify::families::*;
use crate::verify::record::{record_from, ResultRecord};
use crate::verify::regions::{classify_region, Diagram, RegionPoint};

/// Slope tolerance of the `‖Φ_λ‖_p` and `E_λ 1` fits.
pub const RADIAL_SLOPE_TOL: f64 = 0.1;
/// Agreement required of boost covariance.
pub const BOOST_TOL: f64 = 1e-4;
/// Frequencies of the dyadic kernel bounds.
pub const DYADIC_LAMBDAS: [f64; 3] = [8.0, 16.0, 32.0];
/// Inner and outer radii of the dyadic band, in units of `2^k`.
pub const DYADIC_BAND: (f64, f64) = (0.5, 4.0);
/// Decay power of the inner-region bound.
pub const DYADIC_INNER_POWER: i32 = 10;
/// Tolerance of the closed-form special-function identities.
pub const SPECIAL_TOL: f64 = 1e-10;

/// Samples shared between suites of one run.
#[derive(Default)]
struct Samples {
    phi: RefCell<BTreeMap<(usize, u64), RadialFunction>>,
    knapp: RefCell<BTreeMap<(usize, u64), Rc<KnappSample>>>,
}

impl Samples {
    fn phi(&self, lambda: f64, d: usize, qd: &QuadratureOverrides) -> Result<RadialFunction> {
        let key = (d, lambda.to_bits());
        if let Some(f) = self.phi.borrow().get(&key) {
            return Ok(f.clone());
        }
        let f = phi_function(lambda, &ModelParams::new(d)?, &phi_grid(lambda, qd.r_max, qd.order)?)?;
        self.phi.borrow_mut().insert(key, f.clone());
        Ok(f)
    }

    fn knapp(&self, lambda: f64, d: usize, qd: &QuadratureOverrides) -> Result<Rc<KnappSample>> {
        let key = (d, lambda.to_bits());
        if let Some(k) = self.knapp.borrow().get(&key) {
            return Ok(k.clone());
        }
        let k = Rc::new(KnappSample::new(lambda, d, qd)?);
        self.knapp.borrow_mut().insert(key, k.clone());
        Ok(k)
    }
}

/// Runs a suite (or every suite) and returns its records sorted by id.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Vec<ResultRecord> {
    let cache = Samples::default();
    let mut out = Vec::new();
    for s in suite.members() {
        out.extend(match s {
            Suite::Identities => identities(cfg),
            Suite::Kernels => kernels(cfg),
            Suite::Extension => extension(cfg, &cache),
            Suite::Projector => projector(cfg, &cache),
            Suite::Smallfreq => smallfreq(cfg),
            Suite::Resolvent => resolvent(cfg),
            Suite::Smoothing => smoothing(cfg),
            Suite::All => Vec::new(),
        });
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Number formatting used inside record ids.
pub fn id_num(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

/// Runs `job` and stamps its records with the elapsed time when timing is on.
fn timed(cfg: &RunConfig, job: impl FnOnce() -> Vec<ResultRecord>) -> Vec<ResultRecord> {
    let start = Instant::now();
    let mut recs = job();
    if cfg.timing {
        let t = start.elapsed().as_secs_f64();
        recs.iter_mut().for_each(|r| r.wall_time_s = t);
    }
    recs
}

fn fit_record(id: String, experiment: &str, predicted: f64, tol: f64, fit: Result<ScalingFit>) -> ResultRecord {
    match fit {
        Ok(f) => ResultRecord::slope(id, experiment, predicted, &f, tol),
        Err(e) => ResultRecord::failed(id, experiment, predicted, tol, &e),
    }
}

fn fit_over<T>(samples: &[T], lambda: impl Fn(&T) -> f64, value: impl Fn(&T) -> Result<f64>) -> Result<ScalingFit> {
    let pts = samples.iter().map(|s| Ok((lambda(s), value(s)?))).collect::<Result<Vec<_>>>()?;
    fit_scaling_exponent(&pts)
}

fn sci_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn rel_sup(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

// ---------------------------------------------------------------- identities

fn identities(cfg: &RunConfig) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    let tol = cfg.quadrature.identity_tol;
    out.extend(timed(cfg, || {
        let res = (|| {
            let mp = ModelParams::new(3)?;
            let mut worst: f64 = 0.0;
            for i in 0..=12 {
                let l = 2f64.powf(i as f64 / 2.0);
                for r in [0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 3.5, 5.0, 7.5, 10.0] {
                    worst = worst.max((spherical_fn(l, r, &mp)?.value.re - spherical_fn_d3(l, r)).abs());
                }
            }
            Ok((worst, "Laplace integral vs sin(λr)/(λ sh r), λ ∈ [1, 64], r ∈ [0.01, 10]".to_string()))
        })();
        vec![record_from("identities/spherical-closed-form/d3", "special-functions", 0.0, SPECIAL_TOL, res)]
    }));
    out.extend(timed(cfg, || {
        let density = |d: usize, exact: fn(f64) -> f64| -> Result<(f64, String)> {
            let mp = ModelParams::new(d)?;
            let mut worst: f64 = 0.0;
            for i in 0..=24 {
                let l = 2f64.powf(-4.0 + 10.0 * i as f64 / 24.0);
                let want = exact(l);
                worst = worst.max((harish_chandra_c(l, &mp)?.density / want - 1.0).abs());
                worst = worst.max((plancherel_density(l, &mp) / want - 1.0).abs());
            }
            Ok((worst, "relative error over λ ∈ [1/16, 64]".into()))
        };
        vec![
            record_from(
                "identities/density/d2",
                "special-functions",
                0.0,
                SPECIAL_TOL,
                density(2, |l| std::f64::consts::PI * l * (std::f64::consts::PI * l).tanh()),
            ),
            record_from("identities/density/d3", "special-functions", 0.0, SPECIAL_TOL, density(3, |l| l * l)),
        ]
    }));
    for &d in &cfg.dims {
        out.extend(timed(cfg, || transform_identities(d, tol)));
        out.extend(timed(cfg, || exponent_identities(d)));
    }
    if cfg.dims.contains(&2) {
        out.extend(timed(cfg, || sphere_identities(tol)));
    }
    out
}

fn transform_identities(d: usize, tol: f64) -> Vec<ResultRecord> {
    let tag = format!("d{d}");
    let run = || -> Result<[(f64, String); 3]> {
        let mp = ModelParams::new(d)?;
        let rg = Arc::new(PanelGrid::uniform(8.0, 32, 16)?);
        let lg = Arc::new(PanelGrid::uniform(20.0, 20, 16)?);
        let t = RadialTransform::new(rg.clone(), lg, mp)?;
        let f = RadialFunction::from_real_fn(rg.clone(), mp, |r| (-r * r).exp());
        let k = RadialFunction::from_real_fn(rg.clone(), mp, |r| (1.0 + r * r) * (-2.0 * r * r).exp());
        let ft = t.forward(&f)?;
        let direct = f.l2_norm().powi(2);
        let planch = (ft.plancherel_norm_sq() / direct - 1.0).abs();
        let back = t.inverse(&ft)?;
        let round = rel_sup(&back.values, &f.values);
        let lhs = t.forward(&radial_convolution(&f, &k)?)?;
        let kk = t.forward(&k)?;
        let rhs: Vec<Complex64> = ft.values.iter().zip(&kk.values).map(|(a, b)| a * b).collect();
        let conv = rel_sup(&lhs.values, &rhs);
        Ok([
            (planch, "‖f̃‖² with Plancherel measure vs ‖f‖², f = e^{-r²}".into()),
            (round, "sup |inverse(forward f) - f| / sup |f|".into()),
            (conv, "(f*K)~ vs f̃ K̃, K = (1+r²)e^{-2r²}".into()),
        ])
    };
    let names = ["plancherel", "round-trip", "convolution"];
    match run() {
        Ok(vals) => names.iter().zip(vals).map(|(n, v)| record_from(format!("identities/{n}/{tag}"), "transform", 0.0, tol, Ok(v))).collect(),
        Err(e) => names.iter().map(|n| ResultRecord::failed(format!("identities/{n}/{tag}"), "transform", 0.0, tol, &e)).collect(),
    }
}

fn exponent_identities(d: usize) -> Vec<ResultRecord> {
    let pst = p_st(d);
    let (h, l) = alpha_branches(pst, d);
    let mut worst: f64 = 0.0;
    for p in [2.25, 2.5, 3.0, 4.5, 7.0, 20.0] {
        let res = predicted_offduality_projector(p / (p - 1.0), p, d).and_then(|o| Ok((o.exponent - predicted_alpha(p, d)?).abs()));
        worst = worst.max(res.unwrap_or(f64::INFINITY));
    }
    vec![
        ResultRecord::check(format!("identities/alpha-continuity/d{d}"), "exponents", 0.0, (h - l).abs(), 1e-12)
            .param("d", d as f64)
            .param("p_st", pst),
        ResultRecord::check(format!("identities/offduality-on-duality-line/d{d}"), "exponents", 0.0, worst, 1e-12).param("d", d as f64),
    ]
}

fn small_bump(r: f64) -> f64 {
    if r < 1.5 {
        (-1.0 / (1.0 - (r / 1.5).powi(2))).exp()
    } else {
        0.0
    }
}

fn sphere_identities(tol: f64) -> Vec<ResultRecord> {
    let lambda = 2.5;
    let adjoint = || -> Result<(f64, String)> {
        let mp = ModelParams::new(2)?;
        let rg = Arc::new(PanelGrid::uniform(2.0, 8, 16)?);
        let f = PolarGridFunction::from_fn(rg, 96, |r, t| {
            Complex64::new(small_bump(r) * (1.0 + 0.5 * r.sinh() * t.cos()), 0.3 * small_bump(r) * (2.0 * t).sin())
        });
        let sphere = Arc::new(SphereGrid::circle(128)?);
        let g = SphereFunction::from_fn(sphere.clone(), |w| Complex64::new(1.0 + w[0] - 0.4 * w[1] * w[1], 0.2 * w[1]));
        let lhs = restriction_operator_d2(lambda, &f, &sphere)?.pairing(&g)?;
        let rhs = f.inner_with(&extension_operator(lambda, &g, &f.points(), &mp)?);
        Ok(((lhs - rhs).norm() / lhs.norm(), format!("⟨R f, g⟩ = {lhs:.10}, ⟨f, E g⟩ = {rhs:.10}")))
    };
    let factor = || -> Result<(f64, String)> {
        let mp = ModelParams::new(2)?;
        let rg = Arc::new(PanelGrid::uniform(2.0, 8, 16)?);
        let f = RadialFunction::from_real_fn(rg, mp, small_bump);
        let sphere = Arc::new(SphereGrid::circle(128)?);
        let rf = restriction_operator_d2(lambda, &PolarGridFunction::from_radial(&f, 96), &sphere)?;
        let p = spectral_projector_radial(lambda, &f)?;
        let rs = [0.0, 0.4, 1.1, 1.9];
        let pts = rs.iter().map(|&r| polar_to_ambient(&PolarPoint { r, omega: vec![0.6, 0.8] }, &mp)).collect::<Result<Vec<AmbientPoint>>>()?;
        let erf = extension_operator(lambda, &rf, &pts, &mp)?;
        let scale = p.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let coef = radial_ft_at(&f, lambda)? * plancherel_density(lambda, &mp);
        let mut worst: f64 = 0.0;
        for (&r, e) in rs.iter().zip(&erf) {
            worst = worst.max((e - coef * spherical_value(lambda, r, &mp)?).norm() / scale);
        }
        Ok((worst, "E_λ R_λ f vs P_λ f at four radii".into()))
    };
    vec![
        record_from("identities/adjointness/d2", "operators", 0.0, tol, adjoint()).param("lambda", lambda),
        record_from("identities/projector-factorization/d2", "operators", 0.0, 10.0 * tol, factor()).param("lambda", lambda),
    ]
}

// ---------------------------------------------------------------- kernels

/// Constants of the dyadic kernel bounds at one Λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicConstants {
    /// Smallest A with `|K_{Λ,k}| ≤ A (Λ/sh(c2^k))^ρ` on the band and
    /// `≤ A (Λ/sh(c2^k))^ρ (2^{-k}Λ^{-1})^{10}` inside it.
    pub annular: f64,
    /// `sup |J_{Λ,k₀}| / Λ^{d-1}`.
    pub j_constant: f64,
    /// `sup_{r > C2^k} |K| / sup |K|`.
    pub outer: f64,
}

pub fn dyadic_constants(lambda: f64, d: usize) -> Result<DyadicConstants> {
    let mp = ModelParams::new(d)?;
    let rg = Arc::new(PanelGrid::uniform(4.5, 200, 8)?);
    let (c, cc) = DYADIC_BAND;
    let k0 = -(lambda.log2().round() as i32);
    if cc * 2f64.powi(k0 + 3) > rg.upper() {
        return Err(crate::error::invalid(format!("Λ = {lambda} is too small for the dyadic grid")));
    }
    let mut out = DyadicConstants { annular: 0.0, j_constant: 0.0, outer: 0.0 };
    for (piece, k) in dyadic_projector_kernels(lambda, k0..=k0 + 3, &mp, &rg)? {
        let peak = k.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if piece.kind == DyadicKind::J {
            out.j_constant = peak / lambda.powf(d as f64 - 1.0);
            continue;
        }
        let s = piece.scale();
        let envelope = (lambda / (c * s).sinh()).powf(mp.rho);
        let inner_decay = (1.0 / (s * lambda)).powi(DYADIC_INNER_POWER);
        for (&r, v) in rg.nodes.iter().zip(&k.values) {
            let a = v.norm();
            let ratio = if r < c * s {
                a / (envelope * inner_decay)
            } else if r <= cc * s {
                a / envelope
            } else {
                out.outer = out.outer.max(a / peak);
                continue;
            };
            out.annular = out.annular.max(ratio);
        }
    }
    Ok(out)
}

fn kernels(cfg: &RunConfig) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    for &d in &cfg.dims {
        out.extend(timed(cfg, || {
            let id = format!("kernels/calibration/d{d}");
            let res = (|| -> Result<(f64, String)> {
                let mp = ModelParams::new(d)?;
                let rg = Arc::new(PanelGrid::uniform(8.0, 32, 16)?);
                let lg = Arc::new(PanelGrid::uniform(24.0, 24, 16)?);
                let m = MultiplierSymbol::gaussian_pair(4.0, 1.0);
                let kernel = multiplier_kernel(&m, &rg, &mp)?;
                let oracle = RadialTransform::new(rg, lg.clone(), mp)?.inverse(&SpectralFunction::from_fn(lg, mp, |l| m.eval(l)))?;
                let i = (0..oracle.values.len()).max_by(|&a, &b| oracle.values[a].norm().total_cmp(&oracle.values[b].norm())).unwrap_or(0);
                let ratio = (kernel.values[i] / oracle.values[i]).re;
                let parity = if d % 2 == 1 { "odd" } else { "even" };
                Ok((rel_sup(&kernel.values, &oracle.values), format!("{parity}-dimensional formula; measured calibration {ratio:.12}")))
            })();
            vec![record_from(id, "kernels", 0.0, cfg.quadrature.identity_tol, res).param("d", d as f64)]
        }));
        out.extend(timed(cfg, || {
            let ids = ["annular-constant", "j-constant", "outer-support"].map(|n| format!("kernels/dyadic/d{d}/{n}"));
            let consts = DYADIC_LAMBDAS.iter().map(|&l| dyadic_constants(l, d)).collect::<Result<Vec<_>>>();
            match consts {
                Err(e) => ids.iter().map(|id| ResultRecord::failed(id.clone(), "kernels", 1.0, 1.0, &e)).collect(),
                Ok(cs) => {
                    let spread = |f: fn(&DyadicConstants) -> f64| {
                        let v: Vec<f64> = cs.iter().map(f).collect();
                        let (lo, hi) = (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(0.0, f64::max));
                        (if lo > 0.0 { hi / lo } else { f64::INFINITY }, v)
                    };
                    let (a, av) = spread(|c| c.annular);
                    let (b, bv) = spread(|c| c.j_constant);
                    let outer = cs.iter().map(|c| c.outer).fold(0.0, f64::max);
                    let band = format!("c = {}, C = {}, Λ ∈ {:?}", DYADIC_BAND.0, DYADIC_BAND.1, DYADIC_LAMBDAS);
                    vec![
                        ResultRecord::check(ids[0].clone(), "kernels", 1.0, a, 1.0)
                            .detail(format!("max/min over Λ; A(Λ) = {}; {band}", sci_list(&av))),
                        ResultRecord::check(ids[1].clone(), "kernels", 1.0, b, 1.0).detail(format!("max/min over Λ; B(Λ) = {}", sci_list(&bv))),
                        ResultRecord::check(ids[2].clone(), "kernels", 0.0, outer, 1e-10).detail("sup of |K| beyond C2^k relative to sup |K|"),
                    ]
                }
            }
            .into_iter()
            .map(|r| r.param("d", d as f64))
            .collect()
        }));
    }
    out
}

// ---------------------------------------------------------------- extension

/// The two p-values of the radial example: the midpoint of (2, 2d/(d-1)) and twice the endpoint.
pub fn radial_example_ps(d: usize) -> [f64; 2] {
    let pr = p_radial(d);
    [0.5 * (2.0 + pr), 2.0 * pr]
}

/// q-grid (decreasing towards 2) of the constant-blowup check.
pub const BLOWUP_QS: [f64; 3] = [3.0, 2.6, 2.3];
/// Rapidities and frequencies of the boost covariance check.
pub const BOOST_TS: [f64; 3] = [0.25, 0.5, 1.0];
pub const BOOST_LAMBDAS: [f64; 2] = [2.0, 5.0];
/// Rapidity grid of the degeneration check.
pub const DEGENERATION_TS: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0];

fn extension(cfg: &RunConfig, cache: &Samples) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    let qd = &cfg.quadrature;
    for &d in &cfg.dims {
        out.extend(timed(cfg, || {
            let [p1, p2] = radial_example_ps(d);
            let mut ps = vec![p1, p2, 2.0];
            ps.extend(cfg.q.iter().copied());
            ps.extend(BLOWUP_QS);
            let norms = cfg.lambdas.iter().map(|&l| phi_norms(&cache.phi(l, d, qd)?, &ps)).collect::<Result<Vec<_>>>();
            let norms = match norms {
                Ok(n) => n,
                Err(e) => return vec![ResultRecord::failed(format!("extension/phi-norm/d{d}"), "radial-example", 0.0, 0.0, &e)],
            };
            let slope_at = |j: usize, weight: &dyn Fn(f64) -> f64| -> Result<ScalingFit> {
                let pts: Vec<(f64, f64)> = cfg.lambdas.iter().zip(&norms).map(|(&l, n)| (l, n[j].value * weight(l))).collect();
                if let Some((l, _)) = cfg.lambdas.iter().zip(&norms).find(|(_, n)| n[j].divergent) {
                    return Err(Error::Truncation { what: format!("‖Φ_λ‖_{} diverges at λ = {l}", ps[j]), estimate: f64::INFINITY });
                }
                fit_scaling_exponent(&pts)
            };
            let mut recs = Vec::new();
            for (j, &p) in [p1, p2].iter().enumerate() {
                let pred = phi_norm_exponent(p, d).unwrap_or(f64::NAN);
                recs.push(
                    fit_record(
                        format!("extension/phi-norm/d{d}/p{}", id_num(p)),
                        "radial-example",
                        pred,
                        cfg.slope_tol(RADIAL_SLOPE_TOL),
                        slope_at(j, &|_| 1.0),
                    )
                    .param("d", d as f64)
                    .param("p", p),
                );
            }
            let div = &norms[0][2];
            recs.push(
                ResultRecord::check(
                    format!("extension/phi-norm/d{d}/p2-divergence"),
                    "radial-example",
                    1.0,
                    if div.divergent { 1.0 } else { 0.0 },
                    0.0,
                )
                .detail(format!("tail exponent {:?} at λ = {}", div.tail_exponent, cfg.lambdas[0]))
                .param("d", d as f64)
                .param("p", 2.0),
            );
            let Ok(mp) = ModelParams::new(d) else { return recs };
            for (i, &q) in cfg.q.iter().enumerate() {
                let j = 3 + i;
                let id = format!("extension/constant/d{d}/q{}", id_num(q));
                let rec = match extension_radial_exponent(q, d) {
                    Err(_) => {
                        let n = &norms[0][j];
                        ResultRecord::check(id, "extension-lower-bound", 1.0, if n.divergent { 1.0 } else { 0.0 }, 0.0)
                            .detail("E_λ 1 must leave L^q for q ≤ 2")
                    }
                    Ok(pred) => fit_record(
                        id,
                        "extension-lower-bound",
                        pred,
                        cfg.slope_tol(RADIAL_SLOPE_TOL),
                        slope_at(j, &|l| crate::operators::c_inverse_modulus(l, &mp)),
                    ),
                };
                recs.push(rec.param("d", d as f64).param("q", q).param("p", 2.0));
            }
            let base = 3 + cfg.q.len();
            let vals: Vec<f64> = (0..BLOWUP_QS.len()).map(|i| norms[0][base + i].value).collect();
            let drops = vals.windows(2).filter(|w| !(w[1] > w[0])).count();
            recs.push(
                ResultRecord::check(format!("extension/constant-blowup/d{d}"), "extension-lower-bound", 0.0, drops as f64, 0.0)
                    .detail(format!("‖Φ_λ‖_q at λ = {} for q = {:?}: {}", cfg.lambdas[0], BLOWUP_QS, sci_list(&vals)))
                    .param("d", d as f64),
            );
            recs
        }));
        out.extend(timed(cfg, || {
            let mut qs: Vec<f64> = cfg.q.iter().copied().filter(|&q| q > 2.0).collect();
            if d == 2 {
                qs.extend([4.0, 6.0]);
            }
            qs.sort_by(f64::total_cmp);
            qs.dedup();
            let samples = cfg.lambdas.iter().map(|&l| cache.knapp(l, d, qd)).collect::<Result<Vec<_>>>();
            let mut recs = Vec::new();
            match samples {
                Err(e) => recs.push(ResultRecord::failed(format!("extension/cap/d{d}"), "extension-lower-bound", 0.0, 0.0, &e)),
                Ok(samples) => {
                    for &q in &qs {
                        let fit = fit_over(&samples, |s| s.lambda, |s| s.ratio(2.0, q));
                        recs.push(
                            fit_record(
                                format!("extension/cap/d{d}/p2/q{}", id_num(q)),
                                "extension-lower-bound",
                                extension_knapp_exponent(2.0, q, d),
                                cfg.slope_tol(DEFAULT_SLOPE_TOL),
                                fit,
                            )
                            .param("d", d as f64)
                            .param("p", 2.0)
                            .param("q", q),
                        );
                    }
                    let cs: Vec<f64> = samples.iter().map(|s| s.pointwise_constant).collect();
                    let lo = cs.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = cs.iter().cloned().fold(0.0, f64::max);
                    recs.push(
                        ResultRecord::check(
                            format!("extension/cap-pointwise/d{d}"),
                            "extension-lower-bound",
                            1.0,
                            if lo > 0.0 { hi / lo } else { f64::INFINITY },
                            1.0,
                        )
                        .detail(format!("c(λ) = {} on |v| ≤ 0.01/(λδ), {} ≤ s ≤ 0", sci_list(&cs), qd.knapp_s_min))
                        .param("d", d as f64),
                    );
                }
            }
            recs
        }));
    }
    if cfg.dims.contains(&2) {
        out.extend(timed(cfg, || {
            let mut recs = Vec::new();
            for &t in &BOOST_TS {
                for &l in &BOOST_LAMBDAS {
                    let res = boost_covariance_error(t, l, 32).map(|e| (e, "relative sup over 32 directions".to_string()));
                    recs.push(
                        record_from(format!("extension/boost/d2/t{}/lambda{}", id_num(t), id_num(l)), "boost-covariance", 0.0, BOOST_TOL, res)
                            .param("t", t)
                            .param("lambda", l),
                    );
                }
            }
            recs
        }));
        out.extend(timed(cfg, || {
            let p = 1.5;
            let res = (|| -> Result<(f64, String)> {
                let mut vals = Vec::new();
                for &t in &DEGENERATION_TS {
                    let (a, b) = boost_denominator(t, p, |_| 1.0, 1024)?;
                    if (a / b - 1.0).abs() > 1e-8 {
                        return Err(Error::Consistency(format!("change of variables disagrees at t = {t}: {a} vs {b}")));
                    }
                    vals.push(a);
                }
                let rises = vals.windows(2).filter(|w| !(w[1] < w[0])).count();
                Ok((rises as f64, format!("D(t) for t = {DEGENERATION_TS:?}: {}", sci_list(&vals))))
            })();
            vec![record_from("extension/boost-degeneration/d2/p1.5", "boost-covariance", 0.0, 0.0, res).param("p", p)]
        }));
    }
    out
}

// ---------------------------------------------------------------- projector

fn projector(cfg: &RunConfig, cache: &Samples) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    let qd = &cfg.quadrature;
    let tol = cfg.slope_tol(DEFAULT_SLOPE_TOL);
    for &d in &cfg.dims {
        let ps = cfg.projector_ps(d);
        let tag = |p: f64, r: ResultRecord| {
            let a = predicted_alpha(p, d).unwrap_or(f64::NAN);
            let sharp = if (r.predicted - a).abs() < 1e-12 { 1.0 } else { 0.0 };
            r.param("d", d as f64).param("p", p).param("alpha", a).param("sharp", sharp)
        };
        out.extend(timed(cfg, || {
            let samples = cfg.lambdas.iter().map(|&l| RadialSample::with_phi(l, 1.0 / l, cache.phi(l, d, qd)?, qd.order)).collect::<Result<Vec<_>>>();
            ps.iter()
                .map(|&p| {
                    let id = format!("projector/d{d}/radial/p{}", id_num(p));
                    let pred = radial_projector_exponent(p, d);
                    let fit = samples.as_ref().map_err(Clone::clone).and_then(|s| fit_over(s, |s| s.lambda, |s| s.ratio(p)));
                    tag(p, fit_record(id, "projector-scaling", pred, tol, fit))
                })
                .collect()
        }));
        out.extend(timed(cfg, || {
            let samples = cfg.lambdas.iter().map(|&l| cache.knapp(l, d, qd)).collect::<Result<Vec<_>>>();
            ps.iter()
                .map(|&p| {
                    let id = format!("projector/d{d}/knapp/p{}", id_num(p));
                    let pred = knapp_projector_exponent(p, d);
                    let fit = samples.as_ref().map_err(Clone::clone).and_then(|s| fit_over(s, |s| s.lambda, |s| s.ratio(2.0, p).map(|r| r * r)));
                    tag(p, fit_record(id, "projector-scaling", pred, tol, fit))
                })
                .collect()
        }));
    }
    out
}

// ---------------------------------------------------------------- small frequencies

/// Outer radius used for `Φ_Λ` at small Λ.
pub const SMALLFREQ_R_MAX: f64 = 40.0;

pub fn smallfreq_fit(d: usize, lambdas: &[f64], p: f64, order: usize) -> Result<ScalingFit> {
    let mp = ModelParams::new(d)?;
    let samples = lambdas
        .iter()
        .map(|&l| RadialSample::with_phi(l, 1.0, phi_function(l, &mp, &phi_grid(l, SMALLFREQ_R_MAX, order)?)?, order))
        .collect::<Result<Vec<_>>>()?;
    fit_over(&samples, |s| s.lambda, |s| s.ratio(p))
}

/// Slope floor on H², where the density `πΛ tanh πΛ` bends away from Λ² first.
pub const SMALLFREQ_2D_TOL: f64 = 0.1;

fn smallfreq(cfg: &RunConfig) -> Vec<ResultRecord> {
    let p = 4.0;
    let mut out = Vec::new();
    for &d in &cfg.dims {
        out.extend(timed(cfg, || {
            let id = format!("smallfreq/d{d}/p{}", id_num(p));
            let lambdas = cfg.small_lambdas_for(d);
            let tol = if d == 2 { cfg.slope_tol(SMALLFREQ_2D_TOL) } else { cfg.slope_tol(DEFAULT_SLOPE_TOL) };
            let density = ModelParams::new(d)
                .and_then(|mp| fit_scaling_exponent(&lambdas.iter().map(|&l| (l, plancherel_density(l, &mp))).collect::<Vec<_>>()))
                .map(|f| format!("density slope {:.4}", f.slope))
                .unwrap_or_default();
            let rec = fit_record(id, "small-frequency", 2.0, tol, smallfreq_fit(d, lambdas, p, cfg.quadrature.order)).detail(density);
            vec![rec.param("d", d as f64).param("p", p)]
        }));
    }
    out
}

// ---------------------------------------------------------------- resolvent

fn resolvent(cfg: &RunConfig) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    out.extend(timed(cfg, || {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        let (mut inv, mut deriv, mut even, mut split) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..2000 {
            let tau = 10f64.powf(rng.gen_range(-2.0..3.0));
            let eps = 10f64.powf(rng.gen_range(-6.0..1.0));
            let l: f64 = rng.gen_range(-40.0..40.0);
            let Ok(rp) = ResolventParams::new(tau, eps) else { continue };
            let z = Complex64::new(l * l, 0.0) - rp.z();
            let m = resolvent_symbol(&rp);
            let dm = dresolvent_symbol(&rp);
            inv = inv.max((z * m.eval(l) - 1.0).norm());
            deriv = deriv.max((z * dm.eval(l) - l.abs()).norm() / l.abs().max(f64::MIN_POSITIVE));
            even = even
                .max((m.eval(l) - m.eval(-l)).norm() / m.eval(l).norm())
                .max((dm.eval(l) - dm.eval(-l)).norm() / dm.eval(l).norm().max(f64::MIN_POSITIVE));
            let (re, im) = resolvent_split(l, &rp);
            split = split.max((Complex64::new(re, im) - 1.0 / z).norm() / (1.0 / z).norm());
        }
        let tol = 8.0 * f64::EPSILON;
        vec![
            ResultRecord::check("resolvent/symbol/inverse", "resolvent-symbols", 0.0, inv, tol).detail("(λ² - z) m(λ) = 1 over 2000 seeded samples"),
            ResultRecord::check("resolvent/symbol/derivative", "resolvent-symbols", 0.0, deriv, tol).detail("(λ² - z) m_D(λ) = |λ|"),
            ResultRecord::check("resolvent/symbol/even", "resolvent-symbols", 0.0, even, 0.0),
            ResultRecord::check("resolvent/symbol/split", "resolvent-symbols", 0.0, split, tol).detail("(R_τ, I_τ) vs 1/(λ² - z)"),
        ]
    }));
    for &d in &cfg.dims {
        for (diagram, name) in [(Diagram::Resolvent, "fig1"), (Diagram::Dresolvent, "fig2")] {
            out.extend(timed(cfg, || region_records(d, diagram, name)));
        }
    }
    out
}

/// Region coordinates are snapped to multiples of 2^{-40}.
pub const REGION_LINE_TOL: f64 = 1e-11;

/// Closed-form duality-line exponent from the theorems, if they cover `p`.
fn duality_theorem(p: f64, d: usize, diagram: Diagram) -> Option<f64> {
    let df = d as f64;
    let r = 0.5 * (df - 1.0);
    let ip = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let upper = if d > 2 { 2.0 * df / (df - 2.0) } else { f64::INFINITY };
    match diagram {
        Diagram::Resolvent if p <= p_st(d) => Some(r * (0.5 - ip) - 0.5),
        Diagram::Resolvent if p <= upper => Some(0.5 * df * (1.0 - 2.0 * ip) - 1.0),
        Diagram::Dresolvent if 1.0 - 2.0 * ip <= 1.0 / df + 1e-12 => Some(r * (0.5 - ip)),
        _ => None,
    }
}

fn region_records(d: usize, diagram: Diagram, name: &str) -> Vec<ResultRecord> {
    let n = 20;
    let mut asym = 0usize;
    let mut line_err: f64 = 0.0;
    let mut line_mismatch = 0usize;
    let mut seen = BTreeSet::new();
    let mut errors = Vec::new();
    for i in 0..=n {
        for j in 0..=i {
            let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
            let a = classify_region(&RegionPoint { inv_s: x, inv_q: y, diagram }, d);
            let b = classify_region(&RegionPoint { inv_s: 1.0 - y, inv_q: 1.0 - x, diagram }, d);
            let (a, b) = match (a, b) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    errors.push(e.to_string());
                    continue;
                }
            };
            if a.region != b.region || a.exponent != b.exponent {
                asym += 1;
            }
            seen.insert(format!("{:?}", a.region));
            if i + j == n && 2 * j < n {
                let p = if j == 0 { f64::INFINITY } else { n as f64 / j as f64 };
                match (duality_theorem(p, d, diagram), a.exponent) {
                    (Some(t), Some(e)) => line_err = line_err.max((t - e).abs()),
                    (None, None) => {}
                    _ => line_mismatch += 1,
                }
            }
        }
    }
    let base = format!("resolvent/regions/{name}/d{d}");
    if let Some(e) = errors.first() {
        let err = Error::Consistency(e.clone());
        return vec![ResultRecord::failed(base, "regions", 0.0, 0.0, &err)];
    }
    let seen: Vec<String> = seen.into_iter().collect();
    vec![
        ResultRecord::check(format!("{base}/duality-symmetry"), "regions", 0.0, asym as f64, 0.0)
            .detail(format!("21×21 grid; regions met: {}", seen.join(" ")))
            .param("d", d as f64),
        ResultRecord::check(format!("{base}/duality-line"), "regions", 0.0, line_err + line_mismatch as f64, REGION_LINE_TOL)
            .detail(format!("{line_mismatch} points where theorem and classification disagree on coverage"))
            .param("d", d as f64),
    ]
}

// ---------------------------------------------------------------- smoothing

fn smoothing(cfg: &RunConfig) -> Vec<ResultRecord> {
    let (d, p, sigma) = (3, 3.0, 1.0);
    timed(cfg, || {
        let mut recs = Vec::new();
        let mut ratios = Vec::new();
        for &l0 in &cfg.lambdas {
            let id = format!("smoothing/d3/p3/oracle/lambda{}", id_num(l0));
            match smoothing_sample(l0, sigma, p, d) {
                Ok((res, l2)) => {
                    ratios.push(res.value / l2);
                    recs.push(
                        ResultRecord::check(id, "smoothing", 1.0, res.oracle_ratio, crate::operators::smoothing::ORACLE_TOL)
                            .detail(format!(
                                "functional/‖f‖₂ = {:.6e}; oracle radius {:.4}; tail share {:.2e}",
                                res.value / l2,
                                res.oracle_radius,
                                res.tail_fraction
                            ))
                            .param("lambda", l0),
                    );
                }
                Err(e) => recs.push(ResultRecord::failed(id, "smoothing", 1.0, crate::operators::smoothing::ORACLE_TOL, &e).param("lambda", l0)),
            }
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let spread = if ratios.len() == cfg.lambdas.len() && lo > 0.0 { hi / lo } else { f64::INFINITY };
        recs.push(
            ResultRecord::check("smoothing/d3/p3/variation", "smoothing", 1.0, spread, 1.0)
                .detail(format!("max/min of functional/‖f‖₂: {}", sci_list(&ratios)))
                .param("sigma", sigma),
        );
        recs
    })
}
