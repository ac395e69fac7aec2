use std::sync::Arc;

use helgason::geometry::{
    ambient_to_polar, boost_action, geodesic_distance, iwasawa_bracket, iwasawa_to_ambient, minkowski_form, polar_to_ambient, AmbientPoint,
    IwasawaPoint, LorentzBoost, PolarPoint,
};
use helgason::norms::lp_norm_polar_truncated;
use helgason::specfun::{log_gamma_complex, plancherel_density, spherical_fn, spherical_value};
use helgason::transform::{PanelGrid, RadialFunction};
use helgason::verify::{classify_region, p_st, predicted_alpha, Diagram, RegionPoint, ResultRecord, RunConfig};
use helgason::ModelParams;
use num_complex::Complex64;
use proptest::prelude::*;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

fn direction(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d).prop_filter("nonzero", |v| v.iter().map(|a| a * a).sum::<f64>() > 1e-2).prop_map(unit)
}

fn polar(d: usize) -> impl Strategy<Value = PolarPoint> {
    (0.0f64..5.0, direction(d)).prop_map(|(r, omega)| PolarPoint { r, omega })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boosts_preserve_the_minkowski_form(t in -3.0f64..3.0, x in polar(3), y in polar(3)) {
        let mp = ModelParams::new(3).unwrap();
        let (x, y) = (polar_to_ambient(&x, &mp).unwrap(), polar_to_ambient(&y, &mp).unwrap());
        let u = LorentzBoost::new(t, 3);
        let before = minkowski_form(x.coords(), y.coords()).unwrap();
        let after = minkowski_form(&u.apply(x.coords()), &u.apply(y.coords())).unwrap();
        prop_assert!((before - after).abs() <= 1e-10 * before.abs().max(1.0) * (2.0 * t.abs()).exp());
        let ux = u.apply_point(&x);
        prop_assert!((minkowski_form(ux.coords(), ux.coords()).unwrap() - 1.0).abs() < 1e-8 * ux.coords()[0].powi(2));
    }

    #[test]
    fn polar_chart_round_trips(p in polar(3)) {
        prop_assume!(p.r > 1e-6);
        let mp = ModelParams::new(3).unwrap();
        let x = polar_to_ambient(&p, &mp).unwrap();
        let q = ambient_to_polar(&x);
        prop_assert!((q.r - p.r).abs() < 1e-12 * p.r.max(1.0));
        for (a, b) in q.omega.iter().zip(&p.omega) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let dist = geodesic_distance(&AmbientPoint::origin(3), &x).unwrap();
        prop_assert!((dist - p.r).abs() < 1e-10 * p.r.max(1.0));
    }

    #[test]
    fn iwasawa_chart_lands_on_the_hyperboloid(s in -6.0f64..6.0, v in prop::collection::vec(-3.0f64..3.0, 2), omega in direction(3)) {
        let mp = ModelParams::new(3).unwrap();
        let x = iwasawa_to_ambient(&IwasawaPoint { s, v: v.clone() }, &mp).unwrap();
        let c = x.coords();
        prop_assert!((minkowski_form(c, c).unwrap() - 1.0).abs() < 1e-12 * c[0].powi(2));
        let direct = x.bracket(&omega);
        let stable = iwasawa_bracket(s, &v, &omega);
        prop_assert!((direct - stable).abs() < 1e-9 * direct.max(1.0) * c[0]);
    }

    #[test]
    fn boundary_factor_is_a_cocycle(t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, omega in direction(2)) {
        let (u1, u2, u12) = (LorentzBoost::new(t1, 2), LorentzBoost::new(t2, 2), LorentzBoost::new(t1 + t2, 2));
        let (w2, f2) = boost_action(&u2, &omega);
        let (w12, f1) = boost_action(&u1, &w2);
        let (direct, f12) = boost_action(&u12, &omega);
        prop_assert!((f12 - f1 * f2).abs() < 1e-10 * f12);
        for (a, b) in direct.iter().zip(&w12) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn log_gamma_recurrence(re in 0.05f64..40.0, im in -40.0f64..40.0) {
        let z = Complex64::new(re, im);
        let step = log_gamma_complex(z + 1.0).unwrap() - log_gamma_complex(z).unwrap() - z.ln();
        let turns = step.im / (2.0 * std::f64::consts::PI);
        prop_assert!(step.re.abs() < 1e-11 * (1.0 + z.norm().ln().abs() * z.norm()));
        prop_assert!((turns - turns.round()).abs() < 1e-11 * z.norm().max(1.0));
    }

    #[test]
    fn spherical_function_is_real_even_and_bounded(l in 0.0f64..40.0, r in 0.0f64..8.0, d in 2usize..5) {
        let mp = ModelParams::new(d).unwrap();
        let e = spherical_fn(l, r, &mp).unwrap();
        prop_assert!(e.value.im.abs() < 1e-9);
        prop_assert!(e.value.re.abs() <= 1.0 + 1e-10);
        let m = spherical_fn(-l, r, &mp).unwrap();
        prop_assert!((e.value.re - m.value.re).abs() < 1e-10);
        if d == 3 {
            prop_assert!((spherical_value(l, r, &mp).unwrap() - e.value.re).abs() < 1e-9);
        }
    }

    #[test]
    fn density_increases(a in 1e-3f64..60.0, b in 1e-3f64..60.0, d in 2usize..7) {
        prop_assume!((a - b).abs() > 1e-9);
        let mp = ModelParams::new(d).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(plancherel_density(lo, &mp) < plancherel_density(hi, &mp));
    }

    #[test]
    fn holder_on_truncated_norms(p in 1.1f64..8.0, a in 0.2f64..3.0, b in 0.2f64..3.0, d in 2usize..4) {
        let mp = ModelParams::new(d).unwrap();
        let g = Arc::new(PanelGrid::uniform(6.0, 24, 12).unwrap());
        let f = RadialFunction::from_real_fn(g.clone(), mp, |r| (-a * r * r).exp());
        let h = RadialFunction::from_real_fn(g.clone(), mp, |r| 1.0 / (1.0 + b * r).powi(3));
        let fh = RadialFunction::from_real_fn(g, mp, |r| (-a * r * r).exp() / (1.0 + b * r).powi(3));
        let lhs = lp_norm_polar_truncated(&fh, 1.0).unwrap();
        let rhs = lp_norm_polar_truncated(&f, p).unwrap() * lp_norm_polar_truncated(&h, p / (p - 1.0)).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn alpha_is_continuous_at_the_stein_tomas_point(d in 2usize..9) {
        let pst = p_st(d);
        let left = predicted_alpha(pst * (1.0 - 1e-13), d).unwrap();
        let right = predicted_alpha(pst * (1.0 + 1e-13), d).unwrap();
        prop_assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn region_classification_respects_duality(i in 0u32..=1000, j in 0u32..=1000, d in 2usize..7, fig2 in any::<bool>()) {
        prop_assume!(j <= i);
        let diagram = if fig2 { Diagram::Dresolvent } else { Diagram::Resolvent };
        let (x, y) = (i as f64 / 1000.0, j as f64 / 1000.0);
        let a = classify_region(&RegionPoint { inv_s: x, inv_q: y, diagram }, d).unwrap();
        let b = classify_region(&RegionPoint { inv_s: 1.0 - y, inv_q: 1.0 - x, diagram }, d).unwrap();
        prop_assert_eq!(a.region, b.region);
        prop_assert_eq!(a.exponent, b.exponent);
        let again = classify_region(&RegionPoint { inv_s: x, inv_q: y, diagram }, d).unwrap();
        prop_assert_eq!(a, again);
    }

    #[test]
    fn config_round_trips(
        dims in prop::collection::vec(2usize..6, 1..4),
        lambdas in prop::collection::vec(0.5f64..200.0, 1..5),
        q in prop::collection::vec(1.0f64..12.0, 1..3),
        tol in prop::option::of(0.01f64..1.0),
        seed in any::<u64>(),
    ) {
        let cfg = RunConfig { dims, lambdas, q, tolerance: tol, seed, ..RunConfig::default() };
        prop_assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn record_pass_flag(pred in -3.0f64..3.0, meas in -3.0f64..3.0, tol in 0.0f64..1.0) {
        let r = ResultRecord::check("x", "y", pred, meas, tol);
        prop_assert_eq!(r.pass, (meas - pred).abs() <= tol);
    }
}
