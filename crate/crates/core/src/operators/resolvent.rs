//! Symbols of the resolvent `(D² - z)^{-1}` and of `D (D² - z)^{-1}`, `z = τ + iε`.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::transform::MultiplierSymbol;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResolventParams {
    pub tau: f64,
    pub eps: f64,
}

impl ResolventParams {
    pub fn new(tau: f64, eps: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("τ must be positive, got {tau}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("ε must be positive, got {eps}")));
        }
        Ok(ResolventParams { tau, eps })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.tau, self.eps)
    }
}

/// `(R_τ(λ), I_τ(λ)) = ((λ²-τ), ε) / ((λ²-τ)² + ε²)`.
pub fn resolvent_split(lambda: f64, rp: &ResolventParams) -> (f64, f64) {
    let a = lambda * lambda - rp.tau;
    let den = a * a + rp.eps * rp.eps;
    (a / den, rp.eps / den)
}

/// `λ ↦ 1/(λ² - z)`.
pub fn resolvent_symbol(rp: &ResolventParams) -> MultiplierSymbol {
    let rp = *rp;
    MultiplierSymbol::new(format!("resolvent τ={} ε={}", rp.tau, rp.eps), move |l| {
        let (re, im) = resolvent_split(l, &rp);
        Complex64::new(re, im)
    })
}

/// `λ ↦ |λ|/(λ² - z)`, the even extension of the symbol of `D (D² - z)^{-1}`.
pub fn dresolvent_symbol(rp: &ResolventParams) -> MultiplierSymbol {
    let rp = *rp;
    MultiplierSymbol::new(format!("derivative resolvent τ={} ε={}", rp.tau, rp.eps), move |l| {
        let (re, im) = resolvent_split(l, &rp);
        Complex64::new(re, im) * l.abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn split_matches_inverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rp = ResolventParams::new(rng.gen_range(0.1..50.0), rng.gen_range(1e-3..2.0)).unwrap();
            let l: f64 = rng.gen_range(-20.0..20.0);
            let want = Complex64::new(1.0, 0.0) / (Complex64::new(l * l, 0.0) - rp.z());
            let got = resolvent_symbol(&rp).eval(l);
            assert!((got - want).norm() <= 4.0 * f64::EPSILON * want.norm());
            let dgot = dresolvent_symbol(&rp).eval(l);
            assert!((dgot - want * l.abs()).norm() <= 4.0 * f64::EPSILON * dgot.norm().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn worked_values() {
        let rp = ResolventParams::new(4.0, 0.1).unwrap();
        let v = resolvent_symbol(&rp).eval(2.5);
        assert!((v - Complex64::new(2.25, 0.1) / 5.0725).norm() < 1e-15);
        let peak = resolvent_symbol(&rp).eval(2.0).norm();
        assert!((peak - 10.0).abs() < 1e-12);
        for l in [1.9, 1.99, 2.01, 2.1] {
            assert!(resolvent_symbol(&rp).eval(l).norm() < peak);
        }
        assert_eq!(dresolvent_symbol(&rp).eval(0.0), Complex64::new(0.0, 0.0));
        assert!(ResolventParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn derivative_decomposition() {
        // λ R_τ(λ) = (λ-√τ)²(λ+√τ)/((λ²-τ)²+ε²) + √τ R_τ(λ).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rp = ResolventParams::new(rng.gen_range(1.0..30.0), rng.gen_range(1e-3..1.0)).unwrap();
            let l: f64 = rng.gen_range(0.0..15.0);
            let st = rp.tau.sqrt();
            let (re, _) = resolvent_split(l, &rp);
            let den = (l * l - rp.tau).powi(2) + rp.eps * rp.eps;
            let rhs = (l - st).powi(2) * (l + st) / den + st * re;
            assert!((l * re - rhs).abs() <= 1e-12 * (l * re).abs().max(st * re.abs()).max(1e-300));
        }
    }
}
