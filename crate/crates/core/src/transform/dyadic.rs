//! Dyadic decomposition of the spectral point mass at ±Λ.
//!
//! `χ̂` is a smooth even bump equal to 1 on [-1, 1] and vanishing outside [-2, 2];
//! `χ` is its inverse Fourier transform (so `∫χ = χ̂(0) = 1`) and
//! `ψ = 2χ(2·) - χ`, whence `ψ̂(ξ) = χ̂(ξ/2) - χ̂(ξ)` lives on `1 ≤ |ξ| ≤ 4`.
//! The pieces
//! `J(λ) = 2^{k₀}[χ(2^{k₀}(λ-Λ)) + χ(2^{k₀}(λ+Λ))]` and
//! `K_k(λ) = 2^k[ψ(2^k(λ-Λ)) + ψ(2^k(λ+Λ))]`
//! telescope: `J + Σ_{k₀ ≤ k ≤ k₁} K_k = 2^{k₁+1}[χ(2^{k₁+1}(λ-Λ)) + ...] → δ_Λ + δ_{-Λ}`.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::geometry::ModelParams;
use crate::jet::Jet;
use crate::quadrature::integrate;

use super::kernel::{multiplier_kernel, MultiplierSymbol};
use super::{RadialFunction, RadialGrid};

/// Smooth step from 0 (t ≤ 0) to 1 (t ≥ 1).
fn smooth_step(t: Jet) -> Jet {
    let x = t.value();
    if x <= 0.0 {
        return Jet::constant(0.0);
    }
    if x >= 1.0 {
        return Jet::constant(1.0);
    }
    let f = (t.recip() * -1.0).exp();
    let g = ((Jet::constant(1.0) - t).recip() * -1.0).exp();
    f / (f + g)
}

/// χ̂ on jets (even in its argument).
pub fn chi_hat_jet(xi: Jet) -> Jet {
    let a = if xi.value() < 0.0 { -xi } else { xi };
    // 1 on |ξ| ≤ 1, 0 on |ξ| ≥ 2.
    smooth_step(Jet::constant(2.0) - a)
}

pub fn chi_hat(xi: f64) -> f64 {
    chi_hat_jet(Jet::constant(xi)).value()
}

pub fn psi_hat_jet(xi: Jet) -> Jet {
    chi_hat_jet(xi * 0.5) - chi_hat_jet(xi)
}

pub fn psi_hat(xi: f64) -> f64 {
    psi_hat_jet(Jet::constant(xi)).value()
}

/// `χ(x) = (1/π) ∫_0^2 χ̂(ξ) cos(xξ) dξ`.
pub fn chi(x: f64) -> f64 {
    let core = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    let panels = ((x.abs() * 12.0 / (2.0 * PI * 16.0)).ceil() as usize).max(16);
    let edge = integrate(|xi| chi_hat(xi) * (x * xi).cos(), 1.0, 2.0, panels, 16);
    (core + edge) / PI
}

/// `ψ(x) = 2χ(2x) - χ(x)`.
pub fn psi(x: f64) -> f64 {
    2.0 * chi(2.0 * x) - chi(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DyadicKind {
    /// The coarsest bump at k = k₀.
    J,
    /// An annular piece at scale 2^k.
    K,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicPiece {
    pub lambda: f64,
    pub k: i32,
    pub kind: DyadicKind,
}

impl DyadicPiece {
    /// `k₀ = -round(log₂ Λ)`, so `2^{k₀} Λ ∈ [2^{-1/2}, 2^{1/2}]`.
    pub fn k0(lambda: f64) -> i32 {
        -(lambda.log2().round() as i32)
    }

    pub fn j(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(invalid(format!("dyadic pieces need Λ > 1, got {lambda}")));
        }
        Ok(DyadicPiece { lambda, k: Self::k0(lambda), kind: DyadicKind::J })
    }

    pub fn annular(lambda: f64, k: i32) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(invalid(format!("dyadic pieces need Λ > 1, got {lambda}")));
        }
        if k < Self::k0(lambda) {
            return Err(invalid(format!("annular pieces need k ≥ k₀ = {}", Self::k0(lambda))));
        }
        Ok(DyadicPiece { lambda, k, kind: DyadicKind::K })
    }

    pub fn scale(&self) -> f64 {
        2f64.powi(self.k)
    }

    /// Value of the piece's symbol at λ.
    pub fn symbol_value(&self, l: f64) -> f64 {
        let s = self.scale();
        let f = match self.kind {
            DyadicKind::J => chi,
            DyadicKind::K => psi,
        };
        s * (f(s * (l - self.lambda)) + f(s * (l + self.lambda)))
    }

    /// Support of m̂ in r.
    pub fn fourier_support(&self) -> (f64, f64) {
        let s = self.scale();
        match self.kind {
            DyadicKind::J => (0.0, 2.0 * s),
            DyadicKind::K => (s, 4.0 * s),
        }
    }

    /// The symbol with its closed-form `m̂(r) = (2/√(2π)) cos(Λr) B(2^{-k} r)`.
    pub fn symbol(&self) -> MultiplierSymbol {
        let piece = *self;
        let inv = 1.0 / self.scale();
        let lam = self.lambda;
        let kind = self.kind;
        let pref = 2.0 / (2.0 * PI).sqrt();
        let label = match kind {
            DyadicKind::J => format!("J Λ={lam} k={}", self.k),
            DyadicKind::K => format!("K Λ={lam} k={}", self.k),
        };
        MultiplierSymbol::new(label, move |l| Complex64::new(piece.symbol_value(l), 0.0)).with_fourier_profile(
            self.fourier_support(),
            lam + 4.0 * inv,
            move |r| {
                let (_, c) = (r * lam).sin_cos();
                let b = match kind {
                    DyadicKind::J => chi_hat_jet(r * inv),
                    DyadicKind::K => psi_hat_jet(r * inv),
                };
                c * b * pref
            },
        )
    }
}

/// Kernels of `J_{Λ,k₀}` and `K_{Λ,k}` for `k ∈ k_range` on the radial grid.
pub fn dyadic_projector_kernels(
    lambda: f64,
    k_range: RangeInclusive<i32>,
    mp: &ModelParams,
    rg: &Arc<RadialGrid>,
) -> Result<Vec<(DyadicPiece, RadialFunction)>> {
    let mut out = Vec::new();
    let j = DyadicPiece::j(lambda)?;
    out.push((j, multiplier_kernel(&j.symbol(), rg, mp)?));
    for k in k_range {
        let p = DyadicPiece::annular(lambda, k)?;
        out.push((p, multiplier_kernel(&p.symbol(), rg, mp)?));
    }
    Ok(out)
}
