//! Radial Helgason transform, radial convolution and multiplier kernels.
//!
//! Conventions: `f̃(λ) = ω_{d-1} ∫_0^∞ f(r) Φ_λ(r) sh^{2ρ}r dr` and
//! `f(r) = κ_d ∫_0^∞ f̃(λ) Φ_λ(r) |c(λ)|^{-2} dλ` with `κ_d = 2^{d-1} / (2π ω_{d-1})`,
//! so that `‖f‖²_{L²} = κ_d ∫_0^∞ |f̃(λ)|² |c(λ)|^{-2} dλ`.

pub mod dyadic;
pub mod kernel;

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{sphere_area, ModelParams};
use crate::quadrature::{composite_from_edges, gauss_legendre, panel_interpolate, uniform_edges};
use crate::specfun::{plancherel_density, SphericalTable};

pub use dyadic::{chi, chi_hat, dyadic_projector_kernels, psi, psi_hat, DyadicKind, DyadicPiece};
pub use kernel::{multiplier_kernel, MultiplierSymbol, EVEN_KERNEL_CALIBRATION, ODD_KERNEL_CALIBRATION};

/// Composite Gauss–Legendre grid on `[edges[0], edges[last]]`.
///
/// Used both for radii (`RadialGrid`) and for spectral parameters (`SpectralGrid`).
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    edges: Vec<f64>,
    order: usize,
}

pub type RadialGrid = PanelGrid;
pub type SpectralGrid = PanelGrid;

impl PanelGrid {
    pub fn uniform(upper: f64, panels: usize, order: usize) -> Result<Self> {
        Self::from_edges(&uniform_edges(0.0, upper, panels), order)
    }

    /// Panels between consecutive `edges`, which must start at 0 and increase strictly.
    pub fn from_edges(edges: &[f64], order: usize) -> Result<Self> {
        if edges.len() < 2 || edges[0] != 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("grid edges must start at 0 and increase strictly"));
        }
        if !(1..=128).contains(&order) {
            return Err(invalid(format!("panel order {order} out of range")));
        }
        let (nodes, weights) = composite_from_edges(edges, order);
        Ok(PanelGrid { nodes, weights, edges: edges.to_vec(), order })
    }

    /// Panels of width growing geometrically from `first` near 0 up to at most `max_width`.
    pub fn graded(upper: f64, first: f64, max_width: f64, order: usize) -> Result<Self> {
        let mut edges = vec![0.0];
        let mut w = first;
        while *edges.last().unwrap() < upper {
            let next = (edges.last().unwrap() + w).min(upper);
            edges.push(next);
            w = (w * 1.5).min(max_width);
        }
        Self::from_edges(&edges, order)
    }

    /// Radial default: [0, 16] with 4096 nodes.
    pub fn default_radial() -> Self {
        Self::uniform(16.0, 256, 16).expect("valid default grid")
    }

    /// Spectral default for a target frequency Λ: [0, max(4Λ, 128)] with 4096 nodes.
    pub fn default_spectral(lambda: f64) -> Self {
        Self::uniform((4.0 * lambda).max(128.0), 256, 16).expect("valid default grid")
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interpolate samples on this grid at `x`; zero outside `[0, upper]`.
    pub fn interpolate(&self, values: &[Complex64], x: f64) -> Complex64 {
        if x > self.upper() || x < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        panel_interpolate(&self.edges, self.order, values, x)
    }
}

/// Samples of a radial function on a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<Complex64>,
    pub params: ModelParams,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>, params: ModelParams) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("sample count does not match the grid"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("radial samples must be finite"));
        }
        Ok(RadialFunction { grid, values, params })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, params: ModelParams, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&r| f(r)).collect();
        RadialFunction { grid, values, params }
    }

    pub fn from_real_fn(grid: Arc<RadialGrid>, params: ModelParams, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, params, |r| Complex64::new(f(r), 0.0))
    }

    /// Value at any radius by panel-wise interpolation; zero beyond the grid.
    pub fn eval(&self, r: f64) -> Complex64 {
        self.grid.interpolate(&self.values, r)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let values = self.values.iter().map(|v| v * a).collect();
        RadialFunction { grid: self.grid.clone(), values, params: self.params }
    }

    /// Pointwise sum; both functions must share the grid.
    pub fn add(&self, other: &RadialFunction) -> Result<Self> {
        if self.grid.nodes != other.grid.nodes {
            return Err(invalid("radial functions live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(RadialFunction { grid: self.grid.clone(), values, params: self.params })
    }

    /// `∫_{H^d} f ḡ dx` for radial f, g on the same grid.
    pub fn inner(&self, other: &RadialFunction) -> Complex64 {
        let mp = &self.params;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((r, w), (a, b)) in self.grid.nodes.iter().zip(&self.grid.weights).zip(self.values.iter().zip(&other.values)) {
            acc += a * b.conj() * (w * volume_density(*r, mp));
        }
        acc * mp.omega_sphere
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

/// `sh^{2ρ} r`.
#[inline]
pub fn volume_density(r: f64, mp: &ModelParams) -> f64 {
    r.sinh().powf(2.0 * mp.rho)
}

/// Samples of a function of the spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub grid: Arc<SpectralGrid>,
    pub values: Vec<Complex64>,
    pub params: ModelParams,
}

impl SpectralFunction {
    pub fn from_fn(grid: Arc<SpectralGrid>, params: ModelParams, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&l| f(l)).collect();
        SpectralFunction { grid, values, params }
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        self.grid.interpolate(&self.values, lambda.abs())
    }

    /// `κ_d ∫ |f̃|² |c|^{-2} dλ`, the squared L² norm of the function with this transform.
    pub fn plancherel_norm_sq(&self) -> f64 {
        let mp = &self.params;
        let s: f64 =
            self.grid.nodes.iter().zip(&self.grid.weights).zip(&self.values).map(|((l, w), v)| w * v.norm_sqr() * plancherel_density(*l, mp)).sum();
        mp.inversion_constant() * s
    }
}

const FORWARD_TAIL_TOL: f64 = 1e-10;
const INVERSE_TAIL_TOL: f64 = 1e-8;

/// Forward and inverse transforms between a fixed radial and spectral grid, sharing one Φ table.
#[derive(Debug, Clone)]
pub struct RadialTransform {
    pub radial: Arc<RadialGrid>,
    pub spectral: Arc<SpectralGrid>,
    pub params: ModelParams,
    table: SphericalTable,
    density: Vec<f64>,
}

impl RadialTransform {
    pub fn new(radial: Arc<RadialGrid>, spectral: Arc<SpectralGrid>, params: ModelParams) -> Result<Self> {
        let table = SphericalTable::new(&spectral.nodes, &radial.nodes, &params)?;
        let density = spectral.nodes.iter().map(|&l| plancherel_density(l, &params)).collect();
        Ok(RadialTransform { radial, spectral, params, table, density })
    }

    pub fn table(&self) -> &SphericalTable {
        &self.table
    }

    pub fn forward(&self, f: &RadialFunction) -> Result<SpectralFunction> {
        if f.grid.nodes != self.radial.nodes {
            return Err(invalid("function is not sampled on the transform's radial grid"));
        }
        let mp = &self.params;
        let weighted: Vec<Complex64> =
            f.values.iter().zip(&self.radial.nodes).zip(&self.radial.weights).map(|((v, &r), &w)| v * (w * volume_density(r, mp))).collect();
        check_radial_tail(f)?;
        let nl = self.spectral.len();
        let mut out = vec![Complex64::new(0.0, 0.0); nl];
        for (i, wv) in weighted.iter().enumerate() {
            if *wv == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, phi) in out.iter_mut().zip(self.table.row(i)) {
                *o += wv * phi;
            }
        }
        out.iter_mut().for_each(|v| *v *= mp.omega_sphere);
        Ok(SpectralFunction { grid: self.spectral.clone(), values: out, params: *mp })
    }

    pub fn inverse(&self, ft: &SpectralFunction) -> Result<RadialFunction> {
        if ft.grid.nodes != self.spectral.nodes {
            return Err(invalid("function is not sampled on the transform's spectral grid"));
        }
        let mp = &self.params;
        check_spectral_tail(ft)?;
        let kappa = mp.inversion_constant();
        let weighted: Vec<Complex64> =
            ft.values.iter().zip(&self.spectral.weights).zip(&self.density).map(|((v, w), rho)| v * (w * rho * kappa)).collect();
        let values = (0..self.radial.len()).map(|i| weighted.iter().zip(self.table.row(i)).map(|(w, p)| w * p).sum()).collect();
        Ok(RadialFunction { grid: self.radial.clone(), values, params: *mp })
    }

    /// `inverse(m · forward(f))`.
    pub fn apply_symbol(&self, m: &MultiplierSymbol, f: &RadialFunction) -> Result<RadialFunction> {
        let mut ft = self.forward(f)?;
        for (v, &l) in ft.values.iter_mut().zip(&self.spectral.nodes) {
            *v *= m.eval(l);
        }
        self.inverse(&ft)
    }
}

fn check_radial_tail(f: &RadialFunction) -> Result<()> {
    let mp = &f.params;
    let g = &f.grid;
    let total: f64 = g.nodes.iter().zip(&g.weights).zip(&f.values).map(|((r, w), v)| w * v.norm() * volume_density(*r, mp)).sum();
    let n = g.len();
    let last = n.saturating_sub(g.order());
    let tail = g.nodes[last..].iter().zip(&f.values[last..]).map(|(r, v)| v.norm() * volume_density(*r, mp)).fold(0.0, f64::max);
    let edge = g.upper() - g.edges()[g.edges().len() - 2];
    let est = tail * edge;
    if est > FORWARD_TAIL_TOL * total.max(f64::MIN_POSITIVE) {
        return Err(Error::Truncation { what: format!("radial samples do not decay by r_max = {}", g.upper()), estimate: est / total });
    }
    Ok(())
}

fn check_spectral_tail(ft: &SpectralFunction) -> Result<()> {
    let mp = &ft.params;
    let g = &ft.grid;
    let lmax = g.upper();
    let mut total = 0.0;
    let mut block = 0.0;
    for ((l, w), v) in g.nodes.iter().zip(&g.weights).zip(&ft.values) {
        let c = w * v.norm() * plancherel_density(*l, mp);
        total += c;
        if *l >= 0.5 * lmax {
            block += c;
        }
    }
    if block > INVERSE_TAIL_TOL * total {
        return Err(Error::Truncation { what: format!("spectral samples do not decay by λ_max = {lmax}"), estimate: block / total });
    }
    Ok(())
}

pub fn forward_radial_ft(f: &RadialFunction, lg: &Arc<SpectralGrid>) -> Result<SpectralFunction> {
    RadialTransform::new(f.grid.clone(), lg.clone(), f.params)?.forward(f)
}

pub fn inverse_radial_ft(ft: &SpectralFunction, rg: &Arc<RadialGrid>) -> Result<RadialFunction> {
    RadialTransform::new(rg.clone(), ft.grid.clone(), ft.params)?.inverse(ft)
}

/// f̃ at a single spectral parameter.
pub fn radial_ft_at(f: &RadialFunction, lambda: f64) -> Result<Complex64> {
    let grid = Arc::new(PanelGrid { nodes: vec![lambda], weights: vec![1.0], edges: vec![0.0, lambda.max(1e-300)], order: 1 });
    let t = SphericalTable::new(&grid.nodes, &f.grid.nodes, &f.params)?;
    check_radial_tail(f)?;
    let mp = &f.params;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ((r, w), v)) in f.grid.nodes.iter().zip(&f.grid.weights).zip(&f.values).enumerate() {
        acc += v * (w * volume_density(*r, mp) * t.get(i, 0));
    }
    Ok(acc * mp.omega_sphere)
}

/// Angular quadrature for radial convolution.
#[derive(Debug, Clone, Copy)]
pub struct ConvolutionOptions {
    pub angular_panels: usize,
    pub angular_order: usize,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        ConvolutionOptions { angular_panels: 8, angular_order: 16 }
    }
}

/// `(f * K)(r) = ∫_{H^d} f(x') K(d(x, x')) dx'` at the nodes of f's grid, for radial f and K.
///
/// In polar coordinates around 𝟎 the inner integral over S^{d-1} reduces to
/// `ω_{d-2} ∫_0^π K(d(r, r', θ)) sin^{d-2}θ dθ`, with `ch d = ch r ch r' - sh r sh r' cos θ`.
pub fn radial_convolution(f: &RadialFunction, k: &RadialFunction) -> Result<RadialFunction> {
    radial_convolution_with(f, k, ConvolutionOptions::default())
}

pub fn radial_convolution_with(f: &RadialFunction, k: &RadialFunction, opts: ConvolutionOptions) -> Result<RadialFunction> {
    if f.params != k.params {
        return Err(invalid("convolution factors use different model parameters"));
    }
    check_radial_tail(f)?;
    check_radial_tail(k)?;
    let mp = &f.params;
    let d = mp.d;
    let (thetas, tw) = composite_from_edges(&uniform_edges(0.0, std::f64::consts::PI, opts.angular_panels), opts.angular_order);
    let ang: Vec<(f64, f64)> =
        thetas.iter().zip(&tw).map(|(t, w)| ((0.5 * t).sin().powi(2), w * t.sin().powi(d as i32 - 2) * sphere_area(d - 1))).collect();
    let fmax = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let src: Vec<(f64, Complex64)> = f
        .grid
        .nodes
        .iter()
        .zip(&f.grid.weights)
        .zip(&f.values)
        .filter(|(_, v)| v.norm() > 1e-18 * fmax)
        .map(|((r, w), v)| (*r, v * (w * volume_density(*r, mp))))
        .collect();
    let kmax = k.grid.upper();
    let values = f
        .grid
        .nodes
        .iter()
        .map(|&r| {
            let shr = r.sinh();
            let mut acc = Complex64::new(0.0, 0.0);
            for &(rp, fw) in &src {
                let base = 2.0 * (0.5 * (r - rp)).sinh().powi(2);
                let cross = 2.0 * shr * rp.sinh();
                let mut inner = Complex64::new(0.0, 0.0);
                for &(s2, w) in &ang {
                    // ch d - 1 = 2 sh²((r - r')/2) + 2 sh r sh r' sin²(θ/2)
                    let q = base + cross * s2;
                    let dist = 2.0 * (0.5 * q).sqrt().asinh();
                    if dist <= kmax {
                        inner += k.eval(dist) * w;
                    }
                }
                acc += fw * inner;
            }
            acc
        })
        .collect();
    Ok(RadialFunction { grid: f.grid.clone(), values, params: *mp })
}

/// Gauss–Legendre nodes of a given order mapped to an interval, for callers building custom rules.
pub fn mapped_rule(a: f64, b: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let r = gauss_legendre(order);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    (r.nodes.iter().map(|t| m + h * t).collect(), r.weights.iter().map(|w| h * w).collect())
}
