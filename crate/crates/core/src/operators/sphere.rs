//! Quadrature grids on S^{d-1} for d = 2 and d = 3.
//!
//! Nodes are laid out on a tensor grid `(polar, azimuth)` in row-major order so that
//! neighbouring nodes can be enumerated for resolution checks. On the circle the only axis
//! is the angle θ, measured from the north pole `e_1`.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::sphere_area;
use crate::quadrature::{composite_from_edges, uniform_edges};

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub d: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// `(n_polar, n_azimuth)`; on the circle `n_azimuth = 1`.
    shape: (usize, usize),
    /// Whether the first axis wraps around.
    periodic_polar: bool,
}

impl SphereGrid {
    /// Trapezoid rule with `n` equispaced angles on S^1.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("a circle grid needs at least 3 nodes"));
        }
        let h = 2.0 * PI / n as f64;
        let nodes = (0..n).map(|j| angle_node(-PI + h * j as f64)).collect();
        Self::checked(2, nodes, vec![h; n], (n, 1), true)
    }

    /// Gauss–Legendre panels in θ between consecutive `edges`, which must run from -π to π.
    pub fn circle_panels(edges: &[f64], order: usize) -> Result<Self> {
        if edges.len() < 2 || (edges[0] + PI).abs() > 1e-12 || (edges[edges.len() - 1] - PI).abs() > 1e-12 {
            return Err(invalid("circle panels must cover [-π, π]"));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("circle panel edges must increase"));
        }
        let (theta, weights) = composite_from_edges(edges, order);
        let n = theta.len();
        Self::checked(2, theta.into_iter().map(angle_node).collect(), weights, (n, 1), true)
    }

    /// S^2: Gauss–Legendre panels in `t = cos θ_1` between `cos_edges` (from -1 to 1),
    /// trapezoid with `n_azimuth` nodes in the azimuth.
    pub fn sphere(cos_edges: &[f64], order: usize, n_azimuth: usize) -> Result<Self> {
        if cos_edges.len() < 2 || cos_edges[0] != -1.0 || cos_edges[cos_edges.len() - 1] != 1.0 {
            return Err(invalid("polar panels must cover cos θ ∈ [-1, 1]"));
        }
        if cos_edges.windows(2).any(|w| !(w[1] > w[0])) || n_azimuth < 3 {
            return Err(invalid("polar panel edges must increase and the azimuth needs 3 nodes"));
        }
        let (ts, wt) = composite_from_edges(cos_edges, order);
        let h = 2.0 * PI / n_azimuth as f64;
        let mut nodes = Vec::with_capacity(ts.len() * n_azimuth);
        let mut weights = Vec::with_capacity(ts.len() * n_azimuth);
        // Descending t puts the north pole first.
        for (t, w) in ts.iter().zip(&wt).rev() {
            let st = (1.0 - t * t).max(0.0).sqrt();
            for k in 0..n_azimuth {
                let (sp, cp) = (h * k as f64).sin_cos();
                nodes.push(vec![*t, st * cp, st * sp]);
                weights.push(w * h);
            }
        }
        Self::checked(3, nodes, weights, (ts.len(), n_azimuth), false)
    }

    /// A general-purpose grid with about `n` nodes per great circle.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        match d {
            2 => Self::circle(n),
            3 => {
                let panels = (n / 32).max(1);
                Self::sphere(&uniform_edges(-1.0, 1.0, 2 * panels), 16, n)
            }
            _ => Err(invalid(format!("sphere grids are available for d = 2, 3, not {d}"))),
        }
    }

    /// A grid with a panel break at the rim of the cap `|ω - NP| < δ`, refined inside the cap.
    pub fn knapp(d: usize, delta: f64, order: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("cap width must lie in (0, 1)"));
        }
        let rim = cap_angle(delta);
        match d {
            2 => {
                let inner = uniform_edges(-rim, rim, 4);
                let mut edges = uniform_edges(-PI, -rim, 8);
                edges.extend_from_slice(&inner[1..]);
                edges.extend_from_slice(&uniform_edges(rim, PI, 8)[1..]);
                Self::circle_panels(&edges, order)
            }
            3 => {
                let mut edges = uniform_edges(-1.0, rim.cos(), 4);
                edges.extend_from_slice(&uniform_edges(rim.cos(), 1.0, 2)[1..]);
                *edges.last_mut().unwrap() = 1.0;
                Self::sphere(&edges, order, 4 * order)
            }
            _ => Err(invalid(format!("sphere grids are available for d = 2, 3, not {d}"))),
        }
    }

    fn checked(d: usize, nodes: Vec<Vec<f64>>, weights: Vec<f64>, shape: (usize, usize), periodic_polar: bool) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        let area = sphere_area(d);
        if (total - area).abs() > 1e-10 * area {
            return Err(Error::Consistency(format!("sphere weights sum to {total}, expected {area}")));
        }
        Ok(SphereGrid { d, nodes, weights, shape, periodic_polar })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest angular gap between neighbouring nodes.
    pub fn max_spacing(&self) -> f64 {
        self.neighbours().map(|(a, b)| chord_angle(&self.nodes[a], &self.nodes[b])).fold(0.0, f64::max)
    }

    /// Pairs of adjacent nodes along each grid axis.
    pub fn neighbours(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (np, na) = self.shape;
        let polar = (0..np).flat_map(move |i| (0..na).map(move |k| (i, k))).filter_map(move |(i, k)| {
            let next = if i + 1 < np {
                i + 1
            } else if self.periodic_polar {
                0
            } else {
                return None;
            };
            Some((i * na + k, next * na + k))
        });
        let azimuth =
            (0..np).flat_map(move |i| (0..na).map(move |k| (i, k))).filter(move |_| na > 1).map(move |(i, k)| (i * na + k, i * na + (k + 1) % na));
        polar.chain(azimuth)
    }
}

fn angle_node(theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    vec![c, s]
}

/// Angle between two unit vectors, accurate for nearby vectors.
pub fn chord_angle(a: &[f64], b: &[f64]) -> f64 {
    let c: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    2.0 * (0.5 * c).min(1.0).asin()
}

/// Polar angle of the rim of `{|ω - NP| < δ}`.
pub fn cap_angle(delta: f64) -> f64 {
    2.0 * (0.5 * delta).asin()
}

/// Complex samples on a sphere grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFunction {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<Complex64>,
}

impl SphereFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("sample count does not match the sphere grid"));
        }
        Ok(SphereFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|w| f(w)).collect();
        SphereFunction { grid, values }
    }

    pub fn constant(grid: Arc<SphereGrid>, c: f64) -> Self {
        Self::from_fn(grid, |_| Complex64::new(c, 0.0))
    }

    /// Indicator of the cap `{|ω - NP| < δ}`.
    pub fn knapp_cap(grid: Arc<SphereGrid>, delta: f64) -> Self {
        Self::from_fn(grid, |w| {
            let gap = (w[0] - 1.0).powi(2) + w[1..].iter().map(|x| x * x).sum::<f64>();
            Complex64::new(if gap < delta * delta { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// `(1/ω_{d-1}) ∫ g h̄ dω`, the pairing against which restriction and extension are adjoint.
    pub fn pairing(&self, other: &SphereFunction) -> Result<Complex64> {
        if self.grid.nodes != other.grid.nodes {
            return Err(invalid("sphere functions live on different grids"));
        }
        let s: Complex64 = self.values.iter().zip(&other.values).zip(&self.grid.weights).map(|((a, b), w)| a * b.conj() * *w).sum();
        Ok(s / sphere_area(self.grid.d))
    }

    /// `∫ g dω`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| v * *w).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_nodes() {
        for g in [
            SphereGrid::circle(64).unwrap(),
            SphereGrid::knapp(2, 0.1, 16).unwrap(),
            SphereGrid::uniform(3, 64).unwrap(),
            SphereGrid::knapp(3, 0.2, 12).unwrap(),
        ] {
            for w in &g.nodes {
                let n: f64 = w.iter().map(|x| x * x).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
            assert!(g.max_spacing() < 0.5);
        }
    }

    #[test]
    fn integrates_polynomials_on_s2() {
        let g = Arc::new(SphereGrid::uniform(3, 32).unwrap());
        // ∫ ω_1^2 dω = 4π/3, ∫ ω_2^2 ω_3^2 dω = 4π/15.
        let a = SphereFunction::from_fn(g.clone(), |w| Complex64::new(w[0] * w[0], 0.0)).integral().re;
        let b = SphereFunction::from_fn(g, |w| Complex64::new(w[1] * w[1] * w[2] * w[2], 0.0)).integral().re;
        assert!((a - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((b - 4.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn cap_measure() {
        let delta = 0.05;
        let g = Arc::new(SphereGrid::knapp(2, delta, 16).unwrap());
        let m = SphereFunction::knapp_cap(g, delta).integral().re;
        assert!((m - 2.0 * cap_angle(delta)).abs() < 1e-12);
        let g3 = Arc::new(SphereGrid::knapp(3, delta, 16).unwrap());
        let m3 = SphereFunction::knapp_cap(g3, delta).integral().re;
        // Spherical cap area 2π(1 - cos θ_δ) = π δ².
        assert!((m3 - PI * delta * delta).abs() < 1e-12);
    }
}
