//! Gauss–Legendre rules, composite panel rules and panel-wise interpolation.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// A quadrature rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Barycentric interpolation weights for the nodes.
    pub bary: Vec<f64>,
}

const MAX_CACHED: usize = 128;

static RULES: [OnceLock<Rule>; MAX_CACHED + 1] = [const { OnceLock::new() }; MAX_CACHED + 1];

/// Gauss–Legendre rule with `n` nodes, ascending. Rules up to 128 nodes are cached.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    assert!((1..=MAX_CACHED).contains(&n), "Gauss-Legendre order out of range: {n}");
    RULES[n].get_or_init(|| build_rule(n))
}

fn build_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Root i counted from the right end, refined by Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    let bary = (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * ((1.0 - nodes[j] * nodes[j]) * weights[j]).sqrt()
        })
        .collect();
    Rule { nodes, weights, bary }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre nodes and weights over consecutive intervals given by `edges`.
pub fn composite_from_edges(edges: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(order);
    let mut x = Vec::with_capacity(order * edges.len().saturating_sub(1));
    let mut w = Vec::with_capacity(x.capacity());
    for e in edges.windows(2) {
        let half = 0.5 * (e[1] - e[0]);
        let mid = 0.5 * (e[1] + e[0]);
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            x.push(mid + half * t);
            w.push(half * wt);
        }
    }
    (x, w)
}

/// `panels + 1` equally spaced edges on [a, b].
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect()
}

/// Integrate `f` over [a, b] with `panels` uniform panels of `order` Gauss–Legendre nodes.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            s += wt * f(mid + 0.5 * h * t);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Piecewise-polynomial interpolation on a composite Gauss–Legendre grid.
///
/// `edges` are the panel boundaries; `values` holds `order` samples per panel at the
/// mapped Gauss–Legendre nodes. Evaluation uses the barycentric formula on the panel
/// containing `x`; points outside the edges are extrapolated from the nearest panel.
pub fn panel_interpolate<T>(edges: &[f64], order: usize, values: &[T], x: f64) -> T
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T>,
{
    let panels = edges.len() - 1;
    let k = match edges.partition_point(|&e| e <= x) {
        0 => 0,
        p if p > panels => panels - 1,
        p => p - 1,
    };
    let rule = gauss_legendre(order);
    let (a, b) = (edges[k], edges[k + 1]);
    let t = (2.0 * x - a - b) / (b - a);
    let vals = &values[k * order..(k + 1) * order];
    let mut num: Option<T> = None;
    let mut den = 0.0;
    for j in 0..order {
        let diff = t - rule.nodes[j];
        if diff == 0.0 {
            return vals[j];
        }
        let c = rule.bary[j] / diff;
        num = Some(match num {
            None => vals[j] * c,
            Some(acc) => acc + vals[j] * c,
        });
        den += c;
    }
    num.expect("non-empty panel") / den
}
