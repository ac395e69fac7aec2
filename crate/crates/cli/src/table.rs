//! `helgason table`: CSV tables with a header row, 17 significant digits and a fixed row order.

use std::sync::Arc;

use helgason::geometry::ModelParams;
use helgason::specfun::{harish_chandra_c, spherical_fn, spherical_fn_d3};
use helgason::transform::dyadic::{dyadic_projector_kernels, DyadicKind, DyadicPiece};
use helgason::transform::PanelGrid;
use helgason::verify::{
    classify_region, knapp_projector_exponent, p_st, predicted_alpha, predicted_offduality_projector, radial_projector_exponent, Diagram,
    RegionPoint, RunConfig,
};

use crate::args::{TableArgs, TableKind};
use crate::{destination, effective_config, emit, CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Runtime(format!("csv: {e}"));
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(fail)?;
        }
        w.into_inner().map_err(|e| CliError::Runtime(format!("csv: {e}")))
    }
}

/// Radii used when `--r` is not given.
pub const DEFAULT_PHI_RADII: [f64; 7] = [0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
pub const DEFAULT_KERNEL_RADII: [f64; 8] = [0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
/// Annular pieces listed after J: `k₀ ≤ k ≤ k₀ + KERNEL_PIECES - 1`.
pub const KERNEL_PIECES: i32 = 3;

pub fn c_function_table(cfg: &RunConfig) -> CliResult<Table> {
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        let mp = ModelParams::new(d)?;
        for &l in &cfg.lambdas {
            let c = harish_chandra_c(l, &mp)?;
            rows.push(vec![
                Cell::Int(d as i64),
                Cell::Num(l),
                Cell::Num(c.c_value.re),
                Cell::Num(c.c_value.im),
                Cell::Num(c.c_value.norm()),
                Cell::Num(c.density),
            ]);
        }
    }
    Ok(Table { header: vec!["d", "lambda", "c_re", "c_im", "c_abs", "density"], rows })
}

pub fn phi_table(cfg: &RunConfig, radii: &[f64]) -> CliResult<Table> {
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        let mp = ModelParams::new(d)?;
        for &l in &cfg.lambdas {
            for &r in radii {
                let (value, method) =
                    if d == 3 { (spherical_fn_d3(l, r), "closed-form-d3") } else { (spherical_fn(l, r, &mp)?.value.re, "exact-quadrature") };
                rows.push(vec![Cell::Int(d as i64), Cell::Num(l), Cell::Num(r), Cell::Num(value), Cell::Text(method.into())]);
            }
        }
    }
    Ok(Table { header: vec!["d", "lambda", "r", "phi", "method"], rows })
}

pub fn kernel_table(cfg: &RunConfig, radii: &[f64]) -> CliResult<Table> {
    if radii.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
        return Err(CliError::Usage("radii must be finite and ≥ 0".into()));
    }
    let r_hi = radii.iter().cloned().fold(1.0, f64::max) + 0.5;
    let grid = Arc::new(PanelGrid::uniform(r_hi, (40.0 * r_hi).ceil() as usize, 8)?);
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        let mp = ModelParams::new(d)?;
        for &l in &cfg.lambdas {
            let k0 = DyadicPiece::k0(l);
            for (piece, kernel) in dyadic_projector_kernels(l, k0..=k0 + KERNEL_PIECES - 1, &mp, &grid)? {
                let name = match piece.kind {
                    DyadicKind::J => "J",
                    DyadicKind::K => "K",
                };
                for &r in radii {
                    let v = grid.interpolate(&kernel.values, r);
                    rows.push(vec![
                        Cell::Int(d as i64),
                        Cell::Num(l),
                        Cell::Text(name.into()),
                        Cell::Int(piece.k as i64),
                        Cell::Num(r),
                        Cell::Num(v.re),
                    ]);
                }
            }
        }
    }
    Ok(Table { header: vec!["d", "lambda", "piece", "k", "r", "kernel"], rows })
}

fn region_name(r: helgason::verify::Region) -> String {
    format!("{r:?}")
}

pub fn exponents_table(cfg: &RunConfig) -> CliResult<Table> {
    let mut rows = Vec::new();
    let opt = |x: Option<f64>| x.map(Cell::Num).unwrap_or(Cell::Empty);
    for &d in &cfg.dims {
        let pst = p_st(d);
        let row = |context: &str, p: Option<f64>, s: Option<f64>, q: Option<f64>, e: Option<f64>, note: String| {
            vec![Cell::Text(context.into()), Cell::Int(d as i64), opt(p), opt(s), opt(q), opt(e), Cell::Num(pst), Cell::Text(note)]
        };
        for p in cfg.projector_ps(d) {
            if !(p > 2.0) {
                continue;
            }
            rows.push(row("projector-duality", Some(p), None, None, Some(predicted_alpha(p, d)?), String::new()));
            rows.push(row("radial-lower", Some(p), None, None, Some(radial_projector_exponent(p, d)), String::new()));
            rows.push(row("knapp-lower", Some(p), None, None, Some(knapp_projector_exponent(p, d)), String::new()));
        }
        for &s in &cfg.s {
            for &q in &cfg.q {
                if let Ok(e) = predicted_offduality_projector(s, q, d) {
                    rows.push(row("projector-offduality", None, Some(s), Some(q), Some(e.exponent), e.constant_blowup.unwrap_or_default()));
                }
                for (diagram, name) in [(Diagram::Resolvent, "resolvent"), (Diagram::Dresolvent, "dresolvent")] {
                    if let Ok(c) = classify_region(&RegionPoint { inv_s: 1.0 / s, inv_q: 1.0 / q, diagram }, d) {
                        rows.push(row(name, None, Some(s), Some(q), c.exponent, region_name(c.region)));
                    }
                }
            }
        }
    }
    Ok(Table { header: vec!["context", "d", "p", "s", "q", "exponent", "p_st", "note"], rows })
}

pub fn cmd_table(a: &TableArgs) -> CliResult<i32> {
    let cfg = effective_config(&a.common)?;
    let (table, name) = match a.kind {
        TableKind::CFunction => (c_function_table(&cfg)?, "c-function.csv"),
        TableKind::Phi => (phi_table(&cfg, if a.r.is_empty() { &DEFAULT_PHI_RADII } else { &a.r })?, "phi.csv"),
        TableKind::Kernel => (kernel_table(&cfg, if a.r.is_empty() { &DEFAULT_KERNEL_RADII } else { &a.r })?, "kernel.csv"),
        TableKind::Exponents => (exponents_table(&cfg)?, "exponents.csv"),
    };
    emit(destination(&a.common.out, &cfg, name).as_deref(), &table.to_csv()?)?;
    Ok(0)
}
