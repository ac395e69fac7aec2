//! `helgason plot`: self-contained SVG output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use helgason::norms::fit_scaling_exponent;
use helgason::verify::{classify_region, Diagram, Region, RegionPoint};

use crate::args::{PlotArgs, PlotKind};
use crate::{destination, effective_config, emit, CliError, CliResult};

/// Numeric columns of a CSV file, keyed by header name.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Columns {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Parses a CSV with a header row; every field must be a number.
pub fn read_columns(text: &str) -> CliResult<Columns> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let names: Vec<String> = rdr.headers().map_err(|e| CliError::Runtime(format!("csv header: {e}")))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Runtime(format!("csv: {e}")))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row = rec
            .iter()
            .zip(&names)
            .map(|(f, n)| f.parse::<f64>().map_err(|_| CliError::Runtime(format!("line {line}: cannot parse '{f}' in column '{n}' as a number"))))
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Columns { names, rows })
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Log-log plot with the data, the least-squares line and a reference line of the given slope.
#[derive(Debug, Clone, PartialEq)]
pub struct LoglogPlot {
    pub points: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    pub reference_slope: f64,
}

impl LoglogPlot {
    pub fn new(points: Vec<(f64, f64)>, reference_slope: f64) -> CliResult<Self> {
        let fit = fit_scaling_exponent(&points)?;
        Ok(LoglogPlot { points, fitted_slope: fit.slope, fitted_intercept: fit.intercept, reference_slope })
    }

    pub fn from_columns(c: &Columns, slope: Option<f64>) -> CliResult<Self> {
        let xi = c.index("lambda").unwrap_or(0);
        let yi = c.index("value").unwrap_or(1);
        if c.names.len() < 2 {
            return Err(CliError::Runtime("loglog input needs two columns".into()));
        }
        let points = c.rows.iter().map(|r| (r[xi], r[yi])).collect();
        let reference = match (slope, c.index("predicted")) {
            (Some(s), _) => s,
            (None, Some(pi)) => c.rows.first().map(|r| r[pi]).ok_or_else(|| CliError::Runtime("empty input".into()))?,
            (None, None) => return Err(CliError::Usage("loglog needs --slope or a 'predicted' column".into())),
        };
        Self::new(points, reference)
    }

    pub fn to_svg(&self) -> String {
        let (w, h, m) = (640.0, 480.0, 60.0);
        let lx: Vec<f64> = self.points.iter().map(|p| p.0.log10()).collect();
        let ly: Vec<f64> = self.points.iter().map(|p| p.1.log10()).collect();
        let (x0, x1) = bounds(&lx);
        let fit_at = |x: f64| (self.fitted_intercept + self.fitted_slope * x * std::f64::consts::LN_10) / std::f64::consts::LN_10;
        let xm = lx.iter().sum::<f64>() / lx.len() as f64;
        let ref_at = |x: f64| fit_at(xm) + self.reference_slope * (x - xm);
        let mut ys = ly.clone();
        ys.extend([fit_at(x0), fit_at(x1), ref_at(x0), ref_at(x1)]);
        let (y0, y1) = bounds(&ys);
        let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-fitted-slope="{:.17e}" data-reference-slope="{:.17e}">"#,
            self.fitted_slope, self.reference_slope
        );
        let _ = writeln!(s, "<title>log-log scaling: fitted slope {:.6}, reference slope {:.6}</title>", self.fitted_slope, self.reference_slope);
        let _ = writeln!(s, r##"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="#444"/>"##, w - 2.0 * m, h - 2.0 * m);
        let _ = writeln!(
            s,
            r##"<line class="fitted" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#1f77b4" stroke-width="2" data-slope="{:.17e}"/>"##,
            px(x0),
            py(fit_at(x0)),
            px(x1),
            py(fit_at(x1)),
            self.fitted_slope
        );
        let _ = writeln!(
            s,
            r##"<line class="reference" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#d62728" stroke-width="1.5" stroke-dasharray="6 4" data-slope="{:.17e}"/>"##,
            px(x0),
            py(ref_at(x0)),
            px(x1),
            py(ref_at(x1)),
            self.reference_slope
        );
        for (x, y) in lx.iter().zip(&ly) {
            let _ = writeln!(s, r##"<circle class="point" cx="{:.3}" cy="{:.3}" r="4" fill="#222"/>"##, px(*x), py(*y));
        }
        for (x, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(s, r#"<text x="{:.3}" y="{}" font-size="12" text-anchor="{anchor}">{:.4e}</text>"#, px(x), h - m + 18.0, 10f64.powf(x));
        }
        for y in [y0, y1] {
            let _ = writeln!(s, r#"<text x="{}" y="{:.3}" font-size="12" text-anchor="end">{:.4e}</text>"#, m - 6.0, py(y) + 4.0, 10f64.powf(y));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">λ</text>"#, w / 2.0, h - 12.0);
        let _ = writeln!(
            s,
            r#"<text x="{m}" y="{}" font-size="13">fitted {:.6} (solid), reference {:.6} (dashed)</text>"#,
            m - 16.0,
            self.fitted_slope,
            self.reference_slope
        );
        s.push_str("</svg>\n");
        s
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(1e-3);
    (lo - pad, hi + pad)
}

/// A drawn line of a region diagram, in `(1/s, 1/q)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramLine {
    pub color: &'static str,
    pub equation: String,
    pub from: (f64, f64),
    pub to: (f64, f64),
}

/// Lines of the region diagram, clipped to the unit square. Mirrored lines share a color.
pub fn diagram_lines(d: usize, diagram: Diagram) -> Vec<DiagramLine> {
    let df = d as f64;
    let yellow = (df - 1.0) / (2.0 * df);
    let k = (df - 1.0) / (df + 1.0);
    let line = |color, equation: &str, from, to| DiagramLine { color, equation: equation.to_string(), from, to };
    let mut out = vec![
        line("red", "1/s + 1/q = 1", (1.0, 0.0), (0.0, 1.0)),
        line("blue", "1/q = 1/2", (0.5, 0.5), (1.0, 0.5)),
        line("blue", "1/s = 1/2", (0.5, 0.0), (0.5, 0.5)),
        line("yellow", &format!("1/q = (d-1)/(2d) = {yellow}"), (0.0, yellow), (1.0, yellow)),
        line("yellow", &format!("1/s = (d+1)/(2d) = {}", 1.0 - yellow), (1.0 - yellow, 0.0), (1.0 - yellow, 1.0)),
        line("purple", "(d-1)/(d+1) 1/q + 1/s = 1", (1.0, 0.0), (1.0 - k, 1.0)),
        line("purple", "(d-1)/(d+1) 1/s + 1/q = (d-1)/(d+1)", (1.0, 0.0), (0.0, k)),
    ];
    let g = match diagram {
        Diagram::Resolvent => Some((2.0 / df, "2/d")),
        Diagram::Dresolvent => Some((1.0 / df, "1/d")),
        Diagram::Projector => None,
    };
    if let Some((g, label)) = g {
        if g < 1.0 {
            out.push(line("green", &format!("1/s - 1/q = {label} = {g}"), (g, 0.0), (1.0, 1.0 - g)));
        }
    }
    out
}

/// Caption text of the figure, line by line.
pub fn caption_lines(diagram: Diagram) -> Vec<&'static str> {
    match diagram {
        Diagram::Resolvent => vec!["Yellow line: 1/q = (d-1)/(2d)", "Green line: 1/q - 1/s = 2/d", "Purple line: (d-1)/(d+1) 1/q + 1/s = 1"],
        Diagram::Dresolvent => vec!["Yellow line: 1/q = (d-1)/(2d)", "Green line: 1/q - 1/s = 1/d", "Purple line: (d-1)/(d+1) 1/q + 1/s = 1"],
        Diagram::Projector => vec!["Yellow line: 1/q = (d-1)/(2d)", "Purple line: (d-1)/(d+1) 1/q + 1/s = 1"],
    }
}

fn stroke(color: &str) -> &'static str {
    match color {
        "red" => "#d62728",
        "blue" => "#1f77b4",
        "yellow" => "#d4a300",
        "green" => "#2ca02c",
        _ => "#8e44ad",
    }
}

fn fill(region: Region) -> Option<&'static str> {
    match region {
        Region::I => Some("#9ecae1"),
        Region::II => Some("#fdd0a2"),
        Region::III => Some("#c7e9c0"),
        Region::IV => Some("#dadaeb"),
        Region::Outside => None,
    }
}

/// Region diagram with shaded regions, labels, the drawn lines and the caption.
pub fn region_diagram_svg(d: usize, diagram: Diagram, points: &[(f64, f64)]) -> CliResult<String> {
    let (size, m) = (480.0, 50.0);
    let px = |x: f64| m + x * size;
    let py = |y: f64| m + (1.0 - y) * size;
    let title = match diagram {
        Diagram::Resolvent => "Boundedness of (D² - τ - iε)^(-1)",
        Diagram::Dresolvent => "Boundedness of D(D² - τ - iε)^(-1)",
        Diagram::Projector => "Boundedness of the spectral projector off the duality line",
    };
    let caption = caption_lines(diagram);
    let height = 2.0 * m + size + 22.0 * caption.len() as f64 + 10.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{height}" viewBox="0 0 {} {height}" data-d="{d}">"#,
        size + 2.0 * m,
        size + 2.0 * m
    );
    let _ = writeln!(s, "<title>{}, d = {d}</title>", esc(title));

    // Shading: cell centres of a fine grid below the diagonal 1/q = 1/s.
    let n = 96;
    let h = 1.0 / n as f64;
    let mut centroids: BTreeMap<(Region, bool), (f64, f64, usize)> = BTreeMap::new();
    s.push_str("<g class=\"regions\" stroke=\"none\">\n");
    for i in 0..n {
        for j in 0..n {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            if y > x {
                continue;
            }
            let c = classify_region(&RegionPoint { inv_s: x, inv_q: y, diagram }, d)?;
            if let Some(color) = fill(c.region) {
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}"/>"#,
                    px(x - 0.5 * h),
                    py(y + 0.5 * h),
                    h * size,
                    h * size
                );
                let e = centroids.entry((c.region, x + y >= 1.0)).or_insert((0.0, 0.0, 0));
                e.0 += x;
                e.1 += y;
                e.2 += 1;
            }
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, r##"<rect x="{m}" y="{m}" width="{size}" height="{size}" fill="none" stroke="#333"/>"##);
    s.push_str("<g class=\"lines\" fill=\"none\" stroke-width=\"2\" stroke-dasharray=\"7 4\">\n");
    for l in diagram_lines(d, diagram) {
        let _ = writeln!(
            s,
            r#"<line class="{}" stroke="{}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" data-equation="{}" data-from="{} {}" data-to="{} {}"/>"#,
            l.color,
            stroke(l.color),
            px(l.from.0),
            py(l.from.1),
            px(l.to.0),
            py(l.to.1),
            esc(&l.equation),
            l.from.0,
            l.from.1,
            l.to.0,
            l.to.1
        );
    }
    s.push_str("</g>\n");
    for ((region, _), (sx, sy, count)) in &centroids {
        let (cx, cy) = (sx / *count as f64, sy / *count as f64);
        let _ = writeln!(s, r#"<text class="label" x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">{region:?}</text>"#, px(cx), py(cy) + 5.0);
    }
    for &(x, y) in points {
        let c = classify_region(&RegionPoint { inv_s: x, inv_q: y, diagram }, d)?;
        let _ = writeln!(
            s,
            r##"<circle class="point" cx="{:.3}" cy="{:.3}" r="3.5" fill="#000" data-region="{:?}" data-exponent="{}"/>"##,
            px(x),
            py(y),
            c.region,
            c.exponent.map(|e| e.to_string()).unwrap_or_default()
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">1/s</text>"#, m + size / 2.0, m + size + 24.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 {} {})">1/q</text>"#,
        m - 18.0,
        m + size / 2.0,
        m - 18.0,
        m + size / 2.0
    );
    for (i, line) in caption.iter().enumerate() {
        let _ = writeln!(s, r#"<text class="caption" x="{m}" y="{:.1}" font-size="13">{}</text>"#, m + size + 50.0 + 22.0 * i as f64, esc(line));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn read_input(path: &Path) -> CliResult<Columns> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    read_columns(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn cmd_plot(a: &PlotArgs) -> CliResult<i32> {
    let cfg = effective_config(&a.common)?;
    let (svg, name) = match a.kind {
        PlotKind::Loglog => {
            let path = a.input.as_ref().ok_or_else(|| CliError::Usage("loglog needs an input CSV".into()))?;
            (LoglogPlot::from_columns(&read_input(path)?, a.slope)?.to_svg(), "loglog.svg")
        }
        PlotKind::RegionDiagram => {
            let d = if a.common.d.is_empty() && a.common.config.is_none() { 3 } else { cfg.dims[0] };
            let diagram = if a.figure == 1 { Diagram::Resolvent } else { Diagram::Dresolvent };
            let points = match &a.input {
                Some(path) => {
                    let c = read_input(path)?;
                    let (xi, yi) = (c.index("inv_s").unwrap_or(0), c.index("inv_q").unwrap_or(1));
                    c.rows.iter().map(|r| (r[xi], r[yi])).collect()
                }
                None => Vec::new(),
            };
            (region_diagram_svg(d, diagram, &points)?, if a.figure == 1 { "region-diagram-fig1.svg" } else { "region-diagram-fig2.svg" })
        }
    };
    emit(destination(&a.common.out, &cfg, name).as_deref(), svg.as_bytes())?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_has_matching_lines() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&l: &f64| (l, 3.0 * l.powf(-0.75))).collect();
        let p = LoglogPlot::new(pts, -0.75).unwrap();
        assert!((p.fitted_slope - p.reference_slope).abs() < 1e-12);
        assert!(p.to_svg().contains("class=\"reference\""));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = read_columns("lambda,value\n1,2\n2,x\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(read_columns("lambda,value\n1,2,3\n").is_err());
    }

    #[test]
    fn yellow_line_in_three_dimensions() {
        let lines = diagram_lines(3, Diagram::Resolvent);
        assert!(lines.iter().any(|l| l.color == "yellow" && l.from.1 == 1.0 / 3.0 && l.to.1 == 1.0 / 3.0));
        let g = diagram_lines(3, Diagram::Dresolvent).into_iter().find(|l| l.color == "green").unwrap();
        assert!((g.from.0 - g.from.1 - 1.0 / 3.0).abs() < 1e-15);
    }
}
