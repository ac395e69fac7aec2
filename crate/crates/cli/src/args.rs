use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helgason::verify::Suite;

#[derive(Debug, Parser)]
#[command(name = "helgason", version, about = "Fourier analysis on the hyperboloid: tables, verification suites and plots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a CSV table of special functions, kernels or predicted exponents.
    Table(TableArgs),
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Render an SVG plot.
    Plot(PlotArgs),
}

/// Flags shared by every command. List-valued flags take comma-separated values.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dimensions d.
    #[arg(long = "d", value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Frequencies λ.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Exponents p.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Target exponents q.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// Output file; defaults to the config's output directory, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Slope tolerance for every fitted exponent.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Seed of the randomized property checks.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    CFunction,
    Phi,
    Kernel,
    Exponents,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    pub kind: TableKind,
    /// Radii for the `phi` and `kernel` tables.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    pub suite: Suite,
    /// Record wall-clock times (the report is then no longer byte-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub common: Common,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Loglog,
    RegionDiagram,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub kind: PlotKind,
    /// CSV input: `lambda,value[,predicted]` for loglog, optional `inv_s,inv_q` points for region diagrams.
    pub input: Option<PathBuf>,
    /// Reference slope of a loglog plot, if the CSV has no `predicted` column.
    #[arg(long)]
    pub slope: Option<f64>,
    /// Region diagram: 1 for the resolvent, 2 for its derivative.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub figure: u8,
    #[command(flatten)]
    pub common: Common,
}
