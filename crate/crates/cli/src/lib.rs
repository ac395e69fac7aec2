//! Command-line driver: `table`, `verify` and `plot`.

pub mod args;
pub mod plot;
pub mod report;
pub mod table;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use args::{Cli, Command, Common};
use helgason::verify::RunConfig;

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config: exit code 2.
    Usage(String),
    /// Anything that went wrong while running: exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<helgason::Error> for CliError {
    fn from(e: helgason::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Config file (if any) with the command-line overrides applied.
pub fn effective_config(c: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if !c.d.is_empty() {
        cfg.dims = c.d.clone();
    }
    if !c.lambda.is_empty() {
        cfg.lambdas = c.lambda.clone();
    }
    if !c.p.is_empty() {
        cfg.p = Some(c.p.clone());
    }
    if !c.q.is_empty() {
        cfg.q = c.q.clone();
    }
    if c.tolerance.is_some() {
        cfg.tolerance = c.tolerance;
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// `--out` if given, else `default_name` inside the config's output directory, else stdout.
pub fn destination(flag: &Option<PathBuf>, cfg: &RunConfig, default_name: &str) -> Option<PathBuf> {
    flag.clone().or_else(|| cfg.out.as_ref().map(|dir| Path::new(dir).join(default_name)))
}

pub fn emit(dest: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
            }
            fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Table(a) => table::cmd_table(a),
        Command::Verify(a) => report::cmd_verify(a),
        Command::Plot(a) => plot::cmd_plot(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
