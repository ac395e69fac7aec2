//! `helgason verify`: runs suites and writes the JSON report.

use helgason::verify::{run_suite, ResultRecord, RunConfig, Suite};

use crate::args::VerifyArgs;
use crate::{destination, effective_config, emit, CliError, CliResult};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Report {
    pub version: String,
    pub config_echo: RunConfig,
    pub records: Vec<ResultRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: RunConfig, records: Vec<ResultRecord>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let failed = records.len() - passed;
        let wall_time_s = records.iter().map(|r| r.wall_time_s).sum();
        Report { version: REPORT_VERSION.to_string(), config_echo: config, records, summary: Summary { passed, failed, wall_time_s } }
    }

    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| CliError::Runtime(format!("report: {e}")))
    }
}

pub fn verify(suite: Suite, cfg: &RunConfig) -> Report {
    Report::new(cfg.clone(), run_suite(suite, cfg))
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<i32> {
    let mut cfg = effective_config(&a.common)?;
    cfg.timing |= a.timing;
    let report = verify(a.suite, &cfg);
    for r in &report.records {
        eprintln!("{}", r.summary_line());
    }
    eprintln!("{}: {} passed, {} failed", a.suite, report.summary.passed, report.summary.failed);
    emit(destination(&a.common.out, &cfg, &format!("report-{}.json", a.suite)).as_deref(), report.to_json()?.as_bytes())?;
    Ok(if report.summary.failed == 0 { 0 } else { 1 })
}
