//! Text, JSON and CSV renderings of a run.

use std::fmt::Write as _;
use std::path::Path;

use wedgelab::ValidationReport;

use crate::error::CliError;
use crate::run::RunOutcome;

pub const CSV_HEADER: &str = "axiom,G,residual";

/// Human-readable summary, one line per entry.
pub fn text_summary(outcome: &RunOutcome) -> String {
    let r = &outcome.report;
    let mut out = String::new();
    let seed = r.seed.map(|s| format!(", seed {s}")).unwrap_or_default();
    let _ = writeln!(out, "model {} ({}{seed})", r.model, r.grid);
    let width = r.entries.iter().map(|e| e.axiom.len()).max().unwrap_or(0);
    for e in &r.entries {
        let flag = if e.pass { "pass" } else { "FAIL" };
        let _ = writeln!(out, "  {flag}  {:width$}  {:>10.3e}  (tol {:.1e})", e.axiom, e.residual, e.tolerance);
    }
    for s in &outcome.skipped {
        let _ = writeln!(out, "skipped {s}");
    }
    for e in outcome.capacity.iter().chain(&outcome.errors) {
        let _ = writeln!(out, "error {e}");
    }
    let failed = r.failures().count();
    let _ = writeln!(out, "{} checks, {failed} failed", r.entries.len());
    out
}

pub fn json_report(report: &ValidationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn parse_json_report(text: &str) -> Result<ValidationReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// "axiom,G,residual" rows in entry order; residuals with 17 significant digits.
pub fn csv_table(report: &ValidationReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in &report.entries {
        let g = e.grid.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{g},{}", csv_field(&e.axiom), format_residual(e.residual));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn format_residual(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Output { path: path.display().to_string(), source: e })
}
