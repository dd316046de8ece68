//! Report files shared by every experiment: report.json with the resolved
//! config embedded, and report.csv with one fixed column set.

use crate::error::CoreError;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "trial_id,a_dilation,ratio,norm_out,norm_f,norm_g,flags";

#[derive(Clone, Debug, Serialize)]
pub struct CsvRow {
    pub trial_id: usize,
    pub a_dilation: i32,
    pub ratio: f64,
    pub norm_out: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub flags: String,
}

/// {:?} on f64 prints the shortest digit string that round-trips, so two runs
/// with identical inputs produce byte-identical CSV.
pub fn csv_string(rows: &[CsvRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{:?},{:?},{:?},{:?},{}\n",
            r.trial_id, r.a_dilation, r.ratio, r.norm_out, r.norm_f, r.norm_g, r.flags
        ));
    }
    s
}

pub fn report_value(
    subcommand: &str,
    config: serde_json::Value,
    results: serde_json::Value,
) -> serde_json::Value {
    serde_json::json!({
        "subcommand": subcommand,
        "config": config,
        "results": results,
    })
}

/// Writes report.json and report.csv under dir, creating it if needed.
/// Returns the two paths.
pub fn write_reports(
    dir: &Path,
    report: &serde_json::Value,
    rows: &[CsvRow],
) -> Result<(PathBuf, PathBuf), CoreError> {
    std::fs::create_dir_all(dir).map_err(|e| CoreError::Io(format!("creating {:?}: {}", dir, e)))?;
    let json_path = dir.join("report.json");
    let csv_path = dir.join("report.csv");
    let mut body = serde_json::to_string_pretty(report)
        .map_err(|e| CoreError::Io(format!("serializing report: {}", e)))?;
    body.push('\n');
    std::fs::write(&json_path, body)
        .map_err(|e| CoreError::Io(format!("writing {:?}: {}", json_path, e)))?;
    std::fs::write(&csv_path, csv_string(rows))
        .map_err(|e| CoreError::Io(format!("writing {:?}: {}", csv_path, e)))?;
    Ok((json_path, csv_path))
}
