//! Report files written by `replay`.
//!
//! `per_day.csv`: `day,instances,hits,ratio,live_nodes`, one row per day
//! with at least one instance; `ratio` has six decimals.
//!
//! `summary.json`: users, instances, hits, overall_hit_ratio,
//! precision_at and conventional_precision_at (keys "1", "5", "10"),
//! final_live_nodes (per user). Deterministic for a fixed log and config.
//!
//! `timing.json`: avg_predict_micros. Kept apart because wall-clock
//! latency differs between runs.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::evaluation::ReplayReport;

pub const PER_DAY_FILE: &str = "per_day.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";

#[derive(Debug, Serialize)]
struct UserSummary<'a> {
    user_id: &'a str,
    instances: u64,
    hits: u64,
    overall_hit_ratio: f64,
    final_live_nodes: usize,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    users: usize,
    instances: u64,
    hits: u64,
    overall_hit_ratio: f64,
    precision_at: std::collections::BTreeMap<String, f64>,
    conventional_precision_at: std::collections::BTreeMap<String, f64>,
    per_user: Vec<UserSummary<'a>>,
}

pub fn write_per_day<W: Write>(mut w: W, report: &ReplayReport) -> Result<()> {
    writeln!(w, "day,instances,hits,ratio,live_nodes")?;
    for d in &report.per_day_hit_ratio {
        writeln!(w, "{},{},{},{:.6},{}", d.day, d.instances, d.hits, d.ratio, d.live_nodes)?;
    }
    Ok(())
}

pub fn summary_json(report: &ReplayReport) -> String {
    let keyed = |m: &std::collections::BTreeMap<usize, f64>| {
        m.iter().map(|(n, v)| (n.to_string(), *v)).collect()
    };
    let summary = Summary {
        users: report.users.len(),
        instances: report.instances,
        hits: report.hits,
        overall_hit_ratio: report.overall_hit_ratio,
        precision_at: keyed(&report.precision_at),
        conventional_precision_at: keyed(&report.conventional_precision_at),
        per_user: report
            .users
            .iter()
            .map(|u| UserSummary {
                user_id: &u.user_id,
                instances: u.instance_count(),
                hits: u.hits(),
                overall_hit_ratio: u.overall_hit_ratio(),
                final_live_nodes: u.final_live_nodes,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
    s.push('\n');
    s
}

pub fn timing_json(report: &ReplayReport) -> String {
    format!("{{\n  \"avg_predict_micros\": {:.3}\n}}\n", report.avg_predict_micros)
}

/// Writes all three report files into `dir`, creating it if needed.
pub fn write_report_dir(dir: &Path, report: &ReplayReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut per_day = Vec::new();
    write_per_day(&mut per_day, report)?;
    std::fs::write(dir.join(PER_DAY_FILE), per_day)?;
    std::fs::write(dir.join(SUMMARY_FILE), summary_json(report))?;
    std::fs::write(dir.join(TIMING_FILE), timing_json(report))?;
    Ok(())
}
