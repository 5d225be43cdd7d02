//! Sweep report files: one CSV row per evaluation set and a JSON block of
//! percentile summaries per configuration.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{Summary, SweepReport};

pub const CSV_HEADER: [&str; 5] = ["config_label", "round", "test_campaign", "accuracy", "macro_f1"];

/// CSV bytes for `reports`; floats use the shortest exact representation.
pub fn reports_to_csv(reports: &[SweepReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports {
        for s in &r.sets {
            w.write_record([
                r.config_label.clone(),
                s.set.round.to_string(),
                s.set.test.to_string(),
                s.accuracy.to_string(),
                s.macro_f1.to_string(),
            ])?;
        }
    }
    w.into_inner().map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config_label: &'a str,
    n_sets: usize,
    accuracy: Summary,
    macro_f1: Summary,
    binary_accuracy: f64,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    reports: Vec<JsonReport<'a>>,
}

pub fn reports_to_json(reports: &[SweepReport]) -> Result<String> {
    let doc = JsonSummary {
        reports: reports
            .iter()
            .map(|r| JsonReport {
                config_label: &r.config_label,
                n_sets: r.sets.len(),
                accuracy: r.accuracy,
                macro_f1: r.macro_f1,
                binary_accuracy: r.binary_accuracy(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn write_reports_csv(path: &Path, reports: &[SweepReport]) -> Result<()> {
    std::fs::write(path, reports_to_csv(reports)?).map_err(|e| Error::io(path, e))
}

pub fn write_summary_json(path: &Path, reports: &[SweepReport]) -> Result<()> {
    std::fs::write(path, reports_to_json(reports)?).map_err(|e| Error::io(path, e))
}
