//! The audit report (JSON) and its plain-text rendering.

use std::fmt::Write as _;
use std::path::Path;

use aucgap::{ClassOutcome, ClassSweep, GapAnalysis, GroupStatus};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::ingest::IngestError;

pub const REPORT_SCHEMA: &str = "aucgap.report";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub tool_version: String,
    pub model_name: String,
    pub task: String,
    pub n_records: usize,
    pub input_digest: String,
    pub config_digest: String,
    /// RFC 3339, UTC. The only field that differs between identical runs.
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AuditResult {
    Binary(Box<GapAnalysis>),
    Multiclass(ClassSweep),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub schema: String,
    pub schema_version: u32,
    pub metadata: Metadata,
    pub result: AuditResult,
    /// Every warning raised anywhere in the run, in order.
    pub warnings: Vec<String>,
}

impl GapReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, IngestError> {
        let invalid = |message: String| IngestError::Report {
            path: origin.to_owned(),
            message,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        if value.get("schema").and_then(|s| s.as_str()) != Some(REPORT_SCHEMA) {
            return Err(invalid(format!("schema is not `{REPORT_SCHEMA}`")));
        }
        let version = value.get("schema_version").and_then(|v| v.as_u64());
        if version != Some(REPORT_SCHEMA_VERSION as u64) {
            return Err(invalid(format!("unsupported schema_version {version:?}")));
        }
        serde_json::from_value(value).map_err(|e| invalid(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self::from_json(&text, &path.display().to_string())?)
    }
}

fn fmt4(value: f64) -> String {
    format!("{value:.4}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_owned(), fmt4)
}

/// Left-aligned first column, right-aligned others.
fn aligned(rows: &[Vec<String>]) -> String {
    let width = rows[0].len();
    let widths: Vec<usize> = (0..width)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn render_analysis(out: &mut String, analysis: &GapAnalysis) {
    let mut rows = vec![["group", "status", "n_pos", "n_neg", "auc"].map(String::from).to_vec()];
    for entry in &analysis.table.entries {
        let status = match entry.status {
            GroupStatus::Valid if entry.auc.is_none() => "undefined".to_owned(),
            GroupStatus::Valid => "valid".to_owned(),
            GroupStatus::Excluded { reason } => format!("excluded ({reason})"),
        };
        rows.push(vec![
            entry.group.clone(),
            status,
            entry.n_pos.to_string(),
            entry.n_neg.to_string(),
            fmt_opt(entry.auc),
        ]);
    }
    out.push_str(&aligned(&rows));
    let gap = &analysis.gap;
    let mut summary = vec![
        vec!["overall auc".to_owned(), fmt4(analysis.overall.value)],
        vec!["auc gap".to_owned(), fmt4(gap.value)],
        vec!["valid groups".to_owned(), gap.n_valid_groups.to_string()],
    ];
    if let (Some(hi), Some(lo)) = (&gap.arg_max_group, &gap.arg_min_group) {
        summary.push(vec!["highest".to_owned(), hi.clone()]);
        summary.push(vec!["lowest".to_owned(), lo.clone()]);
    }
    if let Some(interval) = &analysis.interval {
        summary.push(vec![
            format!("{:.0}% interval", interval.confidence * 100.0),
            format!("[{}, {}]", fmt4(interval.lower), fmt4(interval.upper)),
        ]);
    }
    out.push('\n');
    out.push_str(&aligned(&summary));
}

/// Plain-text summary for stdout, numbers rounded to 4 decimals.
pub fn render_table(report: &GapReport) -> String {
    let mut out = String::new();
    let meta = &report.metadata;
    let _ = writeln!(out, "model: {}  task: {}  records: {}", meta.model_name, meta.task, meta.n_records);
    match &report.result {
        AuditResult::Binary(analysis) => {
            out.push('\n');
            render_analysis(&mut out, analysis);
        }
        AuditResult::Multiclass(sweep) => {
            for (class, outcome) in &sweep.classes {
                let _ = writeln!(out, "\nclass {class}");
                match outcome {
                    ClassOutcome::Analyzed(analysis) => render_analysis(&mut out, analysis),
                    ClassOutcome::Degenerate { reason } => {
                        let _ = writeln!(out, "degenerate: {reason}");
                    }
                }
            }
            if let Some(max) = &sweep.max_over_classes {
                let _ = writeln!(out, "\nmax gap over classes: {} (class {})", fmt4(max.value), max.class);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_pads_columns() {
        let rows = vec![
            vec!["a".to_owned(), "1".to_owned()],
            vec!["longer".to_owned(), "0.1234".to_owned()],
        ];
        assert_eq!(aligned(&rows), "a            1\nlonger  0.1234\n");
    }

    #[test]
    fn rejects_foreign_json() {
        assert!(GapReport::from_json("{}", "x").is_err());
        assert!(GapReport::from_json("not json", "x").is_err());
        let wrong_version = format!(r#"{{"schema":"{REPORT_SCHEMA}","schema_version":99}}"#);
        let err = GapReport::from_json(&wrong_version, "x").unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }
}
