//! Plot-ready series: overall AUC, per-subgroup AUC and the AUC gap, one
//! series per model (per class for multiclass reports).

use std::collections::BTreeSet;
use std::path::Path;

use aucgap::{ClassOutcome, GapAnalysis};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::report::{AuditResult, GapReport};

pub const PLOT_SCHEMA: &str = "aucgap.plot-data";
pub const PLOT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallPoint {
    pub model: String,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupPoint {
    pub model: String,
    pub group: String,
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub model: String,
    pub gap: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub arg_max_group: Option<String>,
    pub arg_min_group: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Panels {
    pub overall_auc: Vec<OverallPoint>,
    /// Only groups that entered the gap.
    pub subgroup_auc: Vec<SubgroupPoint>,
    pub auc_gap: Vec<GapPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub schema: String,
    pub schema_version: u32,
    pub panels: Panels,
}

fn push_series(panels: &mut Panels, model: &str, analysis: &GapAnalysis) {
    panels.overall_auc.push(OverallPoint {
        model: model.to_owned(),
        auc: analysis.overall.value,
    });
    for entry in &analysis.table.entries {
        if let (true, Some(auc)) = (entry.status.is_valid(), entry.auc) {
            panels.subgroup_auc.push(SubgroupPoint {
                model: model.to_owned(),
                group: entry.group.clone(),
                auc,
                n_pos: entry.n_pos,
                n_neg: entry.n_neg,
            });
        }
    }
    panels.auc_gap.push(GapPoint {
        model: model.to_owned(),
        gap: analysis.gap.value,
        lower: analysis.interval.as_ref().map(|i| i.lower),
        upper: analysis.interval.as_ref().map(|i| i.upper),
        arg_max_group: analysis.gap.arg_max_group.clone(),
        arg_min_group: analysis.gap.arg_min_group.clone(),
    });
}

/// Series appear in the order the reports are given.
pub fn build_plot_data(reports: &[GapReport]) -> Result<PlotData, CliError> {
    let mut seen = BTreeSet::new();
    let mut panels = Panels::default();
    for report in reports {
        let model = &report.metadata.model_name;
        if !seen.insert(model.clone()) {
            return Err(CliError::config(format!(
                "model name `{model}` appears in more than one report"
            )));
        }
        match &report.result {
            AuditResult::Binary(analysis) => push_series(&mut panels, model, analysis),
            AuditResult::Multiclass(sweep) => {
                for (class, outcome) in &sweep.classes {
                    if let ClassOutcome::Analyzed(analysis) = outcome {
                        push_series(&mut panels, &format!("{model}[{class}]"), analysis);
                    }
                }
            }
        }
    }
    Ok(PlotData {
        schema: PLOT_SCHEMA.to_owned(),
        schema_version: PLOT_SCHEMA_VERSION,
        panels,
    })
}

impl PlotData {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plot data serializes");
        text.push('\n');
        text
    }
}

pub fn emit_plot_data(reports: &[GapReport], out: &Path) -> Result<PlotData, CliError> {
    let data = build_plot_data(reports)?;
    std::fs::write(out, data.to_json()).map_err(|e| CliError::io(out, e))?;
    Ok(data)
}
