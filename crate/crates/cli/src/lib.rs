//! Library side of the `aucgap` command: config resolution, CSV ingest,
//! report and plot-data output.

pub mod config;
pub mod error;
pub mod ingest;
pub mod plot;
pub mod report;

use std::io::Write;
use std::path::Path;

use aucgap::{
    analyze, generate, per_class_gap_sweep, threshold_real, AdapterError, AnalysisError, AnalysisOptions,
    BootstrapOptions, ClassOutcome, Execution, GapAnalysis, GroupRecipe, GroupStatus, MissingPolicy,
    ValidityPolicy,
};

use crate::config::{ResolvedConfig, Task};
use crate::error::CliError;
use crate::ingest::{Dataset, Loaded};
use crate::report::{AuditResult, GapReport, Metadata, REPORT_SCHEMA, REPORT_SCHEMA_VERSION};

pub const TOOL_NAME: &str = "aucgap";

fn analysis_options(config: &ResolvedConfig, execution: Execution) -> Result<AnalysisOptions, CliError> {
    let validity =
        ValidityPolicy::new(config.min_pos, config.min_neg).map_err(|e| CliError::config(e.to_string()))?;
    Ok(AnalysisOptions {
        specs: config.specs.clone(),
        missing: if config.allow_missing {
            MissingPolicy::AsCategory
        } else {
            MissingPolicy::Error
        },
        validity,
        bootstrap: config.bootstrap.map(|b| BootstrapOptions {
            execution,
            ..BootstrapOptions::new(b.resamples, b.seed)
        }),
        execution,
    })
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::Grouping(g) => CliError::config(g.to_string()),
        other => CliError::Degenerate(other.to_string()),
    }
}

fn adapter_error(e: AdapterError) -> CliError {
    match e {
        AdapterError::Analysis(a) => analysis_error(a),
        e @ (AdapterError::DegenerateLabeling { .. } | AdapterError::NoPositivesForClass(_)) => {
            CliError::Degenerate(e.to_string())
        }
        other => CliError::config(other.to_string()),
    }
}

fn exclusion_warnings(analysis: &GapAnalysis, prefix: &str, out: &mut Vec<String>) {
    for entry in &analysis.table.entries {
        match (entry.status, &entry.undefined_reason) {
            (GroupStatus::Excluded { reason }, _) => {
                out.push(format!("{prefix}group `{}` excluded: {reason}", entry.group))
            }
            (GroupStatus::Valid, Some(why)) => {
                out.push(format!("{prefix}group `{}` left out of the gap: {why}", entry.group))
            }
            _ => {}
        }
    }
    out.extend(analysis.warnings.iter().map(|w| format!("{prefix}{w}")));
}

/// Runs the audit on already-loaded data. The timestamp is taken from the
/// clock; everything else is a function of the inputs.
pub fn audit_loaded(loaded: &Loaded, config: &ResolvedConfig, execution: Execution) -> Result<GapReport, CliError> {
    let options = analysis_options(config, execution)?;
    let mut warnings = Vec::new();
    let result = match (&loaded.dataset, &config.task) {
        (Dataset::Binary(records), _) => {
            let analysis = analyze(records, &options).map_err(analysis_error)?;
            exclusion_warnings(&analysis, "", &mut warnings);
            AuditResult::Binary(Box::new(analysis))
        }
        (Dataset::Real(records), Task::RealThreshold { threshold, .. }) => {
            let records = threshold_real(records, *threshold).map_err(adapter_error)?;
            let analysis = analyze(&records, &options).map_err(analysis_error)?;
            exclusion_warnings(&analysis, "", &mut warnings);
            AuditResult::Binary(Box::new(analysis))
        }
        (Dataset::Multiclass(records), Task::Multiclass { classes, .. }) => {
            let sweep = per_class_gap_sweep(records, &options, classes.as_deref()).map_err(adapter_error)?;
            for (class, outcome) in &sweep.classes {
                let prefix = format!("class {class}: ");
                match outcome {
                    ClassOutcome::Analyzed(analysis) => exclusion_warnings(analysis, &prefix, &mut warnings),
                    ClassOutcome::Degenerate { reason } => warnings.push(format!("{prefix}{reason}")),
                }
            }
            if sweep.classes.values().all(|o| o.analysis().is_none()) {
                return Err(CliError::Degenerate("no class has a defined AUC".to_owned()));
            }
            AuditResult::Multiclass(sweep)
        }
        _ => unreachable!("dataset layout follows the task"),
    };
    Ok(GapReport {
        schema: REPORT_SCHEMA.to_owned(),
        schema_version: REPORT_SCHEMA_VERSION,
        metadata: Metadata {
            tool: TOOL_NAME.to_owned(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            model_name: config.model_name.clone(),
            task: config.task.name().to_owned(),
            n_records: loaded.dataset.len(),
            input_digest: loaded.digest.clone(),
            config_digest: config.digest(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        },
        result,
        warnings,
    })
}

/// Loads the input, runs the audit, and writes the report and plot data to
/// the configured paths (when set).
pub fn run_audit(config: &ResolvedConfig, execution: Execution) -> Result<GapReport, CliError> {
    let loaded = ingest::load(config)?;
    let report = audit_loaded(&loaded, config, execution)?;
    if let Some(path) = &config.report_out {
        std::fs::write(path, report.to_json()).map_err(|e| CliError::io(path, e))?;
    }
    if let Some(path) = &config.plot_out {
        plot::emit_plot_data(std::slice::from_ref(&report), path)?;
    }
    Ok(report)
}

/// Parses `name:n_pos:n_neg:d_prime`.
pub fn parse_recipe(text: &str) -> Result<GroupRecipe, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::config(format!("group recipe `{text}` is not name:n_pos:n_neg:d_prime"));
    let [name, n_pos, n_neg, d] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(GroupRecipe::new(
        *name,
        n_pos.trim().parse().map_err(|_| bad())?,
        n_neg.trim().parse().map_err(|_| bad())?,
        d.trim().parse().map_err(|_| bad())?,
    ))
}

/// Writes a synthetic cohort as `score,label,group` CSV with labels 1/0.
pub fn write_synthetic(recipes: &[GroupRecipe], seed: u64, out: impl Write) -> Result<usize, CliError> {
    let records = generate(recipes, seed).map_err(|e| CliError::config(e.to_string()))?;
    let mut writer = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::io("<synthetic output>", std::io::Error::other(e));
    writer.write_record(["score", "label", "group"]).map_err(io_err)?;
    for r in &records {
        let label = if r.label.is_positive() { "1" } else { "0" };
        let group = &r.attributes[aucgap::synth::GROUP_ATTRIBUTE];
        writer
            .write_record([r.score.to_string().as_str(), label, group.as_str()])
            .map_err(io_err)?;
    }
    writer.flush().map_err(|e| CliError::io("<synthetic output>", e))?;
    Ok(records.len())
}

pub fn read_reports(paths: &[impl AsRef<Path>]) -> Result<Vec<GapReport>, CliError> {
    paths.iter().map(|p| GapReport::read(p.as_ref())).collect()
}
