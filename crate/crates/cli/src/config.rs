//! Audit configuration: a TOML document whose keys mirror the CLI flags.
//!
//! ```toml
//! input = "predictions.csv"
//! model_name = "gbm-v2"            # default: input file stem
//! task = "binary"                  # binary | multiclass | real-threshold
//! score_column = "score"           # binary, real-threshold
//! label_column = "label"
//! positive_label = "1"             # binary
//! negative_label = "0"             # binary, optional
//! threshold = 2.5                  # real-threshold, required (no default)
//! class_columns = { A = "p_A", B = "p_B", C = "p_C" }   # multiclass
//! classes = ["A"]                  # multiclass, optional filter
//! attributes = ["gender", "ses"]   # optional extra attribute columns
//! group_by = ["gender", "ses"]
//! intersect = [["gender", "ses"]]
//! fold_column = "fold"
//! min_pos = 10
//! min_neg = 10
//! allow_missing = false
//! report_out = "report.json"
//! plot_out = "plot.json"
//!
//! [[explicit_groups]]
//! name = "all"
//! conditions = {}
//!
//! [bootstrap]
//! enabled = true
//! resamples = 1000
//! seed = 42
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use aucgap::GroupSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_MIN_COUNT: usize = 10;
pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Binary,
    Multiclass,
    RealThreshold,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGroup {
    pub name: String,
    #[serde(default)]
    pub conditions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    pub enabled: Option<bool>,
    pub resamples: Option<usize>,
    pub seed: Option<u64>,
}

/// One layer of configuration. Later layers (CLI flags) override earlier ones
/// (the config file) key by key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub input: Option<PathBuf>,
    pub model_name: Option<String>,
    pub task: Option<TaskKind>,
    pub threshold: Option<f64>,
    pub score_column: Option<String>,
    pub label_column: Option<String>,
    pub positive_label: Option<String>,
    pub negative_label: Option<String>,
    pub class_columns: Option<BTreeMap<String, String>>,
    pub classes: Option<Vec<String>>,
    pub attributes: Option<Vec<String>>,
    pub group_by: Option<Vec<String>>,
    pub intersect: Option<Vec<Vec<String>>>,
    pub explicit_groups: Option<Vec<ExplicitGroup>>,
    pub fold_column: Option<String>,
    pub min_pos: Option<usize>,
    pub min_neg: Option<usize>,
    pub allow_missing: Option<bool>,
    pub bootstrap: Option<BootstrapConfig>,
    pub report_out: Option<PathBuf>,
    pub plot_out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        AuditConfig { $($field: $top.$field.or($base.$field),)* bootstrap: None }
    };
}

impl AuditConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Keys set in `top` win; unset keys fall through to `self`.
    pub fn overlay(self, top: AuditConfig) -> AuditConfig {
        let bootstrap = match (self.bootstrap.clone(), top.bootstrap.clone()) {
            (Some(b), Some(t)) => Some(BootstrapConfig {
                enabled: t.enabled.or(b.enabled),
                resamples: t.resamples.or(b.resamples),
                seed: t.seed.or(b.seed),
            }),
            (b, t) => t.or(b),
        };
        let base = self;
        let mut merged = overlay!(base, top;
            input, model_name, task, threshold, score_column, label_column,
            positive_label, negative_label, class_columns, classes, attributes,
            group_by, intersect, explicit_groups, fold_column, min_pos, min_neg,
            allow_missing, report_out, plot_out,
        );
        merged.bootstrap = bootstrap;
        merged
    }

    pub fn resolve(self) -> Result<ResolvedConfig, CliError> {
        let input = self
            .input
            .ok_or_else(|| CliError::config("no input file (set `input` or pass --input)"))?;
        let model_name = match self.model_name {
            Some(name) => name,
            None => input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "model".to_owned()),
        };

        let task_kind = self.task.unwrap_or(TaskKind::Binary);
        if self.threshold.is_some() && task_kind != TaskKind::RealThreshold {
            return Err(CliError::config("`threshold` is only used by task real-threshold"));
        }
        let score_column = || self.score_column.clone().unwrap_or_else(|| "score".to_owned());
        let task = match task_kind {
            TaskKind::Binary => Task::Binary {
                score_column: score_column(),
                positive_label: self.positive_label.clone().unwrap_or_else(|| "1".to_owned()),
                negative_label: self.negative_label.clone(),
            },
            TaskKind::RealThreshold => {
                let threshold = self
                    .threshold
                    .ok_or_else(|| CliError::config("task real-threshold requires `threshold` (no default)"))?;
                if !threshold.is_finite() {
                    return Err(CliError::config("threshold must be finite"));
                }
                Task::RealThreshold {
                    score_column: score_column(),
                    threshold,
                }
            }
            TaskKind::Multiclass => {
                let class_columns = self.class_columns.clone().unwrap_or_default();
                if class_columns.len() < 2 {
                    return Err(CliError::config(
                        "task multiclass requires `class_columns` with at least 2 classes",
                    ));
                }
                if let Some(unknown) = self
                    .classes
                    .iter()
                    .flatten()
                    .find(|c| !class_columns.contains_key(*c))
                {
                    return Err(CliError::config(format!("class filter names unknown class `{unknown}`")));
                }
                Task::Multiclass {
                    class_columns,
                    classes: self.classes.clone(),
                }
            }
        };
        if task_kind != TaskKind::Multiclass && (self.class_columns.is_some() || self.classes.is_some()) {
            return Err(CliError::config("`class_columns` / `classes` are only used by task multiclass"));
        }
        if task_kind != TaskKind::Binary && (self.positive_label.is_some() || self.negative_label.is_some()) {
            return Err(CliError::config("`positive_label` / `negative_label` are only used by task binary"));
        }

        let mut specs = Vec::new();
        let mut referenced = BTreeSet::new();
        for attribute in self.group_by.into_iter().flatten() {
            referenced.insert(attribute.clone());
            specs.push(GroupSpec::Single(attribute));
        }
        for attributes in self.intersect.into_iter().flatten() {
            referenced.extend(attributes.iter().cloned());
            specs.push(GroupSpec::Intersection(attributes));
        }
        for group in self.explicit_groups.into_iter().flatten() {
            referenced.extend(group.conditions.keys().cloned());
            specs.push(GroupSpec::Explicit {
                name: group.name,
                conditions: group.conditions.into_iter().collect(),
            });
        }
        if specs.is_empty() {
            return Err(CliError::config(
                "no groups declared (use group_by, intersect or explicit_groups)",
            ));
        }
        referenced.extend(self.attributes.into_iter().flatten());
        if referenced.iter().any(String::is_empty) {
            return Err(CliError::config("empty attribute name"));
        }

        let min_pos = self.min_pos.unwrap_or(DEFAULT_MIN_COUNT);
        let min_neg = self.min_neg.unwrap_or(DEFAULT_MIN_COUNT);
        if min_pos == 0 || min_neg == 0 {
            return Err(CliError::config("min_pos and min_neg must be at least 1"));
        }

        let bootstrap = self.bootstrap.unwrap_or_default();
        let bootstrap = if bootstrap.enabled.unwrap_or(false) {
            let resamples = bootstrap.resamples.unwrap_or(DEFAULT_RESAMPLES);
            if resamples < aucgap::gap::MIN_RESAMPLES {
                return Err(CliError::config(format!(
                    "bootstrap needs at least {} resamples",
                    aucgap::gap::MIN_RESAMPLES
                )));
            }
            Some(BootstrapPlan {
                resamples,
                seed: bootstrap.seed.unwrap_or(0),
            })
        } else {
            None
        };

        Ok(ResolvedConfig {
            input,
            model_name,
            task,
            label_column: self.label_column.unwrap_or_else(|| "label".to_owned()),
            attributes: referenced.into_iter().collect(),
            specs,
            fold_column: self.fold_column,
            min_pos,
            min_neg,
            allow_missing: self.allow_missing.unwrap_or(false),
            bootstrap,
            report_out: self.report_out,
            plot_out: self.plot_out,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Task {
    Binary {
        score_column: String,
        positive_label: String,
        negative_label: Option<String>,
    },
    Multiclass {
        class_columns: BTreeMap<String, String>,
        classes: Option<Vec<String>>,
    },
    RealThreshold {
        score_column: String,
        threshold: f64,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Binary { .. } => "binary",
            Task::Multiclass { .. } => "multiclass",
            Task::RealThreshold { .. } => "real-threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BootstrapPlan {
    pub resamples: usize,
    pub seed: u64,
}

/// A fully defaulted, validated configuration.
///
/// Paths are left out of the serialized form, so the config digest depends
/// only on what is computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    #[serde(skip)]
    pub input: PathBuf,
    pub model_name: String,
    pub task: Task,
    pub label_column: String,
    pub attributes: Vec<String>,
    pub specs: Vec<GroupSpec>,
    pub fold_column: Option<String>,
    pub min_pos: usize,
    pub min_neg: usize,
    pub allow_missing: bool,
    pub bootstrap: Option<BootstrapPlan>,
    #[serde(skip)]
    pub report_out: Option<PathBuf>,
    #[serde(skip)]
    pub plot_out: Option<PathBuf>,
}

impl ResolvedConfig {
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        sha256_hex(&canonical)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
