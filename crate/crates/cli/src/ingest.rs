//! CSV ingest: header row, RFC 4180 quoting, columns mapped by the config.

use std::collections::{BTreeMap, BTreeSet};

use aucgap::{EvaluationRecord, Label, MulticlassRecord, RealTargetRecord};
use thiserror::Error;

use crate::config::{sha256_hex, ResolvedConfig, Task};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("input has a header but no data rows")]
    Empty,
    #[error("line {line}, column `{column}`: not numeric: {value:?}")]
    NotNumeric { line: u64, column: String, value: String },
    #[error("line {line}, column `{column}`: non-finite value {value:?}")]
    NonFinite { line: u64, column: String, value: String },
    #[error("line {line}, column `{column}`: empty value (pass --allow-missing to treat it as missing)")]
    EmptyCell { line: u64, column: String },
    #[error("column `{column}`: labels must be `{positive}` and one other literal, observed {observed:?}")]
    LabelLiterals {
        column: String,
        positive: String,
        observed: Vec<String>,
    },
    #[error("line {line}: true class `{class}` has no score column")]
    UnknownClass { line: u64, class: String },
    #[error("{path}: not a report: {message}")]
    Report { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Binary(Vec<EvaluationRecord>),
    Multiclass(Vec<MulticlassRecord>),
    Real(Vec<RealTargetRecord>),
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Binary(r) => r.len(),
            Dataset::Multiclass(r) => r.len(),
            Dataset::Real(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub dataset: Dataset,
    /// sha256 of the raw input bytes.
    pub digest: String,
}

pub fn load(config: &ResolvedConfig) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(&config.input).map_err(|e| CliError::io(&config.input, e))?;
    parse(&bytes, config)
}

/// A cell accessor with the header resolved once.
struct Columns {
    index: BTreeMap<String, usize>,
}

impl Columns {
    fn require(&self, name: &str) -> Result<usize, CliError> {
        self.index.get(name).copied().ok_or_else(|| {
            let available: Vec<&str> = self.index.keys().map(String::as_str).collect();
            CliError::config(format!("input has no column `{name}` (columns: {})", available.join(", ")))
        })
    }
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    line: u64,
}

impl Row<'_> {
    fn cell(&self, idx: usize) -> &str {
        self.record.get(idx).unwrap_or("").trim()
    }

    fn number(&self, idx: usize, column: &str) -> Result<f64, IngestError> {
        let raw = self.cell(idx);
        if raw.is_empty() {
            return Err(IngestError::EmptyCell {
                line: self.line,
                column: column.to_owned(),
            });
        }
        let value: f64 = raw.parse().map_err(|_| IngestError::NotNumeric {
            line: self.line,
            column: column.to_owned(),
            value: raw.to_owned(),
        })?;
        if !value.is_finite() {
            return Err(IngestError::NonFinite {
                line: self.line,
                column: column.to_owned(),
                value: raw.to_owned(),
            });
        }
        Ok(value)
    }

    fn text(&self, idx: usize, column: &str) -> Result<String, IngestError> {
        let raw = self.cell(idx);
        if raw.is_empty() {
            return Err(IngestError::EmptyCell {
                line: self.line,
                column: column.to_owned(),
            });
        }
        Ok(raw.to_owned())
    }
}

pub fn parse(bytes: &[u8], config: &ResolvedConfig) -> Result<Loaded, CliError> {
    let digest = sha256_hex(bytes);
    let body = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(body);
    let csv_error = |e: csv::Error| IngestError::Csv {
        line: e.position().map_or(1, |p| p.line()),
        message: e.to_string(),
    };
    let header = reader.headers().map_err(csv_error)?.clone();
    let mut index = BTreeMap::new();
    for (i, name) in header.iter().enumerate() {
        if index.insert(name.trim().to_owned(), i).is_some() {
            return Err(CliError::config(format!("input header repeats column `{}`", name.trim())));
        }
    }
    let columns = Columns { index };

    let label_idx = columns.require(&config.label_column)?;
    let fold_idx = config.fold_column.as_deref().map(|c| columns.require(c)).transpose()?;
    let attribute_idx: Vec<(String, usize)> = config
        .attributes
        .iter()
        .map(|a| columns.require(a).map(|i| (a.clone(), i)))
        .collect::<Result<_, _>>()?;

    enum Scores {
        One(usize, String),
        PerClass(Vec<(String, usize, String)>),
    }
    let scores = match &config.task {
        Task::Binary { score_column, .. } | Task::RealThreshold { score_column, .. } => {
            Scores::One(columns.require(score_column)?, score_column.clone())
        }
        Task::Multiclass { class_columns, .. } => Scores::PerClass(
            class_columns
                .iter()
                .map(|(class, col)| columns.require(col).map(|i| (class.clone(), i, col.clone())))
                .collect::<Result<_, _>>()?,
        ),
    };

    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(csv_error)?;
        rows.push(record);
    }
    if rows.is_empty() {
        return Err(IngestError::Empty.into());
    }

    let label_column = config.label_column.as_str();
    let mut binary = Vec::new();
    let mut multi = Vec::new();
    let mut real = Vec::new();
    let mut literals = BTreeSet::new();
    for record in &rows {
        let row = Row {
            record,
            line: record.position().map_or(0, |p| p.line()),
        };
        let mut attributes = BTreeMap::new();
        for (name, idx) in &attribute_idx {
            let value = row.cell(*idx);
            if value.is_empty() {
                if !config.allow_missing {
                    return Err(IngestError::EmptyCell {
                        line: row.line,
                        column: name.clone(),
                    }
                    .into());
                }
            } else {
                attributes.insert(name.clone(), value.to_owned());
            }
        }
        let fold_id = fold_idx
            .map(|i| row.cell(i))
            .filter(|f| !f.is_empty())
            .map(str::to_owned);

        match (&config.task, &scores) {
            (Task::Binary { positive_label, .. }, Scores::One(idx, col)) => {
                let score = row.number(*idx, col)?;
                let literal = row.text(label_idx, label_column)?;
                let label = Label::from_bool(&literal == positive_label);
                literals.insert(literal);
                binary.push(EvaluationRecord {
                    score,
                    label,
                    attributes,
                    fold_id,
                });
            }
            (Task::RealThreshold { .. }, Scores::One(idx, col)) => {
                real.push(RealTargetRecord {
                    predicted_value: row.number(*idx, col)?,
                    true_value: row.number(label_idx, label_column)?,
                    attributes,
                    fold_id,
                });
            }
            (Task::Multiclass { .. }, Scores::PerClass(cols)) => {
                let mut class_scores = BTreeMap::new();
                for (class, idx, col) in cols {
                    class_scores.insert(class.clone(), row.number(*idx, col)?);
                }
                let true_class = row.text(label_idx, label_column)?;
                if !class_scores.contains_key(&true_class) {
                    return Err(IngestError::UnknownClass {
                        line: row.line,
                        class: true_class,
                    }
                    .into());
                }
                multi.push(MulticlassRecord {
                    class_scores,
                    true_class,
                    attributes,
                    fold_id,
                });
            }
            _ => unreachable!("score layout follows the task"),
        }
    }

    let dataset = match &config.task {
        Task::Binary {
            positive_label,
            negative_label,
            ..
        } => {
            let others: Vec<&String> = literals.iter().filter(|l| *l != positive_label).collect();
            let bad = match negative_label {
                Some(neg) => others.iter().any(|l| *l != neg),
                None => others.len() > 1,
            };
            if bad {
                return Err(IngestError::LabelLiterals {
                    column: config.label_column.clone(),
                    positive: positive_label.clone(),
                    observed: literals.into_iter().collect(),
                }
                .into());
            }
            Dataset::Binary(binary)
        }
        Task::Multiclass { .. } => Dataset::Multiclass(multi),
        Task::RealThreshold { .. } => Dataset::Real(real),
    };
    Ok(Loaded { dataset, digest })
}
