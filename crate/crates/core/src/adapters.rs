//! Reductions from multiclass and real-valued targets to binary problems.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gap::{analyze, AnalysisError, AnalysisOptions, GapAnalysis};
use crate::grouping::EvaluationRecord;
use crate::roc::{AucError, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassRecord {
    /// Per-class scores; rows need not sum to one.
    pub class_scores: BTreeMap<String, f64>,
    pub true_class: String,
    pub attributes: BTreeMap<String, String>,
    pub fold_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTargetRecord {
    pub predicted_value: f64,
    pub true_value: f64,
    pub attributes: BTreeMap<String, String>,
    pub fold_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdapterError {
    #[error("record {record} has no score for class `{class}`")]
    UnknownClass { record: usize, class: String },
    #[error("record {record}: true class `{class}` has no score column")]
    TrueClassWithoutScore { record: usize, class: String },
    #[error("AUC undefined for class `{0}`: no record has it as true class")]
    NoPositivesForClass(String),
    #[error("record {record}: non-finite value {value}")]
    NonFinite { record: usize, value: f64 },
    #[error("threshold must be finite, got {0}")]
    NonFiniteThreshold(f64),
    #[error("degenerate labeling: thresholding gives {n_pos} positives and {n_neg} negatives")]
    DegenerateLabeling { n_pos: usize, n_neg: usize },
    #[error("multiclass data needs at least 2 classes, found {0}")]
    TooFewClasses(usize),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Binary view of `records` with `target_class` as the positive class.
pub fn one_vs_rest(records: &[MulticlassRecord], target_class: &str) -> Result<Vec<EvaluationRecord>, AdapterError> {
    let mut out = Vec::with_capacity(records.len());
    let mut any_positive = false;
    for (i, r) in records.iter().enumerate() {
        let score = *r.class_scores.get(target_class).ok_or_else(|| AdapterError::UnknownClass {
            record: i,
            class: target_class.to_owned(),
        })?;
        if !score.is_finite() {
            return Err(AdapterError::NonFinite { record: i, value: score });
        }
        if !r.class_scores.contains_key(&r.true_class) {
            return Err(AdapterError::TrueClassWithoutScore {
                record: i,
                class: r.true_class.clone(),
            });
        }
        let positive = r.true_class == target_class;
        any_positive |= positive;
        out.push(EvaluationRecord {
            score,
            label: Label::from_bool(positive),
            attributes: r.attributes.clone(),
            fold_id: r.fold_id.clone(),
        });
    }
    if !any_positive {
        return Err(AdapterError::NoPositivesForClass(target_class.to_owned()));
    }
    Ok(out)
}

/// Binary view with `true_value >= threshold` as positive.
pub fn threshold_real(records: &[RealTargetRecord], threshold: f64) -> Result<Vec<EvaluationRecord>, AdapterError> {
    if !threshold.is_finite() {
        return Err(AdapterError::NonFiniteThreshold(threshold));
    }
    let mut out = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        for value in [r.predicted_value, r.true_value] {
            if !value.is_finite() {
                return Err(AdapterError::NonFinite { record: i, value });
            }
        }
        out.push(EvaluationRecord {
            score: r.predicted_value,
            label: Label::from_bool(r.true_value >= threshold),
            attributes: r.attributes.clone(),
            fold_id: r.fold_id.clone(),
        });
    }
    let n_pos = out.iter().filter(|r| r.label.is_positive()).count();
    let n_neg = out.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(AdapterError::DegenerateLabeling { n_pos, n_neg });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ClassOutcome {
    Analyzed(Box<GapAnalysis>),
    Degenerate { reason: String },
}

impl ClassOutcome {
    pub fn analysis(&self) -> Option<&GapAnalysis> {
        match self {
            ClassOutcome::Analyzed(a) => Some(a),
            ClassOutcome::Degenerate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMax {
    pub class: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSweep {
    pub classes: BTreeMap<String, ClassOutcome>,
    /// Largest per-class gap ("max over classes"); ties go to the smallest
    /// class name.
    pub max_over_classes: Option<ClassMax>,
}

/// Runs the full gap pipeline once per class (one-vs-rest).
///
/// Classes come from the first record's score columns, or from `only` when
/// given. Classes with no positives, or whose overall AUC is undefined, are
/// reported as [`ClassOutcome::Degenerate`]; grouping errors abort the sweep.
pub fn per_class_gap_sweep(
    records: &[MulticlassRecord],
    options: &AnalysisOptions,
    only: Option<&[String]>,
) -> Result<ClassSweep, AdapterError> {
    let all: Vec<String> = records
        .first()
        .map(|r| r.class_scores.keys().cloned().collect())
        .unwrap_or_default();
    if all.len() < 2 {
        return Err(AdapterError::TooFewClasses(all.len()));
    }
    let mut classes: Vec<String> = match only {
        Some(filter) => {
            if let Some(unknown) = filter.iter().find(|c| !all.contains(c)) {
                return Err(AdapterError::UnknownClass {
                    record: 0,
                    class: unknown.clone(),
                });
            }
            filter.to_vec()
        }
        None => all,
    };
    classes.sort();
    classes.dedup();

    let results = options.execution.map(&classes, |class| -> Result<ClassOutcome, AdapterError> {
        let binary = match one_vs_rest(records, class) {
            Ok(b) => b,
            Err(e @ AdapterError::NoPositivesForClass(_)) => {
                return Ok(ClassOutcome::Degenerate { reason: e.to_string() })
            }
            Err(e) => return Err(e),
        };
        match analyze(&binary, options) {
            Ok(a) => Ok(ClassOutcome::Analyzed(Box::new(a))),
            Err(e @ (AnalysisError::Auc(AucError::NoPositives | AucError::NoNegatives) | AnalysisError::NoDefinedFold)) => {
                Ok(ClassOutcome::Degenerate { reason: e.to_string() })
            }
            Err(e) => Err(e.into()),
        }
    });

    let mut out = BTreeMap::new();
    for (class, result) in classes.into_iter().zip(results) {
        out.insert(class, result?);
    }
    let mut max_over_classes: Option<ClassMax> = None;
    for (class, outcome) in &out {
        if let Some(a) = outcome.analysis() {
            if max_over_classes.as_ref().is_none_or(|m| a.gap.value > m.value) {
                max_over_classes = Some(ClassMax {
                    class: class.clone(),
                    value: a.gap.value,
                });
            }
        }
    }
    Ok(ClassSweep {
        classes: out,
        max_over_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::GroupSpec;

    fn mc(scores: &[(&str, f64)], truth: &str, group: &str) -> MulticlassRecord {
        MulticlassRecord {
            class_scores: scores.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            true_class: truth.into(),
            attributes: [("g".to_string(), group.to_string())].into(),
            fold_id: None,
        }
    }

    fn real(pred: f64, truth: f64) -> RealTargetRecord {
        RealTargetRecord {
            predicted_value: pred,
            true_value: truth,
            attributes: BTreeMap::new(),
            fold_id: Some("f".into()),
        }
    }

    #[test]
    fn one_vs_rest_definition() {
        let records = [mc(&[("A", 0.7), ("B", 0.2), ("C", 0.1)], "A", "x")];
        let a = one_vs_rest(&records, "A").unwrap();
        assert_eq!((a[0].score, a[0].label), (0.7, Label::Positive));
        let records = [
            mc(&[("A", 0.7), ("B", 0.2), ("C", 0.1)], "A", "x"),
            mc(&[("A", 0.1), ("B", 0.8), ("C", 0.1)], "B", "x"),
        ];
        let b = one_vs_rest(&records, "B").unwrap();
        assert_eq!((b[0].score, b[0].label), (0.2, Label::Negative));
        assert_eq!(b[0].attributes, records[0].attributes);
    }

    #[test]
    fn one_vs_rest_errors() {
        let records = [mc(&[("A", 0.7), ("B", 0.3)], "A", "x")];
        assert!(matches!(one_vs_rest(&records, "Z"), Err(AdapterError::UnknownClass { .. })));
        assert_eq!(
            one_vs_rest(&records, "B"),
            Err(AdapterError::NoPositivesForClass("B".into()))
        );
        let bad = [mc(&[("A", 0.7), ("B", 0.3)], "C", "x")];
        assert!(matches!(
            one_vs_rest(&bad, "A"),
            Err(AdapterError::TrueClassWithoutScore { .. })
        ));
    }

    #[test]
    fn threshold_uses_greater_or_equal() {
        let records = [real(0.0, 1.2), real(0.0, 3.4), real(0.0, 2.0)];
        let labels: Vec<Label> = threshold_real(&records, 2.0).unwrap().iter().map(|r| r.label).collect();
        assert_eq!(labels, [Label::Negative, Label::Positive, Label::Positive]);
        assert_eq!(
            threshold_real(&records, 1.0),
            Err(AdapterError::DegenerateLabeling { n_pos: 3, n_neg: 0 })
        );
        assert!(matches!(
            threshold_real(&records, f64::NAN),
            Err(AdapterError::NonFiniteThreshold(_))
        ));
        assert!(matches!(
            threshold_real(&[real(f64::INFINITY, 1.0)], 0.5),
            Err(AdapterError::NonFinite { record: 0, .. })
        ));
    }

    #[test]
    fn sweep_rejects_single_class_and_unknown_filter() {
        let one = [mc(&[("A", 0.5)], "A", "x")];
        let options = AnalysisOptions::new(vec![GroupSpec::Single("g".into())]);
        assert_eq!(
            per_class_gap_sweep(&one, &options, None),
            Err(AdapterError::TooFewClasses(1))
        );
        let two = [mc(&[("A", 0.5), ("B", 0.5)], "A", "x")];
        assert!(per_class_gap_sweep(&two, &options, Some(&["Q".to_string()])).is_err());
    }

    #[test]
    fn sweep_marks_classes_without_positives_degenerate() {
        let records = [
            mc(&[("A", 0.9), ("B", 0.1), ("C", 0.0)], "A", "x"),
            mc(&[("A", 0.2), ("B", 0.8), ("C", 0.0)], "B", "x"),
            mc(&[("A", 0.8), ("B", 0.2), ("C", 0.0)], "A", "y"),
            mc(&[("A", 0.1), ("B", 0.9), ("C", 0.0)], "B", "y"),
        ];
        let options = AnalysisOptions::new(vec![GroupSpec::Single("g".into())]);
        let sweep = per_class_gap_sweep(&records, &options, None).unwrap();
        assert!(matches!(sweep.classes["C"], ClassOutcome::Degenerate { .. }));
        assert_eq!(sweep.classes["A"].analysis().unwrap().gap.value, 0.0);
        assert_eq!(sweep.max_over_classes.as_ref().unwrap().class, "A");
    }
}
