//! Evaluation records and subgroup construction.
//!
//! Subgroups are named membership sets over record indices. They may overlap:
//! a record can sit in `gender=F` and in `gender=F∧ses=low` at the same time,
//! or in no group at all (it still counts toward the overall AUC).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roc::Label;

/// Category used for absent attribute values under [`MissingPolicy::AsCategory`].
pub const MISSING_CATEGORY: &str = "(missing)";

/// Joins the `attr=value` terms of an intersection group name.
pub const CONJUNCTION: &str = "∧";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub score: f64,
    pub label: Label,
    pub attributes: BTreeMap<String, String>,
    pub fold_id: Option<String>,
}

impl EvaluationRecord {
    pub fn new(score: f64, label: Label) -> Self {
        Self {
            score,
            label,
            attributes: BTreeMap::new(),
            fold_id: None,
        }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    pub fn with_fold(mut self, fold_id: impl Into<String>) -> Self {
        self.fold_id = Some(fold_id.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSpec {
    /// One group per observed value of the attribute.
    Single(String),
    /// One group per observed combination of values.
    Intersection(Vec<String>),
    /// A named group selecting records where every `(attribute, value)` holds.
    /// An empty condition list selects every record.
    Explicit {
        name: String,
        conditions: Vec<(String, String)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Error,
    AsCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupingError {
    #[error("no group specifications given")]
    NoSpecs,
    #[error("group specification references an empty attribute name")]
    EmptyAttributeName,
    #[error("intersection needs at least one attribute")]
    EmptyIntersection,
    #[error("attribute `{0}` listed more than once in one intersection")]
    RepeatedAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("record {record} has no value for attribute `{attribute}`")]
    MissingValue { record: usize, attribute: String },
    #[error("duplicate group name `{0}`")]
    DuplicateGroupName(String),
    #[error("group `{group}` references record {index} but only {n_records} records exist")]
    MemberOutOfRange {
        group: String,
        index: usize,
        n_records: usize,
    },
    #[error("minimum class counts must be at least 1 (got min_pos={min_pos}, min_neg={min_neg})")]
    InvalidMinimum { min_pos: usize, min_neg: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupAssignment {
    groups: BTreeMap<String, Vec<usize>>,
    n_records: usize,
}

impl GroupAssignment {
    pub fn new(n_records: usize) -> Self {
        Self {
            groups: BTreeMap::new(),
            n_records,
        }
    }

    /// Adds a group. Members are sorted and deduplicated.
    pub fn insert(&mut self, name: impl Into<String>, members: Vec<usize>) -> Result<(), GroupingError> {
        let name = name.into();
        if self.groups.contains_key(&name) {
            return Err(GroupingError::DuplicateGroupName(name));
        }
        if let Some(&index) = members.iter().find(|&&i| i >= self.n_records) {
            return Err(GroupingError::MemberOutOfRange {
                group: name,
                index,
                n_records: self.n_records,
            });
        }
        let members: BTreeSet<usize> = members.into_iter().collect();
        self.groups.insert(name, members.into_iter().collect());
        Ok(())
    }

    pub fn n_records(&self) -> usize {
        self.n_records
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn members(&self, name: &str) -> Option<&[usize]> {
        self.groups.get(name).map(Vec::as_slice)
    }

    /// Groups in lexicographic name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }
}

fn attribute_value<'a>(
    records: &'a [EvaluationRecord],
    index: usize,
    attribute: &str,
    policy: MissingPolicy,
) -> Result<&'a str, GroupingError> {
    match (records[index].attributes.get(attribute), policy) {
        (Some(v), _) => Ok(v.as_str()),
        (None, MissingPolicy::AsCategory) => Ok(MISSING_CATEGORY),
        (None, MissingPolicy::Error) => Err(GroupingError::MissingValue {
            record: index,
            attribute: attribute.to_owned(),
        }),
    }
}

fn check_attribute(known: &BTreeSet<&str>, attribute: &str) -> Result<(), GroupingError> {
    if attribute.is_empty() {
        Err(GroupingError::EmptyAttributeName)
    } else if !known.contains(attribute) {
        Err(GroupingError::UnknownAttribute(attribute.to_owned()))
    } else {
        Ok(())
    }
}

/// Builds the named subgroups described by `specs`.
///
/// Single-attribute groups are named `attr=value`; intersection groups join
/// their terms with `∧` in the order the attributes were listed. Only observed
/// value combinations produce groups. Group names must be unique across all
/// specs.
pub fn build_groups(
    records: &[EvaluationRecord],
    specs: &[GroupSpec],
    missing: MissingPolicy,
) -> Result<GroupAssignment, GroupingError> {
    if specs.is_empty() {
        return Err(GroupingError::NoSpecs);
    }
    let known: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.attributes.keys().map(String::as_str))
        .collect();

    let mut assignment = GroupAssignment::new(records.len());
    for spec in specs {
        let mut produced: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        match spec {
            GroupSpec::Single(attribute) => {
                check_attribute(&known, attribute)?;
                for i in 0..records.len() {
                    let value = attribute_value(records, i, attribute, missing)?;
                    produced
                        .entry(format!("{attribute}={value}"))
                        .or_default()
                        .push(i);
                }
            }
            GroupSpec::Intersection(attributes) => {
                if attributes.is_empty() {
                    return Err(GroupingError::EmptyIntersection);
                }
                let mut seen = BTreeSet::new();
                for attribute in attributes {
                    check_attribute(&known, attribute)?;
                    if !seen.insert(attribute.as_str()) {
                        return Err(GroupingError::RepeatedAttribute(attribute.clone()));
                    }
                }
                for i in 0..records.len() {
                    let terms = attributes
                        .iter()
                        .map(|a| attribute_value(records, i, a, missing).map(|v| format!("{a}={v}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    produced.entry(terms.join(CONJUNCTION)).or_default().push(i);
                }
            }
            GroupSpec::Explicit { name, conditions } => {
                for (attribute, _) in conditions {
                    check_attribute(&known, attribute)?;
                }
                let mut members = Vec::new();
                for i in 0..records.len() {
                    let mut matched = true;
                    for (attribute, expected) in conditions {
                        if attribute_value(records, i, attribute, missing)? != expected {
                            matched = false;
                            break;
                        }
                    }
                    if matched {
                        members.push(i);
                    }
                }
                produced.insert(name.clone(), members);
            }
        }
        for (name, members) in produced {
            assignment.insert(name, members)?;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    NoPositives,
    NoNegatives,
    BelowMinSize,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionReason::NoPositives => "no-positives",
            ExclusionReason::NoNegatives => "no-negatives",
            ExclusionReason::BelowMinSize => "below-min-size",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GroupStatus {
    Valid,
    Excluded { reason: ExclusionReason },
}

impl GroupStatus {
    pub fn is_valid(self) -> bool {
        self == GroupStatus::Valid
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupValidity {
    pub group: String,
    #[serde(flatten)]
    pub status: GroupStatus,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Minimum positives and negatives a group needs for its AUC to be reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityPolicy {
    min_pos: usize,
    min_neg: usize,
}

impl ValidityPolicy {
    pub fn new(min_pos: usize, min_neg: usize) -> Result<Self, GroupingError> {
        if min_pos == 0 || min_neg == 0 {
            return Err(GroupingError::InvalidMinimum { min_pos, min_neg });
        }
        Ok(Self { min_pos, min_neg })
    }

    pub fn min_pos(&self) -> usize {
        self.min_pos
    }

    pub fn min_neg(&self) -> usize {
        self.min_neg
    }

    pub fn classify(&self, n_pos: usize, n_neg: usize) -> GroupStatus {
        let reason = if n_pos == 0 {
            ExclusionReason::NoPositives
        } else if n_neg == 0 {
            ExclusionReason::NoNegatives
        } else if n_pos < self.min_pos || n_neg < self.min_neg {
            ExclusionReason::BelowMinSize
        } else {
            return GroupStatus::Valid;
        };
        GroupStatus::Excluded { reason }
    }
}

impl Default for ValidityPolicy {
    fn default() -> Self {
        Self {
            min_pos: 1,
            min_neg: 1,
        }
    }
}

/// Annotates every group with its validity under `policy`, in group order.
pub fn validate_groups(
    assignment: &GroupAssignment,
    records: &[EvaluationRecord],
    policy: &ValidityPolicy,
) -> Vec<GroupValidity> {
    assignment
        .iter()
        .map(|(name, members)| {
            let n_pos = members
                .iter()
                .filter(|&&i| records[i].label.is_positive())
                .count();
            let n_neg = members.len() - n_pos;
            GroupValidity {
                group: name.to_owned(),
                status: policy.classify(n_pos, n_neg),
                n_pos,
                n_neg,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn rec(label: Label, gender: &str, ses: &str) -> EvaluationRecord {
        EvaluationRecord::new(0.5, label)
            .with_attribute("gender", gender)
            .with_attribute("ses", ses)
    }

    fn cohort() -> Vec<EvaluationRecord> {
        vec![
            rec(P, "M", "low"),
            rec(N, "F", "low"),
            rec(P, "F", "high"),
            rec(N, "M", "low"),
        ]
    }

    #[test]
    fn single_attribute_partitions_by_value() {
        let a = build_groups(&cohort(), &[GroupSpec::Single("gender".into())], MissingPolicy::Error).unwrap();
        let names: Vec<_> = a.names().collect();
        assert_eq!(names, ["gender=F", "gender=M"]);
        assert_eq!(a.members("gender=F"), Some(&[1, 2][..]));
        assert_eq!(a.members("gender=M"), Some(&[0, 3][..]));
    }

    #[test]
    fn intersection_emits_observed_combinations_only() {
        let a = build_groups(
            &cohort(),
            &[GroupSpec::Intersection(vec!["gender".into(), "ses".into()])],
            MissingPolicy::Error,
        )
        .unwrap();
        let names: Vec<_> = a.names().collect();
        assert_eq!(names, ["gender=F∧ses=high", "gender=F∧ses=low", "gender=M∧ses=low"]);
    }

    #[test]
    fn single_and_intersection_overlap() {
        let a = build_groups(
            &cohort(),
            &[
                GroupSpec::Single("gender".into()),
                GroupSpec::Intersection(vec!["gender".into(), "ses".into()]),
            ],
            MissingPolicy::Error,
        )
        .unwrap();
        assert!(a.members("gender=F").unwrap().contains(&1));
        assert!(a.members("gender=F∧ses=low").unwrap().contains(&1));
    }

    #[test]
    fn explicit_groups_and_all_records() {
        let a = build_groups(
            &cohort(),
            &[
                GroupSpec::Explicit {
                    name: "all".into(),
                    conditions: vec![],
                },
                GroupSpec::Explicit {
                    name: "low-M".into(),
                    conditions: vec![("gender".into(), "M".into()), ("ses".into(), "low".into())],
                },
            ],
            MissingPolicy::Error,
        )
        .unwrap();
        assert_eq!(a.members("all"), Some(&[0, 1, 2, 3][..]));
        assert_eq!(a.members("low-M"), Some(&[0, 3][..]));
    }

    #[test]
    fn grouping_errors() {
        let records = cohort();
        assert_eq!(
            build_groups(&records, &[], MissingPolicy::Error),
            Err(GroupingError::NoSpecs)
        );
        assert_eq!(
            build_groups(&records, &[GroupSpec::Single("race".into())], MissingPolicy::Error),
            Err(GroupingError::UnknownAttribute("race".into()))
        );
        assert_eq!(
            build_groups(&records, &[GroupSpec::Single("".into())], MissingPolicy::Error),
            Err(GroupingError::EmptyAttributeName)
        );
        assert_eq!(
            build_groups(&records, &[GroupSpec::Intersection(vec![])], MissingPolicy::Error),
            Err(GroupingError::EmptyIntersection)
        );
        assert_eq!(
            build_groups(
                &records,
                &[GroupSpec::Single("gender".into()), GroupSpec::Intersection(vec!["gender".into()])],
                MissingPolicy::Error
            ),
            Err(GroupingError::DuplicateGroupName("gender=F".into()))
        );
    }

    #[test]
    fn missing_values_error_or_form_their_own_group() {
        let mut records = cohort();
        records[2].attributes.remove("ses");
        let specs = [GroupSpec::Single("ses".into())];
        assert_eq!(
            build_groups(&records, &specs, MissingPolicy::Error),
            Err(GroupingError::MissingValue {
                record: 2,
                attribute: "ses".into()
            })
        );
        let a = build_groups(&records, &specs, MissingPolicy::AsCategory).unwrap();
        assert_eq!(a.members("ses=(missing)"), Some(&[2][..]));
    }

    #[test]
    fn validity_examples() {
        let policy = ValidityPolicy::default();
        assert_eq!(
            policy.classify(0, 4),
            GroupStatus::Excluded {
                reason: ExclusionReason::NoPositives
            }
        );
        assert_eq!(policy.classify(5, 5), GroupStatus::Valid);
        let strict = ValidityPolicy::new(3, 1).unwrap();
        assert_eq!(
            strict.classify(2, 1),
            GroupStatus::Excluded {
                reason: ExclusionReason::BelowMinSize
            }
        );
        assert_eq!(
            strict.classify(4, 0),
            GroupStatus::Excluded {
                reason: ExclusionReason::NoNegatives
            }
        );
        assert!(ValidityPolicy::new(0, 1).is_err());
    }

    #[test]
    fn validate_covers_every_group_without_touching_membership() {
        let records = cohort();
        let a = build_groups(
            &records,
            &[GroupSpec::Intersection(vec!["gender".into(), "ses".into()])],
            MissingPolicy::Error,
        )
        .unwrap();
        let before = a.clone();
        let v = validate_groups(&a, &records, &ValidityPolicy::default());
        assert_eq!(a, before);
        assert_eq!(v.len(), a.len());
        let statuses: Vec<_> = v.iter().map(|g| (g.group.as_str(), g.status)).collect();
        assert_eq!(
            statuses,
            [
                (
                    "gender=F∧ses=high",
                    GroupStatus::Excluded {
                        reason: ExclusionReason::NoNegatives
                    }
                ),
                (
                    "gender=F∧ses=low",
                    GroupStatus::Excluded {
                        reason: ExclusionReason::NoPositives
                    }
                ),
                ("gender=M∧ses=low", GroupStatus::Valid),
            ]
        );
    }

    #[test]
    fn insert_checks_names_and_bounds() {
        let mut a = GroupAssignment::new(3);
        a.insert("x", vec![2, 0, 2]).unwrap();
        assert_eq!(a.members("x"), Some(&[0, 2][..]));
        assert!(matches!(a.insert("x", vec![]), Err(GroupingError::DuplicateGroupName(_))));
        assert!(matches!(
            a.insert("y", vec![3]),
            Err(GroupingError::MemberOutOfRange { index: 3, .. })
        ));
    }
}
