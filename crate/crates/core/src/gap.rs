//! Subgroup AUC tables, the AUC Gap, and its bootstrap interval.
//!
//! When records carry fold ids, every AUC (overall and per group) is the
//! unweighted mean of per-fold AUCs over the folds where the group has both
//! classes. Without fold ids the single evaluation set is used directly.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::grouping::{
    build_groups, validate_groups, EvaluationRecord, GroupAssignment, GroupSpec, GroupStatus,
    GroupValidity, GroupingError, MissingPolicy, ValidityPolicy,
};
use crate::roc::{ascending_order, auc_from_twice_u, auc_rank, AucError, AucValue, Label};

/// Warning attached to a gap computed over fewer than two groups.
pub const FEWER_THAN_TWO_GROUPS: &str = "fewer than 2 valid groups";

/// Fold key for records without a fold id when other records have one.
pub const MISSING_FOLD: &str = "(missing)";

pub const MIN_RESAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("AUC undefined: {0}")]
    Auc(#[from] AucError),
    #[error("AUC undefined: no fold contains both classes")]
    NoDefinedFold,
    #[error(transparent)]
    Grouping(#[from] GroupingError),
}

/// A (possibly fold-averaged) AUC over a set of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucSummary {
    pub value: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub per_fold: Option<BTreeMap<String, AucValue>>,
    pub skipped_folds: Vec<String>,
}

/// True when any record carries a fold id.
pub fn has_folds(records: &[EvaluationRecord]) -> bool {
    records.iter().any(|r| r.fold_id.is_some())
}

fn fold_key(record: &EvaluationRecord) -> &str {
    record.fold_id.as_deref().unwrap_or(MISSING_FOLD)
}

fn fold_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn summarize<I>(records: &[EvaluationRecord], members: I, fold_mode: bool) -> Result<AucSummary, AnalysisError>
where
    I: Iterator<Item = usize>,
{
    if !fold_mode {
        let (scores, labels): (Vec<f64>, Vec<Label>) =
            members.map(|i| (records[i].score, records[i].label)).unzip();
        let auc = auc_rank(&scores, &labels)?;
        return Ok(AucSummary {
            value: auc.value,
            n_pos: auc.n_pos,
            n_neg: auc.n_neg,
            per_fold: None,
            skipped_folds: Vec::new(),
        });
    }

    let mut folds: BTreeMap<&str, (Vec<f64>, Vec<Label>)> = BTreeMap::new();
    for i in members {
        let entry = folds.entry(fold_key(&records[i])).or_default();
        entry.0.push(records[i].score);
        entry.1.push(records[i].label);
    }
    let mut per_fold = BTreeMap::new();
    let mut skipped_folds = Vec::new();
    let (mut n_pos, mut n_neg) = (0, 0);
    for (fold, (scores, labels)) in &folds {
        let pos = labels.iter().filter(|l| l.is_positive()).count();
        n_pos += pos;
        n_neg += labels.len() - pos;
        match auc_rank(scores, labels) {
            Ok(auc) => {
                per_fold.insert(fold.to_string(), auc);
            }
            Err(AucError::NoPositives | AucError::NoNegatives) => skipped_folds.push(fold.to_string()),
            Err(e) => return Err(e.into()),
        }
    }
    if n_pos == 0 {
        return Err(AucError::NoPositives.into());
    }
    if n_neg == 0 {
        return Err(AucError::NoNegatives.into());
    }
    if per_fold.is_empty() {
        return Err(AnalysisError::NoDefinedFold);
    }
    let values: Vec<f64> = per_fold.values().map(|a: &AucValue| a.value).collect();
    Ok(AucSummary {
        value: fold_mean(&values),
        n_pos,
        n_neg,
        per_fold: Some(per_fold),
        skipped_folds,
    })
}

/// AUC over all records, fold-averaged when fold ids are present.
pub fn overall_auc(records: &[EvaluationRecord]) -> Result<AucSummary, AnalysisError> {
    summarize(records, 0..records.len(), has_folds(records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupEntry {
    pub group: String,
    pub members: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    #[serde(flatten)]
    pub status: GroupStatus,
    /// `None` for excluded groups and for valid groups whose AUC is undefined.
    pub auc: Option<f64>,
    pub undefined_reason: Option<String>,
    pub per_fold: Option<BTreeMap<String, AucValue>>,
    pub skipped_folds: Vec<String>,
}

impl SubgroupEntry {
    pub fn is_defined(&self) -> bool {
        self.status.is_valid() && self.auc.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupAucTable {
    /// Sorted by group name.
    pub entries: Vec<SubgroupEntry>,
    pub fold_mode: bool,
}

impl SubgroupAucTable {
    /// A table of valid groups with the given AUCs and no record detail.
    pub fn from_values<S: Into<String>>(values: impl IntoIterator<Item = (S, f64)>) -> Self {
        let mut entries: Vec<SubgroupEntry> = values
            .into_iter()
            .map(|(group, auc)| SubgroupEntry {
                group: group.into(),
                members: 0,
                n_pos: 0,
                n_neg: 0,
                status: GroupStatus::Valid,
                auc: Some(auc),
                undefined_reason: None,
                per_fold: None,
                skipped_folds: Vec::new(),
            })
            .collect();
        entries.sort_by(|a, b| a.group.cmp(&b.group));
        Self {
            entries,
            fold_mode: false,
        }
    }

    pub fn get(&self, group: &str) -> Option<&SubgroupEntry> {
        self.entries
            .binary_search_by(|e| e.group.as_str().cmp(group))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// `(group, auc)` for every group contributing to the gap, in name order.
    pub fn defined_aucs(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries
            .iter()
            .filter(|e| e.is_defined())
            .map(|e| (e.group.as_str(), e.auc.expect("defined entry")))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-group AUCs with the default [`Execution`].
///
/// # Panics
///
/// If `validity` has no entry for some group of `assignment`.
pub fn subgroup_aucs(
    records: &[EvaluationRecord],
    assignment: &GroupAssignment,
    validity: &[GroupValidity],
) -> SubgroupAucTable {
    subgroup_aucs_with(records, assignment, validity, Execution::default())
}

pub fn subgroup_aucs_with(
    records: &[EvaluationRecord],
    assignment: &GroupAssignment,
    validity: &[GroupValidity],
    execution: Execution,
) -> SubgroupAucTable {
    let fold_mode = has_folds(records);
    let status: BTreeMap<&str, GroupStatus> =
        validity.iter().map(|v| (v.group.as_str(), v.status)).collect();
    let groups: Vec<(&str, &[usize])> = assignment.iter().collect();

    let entries = execution.map(&groups, |&(name, members)| {
        let status = *status
            .get(name)
            .unwrap_or_else(|| panic!("no validity entry for group `{name}`"));
        let n_pos = members.iter().filter(|&&i| records[i].label.is_positive()).count();
        let mut entry = SubgroupEntry {
            group: name.to_owned(),
            members: members.len(),
            n_pos,
            n_neg: members.len() - n_pos,
            status,
            auc: None,
            undefined_reason: None,
            per_fold: None,
            skipped_folds: Vec::new(),
        };
        match status {
            GroupStatus::Excluded { reason } => entry.undefined_reason = Some(reason.to_string()),
            GroupStatus::Valid => match summarize(records, members.iter().copied(), fold_mode) {
                Ok(summary) => {
                    entry.auc = Some(summary.value);
                    entry.per_fold = summary.per_fold;
                    entry.skipped_folds = summary.skipped_folds;
                }
                Err(e) => entry.undefined_reason = Some(e.to_string()),
            },
        }
        entry
    });

    SubgroupAucTable { entries, fold_mode }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapValue {
    pub value: f64,
    pub arg_max_group: Option<String>,
    pub arg_min_group: Option<String>,
    pub n_valid_groups: usize,
    pub warning: Option<String>,
}

type Named<'a> = (&'a str, f64);

/// Returns `(max, min)`, ties resolved to the lexicographically smallest name.
fn extremes<'a>(values: impl Iterator<Item = Named<'a>>) -> Option<(Named<'a>, Named<'a>)> {
    let mut out: Option<(Named, Named)> = None;
    for (name, v) in values {
        out = Some(match out {
            None => ((name, v), (name, v)),
            Some((hi, lo)) => (
                if v > hi.1 || (v == hi.1 && name < hi.0) { (name, v) } else { hi },
                if v < lo.1 || (v == lo.1 && name < lo.0) { (name, v) } else { lo },
            ),
        });
    }
    out
}

/// Largest pairwise AUC difference over groups with a defined AUC.
///
/// Because AUCs are scalars this is `max - min`. Fewer than two groups give
/// a value of 0 and a [`FEWER_THAN_TWO_GROUPS`] warning.
pub fn auc_gap(table: &SubgroupAucTable) -> GapValue {
    let n_valid_groups = table.defined_aucs().count();
    match extremes(table.defined_aucs()) {
        Some(((max_name, max), (min_name, min))) => GapValue {
            value: if n_valid_groups < 2 { 0.0 } else { max - min },
            arg_max_group: Some(max_name.to_owned()),
            arg_min_group: Some(min_name.to_owned()),
            n_valid_groups,
            warning: (n_valid_groups < 2).then(|| FEWER_THAN_TWO_GROUPS.to_owned()),
        },
        None => GapValue {
            value: 0.0,
            arg_max_group: None,
            arg_min_group: None,
            n_valid_groups,
            warning: Some(FEWER_THAN_TWO_GROUPS.to_owned()),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    PercentileBootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapInterval {
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
    pub n_resamples: usize,
    /// Resamples dropped because some group lost a class.
    pub n_skipped: usize,
    pub seed: u64,
    pub method: IntervalMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub n_resamples: usize,
    pub seed: u64,
    pub confidence: f64,
    pub execution: Execution,
}

impl BootstrapOptions {
    pub fn new(n_resamples: usize, seed: u64) -> Self {
        Self {
            n_resamples,
            seed,
            confidence: 0.95,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BootstrapError {
    #[error("at least {MIN_RESAMPLES} resamples required, got {0}")]
    TooFewResamples(usize),
    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    InvalidConfidence(f64),
    #[error("bootstrap needs at least 2 valid groups on the full sample, found {0}")]
    TooFewValidGroups(usize),
    #[error("all {0} resamples were degenerate")]
    AllResamplesDegenerate(usize),
}

/// A group's members pre-sorted by score within each fold, so that a
/// resample (a multiplicity per member) is scored without re-sorting.
struct PreparedGroup {
    positive: Vec<bool>,
    folds: Vec<PreparedFold>,
}

struct PreparedFold {
    /// Member ordinals, ascending by score.
    order: Vec<usize>,
    /// Exclusive end offsets of tie blocks in `order`.
    block_ends: Vec<usize>,
}

impl PreparedGroup {
    fn new(records: &[EvaluationRecord], members: &[usize], fold_mode: bool) -> Self {
        let positive = members.iter().map(|&i| records[i].label.is_positive()).collect();
        let mut by_fold: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (ordinal, &i) in members.iter().enumerate() {
            let key = if fold_mode { fold_key(&records[i]) } else { "" };
            by_fold.entry(key).or_default().push(ordinal);
        }
        let folds = by_fold
            .into_values()
            .map(|ordinals| {
                let scores: Vec<f64> = ordinals.iter().map(|&o| records[members[o]].score).collect();
                let order: Vec<usize> = ascending_order(&scores).into_iter().map(|k| ordinals[k]).collect();
                let mut block_ends = Vec::new();
                for k in 1..=order.len() {
                    if k == order.len() || records[members[order[k]]].score != records[members[order[k - 1]]].score {
                        block_ends.push(k);
                    }
                }
                PreparedFold { order, block_ends }
            })
            .collect();
        Self { positive, folds }
    }

    fn len(&self) -> usize {
        self.positive.len()
    }

    /// Midrank AUC of the multiset where member `o` appears `weights[o]` times.
    fn weighted_auc(&self, weights: &[u32]) -> Option<f64> {
        let mut fold_values = Vec::with_capacity(self.folds.len());
        for fold in &self.folds {
            let (mut neg_below, mut total_pos, mut twice_u) = (0u128, 0u128, 0u128);
            let mut start = 0;
            for &end in &fold.block_ends {
                let (mut wp, mut wn) = (0u128, 0u128);
                for &o in &fold.order[start..end] {
                    if self.positive[o] {
                        wp += weights[o] as u128;
                    } else {
                        wn += weights[o] as u128;
                    }
                }
                twice_u += 2 * wp * neg_below + wp * wn;
                neg_below += wn;
                total_pos += wp;
                start = end;
            }
            if total_pos > 0 && neg_below > 0 {
                fold_values.push(auc_from_twice_u(twice_u, total_pos, neg_below));
            }
        }
        (!fold_values.is_empty()).then(|| fold_mean(&fold_values))
    }
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for the AUC Gap.
///
/// Each resample draws every valid group's members with replacement, keeping
/// the group size. Resample `b` uses a ChaCha20 stream `b` under `seed`, so the
/// interval is identical for any thread count.
pub fn bootstrap_gap(
    records: &[EvaluationRecord],
    assignment: &GroupAssignment,
    validity: &[GroupValidity],
    options: &BootstrapOptions,
) -> Result<GapInterval, BootstrapError> {
    if options.n_resamples < MIN_RESAMPLES {
        return Err(BootstrapError::TooFewResamples(options.n_resamples));
    }
    if !(options.confidence > 0.0 && options.confidence < 1.0) {
        return Err(BootstrapError::InvalidConfidence(options.confidence));
    }
    let fold_mode = has_folds(records);
    let valid: Vec<&str> = validity
        .iter()
        .filter(|v| v.status.is_valid())
        .map(|v| v.group.as_str())
        .collect();
    let groups: Vec<PreparedGroup> = assignment
        .iter()
        .filter(|(name, _)| valid.contains(name))
        .map(|(_, members)| PreparedGroup::new(records, members, fold_mode))
        .filter(|g| g.weighted_auc(&vec![1; g.len()]).is_some())
        .collect();
    if groups.len() < 2 {
        return Err(BootstrapError::TooFewValidGroups(groups.len()));
    }

    let gaps = options.execution.map_range(options.n_resamples, |b| {
        let mut rng = ChaCha20Rng::seed_from_u64(options.seed);
        rng.set_stream(b as u64);
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        let mut degenerate = false;
        for group in &groups {
            let m = group.len();
            let mut weights = vec![0u32; m];
            for _ in 0..m {
                weights[rng.random_range(0..m)] += 1;
            }
            // Keep drawing for the remaining groups so streams stay aligned.
            match group.weighted_auc(&weights) {
                Some(auc) => {
                    hi = hi.max(auc);
                    lo = lo.min(auc);
                }
                None => degenerate = true,
            }
        }
        (!degenerate).then_some(hi - lo)
    });

    let mut kept: Vec<f64> = gaps.into_iter().flatten().collect();
    let n_skipped = options.n_resamples - kept.len();
    if kept.is_empty() {
        return Err(BootstrapError::AllResamplesDegenerate(options.n_resamples));
    }
    kept.sort_by(f64::total_cmp);
    let tail = (1.0 - options.confidence) / 2.0;
    Ok(GapInterval {
        lower: percentile(&kept, tail),
        upper: percentile(&kept, 1.0 - tail),
        confidence: options.confidence,
        n_resamples: options.n_resamples,
        n_skipped,
        seed: options.seed,
        method: IntervalMethod::PercentileBootstrap,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub specs: Vec<GroupSpec>,
    pub missing: MissingPolicy,
    pub validity: ValidityPolicy,
    pub bootstrap: Option<BootstrapOptions>,
    pub execution: Execution,
}

impl AnalysisOptions {
    pub fn new(specs: Vec<GroupSpec>) -> Self {
        Self {
            specs,
            missing: MissingPolicy::default(),
            validity: ValidityPolicy::default(),
            bootstrap: None,
            execution: Execution::default(),
        }
    }
}

/// Everything the pipeline knows about one binary problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapAnalysis {
    pub overall: AucSummary,
    pub table: SubgroupAucTable,
    pub gap: GapValue,
    pub interval: Option<GapInterval>,
    pub warnings: Vec<String>,
}

/// Group, validate, score each group, and compute the gap.
///
/// Only an undefined overall AUC or a grouping error is fatal. Bootstrap
/// failures and a degenerate gap are reported as warnings.
pub fn analyze(records: &[EvaluationRecord], options: &AnalysisOptions) -> Result<GapAnalysis, AnalysisError> {
    let overall = overall_auc(records)?;
    let assignment = build_groups(records, &options.specs, options.missing)?;
    let validity = validate_groups(&assignment, records, &options.validity);
    let table = subgroup_aucs_with(records, &assignment, &validity, options.execution);
    let gap = auc_gap(&table);

    let mut warnings: Vec<String> = gap.warning.iter().cloned().collect();
    let interval = options.bootstrap.as_ref().and_then(|b| {
        match bootstrap_gap(records, &assignment, &validity, b) {
            Ok(interval) => {
                if interval.n_skipped > 0 {
                    warnings.push(format!(
                        "bootstrap: {} of {} resamples skipped because a group lost a class",
                        interval.n_skipped, interval.n_resamples
                    ));
                }
                Some(interval)
            }
            Err(e) => {
                warnings.push(format!("bootstrap skipped: {e}"));
                None
            }
        }
    });

    Ok(GapAnalysis {
        overall,
        table,
        gap,
        interval,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::ExclusionReason;
    use crate::roc::Label::{Negative as N, Positive as P};

    fn rec(score: f64, label: Label, group: &str) -> EvaluationRecord {
        EvaluationRecord::new(score, label).with_attribute("g", group)
    }

    fn table_for(records: &[EvaluationRecord], specs: &[GroupSpec]) -> SubgroupAucTable {
        let a = build_groups(records, specs, MissingPolicy::Error).unwrap();
        let v = validate_groups(&a, records, &ValidityPolicy::default());
        subgroup_aucs(records, &a, &v)
    }

    #[test]
    fn identity_group_matches_overall() {
        let records = vec![rec(0.1, N, "a"), rec(0.4, N, "a"), rec(0.35, P, "a"), rec(0.8, P, "a")];
        let table = table_for(
            &records,
            &[GroupSpec::Explicit {
                name: "all".into(),
                conditions: vec![],
            }],
        );
        assert_eq!(table.get("all").unwrap().auc, Some(overall_auc(&records).unwrap().value));
    }

    #[test]
    fn disjoint_perfect_groups() {
        let records = vec![rec(0.9, P, "a"), rec(0.1, N, "a"), rec(0.3, P, "b"), rec(0.2, N, "b")];
        let table = table_for(&records, &[GroupSpec::Single("g".into())]);
        assert_eq!(table.get("g=a").unwrap().auc, Some(1.0));
        assert_eq!(table.get("g=b").unwrap().auc, Some(1.0));
        assert_eq!(auc_gap(&table).value, 0.0);
    }

    /// Fold with 2 positives and 5 negatives winning `wins` of 10 pairs.
    fn fold(fold: &str, wins: usize) -> Vec<EvaluationRecord> {
        let mut out: Vec<EvaluationRecord> = (0..5)
            .map(|k| rec(k as f64, N, "a").with_fold(fold))
            .collect();
        // positive at 4.5 beats 5 negatives; positive at w + 0.5 beats w.
        out.push(rec(4.5, P, "a").with_fold(fold));
        out.push(rec(wins as f64 - 5.0 - 0.5, P, "a").with_fold(fold));
        out
    }

    #[test]
    fn fold_average_is_unweighted_mean() {
        let mut records = fold("k1", 7);
        records.extend(fold("k2", 8));
        let table = table_for(&records, &[GroupSpec::Single("g".into())]);
        let entry = table.get("g=a").unwrap();
        let per_fold = entry.per_fold.as_ref().unwrap();
        assert_eq!(per_fold["k1"].value, 0.7);
        assert_eq!(per_fold["k2"].value, 0.8);
        assert!((entry.auc.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fold_skips_single_class_folds() {
        let mut records = fold("k1", 7);
        records.push(rec(0.3, N, "a").with_fold("k0"));
        let summary = overall_auc(&records).unwrap();
        assert_eq!(summary.value, 0.7);
        assert_eq!(summary.skipped_folds, ["k0"]);
        assert_eq!((summary.n_pos, summary.n_neg), (2, 6));
    }

    #[test]
    fn gap_example_and_tie_breaking() {
        let gap = auc_gap(&SubgroupAucTable::from_values([("g1", 0.8), ("g2", 0.7), ("g3", 0.75)]));
        assert!((gap.value - 0.1).abs() < 1e-12);
        assert_eq!(gap.arg_max_group.as_deref(), Some("g1"));
        assert_eq!(gap.arg_min_group.as_deref(), Some("g2"));
        assert_eq!(gap.n_valid_groups, 3);
        assert!(gap.warning.is_none());

        let tied = auc_gap(&SubgroupAucTable::from_values([("z", 0.9), ("b", 0.9), ("y", 0.6), ("c", 0.6)]));
        assert_eq!(tied.arg_max_group.as_deref(), Some("b"));
        assert_eq!(tied.arg_min_group.as_deref(), Some("c"));
    }

    #[test]
    fn single_or_no_group_warns() {
        let one = auc_gap(&SubgroupAucTable::from_values([("only", 0.8)]));
        assert_eq!(one.value, 0.0);
        assert_eq!(one.n_valid_groups, 1);
        assert_eq!(one.warning.as_deref(), Some(FEWER_THAN_TWO_GROUPS));
        let none = auc_gap(&SubgroupAucTable::from_values(Vec::<(String, f64)>::new()));
        assert_eq!(none.value, 0.0);
        assert_eq!(none.arg_max_group, None);
        assert!(none.warning.is_some());
    }

    #[test]
    fn excluded_groups_do_not_enter_gap() {
        let records = vec![
            rec(0.9, P, "a"),
            rec(0.1, N, "a"),
            rec(0.3, P, "b"),
            rec(0.5, N, "b"),
            rec(0.2, N, "c"),
            rec(0.7, N, "c"),
        ];
        let table = table_for(&records, &[GroupSpec::Single("g".into())]);
        let c = table.get("g=c").unwrap();
        assert_eq!(
            c.status,
            GroupStatus::Excluded {
                reason: ExclusionReason::NoPositives
            }
        );
        assert_eq!(c.auc, None);
        assert_eq!(c.undefined_reason.as_deref(), Some("no-positives"));
        let gap = auc_gap(&table);
        assert_eq!(gap.value, 1.0);
        assert_eq!(gap.n_valid_groups, 2);
    }

    #[test]
    fn weighted_walk_matches_rank_on_materialised_resample() {
        let records: Vec<EvaluationRecord> = (0..40)
            .map(|i| rec(((i * 7) % 11) as f64, Label::from_bool(i % 3 == 0), "a"))
            .collect();
        let members: Vec<usize> = (0..40).collect();
        let group = PreparedGroup::new(&records, &members, false);
        let weights: Vec<u32> = (0..40).map(|i| (i % 4) as u32).collect();
        let (mut s, mut l) = (Vec::new(), Vec::new());
        for (o, &w) in weights.iter().enumerate() {
            for _ in 0..w {
                s.push(records[o].score);
                l.push(records[o].label);
            }
        }
        assert_eq!(group.weighted_auc(&weights), Some(auc_rank(&s, &l).unwrap().value));
        assert_eq!(
            group.weighted_auc(&[1; 40]),
            Some(overall_auc(&records).unwrap().value)
        );
    }

    #[test]
    fn bootstrap_argument_checks() {
        let records = vec![rec(0.9, P, "a"), rec(0.1, N, "a"), rec(0.3, P, "b"), rec(0.2, N, "b")];
        let a = build_groups(&records, &[GroupSpec::Single("g".into())], MissingPolicy::Error).unwrap();
        let v = validate_groups(&a, &records, &ValidityPolicy::default());
        assert_eq!(
            bootstrap_gap(&records, &a, &v, &BootstrapOptions::new(10, 1)),
            Err(BootstrapError::TooFewResamples(10))
        );
        let mut bad = BootstrapOptions::new(100, 1);
        bad.confidence = 1.0;
        assert!(matches!(
            bootstrap_gap(&records, &a, &v, &bad),
            Err(BootstrapError::InvalidConfidence(_))
        ));
        let only_a = build_groups(
            &records,
            &[GroupSpec::Explicit {
                name: "a".into(),
                conditions: vec![("g".into(), "a".into())],
            }],
            MissingPolicy::Error,
        )
        .unwrap();
        let v = validate_groups(&only_a, &records, &ValidityPolicy::default());
        assert_eq!(
            bootstrap_gap(&records, &only_a, &v, &BootstrapOptions::new(100, 1)),
            Err(BootstrapError::TooFewValidGroups(1))
        );
    }

    #[test]
    fn percentile_interpolates() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&xs, 0.0), 0.0);
        assert_eq!(percentile(&xs, 1.0), 4.0);
        assert_eq!(percentile(&xs, 0.5), 2.0);
        assert!((percentile(&xs, 0.1) - 0.4).abs() < 1e-15);
    }
}
