//! ROC curves and AUC for scored binary outcomes.
//!
//! Two independent routes to the same number:
//!
//! * [`roc_curve`] + [`auc_trapezoid`]: sweep the decision threshold `t` over
//!   the distinct scores (rule: `score >= t` predicts positive) and integrate
//!   TPR over FPR with trapezoids. Tied scores collapse to one curve point, so
//!   the trapezoid through that point gives tied pos/neg pairs half credit.
//! * [`auc_rank`]: the Mann-Whitney statistic from midrank sums, i.e. the
//!   fraction of (positive, negative) pairs ordered correctly, ties counting
//!   one half.
//!
//! Both sort with the input index as secondary key, so results are
//! reproducible bit for bit.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn inverted(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AucError {
    #[error("length mismatch: {scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("AUC undefined: no positive labels")]
    NoPositives,
    #[error("AUC undefined: no negative labels")]
    NoNegatives,
    #[error("score at index {index} is not finite ({value})")]
    NonFiniteScore { index: usize, value: f64 },
}

/// One threshold of the sweep. The leading point carries `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    n_pos: usize,
    n_neg: usize,
}

impl RocCurve {
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_neg(&self) -> usize {
        self.n_neg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucValue {
    pub value: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Validates a score/label pair of slices and returns `(n_pos, n_neg)`.
pub(crate) fn check_inputs(scores: &[f64], labels: &[Label]) -> Result<(usize, usize), AucError> {
    if scores.len() != labels.len() {
        return Err(AucError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
        return Err(AucError::NonFiniteScore { index, value });
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 {
        return Err(AucError::NoPositives);
    }
    if n_neg == 0 {
        return Err(AucError::NoNegatives);
    }
    Ok((n_pos, n_neg))
}

/// Compares finite scores; `-0.0` and `0.0` are equal.
#[inline]
pub(crate) fn cmp_scores(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("scores are finite")
}

/// Index permutation sorting scores ascending, ties by input index.
pub(crate) fn ascending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| cmp_scores(scores[a], scores[b]).then(a.cmp(&b)));
    order
}

/// `U / (n_pos * n_neg)` given `2U`, which is always an integer under
/// midrank tie handling.
#[inline]
pub(crate) fn auc_from_twice_u(twice_u: u128, n_pos: u128, n_neg: u128) -> f64 {
    twice_u as f64 / (2 * n_pos * n_neg) as f64
}

/// Empirical ROC curve with one point per distinct score.
pub fn roc_curve(scores: &[f64], labels: &[Label]) -> Result<RocCurve, AucError> {
    let (n_pos, n_neg) = check_inputs(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| cmp_scores(scores[b], scores[a]).then(a.cmp(&b)));

    let mut points = Vec::with_capacity(order.len() + 1);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    });

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut start = 0;
    while start < order.len() {
        let threshold = scores[order[start]];
        let mut end = start;
        while end < order.len() && scores[order[end]] == threshold {
            if labels[order[end]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            end += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            threshold,
        });
        start = end;
    }

    Ok(RocCurve {
        points,
        n_pos,
        n_neg,
    })
}

/// Trapezoidal area under the curve's points.
pub fn auc_trapezoid(curve: &RocCurve) -> AucValue {
    let area: f64 = curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) * 0.5)
        .sum();
    AucValue {
        value: area.clamp(0.0, 1.0),
        n_pos: curve.n_pos,
        n_neg: curve.n_neg,
    }
}

/// Midrank AUC in `O(n log n)`.
pub fn auc_rank(scores: &[f64], labels: &[Label]) -> Result<AucValue, AucError> {
    let (n_pos, n_neg) = check_inputs(scores, labels)?;
    let order = ascending_order(scores);

    // Ranks are 1-based; a tie block occupying sorted positions start..end
    // shares the midrank (start + 1 + end) / 2, so twice the rank is integral.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let score = scores[order[start]];
        let mut end = start;
        let mut block_pos: u128 = 0;
        while end < order.len() && scores[order[end]] == score {
            if labels[order[end]].is_positive() {
                block_pos += 1;
            }
            end += 1;
        }
        twice_rank_sum += block_pos * (start + 1 + end) as u128;
        start = end;
    }

    let (p, n) = (n_pos as u128, n_neg as u128);
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(AucValue {
        value: auc_from_twice_u(twice_u, p, n),
        n_pos,
        n_neg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn brute_force(scores: &[f64], labels: &[Label]) -> f64 {
        let mut credit = 0.0;
        let mut pairs = 0.0;
        for (i, li) in labels.iter().enumerate() {
            for (j, lj) in labels.iter().enumerate() {
                if li.is_positive() && !lj.is_positive() {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        credit += 1.0;
                    } else if scores[i] == scores[j] {
                        credit += 0.5;
                    }
                }
            }
        }
        credit / pairs
    }

    fn triples(curve: &RocCurve) -> Vec<(f64, f64, f64)> {
        curve
            .points()
            .iter()
            .map(|p| (p.fpr, p.tpr, p.threshold))
            .collect()
    }

    #[test]
    fn perfect_separation_is_unit_step() {
        let curve = roc_curve(&[0.9, 0.1], &[P, N]).unwrap();
        assert_eq!(
            triples(&curve),
            vec![(0.0, 0.0, f64::INFINITY), (0.0, 1.0, 0.9), (1.0, 1.0, 0.1)]
        );
        assert_eq!(auc_trapezoid(&curve).value, 1.0);
    }

    #[test]
    fn single_tied_group_collapses_to_diagonal() {
        let curve = roc_curve(&[0.5, 0.5], &[P, N]).unwrap();
        assert_eq!(
            triples(&curve),
            vec![(0.0, 0.0, f64::INFINITY), (1.0, 1.0, 0.5)]
        );
        assert_eq!(auc_trapezoid(&curve).value, 0.5);
    }

    #[test]
    fn four_point_example_matches_pairwise_count() {
        let scores = [0.1, 0.4, 0.35, 0.8];
        let labels = [N, N, P, P];
        // 3 of 4 pairs ordered correctly.
        assert_eq!(brute_force(&scores, &labels), 0.75);
        let curve = roc_curve(&scores, &labels).unwrap();
        assert!((auc_trapezoid(&curve).value - 0.75).abs() < 1e-12);
        let rank = auc_rank(&scores, &labels).unwrap();
        assert_eq!(rank.value, 0.75);
        assert_eq!((rank.n_pos, rank.n_neg), (2, 2));
    }

    #[test]
    fn rank_extremes() {
        assert_eq!(auc_rank(&[0.2, 0.8], &[N, P]).unwrap().value, 1.0);
        assert_eq!(auc_rank(&[0.8, 0.2], &[N, P]).unwrap().value, 0.0);
    }

    #[test]
    fn all_equal_scores_give_exactly_one_half() {
        let labels = [P, N, N, P, N, N, N];
        let scores = [3.25; 7];
        assert_eq!(auc_rank(&scores, &labels).unwrap().value, 0.5);
        let curve = roc_curve(&scores, &labels).unwrap();
        assert_eq!(curve.points().len(), 2);
        assert_eq!(auc_trapezoid(&curve).value, 0.5);
    }

    #[test]
    fn signed_zeros_are_one_tie_block() {
        let scores = [-0.0, 0.0];
        let labels = [P, N];
        assert_eq!(auc_rank(&scores, &labels).unwrap().value, 0.5);
        assert_eq!(roc_curve(&scores, &labels).unwrap().points().len(), 2);
    }

    #[test]
    fn error_paths() {
        assert_eq!(
            auc_rank(&[0.1, 0.2], &[P]),
            Err(AucError::LengthMismatch {
                scores: 2,
                labels: 1
            })
        );
        assert_eq!(auc_rank(&[0.1, 0.2], &[N, N]), Err(AucError::NoPositives));
        assert_eq!(roc_curve(&[0.1, 0.2], &[P, P]), Err(AucError::NoNegatives));
        assert_eq!(auc_rank(&[], &[]), Err(AucError::NoPositives));
        assert!(matches!(
            roc_curve(&[0.1, f64::NAN], &[P, N]),
            Err(AucError::NonFiniteScore { index: 1, .. })
        ));
        assert!(matches!(
            auc_rank(&[f64::NEG_INFINITY, 0.0], &[P, N]),
            Err(AucError::NonFiniteScore { index: 0, .. })
        ));
    }

    #[test]
    fn ties_across_classes_split_credit() {
        // pos {0.5, 0.7}, neg {0.5, 0.2}: pairs (0.5,0.5)=0.5, (0.5,0.2)=1,
        // (0.7,0.5)=1, (0.7,0.2)=1 -> 3.5/4
        let scores = [0.5, 0.7, 0.5, 0.2];
        let labels = [P, P, N, N];
        assert_eq!(brute_force(&scores, &labels), 0.875);
        assert_eq!(auc_rank(&scores, &labels).unwrap().value, 0.875);
        let curve = roc_curve(&scores, &labels).unwrap();
        assert!((auc_trapezoid(&curve).value - 0.875).abs() < 1e-12);
    }
}
