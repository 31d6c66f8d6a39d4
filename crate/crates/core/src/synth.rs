//! Binormal synthetic cohorts with known AUCs.
//!
//! Negatives score `N(0, 1)`, positives `N(d', 1)`. The population AUC of such
//! a group is `Φ(d' / √2)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::grouping::EvaluationRecord;
use crate::normal::{cdf, NormalStream};
use crate::roc::Label;

/// Attribute carrying the recipe name on generated records.
pub const GROUP_ATTRIBUTE: &str = "group";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecipe {
    pub name: String,
    pub n_pos: usize,
    pub n_neg: usize,
    pub d_prime: f64,
}

impl GroupRecipe {
    pub fn new(name: impl Into<String>, n_pos: usize, n_neg: usize, d_prime: f64) -> Self {
        Self {
            name: name.into(),
            n_pos,
            n_neg,
            d_prime,
        }
    }

    pub fn theoretical_auc(&self) -> f64 {
        theoretical_auc(self.d_prime)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("duplicate recipe name `{0}`")]
    DuplicateName(String),
    #[error("recipe `{0}` needs at least one positive and one negative")]
    EmptyClass(String),
    #[error("recipe `{name}` has invalid separation {d_prime} (must be finite and >= 0)")]
    InvalidSeparation { name: String, d_prime: f64 },
}

/// Binormal AUC for separation `d_prime`.
pub fn theoretical_auc(d_prime: f64) -> f64 {
    cdf(d_prime / std::f64::consts::SQRT_2)
}

/// Generates each recipe's records in order: positives first, then negatives.
///
/// Recipe `i` draws from [`NormalStream::new(seed, i)`](NormalStream), positive
/// `j` at position `j` and negative `j` at position `n_pos + j`.
pub fn generate(recipes: &[GroupRecipe], seed: u64) -> Result<Vec<EvaluationRecord>, SynthError> {
    let mut names = BTreeSet::new();
    for r in recipes {
        if !names.insert(r.name.as_str()) {
            return Err(SynthError::DuplicateName(r.name.clone()));
        }
        if r.n_pos == 0 || r.n_neg == 0 {
            return Err(SynthError::EmptyClass(r.name.clone()));
        }
        if !(r.d_prime.is_finite() && r.d_prime >= 0.0) {
            return Err(SynthError::InvalidSeparation {
                name: r.name.clone(),
                d_prime: r.d_prime,
            });
        }
    }

    let indexed: Vec<(usize, &GroupRecipe)> = recipes.iter().enumerate().collect();
    let per_group = Execution::default().map(&indexed, |&(i, recipe)| {
        let stream = NormalStream::new(seed, i as u64);
        let make = |k: usize, label: Label| {
            let shift = if label.is_positive() { recipe.d_prime } else { 0.0 };
            EvaluationRecord::new(shift + stream.normal(k as u64), label)
                .with_attribute(GROUP_ATTRIBUTE, recipe.name.clone())
        };
        let mut out = Vec::with_capacity(recipe.n_pos + recipe.n_neg);
        out.extend((0..recipe.n_pos).map(|k| make(k, Label::Positive)));
        out.extend((0..recipe.n_neg).map(|k| make(recipe.n_pos + k, Label::Negative)));
        out
    });
    Ok(per_group.into_iter().flatten().collect())
}
