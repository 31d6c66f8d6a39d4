//! Subgroup AUC and AUC Gap computation.
//!
//! The AUC Gap of a model over a set of (possibly overlapping) subgroups is the
//! largest absolute difference between any two subgroup AUCs, which reduces to
//! `max - min` over the subgroups whose AUC is defined.
//!
//! The crate is organised bottom-up:
//!
//! * [`roc`]: ROC curves, trapezoidal AUC and the midrank (Mann-Whitney) AUC.
//! * [`grouping`]: evaluation records, subgroup construction and validity.
//! * [`gap`]: subgroup AUC tables, fold averaging, the gap and its bootstrap.
//! * [`adapters`]: one-vs-rest and thresholding reductions to binary problems.
//! * [`synth`]: binormal cohorts with analytically known AUCs.
//! * [`normal`]: standard normal CDF / quantile and a counter-based normal stream.
//!
//! With the default `parallel` feature, independent work (per-group AUCs,
//! bootstrap resamples, per-class sweeps) runs on rayon. Results never depend
//! on the thread count; [`Execution::Sequential`] forces a single thread.

pub mod adapters;
mod exec;
pub mod gap;
pub mod grouping;
pub mod normal;
pub mod roc;
pub mod synth;

pub use adapters::{
    one_vs_rest, per_class_gap_sweep, threshold_real, AdapterError, ClassOutcome, ClassSweep,
    MulticlassRecord, RealTargetRecord,
};
pub use exec::Execution;
pub use gap::{
    analyze, auc_gap, bootstrap_gap, overall_auc, subgroup_aucs, subgroup_aucs_with,
    AnalysisError, AnalysisOptions, AucSummary, BootstrapError, BootstrapOptions, GapAnalysis,
    GapInterval, GapValue, SubgroupAucTable, SubgroupEntry,
};
pub use grouping::{
    build_groups, validate_groups, EvaluationRecord, ExclusionReason, GroupAssignment, GroupSpec,
    GroupStatus, GroupValidity, GroupingError, MissingPolicy, ValidityPolicy,
};
pub use roc::{auc_rank, auc_trapezoid, roc_curve, AucError, AucValue, Label, RocCurve, RocPoint};
pub use synth::{generate, theoretical_auc, GroupRecipe, SynthError};
