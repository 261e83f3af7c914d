//! Hyperparameter tuning for RBF-kernel support vector machines by iterated
//! local search.
//!
//! The search walks over (C, gamma) using a 5x5 grid search as its local
//! search step and k-fold cross-validation accuracy as the objective. Each
//! grid is centered on the best pair found so far; when a grid fails to
//! improve on it, the grid's outer values are pushed outward and its inner
//! values pulled toward the center at random before the next attempt.

pub mod dataset;
pub mod error;
pub mod evaluator;
pub mod kernel;
pub mod rng;
pub mod search_space;
pub mod svm;
pub mod synthetic;
pub mod tuner;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use dataset::{
    kfold_split, parse_csv, parse_libsvm, standardize, Dataset, FeatureStats, FoldAssignment,
    Label, Sample,
};
pub use error::{Error, Result};
pub use evaluator::{accuracy, cv_accuracy, EvalCache, Evaluation};
pub use kernel::rbf_kernel;
pub use rng::SearchRng;
pub use search_space::{
    cartesian_candidates, initial_ranges, perturb, perturb_state, ranges_around, ParamRange,
    SearchState,
};
pub use svm::{
    decision_value, dual_objective, predict, solve, train, DualSolution, HyperParams, SolverConfig,
    SvmModel,
};
pub use tuner::{
    accept, baseline_grid, grid_search_step, ils_tune, GridOutcome, IterationRecord, Patience,
    TuneResult, TunerConfig,
};
