//! Iterated local search over (C, gamma) with grid search as the local step.

use std::time::Instant;

use rayon::prelude::*;

use crate::dataset::{kfold_split, standardize, Dataset, FoldAssignment};
use crate::error::{Error, Result};
use crate::evaluator::{cv_accuracy, EvalCache, Evaluation};
use crate::rng::SearchRng;
use crate::search_space::{
    cartesian_candidates, initial_ranges, perturb_state, ParamRange, SearchState,
};
use crate::svm::{HyperParams, SolverConfig};

/// Stream id used for range perturbation; fold shuffling uses stream 0.
const PERTURB_STREAM: u64 = 1;

/// Number of consecutive rejections tolerated before stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Patience {
    Limited(usize),
    Unlimited,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunerConfig {
    pub k: usize,
    /// Iterations after the initial grid.
    pub max_iterations: usize,
    pub patience: Patience,
    pub seed: u64,
    pub solver: SolverConfig,
    pub scale_features: bool,
}

impl Default for TunerConfig {
    fn default() -> Self {
        Self {
            k: 5,
            max_iterations: 20,
            patience: Patience::Limited(5),
            seed: 42,
            solver: SolverConfig::default(),
            scale_features: false,
        }
    }
}

impl TunerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidFolds {
                k: self.k,
                reason: "need at least 2 folds".into(),
            });
        }
        if self.patience == Patience::Limited(0) {
            return Err(Error::InvalidParameter("patience must be >= 1".into()));
        }
        self.solver.validate()
    }
}

/// Result of one 5x5 grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub winner: Evaluation,
    /// Successful evaluations in canonical candidate order.
    pub candidates: Vec<Evaluation>,
    /// Candidates whose solver did not converge, in canonical order. They are
    /// excluded from winning.
    pub failed: Vec<HyperParams>,
    /// Candidates that were not already in the cache.
    pub new_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based; the initial grid is not an iteration.
    pub index: usize,
    pub range_gamma_used: ParamRange,
    pub range_c_used: ParamRange,
    pub best_candidate: Evaluation,
    pub accepted: bool,
    pub new_evaluations: usize,
    pub candidates: Vec<Evaluation>,
    pub failed: Vec<HyperParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best: Evaluation,
    /// Winner of the initial powers-of-ten grid.
    pub initial: Evaluation,
    /// The full initial grid, including its per-candidate scores.
    pub initial_grid: GridOutcome,
    pub iterations: Vec<IterationRecord>,
    /// Distinct (C, gamma) pairs cross-validated during the run.
    pub total_evaluations: usize,
    pub wall_time_seconds: f64,
}

/// Evaluates the 25 candidates of `range_gamma x range_c` and returns the most
/// accurate, earliest in canonical order on ties.
///
/// Candidates missing from the cache are evaluated concurrently; the winner is
/// chosen only after all have finished. A candidate whose solver fails to
/// converge is set aside in [`GridOutcome::failed`]; any other error, or every
/// candidate failing, aborts the step with the earliest error in canonical
/// order.
pub fn grid_search_step(
    d: &Dataset,
    folds: &FoldAssignment,
    range_gamma: &ParamRange,
    range_c: &ParamRange,
    cfg: &SolverConfig,
    cache: &EvalCache,
) -> Result<GridOutcome> {
    let params = cartesian_candidates(range_gamma, range_c);
    let new_evaluations = params.iter().filter(|p| !cache.contains(p)).count();

    let results: Vec<Result<Evaluation>> = params
        .par_iter()
        .map(|&p| cv_accuracy(d, folds, p, cfg, cache))
        .collect();

    let mut candidates = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    let mut first_numeric = None;
    for (p, result) in params.into_iter().zip(results) {
        match result {
            Ok(e) => candidates.push(e),
            Err(e) if e.is_numeric() => {
                failed.push(p);
                first_numeric.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    let Some(first) = candidates.first() else {
        return Err(first_numeric.expect("25 candidates, none succeeded"));
    };

    let mut winner = first;
    for e in &candidates[1..] {
        if e.cv_accuracy > winner.cv_accuracy {
            winner = e;
        }
    }
    Ok(GridOutcome {
        winner: winner.clone(),
        candidates: candidates.clone(),
        failed,
        new_evaluations,
    })
}

/// Strict improvement test.
pub fn accept(candidate_acc: f64, best_acc: f64) -> bool {
    candidate_acc > best_acc
}

fn prepare(d: &Dataset, cfg: &TunerConfig) -> Result<(Dataset, FoldAssignment)> {
    cfg.validate()?;
    let data = if cfg.scale_features {
        standardize(d).0
    } else {
        d.clone()
    };
    let folds = kfold_split(&data, cfg.k, cfg.seed)?;
    Ok((data, folds))
}

/// Runs the full iterated local search.
///
/// The folds are built once and shared by every evaluation, so accuracies of
/// different iterations are directly comparable.
pub fn ils_tune(d: &Dataset, cfg: &TunerConfig) -> Result<TuneResult> {
    ils_tune_with_progress(d, cfg, |_| {})
}

/// [`ils_tune`] with a callback invoked after every iteration.
pub fn ils_tune_with_progress(
    d: &Dataset,
    cfg: &TunerConfig,
    mut on_iteration: impl FnMut(&IterationRecord),
) -> Result<TuneResult> {
    let started = Instant::now();
    let (data, folds) = prepare(d, cfg)?;
    let cache = EvalCache::new();

    let (rg, rc) = initial_ranges();
    let initial = grid_search_step(&data, &folds, &rg, &rc, &cfg.solver, &cache)?;
    let mut total_evaluations = initial.new_evaluations;
    let mut best = initial.winner.clone();

    let mut state = SearchState::around(
        best.params,
        SearchRng::from_seed_stream(cfg.seed, PERTURB_STREAM),
    )?;
    let mut iterations = Vec::new();
    let mut rejections = 0usize;

    for index in 1..=cfg.max_iterations {
        let range_gamma_used = *state.range_gamma();
        let range_c_used = *state.range_c();
        let step = grid_search_step(
            &data,
            &folds,
            &range_gamma_used,
            &range_c_used,
            &cfg.solver,
            &cache,
        )?;
        total_evaluations += step.new_evaluations;

        let accepted = accept(step.winner.cv_accuracy, best.cv_accuracy);
        if accepted {
            best = step.winner.clone();
            state.recenter(best.params)?;
            rejections = 0;
        } else {
            state = perturb_state(state);
            rejections += 1;
        }

        let record = IterationRecord {
            index,
            range_gamma_used,
            range_c_used,
            best_candidate: step.winner,
            accepted,
            new_evaluations: step.new_evaluations,
            candidates: step.candidates,
            failed: step.failed,
        };
        on_iteration(&record);
        iterations.push(record);

        if let Patience::Limited(limit) = cfg.patience {
            if rejections >= limit {
                break;
            }
        }
    }

    Ok(TuneResult {
        best,
        initial: initial.winner.clone(),
        initial_grid: initial,
        iterations,
        total_evaluations,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}

/// The non-iterated comparator: one grid search over the powers-of-ten ranges
/// on the same folds `ils_tune` would use.
pub fn baseline_grid(d: &Dataset, cfg: &TunerConfig) -> Result<GridOutcome> {
    let (data, folds) = prepare(d, cfg)?;
    let (rg, rc) = initial_ranges();
    grid_search_step(&data, &folds, &rg, &rc, &cfg.solver, &EvalCache::new())
}
