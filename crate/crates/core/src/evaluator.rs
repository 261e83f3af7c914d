//! Cross-validated accuracy of a hyperparameter pair, memoized per pair.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::dataset::{Dataset, FoldAssignment, Label};
use crate::error::{Error, Result};
use crate::svm::{predict, train, HyperParams, SolverConfig};

/// Cross-validation outcome for one (C, gamma) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub params: HyperParams,
    /// Unweighted mean of `fold_accuracies`.
    pub cv_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

/// Fraction of positions where the two label lists agree.
pub fn accuracy(predicted: &[Label], actual: &[Label]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / predicted.len() as f64)
}

/// Memo of evaluation outcomes keyed by the exact bit pattern of (C, gamma).
/// Solver failures are remembered as well, so a failing pair is not retrained.
///
/// Safe to share between threads. Two threads racing on the same key both
/// compute it; the stored value is the same either way.
#[derive(Debug, Default)]
pub struct EvalCache {
    entries: Mutex<HashMap<(u64, u64), Result<Evaluation>>>,
    trainings: AtomicUsize,
}

impl EvalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, params: &HyperParams) -> Option<Result<Evaluation>> {
        self.entries
            .lock()
            .expect("cache lock poisoned")
            .get(&params.key())
            .cloned()
    }

    pub fn contains(&self, params: &HyperParams) -> bool {
        self.entries
            .lock()
            .expect("cache lock poisoned")
            .contains_key(&params.key())
    }

    fn insert(&self, params: &HyperParams, outcome: Result<Evaluation>) {
        self.entries
            .lock()
            .expect("cache lock poisoned")
            .insert(params.key(), outcome);
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of SVM trainings performed on behalf of this cache.
    pub fn trainings(&self) -> usize {
        self.trainings.load(Ordering::Relaxed)
    }

    pub fn clear(&self) {
        self.entries.lock().expect("cache lock poisoned").clear();
    }
}

/// k-fold cross-validation accuracy for `params` on fixed `folds`.
///
/// Folds are trained in index order and the first failure ends the
/// evaluation. Outcomes, including solver non-convergence, are cached; data
/// errors such as a mismatched fold assignment are not.
pub fn cv_accuracy(
    d: &Dataset,
    folds: &FoldAssignment,
    params: HyperParams,
    cfg: &SolverConfig,
    cache: &EvalCache,
) -> Result<Evaluation> {
    if let Some(hit) = cache.get(&params) {
        return hit;
    }
    if folds.len() != d.len() {
        return Err(Error::LengthMismatch {
            left: folds.len(),
            right: d.len(),
        });
    }

    let outcome = (0..folds.k())
        .map(|fold| fold_accuracy(d, folds, fold, params, cfg, cache))
        .collect::<Result<Vec<f64>>>()
        .map(|fold_accuracies| Evaluation {
            params,
            cv_accuracy: fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64,
            fold_accuracies,
        });
    match &outcome {
        Ok(_) => cache.insert(&params, outcome.clone()),
        Err(e) if e.is_numeric() => cache.insert(&params, outcome.clone()),
        Err(_) => {}
    }
    outcome
}

fn fold_accuracy(
    d: &Dataset,
    folds: &FoldAssignment,
    fold: usize,
    params: HyperParams,
    cfg: &SolverConfig,
    cache: &EvalCache,
) -> Result<f64> {
    let train_idx = folds.train_indices(fold);
    let test_idx = folds.test_indices(fold);
    debug_assert!(train_idx.iter().all(|i| folds.fold_of()[*i] != fold));
    debug_assert!(test_idx.iter().all(|i| folds.fold_of()[*i] == fold));

    let train_set = d.subset(&train_idx).map_err(|e| match e {
        Error::SingleClass { .. } | Error::EmptyInput => Error::FoldSingleClass { fold },
        other => other,
    })?;
    cache.trainings.fetch_add(1, Ordering::Relaxed);
    let model = train(&train_set, params, cfg)?;
    let predicted = test_idx
        .iter()
        .map(|&i| predict(&model, d.features(i)))
        .collect::<Result<Vec<_>>>()?;
    let actual: Vec<Label> = test_idx.iter().map(|&i| d.label(i)).collect();
    accuracy(&predicted, &actual)
}
