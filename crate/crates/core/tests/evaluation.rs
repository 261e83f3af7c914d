use ilstune_core::synthetic::{random_labels, two_blobs};
use ilstune_core::{cv_accuracy, kfold_split, EvalCache, HyperParams, SolverConfig};

#[test]
fn separated_blobs_score_perfectly() {
    let d = two_blobs(100, &[0.0, 0.0], &[8.0, 0.0], 1.0, 3).unwrap();
    let folds = kfold_split(&d, 5, 42).unwrap();
    let params = HyperParams::new(1.0, 1.0).unwrap();
    let e = cv_accuracy(
        &d,
        &folds,
        params,
        &SolverConfig::default(),
        &EvalCache::new(),
    )
    .unwrap();
    assert_eq!(e.cv_accuracy, 1.0);
    assert_eq!(e.fold_accuracies, vec![1.0; 5]);
}

#[test]
fn random_labels_score_near_chance() {
    let d = random_labels(200, 2, 17).unwrap();
    let folds = kfold_split(&d, 5, 42).unwrap();
    let params = HyperParams::new(1.0, 1.0).unwrap();
    let e = cv_accuracy(
        &d,
        &folds,
        params,
        &SolverConfig::default(),
        &EvalCache::new(),
    )
    .unwrap();
    assert!((e.cv_accuracy - 0.5).abs() <= 0.15, "{}", e.cv_accuracy);
}

#[test]
fn cache_is_transparent() {
    let d = random_labels(60, 2, 23).unwrap();
    let folds = kfold_split(&d, 3, 1).unwrap();
    let cfg = SolverConfig::default();
    let shared = EvalCache::new();
    for (c, gamma) in [(0.1, 0.1), (1.0, 10.0), (30.0, 0.5), (0.1, 0.1)] {
        let params = HyperParams::new(c, gamma).unwrap();
        let cached = cv_accuracy(&d, &folds, params, &cfg, &shared).unwrap();
        let fresh = cv_accuracy(&d, &folds, params, &cfg, &EvalCache::new()).unwrap();
        assert_eq!(cached, fresh);
    }
    assert_eq!(shared.len(), 3);
    assert_eq!(shared.trainings(), 9);
}
