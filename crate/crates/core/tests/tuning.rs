use ilstune_core::search_space::cartesian_candidates;
use ilstune_core::synthetic::{rescaled, two_blobs, xor_quadrants};
use ilstune_core::{baseline_grid, ils_tune, Dataset, Patience, TuneResult, TunerConfig};

fn blobs() -> Dataset {
    two_blobs(100, &[0.0, 0.0], &[4.0, 4.0], 1.0, 42).unwrap()
}

/// Overlapping blobs on a scale of hundreds: the powers-of-ten grid is far
/// from the best gamma, so the search accepts several times.
fn wide_blobs() -> Dataset {
    rescaled(
        &two_blobs(120, &[0.0, 0.0], &[1.5, 1.5], 1.0, 1).unwrap(),
        100.0,
    )
    .unwrap()
}

fn strip_time(mut r: TuneResult) -> TuneResult {
    r.wall_time_seconds = 0.0;
    r
}

fn check_trajectory(r: &TuneResult) {
    let mut incumbent = r.initial.clone();
    for it in &r.iterations {
        // The incumbent is the center of every grid it searches.
        assert_eq!(it.range_gamma_used.center(), incumbent.params.gamma());
        assert_eq!(it.range_c_used.center(), incumbent.params.c());
        let grid = cartesian_candidates(&it.range_gamma_used, &it.range_c_used);
        assert_eq!(grid[12], incumbent.params);
        assert!(it.best_candidate.cv_accuracy >= incumbent.cv_accuracy);
        assert_eq!(
            it.accepted,
            it.best_candidate.cv_accuracy > incumbent.cv_accuracy
        );
        assert!(
            it.new_evaluations <= 24,
            "incumbent must come from the cache"
        );
        assert_eq!(it.candidates.len() + it.failed.len(), 25);
        if it.accepted {
            incumbent = it.best_candidate.clone();
        }
    }
    assert_eq!(r.best, incumbent);
    assert!(r.best.cv_accuracy >= r.initial.cv_accuracy);
    let new: usize = r.iterations.iter().map(|i| i.new_evaluations).sum();
    assert_eq!(r.total_evaluations, r.initial_grid.new_evaluations + new);
    assert_eq!(r.initial_grid.new_evaluations, 25);
    assert!(r.total_evaluations <= 25 + 24 * r.iterations.len());
}

#[test]
fn zero_iterations_is_plain_grid_search() {
    let d = blobs();
    let cfg = TunerConfig {
        max_iterations: 0,
        ..TunerConfig::default()
    };
    let r = ils_tune(&d, &cfg).unwrap();
    assert!(r.iterations.is_empty());
    assert_eq!(r.best, r.initial);
    assert_eq!(r.total_evaluations, 25);
    assert_eq!(baseline_grid(&d, &cfg).unwrap().winner, r.initial);
}

#[test]
fn baseline_matches_initial_grid() {
    let d = wide_blobs();
    let cfg = TunerConfig::default();
    let r = ils_tune(&d, &cfg).unwrap();
    let base = baseline_grid(&d, &cfg).unwrap();
    assert_eq!(base.winner, r.initial);
    assert_eq!(base.new_evaluations, 25);
    assert_eq!(base, r.initial_grid);
    assert!(base.winner.cv_accuracy <= r.best.cv_accuracy);
}

#[test]
fn runs_are_deterministic() {
    let d = wide_blobs();
    let cfg = TunerConfig {
        seed: 7,
        ..TunerConfig::default()
    };
    let a = strip_time(ils_tune(&d, &cfg).unwrap());
    let b = strip_time(ils_tune(&d, &cfg).unwrap());
    assert_eq!(a, b);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let d = wide_blobs();
    let cfg = TunerConfig::default();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        strip_time(pool.install(|| ils_tune(&d, &cfg).unwrap()))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn trajectory_invariants() {
    for d in [blobs(), wide_blobs(), xor_quadrants(80, 1.0, 3).unwrap()] {
        for seed in [1, 42] {
            let cfg = TunerConfig {
                seed,
                max_iterations: 10,
                ..TunerConfig::default()
            };
            check_trajectory(&ils_tune(&d, &cfg).unwrap());
        }
    }
}

#[test]
fn search_improves_on_the_grid() {
    let r = ils_tune(&wide_blobs(), &TunerConfig::default()).unwrap();
    let accepted = r.iterations.iter().filter(|i| i.accepted).count();
    assert!(accepted >= 3, "{accepted} accepted");
    assert!(r.best.cv_accuracy > r.initial.cv_accuracy);
    check_trajectory(&r);
}

#[test]
fn patience_stops_after_consecutive_rejections() {
    let d = blobs();
    for patience in [1, 2, 4] {
        let cfg = TunerConfig {
            patience: Patience::Limited(patience),
            max_iterations: 50,
            ..TunerConfig::default()
        };
        let r = ils_tune(&d, &cfg).unwrap();
        let tail = r
            .iterations
            .iter()
            .rev()
            .take_while(|i| !i.accepted)
            .count();
        assert_eq!(tail, patience);
        assert!(r.iterations.len() < 50);
    }

    let cfg = TunerConfig {
        patience: Patience::Unlimited,
        max_iterations: 8,
        ..TunerConfig::default()
    };
    assert_eq!(ils_tune(&d, &cfg).unwrap().iterations.len(), 8);
}

#[test]
fn scaling_option_standardizes_first() {
    let d = wide_blobs();
    let cfg = TunerConfig {
        scale_features: true,
        max_iterations: 3,
        ..TunerConfig::default()
    };
    let r = ils_tune(&d, &cfg).unwrap();
    // On unit-variance features the powers-of-ten grid already fits well.
    assert!(
        r.initial.cv_accuracy
            > ils_tune(
                &d,
                &TunerConfig {
                    max_iterations: 0,
                    ..TunerConfig::default()
                }
            )
            .unwrap()
            .initial
            .cv_accuracy
    );
}

#[test]
fn invalid_configuration_is_rejected() {
    let d = blobs();
    let cfg = TunerConfig {
        k: 60,
        ..TunerConfig::default()
    };
    assert!(matches!(
        ils_tune(&d, &cfg),
        Err(ilstune_core::Error::InvalidFolds { k: 60, .. })
    ));
}
