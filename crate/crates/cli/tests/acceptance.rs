//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use ilstune_core::oracle;
use ilstune_core::synthetic::{random_labels, rescaled, two_blobs, xor_quadrants};
use ilstune_core::{
    baseline_grid, cartesian_candidates, dual_objective, initial_ranges, kfold_split, perturb,
    solve, Dataset, HyperParams, Label, Sample, SearchRng, SolverConfig, TuneResult, TunerConfig,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    check(
        elapsed <= limit,
        format!(
            "took {:.2}s, limit {}s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn random_problem(rng: &mut SearchRng) -> (Dataset, HyperParams) {
    loop {
        let n = 3 + rng.below(4) as usize;
        let samples: Vec<Sample> = (0..n)
            .map(|_| {
                let x = vec![rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)];
                let label = if rng.below(2) == 0 {
                    Label::Negative
                } else {
                    Label::Positive
                };
                Sample::new(x, label)
            })
            .collect();
        let params = HyperParams::new(rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)).unwrap();
        if let Ok(d) = Dataset::new(samples) {
            return (d, params);
        }
    }
}

fn kkt_violation(d: &Dataset, alphas: &[f64], bias: f64, params: HyperParams) -> f64 {
    let k = |i: usize, j: usize| {
        let dist: f64 = d
            .features(i)
            .iter()
            .zip(d.features(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (-params.gamma() * dist).exp()
    };
    (0..d.len())
        .map(|i| {
            let f: f64 = (0..d.len())
                .map(|j| alphas[j] * d.label(j).sign() * k(i, j))
                .sum::<f64>()
                + bias;
            let margin = d.label(i).sign() * f;
            let a = alphas[i];
            if a <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if a >= params.c() {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}

fn solver_matches_oracle() -> Outcome {
    let start = Instant::now();
    let tight = SolverConfig {
        kkt_tolerance: 1e-6,
        ..SolverConfig::default()
    };
    let mut rng = SearchRng::from_seed(7);
    let (mut worst_gap, mut worst_kkt) = (0.0f64, 0.0f64);
    for case in 0..50 {
        let (d, params) = random_problem(&mut rng);
        let points: Vec<Vec<f64>> = d.samples().iter().map(|s| s.features.clone()).collect();
        let y: Vec<f64> = d.samples().iter().map(|s| s.label.sign()).collect();
        let reference = oracle::projected_gradient_dual(
            &points,
            &y,
            params.c(),
            params.gamma(),
            1_000_000,
            1e-3,
        );
        let expected = oracle::dual_value(&reference, &points, &y, params.gamma());

        let sol = solve(&d, params, &tight).map_err(|e| format!("case {case}: {e}"))?;
        let ours = dual_objective(&sol.alphas, &d, params).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max((ours - expected).abs());

        let sol = solve(&d, params, &SolverConfig::default()).map_err(|e| e.to_string())?;
        worst_kkt = worst_kkt.max(kkt_violation(&d, &sol.alphas, sol.bias, params));
    }
    check(
        worst_gap <= 1e-6,
        format!("objective gap {worst_gap:e} > 1e-6"),
    )?;
    check(
        worst_kkt <= 1e-3,
        format!("KKT violation {worst_kkt:e} > 1e-3"),
    )?;
    within(Duration::from_secs(30), start.elapsed())?;
    Ok(format!(
        "50 problems, max objective gap {worst_gap:.1e}, max KKT violation {worst_kkt:.1e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn grid_arithmetic() -> Outcome {
    let (rg, rc) = initial_ranges();
    let expected = [0.01, 0.1, 1.0, 10.0, 100.0];
    check(
        rg.values() == expected,
        format!("gamma range {:?}", rg.values()),
    )?;
    check(
        rc.values() == expected,
        format!("C range {:?}", rc.values()),
    )?;
    let candidates = cartesian_candidates(&rg, &rc);
    let mut keys: Vec<_> = candidates.iter().map(|p| p.key()).collect();
    keys.sort_unstable();
    keys.dedup();
    check(
        keys.len() == 25,
        format!("{} distinct candidates", keys.len()),
    )?;
    let d = blobs200();
    let outcome = baseline_grid(&d, &TunerConfig::default()).map_err(|e| e.to_string())?;
    let evaluated = outcome.candidates.len() + outcome.failed.len();
    check(
        outcome.new_evaluations == 25 && evaluated == 25,
        format!("baseline ran {} evaluations", outcome.new_evaluations),
    )?;
    Ok("ranges [0.01..100], 25 distinct candidates, baseline runs 25 evaluations".into())
}

fn perturbation_bounds() -> Outcome {
    let start = Instant::now();
    let (initial, _) = initial_ranges();
    let [id, iu, c, sd, su] = initial.values();
    for seed in 0..10_000u64 {
        let mut rng = SearchRng::from_seed(seed);
        let r = perturb(&initial, &mut rng);
        let v = r.values();
        check(
            v.windows(2).all(|w| w[0] < w[1]),
            format!("seed {seed}: not increasing {v:?}"),
        )?;
        check(v[2] == c, format!("seed {seed}: center moved {v:?}"))?;
        check(
            id / 10.0 <= v[0] && v[0] <= id,
            format!("seed {seed}: inf_down {}", v[0]),
        )?;
        check(
            (c - iu) / 2.0 <= v[1] && v[1] <= c,
            format!("seed {seed}: inf_up {}", v[1]),
        )?;
        check(
            c <= v[3] && v[3] <= c + (sd - c) / 2.0,
            format!("seed {seed}: sup_down {}", v[3]),
        )?;
        check(
            su <= v[4] && v[4] <= 10.0 * su,
            format!("seed {seed}: sup_up {}", v[4]),
        )?;
    }
    within(Duration::from_secs(5), start.elapsed())?;
    Ok(format!(
        "10000 perturbations in bounds, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn monotone_and_dominant(runs: &[(&str, &Dataset, &TuneResult)]) -> Outcome {
    for (name, d, result) in runs {
        let mut incumbent = result.initial.cv_accuracy;
        for it in &result.iterations {
            let next = if it.accepted {
                it.best_candidate.cv_accuracy
            } else {
                incumbent
            };
            check(
                next >= incumbent,
                format!("{name}: incumbent fell at iteration {}", it.index),
            )?;
            incumbent = next;
        }
        check(
            incumbent == result.best.cv_accuracy,
            format!("{name}: final incumbent mismatch"),
        )?;
        let cfg = TunerConfig::default();
        let baseline = baseline_grid(d, &cfg).map_err(|e| e.to_string())?;
        check(
            result.best.cv_accuracy >= baseline.winner.cv_accuracy,
            format!("{name}: tuned below baseline"),
        )?;
        let zero = ilstune_core::ils_tune(
            d,
            &TunerConfig {
                max_iterations: 0,
                ..cfg
            },
        )
        .map_err(|e| e.to_string())?;
        check(
            zero.best == baseline.winner && zero.iterations.is_empty(),
            format!("{name}: zero iterations differs from baseline"),
        )?;
    }
    Ok(format!(
        "{} datasets monotone, dominate baseline, zero-iteration run equals baseline",
        runs.len()
    ))
}

fn strip_wall_time(report: &[u8]) -> String {
    String::from_utf8_lossy(report)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("blobs.libsvm");
    std::fs::write(&path, blobs200().to_libsvm()).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for threads in ["1", "4", "1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ilstune"))
            .args([
                "tune",
                "--data",
                path.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .map_err(|e| e.to_string())?;
        check(
            out.status.success(),
            format!("exit {:?}", out.status.code()),
        )?;
        reports.push(strip_wall_time(&out.stdout));
    }
    check(
        reports.iter().all(|r| *r == reports[0]),
        "reports differ between runs",
    )?;
    Ok(format!(
        "4 runs (threads 1 and 4) byte-identical, {} bytes",
        reports[0].len()
    ))
}

fn separable_blobs(result: &TuneResult, elapsed: Duration) -> Outcome {
    let acc = result.best.cv_accuracy;
    check(acc >= 0.95, format!("accuracy {acc} < 0.95"))?;
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!("accuracy {acc:.4}, {:.2}s", elapsed.as_secs_f64()))
}

fn xor_nonlinear(result: &TuneResult, elapsed: Duration) -> Outcome {
    let acc = result.best.cv_accuracy;
    check(acc >= 0.90, format!("accuracy {acc} < 0.90"))?;
    let low_gamma = result
        .initial_grid
        .candidates
        .iter()
        .filter(|e| e.params.gamma() == 0.01)
        .map(|e| e.cv_accuracy)
        .fold(f64::INFINITY, f64::min);
    check(
        low_gamma <= 0.75,
        format!("every gamma=0.01 candidate above 0.75 (min {low_gamma})"),
    )?;
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!(
        "accuracy {acc:.4}, worst gamma=0.01 candidate {low_gamma:.4}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn cache_reuse(result: &TuneResult) -> Outcome {
    let accepted: Vec<usize> = result
        .iterations
        .iter()
        .filter(|it| it.accepted)
        .map(|it| it.index)
        .collect();
    check(
        accepted.len() >= 3,
        format!("{} accepted iterations", accepted.len()),
    )?;
    let mut post = 0;
    for it in &result.iterations {
        if it.index >= 2 && accepted.contains(&(it.index - 1)) {
            post += 1;
            check(
                it.new_evaluations <= 24,
                format!(
                    "iteration {}: {} new evaluations",
                    it.index, it.new_evaluations
                ),
            )?;
        }
    }
    check(post > 0, "no grid step followed an acceptance")?;
    Ok(format!(
        "{} accepted iterations, {post} post-acceptance grids each <= 24 new evaluations",
        accepted.len()
    ))
}

fn fold_stratification() -> Outcome {
    let samples: Vec<Sample> = (0..100)
        .map(|i| {
            let label = if i < 60 {
                Label::Positive
            } else {
                Label::Negative
            };
            Sample::new(vec![i as f64], label)
        })
        .collect();
    let d = Dataset::new(samples).map_err(|e| e.to_string())?;
    let folds = kfold_split(&d, 5, 42).map_err(|e| e.to_string())?;
    check(
        folds.fold_sizes() == vec![20; 5],
        format!("sizes {:?}", folds.fold_sizes()),
    )?;
    for f in 0..5 {
        let test = folds.test_indices(f);
        let pos = test
            .iter()
            .filter(|&&i| d.label(i) == Label::Positive)
            .count();
        check(
            pos == 12 && test.len() - pos == 8,
            format!("fold {f}: {pos} positive"),
        )?;
    }
    Ok("5 folds of 20, each 12 positive / 8 negative".into())
}

fn blobs200() -> Dataset {
    two_blobs(200, &[0.0, 0.0], &[4.0, 4.0], 1.0, 42).unwrap()
}

fn timed_tune(d: &Dataset) -> Result<(TuneResult, Duration), String> {
    let start = Instant::now();
    let r = ilstune_core::ils_tune(d, &TunerConfig::default()).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed()))
}

fn main() {
    let blobs = blobs200();
    let xor = xor_quadrants(200, 2.0, 42).unwrap();
    let wide = rescaled(
        &two_blobs(120, &[0.0, 0.0], &[1.5, 1.5], 1.0, 1).unwrap(),
        100.0,
    )
    .unwrap();
    let noise = random_labels(100, 2, 3).unwrap();

    let blobs_run = timed_tune(&blobs);
    let xor_run = timed_tune(&xor);
    let wide_run = timed_tune(&wide);
    let noise_run = timed_tune(&noise);

    let with = |run: &Result<(TuneResult, Duration), String>,
                f: &dyn Fn(&TuneResult, Duration) -> Outcome| match run {
        Ok((r, t)) => f(r, *t),
        Err(e) => Err(e.clone()),
    };

    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 solver optimality", solver_matches_oracle()),
        ("2 grid arithmetic", grid_arithmetic()),
        ("3 perturbation bounds", perturbation_bounds()),
        ("4 monotonicity and dominance", {
            match (&blobs_run, &xor_run, &wide_run, &noise_run) {
                (Ok(b), Ok(x), Ok(w), Ok(n)) => monotone_and_dominant(&[
                    ("blobs", &blobs, &b.0),
                    ("xor", &xor, &x.0),
                    ("wide", &wide, &w.0),
                    ("noise", &noise, &n.0),
                ]),
                _ => Err("a tuning run failed".into()),
            }
        }),
        ("5 determinism", cli_determinism()),
        ("6 separable blobs", with(&blobs_run, &separable_blobs)),
        ("7 xor", with(&xor_run, &xor_nonlinear)),
        ("8 cache reuse", with(&wide_run, &|r, _| cache_reuse(r))),
        ("9 stratified folds", fold_stratification()),
    ];

    let mut failures = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    println!("{} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
