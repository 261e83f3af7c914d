//! Command-line front end for `ilstune`.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 solver failure.

pub mod args;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::time::Instant;

use log::info;

use ilstune_core::tuner::ils_tune_with_progress;
use ilstune_core::{
    baseline_grid, cv_accuracy, kfold_split, parse_csv, parse_libsvm, standardize, Dataset,
    EvalCache, HyperParams, IterationRecord, TunerConfig,
};

pub use args::{parse_args, ArgsError, CliArgs, Format, Mode};
pub use report::{to_json, Report};

use report::{ConfigEcho, EvalRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Data(_) => EXIT_DATA,
            RunError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Data(m) => write!(f, "data error: {m}"),
            RunError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<ilstune_core::Error> for RunError {
    fn from(e: ilstune_core::Error) -> Self {
        if e.is_numeric() {
            RunError::Numeric(e.to_string())
        } else {
            RunError::Data(e.to_string())
        }
    }
}

pub fn load_dataset(args: &CliArgs) -> Result<Dataset, RunError> {
    let bytes = fs::read(&args.data_path)
        .map_err(|e| RunError::Data(format!("{}: {e}", args.data_path.display())))?;
    let parsed = match args.format {
        Format::Libsvm => parse_libsvm(&bytes),
        Format::Csv => parse_csv(
            &bytes,
            args.label_column
                .as_deref()
                .expect("validated by parse_args"),
        ),
    };
    parsed.map_err(|e| RunError::Data(format!("{}: {e}", args.data_path.display())))
}

fn tuner_config(args: &CliArgs) -> TunerConfig {
    TunerConfig {
        k: args.k,
        max_iterations: args.max_iterations,
        patience: args.patience,
        seed: args.seed,
        scale_features: args.scale,
        ..TunerConfig::default()
    }
}

fn log_iteration(r: &IterationRecord) {
    let w = &r.best_candidate;
    info!(
        "iteration {:>3}: winner C={:.6e} gamma={:.6e} acc={:.4} {}{}",
        r.index,
        w.params.c(),
        w.params.gamma(),
        w.cv_accuracy,
        if r.accepted { "accepted" } else { "rejected" },
        if r.failed.is_empty() {
            String::new()
        } else {
            format!(" ({} candidates did not converge)", r.failed.len())
        }
    );
}

/// Executes the parsed command and builds its report.
pub fn build_report(args: &CliArgs) -> Result<Report, RunError> {
    let started = Instant::now();
    let data = load_dataset(args)?;
    let cfg = tuner_config(args);
    let config = ConfigEcho::new(args, &cfg.solver);
    info!(
        "loaded {} samples with {} features from {}",
        data.len(),
        data.n_features(),
        args.data_path.display()
    );

    let report = match args.mode {
        Mode::Tune => {
            let result = ils_tune_with_progress(&data, &cfg, log_iteration)?;
            info!(
                "best C={:e} gamma={:e} acc={:.4} (grid baseline {:.4})",
                result.best.params.c(),
                result.best.params.gamma(),
                result.best.cv_accuracy,
                result.initial.cv_accuracy
            );
            let initial = EvalRecord::from(&result.initial);
            Report {
                schema_version: report::SCHEMA_VERSION,
                config,
                baseline: Some(initial.clone()),
                initial: Some(initial),
                initial_failed: result.initial_grid.failed.iter().map(Into::into).collect(),
                iterations: result.iterations.iter().map(Into::into).collect(),
                best: (&result.best).into(),
                total_evaluations: result.total_evaluations,
                wall_time_seconds: started.elapsed().as_secs_f64(),
            }
        }
        Mode::Grid => {
            let grid = baseline_grid(&data, &cfg)?;
            info!(
                "grid winner C={:e} gamma={:e} acc={:.4}",
                grid.winner.params.c(),
                grid.winner.params.gamma(),
                grid.winner.cv_accuracy
            );
            let winner = EvalRecord::from(&grid.winner);
            Report {
                schema_version: report::SCHEMA_VERSION,
                config,
                initial: Some(winner.clone()),
                initial_failed: grid.failed.iter().map(Into::into).collect(),
                iterations: Vec::new(),
                best: winner.clone(),
                baseline: Some(winner),
                total_evaluations: grid.new_evaluations,
                wall_time_seconds: started.elapsed().as_secs_f64(),
            }
        }
        Mode::Eval => {
            let params = HyperParams::new(
                args.c_value.expect("validated by parse_args"),
                args.gamma_value.expect("validated by parse_args"),
            )?;
            let data = if cfg.scale_features {
                standardize(&data).0
            } else {
                data
            };
            let folds = kfold_split(&data, cfg.k, cfg.seed)?;
            let eval = cv_accuracy(&data, &folds, params, &cfg.solver, &EvalCache::new())?;
            info!(
                "C={:e} gamma={:e} acc={:.4}",
                params.c(),
                params.gamma(),
                eval.cv_accuracy
            );
            Report {
                schema_version: report::SCHEMA_VERSION,
                config,
                initial: None,
                initial_failed: Vec::new(),
                iterations: Vec::new(),
                best: (&eval).into(),
                baseline: None,
                total_evaluations: 1,
                wall_time_seconds: started.elapsed().as_secs_f64(),
            }
        }
    };
    Ok(report)
}

/// Runs the command on a pool of `args.threads` workers and writes the report.
pub fn run(args: &CliArgs) -> Result<(), RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Usage(format!("cannot start worker threads: {e}")))?;
    let report = pool.install(|| build_report(args))?;
    let json = to_json(&report).expect("report serializes");
    match &args.out_path {
        Some(path) => fs::write(path, json)
            .map_err(|e| RunError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(json.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| RunError::Usage(format!("cannot write report: {e}")))
        }
    }
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match parse_args(argv) {
        Ok(args) => args,
        Err(ArgsError::Info(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(ArgsError::Usage(text)) => {
            eprint!("{text}");
            if !text.ends_with('\n') {
                eprintln!();
            }
            return EXIT_USAGE;
        }
    };
    match run(&args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("ilstune: {e}");
            e.exit_code()
        }
    }
}
