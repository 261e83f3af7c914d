//! JSON report emitted by every subcommand.
//!
//! Top-level keys, in order:
//!
//! - `schema_version`: `"1.0"`
//! - `config`: effective settings (`command`, `data`, `format`,
//!   `label_column`, `k`, `max_iterations`, `patience`, `seed`, `scale`,
//!   `c`, `gamma`, `solver`)
//! - `initial`: winner of the powers-of-ten grid, or null for `eval`
//! - `initial_failed`: `[{c, gamma}]` grid candidates whose solver did not converge
//! - `iterations`: `[{index, range_gamma_used, range_c_used, winner, accepted,
//!   new_evaluations, failed}]`, ranges as 5-element ascending arrays
//! - `best`: `{c, gamma, cv_accuracy, fold_accuracies}`
//! - `baseline`: plain grid-search winner, or null for `eval`
//! - `total_evaluations`: distinct (C, gamma) pairs cross-validated
//! - `wall_time_seconds`
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use ilstune_core::{Evaluation, HyperParams, IterationRecord, Patience, SolverConfig};

use crate::args::{CliArgs, Format, Mode};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub config: ConfigEcho,
    pub initial: Option<EvalRecord>,
    pub initial_failed: Vec<ParamsRecord>,
    pub iterations: Vec<IterationEntry>,
    pub best: EvalRecord,
    pub baseline: Option<EvalRecord>,
    pub total_evaluations: usize,
    pub wall_time_seconds: f64,
}

/// Settings that influence results. The thread count is left out: it never
/// changes the outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: Mode,
    pub data: String,
    pub format: Format,
    pub label_column: Option<String>,
    pub k: usize,
    pub max_iterations: Option<usize>,
    pub patience: Option<PatienceEcho>,
    pub seed: u64,
    pub scale: bool,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub solver: SolverEcho,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum PatienceEcho {
    Limited(usize),
    Unlimited(&'static str),
}

impl From<Patience> for PatienceEcho {
    fn from(p: Patience) -> Self {
        match p {
            Patience::Limited(n) => PatienceEcho::Limited(n),
            Patience::Unlimited => PatienceEcho::Unlimited("unlimited"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverEcho {
    pub kkt_tolerance: f64,
    pub max_passes: usize,
    /// null means 10000 times the training-set size
    pub max_iterations: Option<usize>,
}

impl From<&SolverConfig> for SolverEcho {
    fn from(s: &SolverConfig) -> Self {
        Self {
            kkt_tolerance: s.kkt_tolerance,
            max_passes: s.max_passes,
            max_iterations: s.max_iterations,
        }
    }
}

impl ConfigEcho {
    pub fn new(args: &CliArgs, solver: &SolverConfig) -> Self {
        let tune = args.mode == Mode::Tune;
        Self {
            command: args.mode,
            data: args.data_path.display().to_string(),
            format: args.format,
            label_column: args.label_column.clone(),
            k: args.k,
            max_iterations: tune.then_some(args.max_iterations),
            patience: tune.then(|| args.patience.into()),
            seed: args.seed,
            scale: args.scale,
            c: args.c_value,
            gamma: args.gamma_value,
            solver: solver.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsRecord {
    pub c: f64,
    pub gamma: f64,
}

impl From<&HyperParams> for ParamsRecord {
    fn from(p: &HyperParams) -> Self {
        Self {
            c: p.c(),
            gamma: p.gamma(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub c: f64,
    pub gamma: f64,
    pub cv_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

impl From<&Evaluation> for EvalRecord {
    fn from(e: &Evaluation) -> Self {
        Self {
            c: e.params.c(),
            gamma: e.params.gamma(),
            cv_accuracy: e.cv_accuracy,
            fold_accuracies: e.fold_accuracies.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationEntry {
    pub index: usize,
    pub range_gamma_used: [f64; 5],
    pub range_c_used: [f64; 5],
    pub winner: EvalRecord,
    pub accepted: bool,
    pub new_evaluations: usize,
    pub failed: Vec<ParamsRecord>,
}

impl From<&IterationRecord> for IterationEntry {
    fn from(r: &IterationRecord) -> Self {
        Self {
            index: r.index,
            range_gamma_used: r.range_gamma_used.values(),
            range_c_used: r.range_c_used.values(),
            winner: (&r.best_candidate).into(),
            accepted: r.accepted,
            new_evaluations: r.new_evaluations,
            failed: r.failed.iter().map(Into::into).collect(),
        }
    }
}

/// Pretty printer that writes floats as `{:.16e}`.
struct FixedDigits(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// Serializes `value` as indented JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
