use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ilstune_core::Patience;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Libsvm,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tune,
    Grid,
    Eval,
}

/// Validated command line with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct CliArgs {
    pub mode: Mode,
    pub data_path: PathBuf,
    pub format: Format,
    pub label_column: Option<String>,
    pub k: usize,
    pub max_iterations: usize,
    pub patience: Patience,
    pub seed: u64,
    pub scale: bool,
    pub c_value: Option<f64>,
    pub gamma_value: Option<f64>,
    pub out_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Why argument parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgsError {
    /// `--help` or `--version`: print the text and exit successfully.
    Info(String),
    /// Invalid command line: print the message and exit 1.
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "ilstune",
    version,
    about = "Tune RBF-SVM (C, gamma) by iterated local search over k-fold CV accuracy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterated local search, reported together with the plain grid baseline.
    Tune {
        #[command(flatten)]
        common: CommonArgs,
        /// Iterations after the initial grid search.
        #[arg(long = "max-iters", default_value_t = 20)]
        max_iters: usize,
        /// Consecutive rejected iterations before stopping, or `unlimited`.
        #[arg(long, default_value = "5", value_parser = parse_patience)]
        patience: Patience,
    },
    /// Plain 5x5 grid search over powers of ten.
    Grid {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cross-validated accuracy of a single (C, gamma).
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = parse_positive)]
        c: f64,
        #[arg(long, value_parser = parse_positive)]
        gamma: f64,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Dataset file.
    #[arg(long)]
    data: PathBuf,
    /// Input format; inferred from the extension when omitted (.csv, else libsvm).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Label column name (csv only).
    #[arg(long = "label-col")]
    label_col: Option<String>,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Standardize every feature to zero mean and unit variance first.
    #[arg(long)]
    scale: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for candidate evaluation; defaults to available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive finite number, got `{s}`")),
    }
}

fn parse_patience(s: &str) -> Result<Patience, String> {
    if s.eq_ignore_ascii_case("unlimited") {
        return Ok(Patience::Unlimited);
    }
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Patience::Limited(n)),
        _ => Err(format!(
            "expected an integer >= 1 or `unlimited`, got `{s}`"
        )),
    }
}

fn infer_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Libsvm,
    }
}

/// Parses `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliArgs, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ArgsError::Info(e.to_string()),
            _ => ArgsError::Usage(e.to_string()),
        }
    })?;

    let defaults = ilstune_core::TunerConfig::default();
    let (mode, common, max_iterations, patience, c_value, gamma_value) = match cli.command {
        Command::Tune {
            common,
            max_iters,
            patience,
        } => (Mode::Tune, common, max_iters, patience, None, None),
        Command::Grid { common } => (Mode::Grid, common, 0, defaults.patience, None, None),
        Command::Eval { common, c, gamma } => (
            Mode::Eval,
            common,
            0,
            defaults.patience,
            Some(c),
            Some(gamma),
        ),
    };

    let format = common.format.unwrap_or_else(|| infer_format(&common.data));
    match (format, &common.label_col) {
        (Format::Csv, None) => {
            return Err(ArgsError::Usage(
                "error: --label-col is required for csv input".into(),
            ))
        }
        (Format::Libsvm, Some(_)) => {
            return Err(ArgsError::Usage(
                "error: --label-col only applies to csv input".into(),
            ))
        }
        _ => {}
    }

    Ok(CliArgs {
        mode,
        data_path: common.data,
        format,
        label_column: common.label_col,
        k: common.k as usize,
        max_iterations,
        patience,
        seed: common.seed,
        scale: common.scale,
        c_value,
        gamma_value,
        out_path: common.out,
        threads: common.threads.map(|t| t as usize),
    })
}
