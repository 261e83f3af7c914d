//! Binary-labelled datasets: ingestion, scaling and stratified fold assignment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rng::SearchRng;

/// Class label of a sample. Raw `0` labels are read as [`Label::Negative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Negative, Label::Positive];

    /// Maps a raw numeric label: -1 and 0 are negative, +1 is positive.
    pub fn from_raw(value: f64) -> Option<Label> {
        if value == 1.0 {
            Some(Label::Positive)
        } else if value == -1.0 || value == 0.0 {
            Some(Label::Negative)
        } else {
            None
        }
    }

    /// -1.0 or +1.0
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: Label,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        Self { features, label }
    }
}

/// An immutable, validated collection of samples.
///
/// Every sample has `n_features` finite values and both classes are present.
/// Sample order is the ingestion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    n_features: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyInput)?;
        let n_features = first.features.len();
        if n_features == 0 {
            return Err(Error::InvalidParameter("samples have no features".into()));
        }
        for (index, s) in samples.iter().enumerate() {
            if s.features.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    found: s.features.len(),
                });
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { index });
            }
        }
        let dataset = Self {
            samples,
            n_features,
        };
        match dataset.class_counts() {
            (0, _) => Err(Error::SingleClass { present: 1 }),
            (_, 0) => Err(Error::SingleClass { present: -1 }),
            _ => Ok(dataset),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false for a constructed dataset; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.samples[i].features
    }

    pub fn label(&self, i: usize) -> Label {
        self.samples[i].label
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// (negative count, positive count)
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self
            .samples
            .iter()
            .filter(|s| s.label == Label::Positive)
            .count();
        (self.samples.len() - pos, pos)
    }

    /// New dataset holding the samples at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::new(indices.iter().map(|&i| self.samples[i].clone()).collect())
    }

    /// Serializes to libsvm text. Zero entries are omitted except the last
    /// column, which is always written so the feature count survives a re-parse.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let _ = write!(out, "{:+}", s.label.as_i8());
            for (j, &v) in s.features.iter().enumerate() {
                if v != 0.0 || j + 1 == self.n_features {
                    let _ = write!(out, " {}:{}", j + 1, v);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Parses sparse libsvm text: `<label> <index>:<value> ...`, 1-based indices
/// strictly increasing within a line. Blank lines are skipped.
pub fn parse_libsvm(text: &[u8]) -> Result<Dataset> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Malformed {
        line: 1 + text[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        message: "invalid UTF-8".into(),
    })?;

    let mut rows: Vec<(Vec<(usize, f64)>, Label)> = Vec::new();
    let mut n_features = 0usize;
    for (lineno, raw) in text.split('\n').enumerate() {
        let line = lineno + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let mut tokens = raw.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label = label_tok
            .parse::<f64>()
            .ok()
            .and_then(Label::from_raw)
            .ok_or_else(|| Error::InvalidLabel {
                line,
                label: label_tok.to_string(),
            })?;

        let mut entries = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let malformed = |message: String| Error::Malformed { line, message };
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| malformed(format!("expected index:value, found `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| malformed(format!("bad feature index `{idx}`")))?;
            if idx == 0 {
                return Err(malformed("feature indices are 1-based".into()));
            }
            if idx <= last {
                return Err(malformed(format!(
                    "feature index {idx} does not increase (previous {last})"
                )));
            }
            let val: f64 = val
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| malformed(format!("bad feature value `{val}`")))?;
            last = idx;
            entries.push((idx, val));
        }
        n_features = n_features.max(last);
        rows.push((entries, label));
    }

    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let samples = rows
        .into_iter()
        .map(|(entries, label)| {
            let mut features = vec![0.0; n_features];
            for (idx, val) in entries {
                features[idx - 1] = val;
            }
            Sample::new(features, label)
        })
        .collect();
    Dataset::new(samples)
}

/// Parses comma-separated text with a mandatory header row. All columns other
/// than `label_column` become features, in header order.
///
/// Rows in error messages are file line numbers, the header being row 1.
pub fn parse_csv(text: &[u8], label_column: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text);
    let headers = reader
        .headers()
        .map_err(|e| Error::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(Error::MissingHeader);
    }
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::UnknownLabelColumn(label_column.to_string()))?;

    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Malformed {
                line: row,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let mut features = Vec::with_capacity(headers.len() - 1);
        let mut label = None;
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                label = Some(
                    cell.parse::<f64>()
                        .ok()
                        .and_then(Label::from_raw)
                        .ok_or_else(|| Error::InvalidLabel {
                            line: row,
                            label: cell.to_string(),
                        })?,
                );
            } else {
                let value = cell
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::NonNumeric {
                        row,
                        column: headers[col].to_string(),
                        value: cell.to_string(),
                    })?;
                features.push(value);
            }
        }
        samples.push(Sample::new(features, label.expect("label column visited")));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Dataset::new(samples)
}

/// Column statistics used by [`standardize`]; `std_dev` is the population
/// standard deviation and is 0 for constant columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureStats {
    pub mean: f64,
    pub std_dev: f64,
}

impl FeatureStats {
    pub fn transform(&self, value: f64) -> f64 {
        let scale = if self.std_dev == 0.0 {
            1.0
        } else {
            self.std_dev
        };
        (value - self.mean) / scale
    }
}

/// Centers every column and scales it to unit population standard deviation.
/// Constant columns are only centered.
pub fn standardize(d: &Dataset) -> (Dataset, Vec<FeatureStats>) {
    let n = d.len() as f64;
    let stats: Vec<FeatureStats> = (0..d.n_features())
        .map(|j| {
            let column = d.samples.iter().map(|s| s.features[j]);
            let first = d.samples[0].features[j];
            if column.clone().all(|v| v == first) {
                return FeatureStats {
                    mean: first,
                    std_dev: 0.0,
                };
            }
            let mean = column.clone().sum::<f64>() / n;
            let var = column.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            FeatureStats {
                mean,
                std_dev: var.sqrt(),
            }
        })
        .collect();

    let samples = d
        .samples
        .iter()
        .map(|s| {
            let features = s
                .features
                .iter()
                .zip(&stats)
                .map(|(&v, st)| st.transform(v))
                .collect();
            Sample::new(features, s.label)
        })
        .collect();
    let scaled = Dataset {
        samples,
        n_features: d.n_features,
    };
    (scaled, stats)
}

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of: Vec<usize>,
}

impl FoldAssignment {
    /// Wraps an explicit assignment; every index must lie in `[0, k)`.
    pub fn new(k: usize, fold_of: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidFolds {
                k,
                reason: "need at least 2 folds".into(),
            });
        }
        if let Some(&bad) = fold_of.iter().find(|&&f| f >= k) {
            return Err(Error::InvalidFolds {
                k,
                reason: format!("fold index {bad} out of range"),
            });
        }
        Ok(Self { k, fold_of })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// Sample indices held out in `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    /// Sample indices used for training when `fold` is held out, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

/// Deterministic stratified k-fold assignment.
///
/// Negative samples, then positive samples, are each shuffled on one seeded
/// stream and dealt round-robin; the deal position carries over from the
/// first class to the second so overall fold sizes differ by at most one.
pub fn kfold_split(d: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidFolds {
            k,
            reason: "need at least 2 folds".into(),
        });
    }
    let (neg, pos) = d.class_counts();
    let smaller = neg.min(pos);
    if k > smaller {
        return Err(Error::InvalidFolds {
            k,
            reason: format!("exceeds the smaller class count {smaller}"),
        });
    }

    let mut rng = SearchRng::from_seed(seed);
    let mut fold_of = vec![usize::MAX; d.len()];
    let mut next = 0usize;
    for class in Label::ALL {
        let mut members: Vec<usize> = (0..d.len()).filter(|&i| d.label(i) == class).collect();
        rng.shuffle(&mut members);
        for i in members {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}
