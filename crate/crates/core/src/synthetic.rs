//! Seeded synthetic datasets for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{Dataset, Label, Sample};
use crate::error::Result;

/// Two isotropic Gaussian clouds with standard deviation `spread`; samples
/// alternate negative (around `negative_mean`) and positive.
pub fn two_blobs(
    n: usize,
    negative_mean: &[f64],
    positive_mean: &[f64],
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread).expect("spread must be positive and finite");
    let samples = (0..n)
        .map(|i| {
            let (mean, label) = if i % 2 == 0 {
                (negative_mean, Label::Negative)
            } else {
                (positive_mean, Label::Positive)
            };
            let features = mean.iter().map(|m| m + noise.sample(&mut rng)).collect();
            Sample::new(features, label)
        })
        .collect();
    Dataset::new(samples)
}

/// Points uniform on `[-half_width, half_width]^2`, labelled by the sign of
/// `x * y`: positive in the first and third quadrants.
pub fn xor_quadrants(n: usize, half_width: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let x = rng.random_range(-half_width..half_width);
            let y = rng.random_range(-half_width..half_width);
            let label = if x * y > 0.0 {
                Label::Positive
            } else {
                Label::Negative
            };
            Sample::new(vec![x, y], label)
        })
        .collect();
    Dataset::new(samples)
}

/// Standard-normal features with labels drawn independently of them.
pub fn random_labels(n: usize, dim: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let samples = (0..n)
        .map(|_| {
            let features = (0..dim).map(|_| normal.sample(&mut rng)).collect();
            let label = if rng.random_bool(0.5) {
                Label::Positive
            } else {
                Label::Negative
            };
            Sample::new(features, label)
        })
        .collect();
    Dataset::new(samples)
}

/// Copy of `d` with every feature multiplied by `factor`.
pub fn rescaled(d: &Dataset, factor: f64) -> Result<Dataset> {
    Dataset::new(
        d.samples()
            .iter()
            .map(|s| Sample::new(s.features.iter().map(|v| v * factor).collect(), s.label))
            .collect(),
    )
}
