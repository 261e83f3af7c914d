//! Gaussian radial-basis kernel.

use crate::error::{Error, Result};

/// exp(-gamma * ||a - b||^2); always in (0, 1], equal to 1 iff `a == b`
/// (barring underflow for very distant points).
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    Ok(rbf_unchecked(a, b, gamma))
}

#[inline]
pub(crate) fn rbf_unchecked(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let dist2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * dist2).exp()
}

/// Dense row-major Gram matrix of `rows` under the RBF kernel.
pub fn gram_matrix(rows: &[&[f64]], gamma: f64) -> Vec<f64> {
    let n = rows.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in 0..i {
            let v = rbf_unchecked(rows[i], rows[j], gamma);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}
