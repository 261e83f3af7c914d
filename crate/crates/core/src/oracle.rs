//! Brute-force reference solver for the SVM dual, used to check SMO.
//!
//! Plain projected-gradient ascent with a fixed step, projecting onto
//! `{0 <= a <= C, y.a = 0}` exactly after every step. It shares no code with
//! the SMO path; the kernel and objective are recomputed here.

/// Gram matrix computed independently of `crate::kernel`.
fn gram(points: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| {
                    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
                    (-gamma * d2).exp()
                })
                .collect()
        })
        .collect()
}

/// Euclidean projection of `v` onto the box `[0, c]^n` intersected with the
/// hyperplane `y.a = 0` (labels are +-1).
///
/// The projection is `clip(v - lambda * y)` for the root `lambda` of the
/// non-increasing piecewise-linear `h(lambda) = y . clip(v - lambda * y)`,
/// found exactly between consecutive breakpoints.
pub fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let apply = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c))
            .collect()
    };
    let h = |lambda: f64| -> f64 { apply(lambda).iter().zip(y).map(|(a, yi)| a * yi).sum() };

    let mut breaks: Vec<f64> = v
        .iter()
        .zip(y)
        .flat_map(|(vi, yi)| [vi * yi, (vi - c) * yi])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut lo = breaks[0];
    let mut h_lo = h(lo);
    if h_lo <= 0.0 {
        return apply(lo);
    }
    for &hi in &breaks[1..] {
        let h_hi = h(hi);
        if h_hi <= 0.0 {
            // h is linear on [lo, hi].
            let lambda = lo + (hi - lo) * h_lo / (h_lo - h_hi);
            return apply(lambda);
        }
        lo = hi;
        h_lo = h_hi;
    }
    apply(lo)
}

/// Dual objective evaluated directly from its definition.
pub fn dual_value(alphas: &[f64], points: &[Vec<f64>], y: &[f64], gamma: f64) -> f64 {
    let k = gram(points, gamma);
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * k[i][j];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Maximizes the dual by projected gradient ascent with a fixed `step`.
///
/// Runs `iterations` steps, stopping early only once an iteration moves no
/// coordinate by more than 1e-15.
pub fn projected_gradient_dual(
    points: &[Vec<f64>],
    y: &[f64],
    c: f64,
    gamma: f64,
    iterations: usize,
    step: f64,
) -> Vec<f64> {
    let n = points.len();
    let k = gram(points, gamma);
    let mut alpha = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..iterations {
        for i in 0..n {
            let q_alpha: f64 = (0..n).map(|j| y[i] * y[j] * k[i][j] * alpha[j]).sum();
            trial[i] = alpha[i] + step * (1.0 - q_alpha);
        }
        let next = project(&trial, y, c);
        let moved = next
            .iter()
            .zip(&alpha)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        alpha = next;
        if moved <= 1e-15 {
            break;
        }
    }
    alpha
}
