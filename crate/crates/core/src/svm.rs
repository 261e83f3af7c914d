//! Soft-margin RBF support vector classifier trained in the dual with SMO.
//!
//! The dual problem solved is
//!
//! ```text
//! max_a  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
//! s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! which corresponds to the hinge-loss primal. Each SMO step picks the
//! sample that violates the optimality conditions the most (lowest index on
//! ties) and pairs it with the partner maximizing the gap between their
//! prediction errors, then solves the two-variable subproblem analytically.

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, rbf_unchecked};

/// Curvature floor for pairs whose kernel rows coincide.
const TAU: f64 = 1e-12;

/// The (C, gamma) pair being tuned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    c: f64,
    gamma: f64,
}

impl HyperParams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("C", c), ("gamma", gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { c, gamma })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Exact bit pattern of (C, gamma), used as a cache key.
    pub fn key(&self) -> (u64, u64) {
        (self.c.to_bits(), self.gamma.to_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Allowed violation of the optimality conditions, measured on y*f(x).
    pub kkt_tolerance: f64,
    /// The solver gives up after `max_passes * n` consecutive updates that
    /// leave every multiplier unchanged.
    pub max_passes: usize,
    /// Hard cap on SMO steps; `None` means `10_000 * n`.
    pub max_iterations: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kkt_tolerance: 1e-3,
            max_passes: 10,
            max_iterations: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kkt_tolerance > 0.0 && self.kkt_tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "kkt_tolerance must lie in (0, 1), got {}",
                self.kkt_tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max_passes must be >= 1".into()));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidParameter(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn iteration_limit(&self, n: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| n.saturating_mul(10_000))
    }
}

/// Raw dual solution: one multiplier per training sample plus the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

/// A trained classifier in its dual expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    support_vectors: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
    bias: f64,
    gamma: f64,
    c_used: f64,
}

impl SvmModel {
    /// Assembles a model from its parts. Coefficients are `alpha_i * y_i` and
    /// must satisfy `|coefficient| <= C`.
    pub fn new(
        support_vectors: Vec<Vec<f64>>,
        coefficients: Vec<f64>,
        bias: f64,
        params: HyperParams,
    ) -> Result<Self> {
        if support_vectors.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                left: support_vectors.len(),
                right: coefficients.len(),
            });
        }
        if support_vectors.is_empty() {
            return Err(Error::InvalidParameter(
                "model needs a support vector".into(),
            ));
        }
        let dim = support_vectors[0].len();
        if let Some(sv) = support_vectors.iter().find(|sv| sv.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: sv.len(),
            });
        }
        if let Some((index, &value)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.abs() <= params.c))
        {
            return Err(Error::AlphaOutOfBox {
                index,
                value,
                c: params.c,
            });
        }
        Ok(Self {
            support_vectors,
            coefficients,
            bias,
            gamma: params.gamma,
            c_used: params.c,
        })
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c_used(&self) -> f64 {
        self.c_used
    }

    pub fn n_features(&self) -> usize {
        self.support_vectors[0].len()
    }
}

/// sum_i coefficient_i * K(sv_i, x) + bias
pub fn decision_value(m: &SvmModel, x: &[f64]) -> Result<f64> {
    if x.len() != m.n_features() {
        return Err(Error::DimensionMismatch {
            expected: m.n_features(),
            found: x.len(),
        });
    }
    let sum: f64 = m
        .support_vectors
        .iter()
        .zip(&m.coefficients)
        .map(|(sv, coef)| coef * rbf_unchecked(sv, x, m.gamma))
        .sum();
    Ok(sum + m.bias)
}

/// Sign of the decision value; exactly zero predicts the positive class.
pub fn predict(m: &SvmModel, x: &[f64]) -> Result<Label> {
    Ok(if decision_value(m, x)? >= 0.0 {
        Label::Positive
    } else {
        Label::Negative
    })
}

/// Dual objective `sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij` at `alphas`.
pub fn dual_objective(alphas: &[f64], d: &Dataset, params: HyperParams) -> Result<f64> {
    if alphas.len() != d.len() {
        return Err(Error::LengthMismatch {
            left: alphas.len(),
            right: d.len(),
        });
    }
    if let Some((index, &value)) = alphas
        .iter()
        .enumerate()
        .find(|(_, a)| !(**a >= 0.0 && **a <= params.c))
    {
        return Err(Error::AlphaOutOfBox {
            index,
            value,
            c: params.c,
        });
    }
    let n = d.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        let yi = d.label(i).sign();
        for j in 0..n {
            if alphas[j] == 0.0 {
                continue;
            }
            let yj = d.label(j).sign();
            quad += alphas[i]
                * alphas[j]
                * yi
                * yj
                * rbf_unchecked(d.features(i), d.features(j), params.gamma);
        }
    }
    Ok(alphas.iter().sum::<f64>() - 0.5 * quad)
}

/// Runs SMO and returns the full multiplier vector.
pub fn solve(d: &Dataset, params: HyperParams, cfg: &SolverConfig) -> Result<DualSolution> {
    cfg.validate()?;
    let n = d.len();
    let c = params.c;
    let y: Vec<f64> = d.samples().iter().map(|s| s.label.sign()).collect();
    let rows: Vec<&[f64]> = d.samples().iter().map(|s| s.features.as_slice()).collect();
    let k = gram_matrix(&rows, params.gamma);

    // grad_t = (Q a)_t - 1 with Q_ij = y_i y_j K_ij, for the minimization form.
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, y: f64| if y > 0.0 { a < c } else { a > 0.0 };
    let in_low = |a: f64, y: f64| if y > 0.0 { a > 0.0 } else { a < c };

    let limit = cfg.iteration_limit(n);
    let stall_limit = cfg.max_passes.saturating_mul(n);
    let mut stalled = 0usize;

    for iteration in 0..limit {
        let mut i = usize::MAX;
        let mut j = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if gmax - gmin <= cfg.kkt_tolerance {
            let bias = -rho(&alpha, &grad, &y, c);
            return Ok(DualSolution {
                alphas: alpha,
                bias,
                iterations: iteration,
            });
        }

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
        if quad <= 0.0 {
            quad = TAU;
        }
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let di = ai - old_i;
        let dj = aj - old_j;
        if di == 0.0 && dj == 0.0 {
            stalled += 1;
            if stalled >= stall_limit {
                return Err(Error::NonConvergence {
                    iterations: iteration + 1,
                    c,
                    gamma: params.gamma,
                });
            }
            continue;
        }
        stalled = 0;
        let (ki, kj) = (&k[i * n..(i + 1) * n], &k[j * n..(j + 1) * n]);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    Err(Error::NonConvergence {
        iterations: limit,
        c,
        gamma: params.gamma,
    })
}

/// Offset rho of `f(x) = sum a_i y_i K - rho`: the mean of y_t * grad_t over
/// free multipliers, or the midpoint of the feasible interval if none is free.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    }
}

/// Trains a classifier, keeping only samples with non-zero multipliers.
pub fn train(d: &Dataset, params: HyperParams, cfg: &SolverConfig) -> Result<SvmModel> {
    let solution = solve(d, params, cfg)?;
    model_from_solution(d, params, &solution)
}

pub fn model_from_solution(
    d: &Dataset,
    params: HyperParams,
    solution: &DualSolution,
) -> Result<SvmModel> {
    let (support_vectors, coefficients) = solution
        .alphas
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .map(|(i, &a)| (d.features(i).to_vec(), a * d.label(i).sign()))
        .unzip();
    SvmModel::new(support_vectors, coefficients, solution.bias, params)
}
