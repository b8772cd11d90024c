//! Multiple gradient descent.
//!
//! Given task gradients `g_1, …, g_T`, MGDA picks simplex weights `α` that
//! minimize `‖Σ α_t g_t‖²` and steps along the resulting min-norm direction,
//! which does not increase any task to first order. A zero min-norm direction
//! means the point is Pareto stationary.

use serde::Serialize;

use crate::error::{arg, Error, Result};

/// Below this `‖g1 − g2‖²` the two-task problem is treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-18;

/// Weights on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    alphas: Vec<f64>,
}

impl WeightVector {
    /// Checks `α_t ≥ 0` and `Σα_t = 1` within 1e-12.
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return arg("weight vector must not be empty");
        }
        let sum: f64 = alphas.iter().sum();
        if alphas.iter().any(|&a| a < -1e-12 || !a.is_finite()) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("{alphas:?} is not on the simplex")));
        }
        Ok(Self { alphas })
    }

    pub fn two_task(alpha: f64) -> Self {
        let a = alpha.clamp(0.0, 1.0);
        Self {
            alphas: vec![a, 1.0 - a],
        }
    }

    pub fn vertex(t: usize, len: usize) -> Self {
        let mut alphas = vec![0.0; len];
        alphas[t] = 1.0;
        Self { alphas }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MooStepReport {
    pub alpha: WeightVector,
    pub combined_gradient_norm: f64,
    pub step_taken: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_same_len(gradients: &[&[f64]]) -> Result<usize> {
    let Some(first) = gradients.first() else {
        return arg("no gradients given");
    };
    let n = first.len();
    if let Some(g) = gradients.iter().find(|g| g.len() != n) {
        return arg(format!("gradient lengths differ ({n} vs {})", g.len()));
    }
    Ok(n)
}

/// Closed-form minimizer of `‖α g1 + (1−α) g2‖²` over `α ∈ [0, 1]`.
pub fn solve_alpha_two_task(g1: &[f64], g2: &[f64]) -> Result<f64> {
    check_same_len(&[g1, g2])?;
    let gap: f64 = g1.iter().zip(g2).map(|(a, b)| (a - b) * (a - b)).sum();
    if gap < DEGENERATE_GAP {
        return Ok(0.5);
    }
    let num: f64 = g2.iter().zip(g1).map(|(b, a)| (b - a) * b).sum();
    Ok((num / gap).clamp(0.0, 1.0))
}

/// `Σ α_t g_t`.
pub fn combine(gradients: &[&[f64]], alpha: &WeightVector) -> Result<Vec<f64>> {
    let n = check_same_len(gradients)?;
    if gradients.len() != alpha.len() {
        return arg(format!(
            "{} gradients but {} weights",
            gradients.len(),
            alpha.len()
        ));
    }
    let mut out = vec![0.0; n];
    for (g, &a) in gradients.iter().zip(alpha.as_slice()) {
        for (o, x) in out.iter_mut().zip(g.iter()) {
            *o += a * x;
        }
    }
    Ok(out)
}

/// `‖Σ α_t g_t‖`.
pub fn kkt_residual(gradients: &[&[f64]], alpha: &WeightVector) -> Result<f64> {
    let c = combine(gradients, alpha)?;
    Ok(dot(&c, &c).sqrt())
}

/// Result of [`frank_wolfe_weights`] with the objective after every iteration.
#[derive(Debug, Clone)]
pub struct FrankWolfeOutcome {
    pub weights: WeightVector,
    pub history: Vec<f64>,
    pub iterations: usize,
}

/// Min-norm point of the convex hull of `gradients` by Frank–Wolfe with exact line search.
///
/// Works on the Gram matrix `M_ij = g_i·g_j`. Stops when the duality gap drops
/// below `tol` or after `max_iters` iterations.
pub fn frank_wolfe_weights(
    gradients: &[&[f64]],
    max_iters: usize,
    tol: f64,
) -> Result<FrankWolfeOutcome> {
    check_same_len(gradients)?;
    let t = gradients.len();
    if t < 2 {
        return arg(format!("Frank–Wolfe needs at least two tasks, got {t}"));
    }
    let gram: Vec<Vec<f64>> = gradients
        .iter()
        .map(|a| gradients.iter().map(|b| dot(a, b)).collect())
        .collect();
    let objective = |w: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..t {
            for j in 0..t {
                s += w[i] * w[j] * gram[i][j];
            }
        }
        s
    };

    // start from the best vertex
    let start = (0..t)
        .min_by(|&a, &b| gram[a][a].total_cmp(&gram[b][b]))
        .unwrap_or(0);
    let mut w = vec![0.0; t];
    w[start] = 1.0;
    let mut history = vec![objective(&w)];
    let mut iterations = 0;

    for _ in 0..max_iters {
        // M w is half the gradient of wᵀMw
        let mw: Vec<f64> = (0..t).map(|i| dot(&gram[i], &w)).collect();
        let s = (0..t).min_by(|&a, &b| mw[a].total_cmp(&mw[b])).unwrap_or(0);
        let wmw = dot(&w, &mw);
        let gap = wmw - mw[s];
        if gap <= tol {
            break;
        }
        iterations += 1;
        // line search on w + γ(e_s − w): minimize over γ ∈ [0,1]
        let ss = gram[s][s];
        let denom = wmw - 2.0 * mw[s] + ss;
        let gamma = if denom <= 0.0 {
            1.0
        } else {
            ((wmw - mw[s]) / denom).clamp(0.0, 1.0)
        };
        for (k, wk) in w.iter_mut().enumerate() {
            *wk *= 1.0 - gamma;
            if k == s {
                *wk += gamma;
            }
        }
        let obj = objective(&w);
        // guard against rounding pushing the objective up
        let prev = *history.last().unwrap_or(&f64::INFINITY);
        history.push(obj.min(prev));
    }

    // renormalize against drift
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x = (*x / sum).max(0.0));
    Ok(FrankWolfeOutcome {
        weights: WeightVector::new(w)?,
        history,
        iterations,
    })
}

/// `params − η · combined`.
pub fn descent_step(params: &[f64], combined_gradient: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return arg(format!("step size must be positive, got {eta}"));
    }
    if params.len() != combined_gradient.len() {
        return arg(format!(
            "{} parameters but gradient of length {}",
            params.len(),
            combined_gradient.len()
        ));
    }
    Ok(params
        .iter()
        .zip(combined_gradient)
        .map(|(p, g)| p - eta * g)
        .collect())
}

/// One two-task MGDA update: solve α, combine, step.
pub fn mgda_step(params: &[f64], g1: &[f64], g2: &[f64], eta: f64) -> Result<(Vec<f64>, MooStepReport)> {
    let alpha = WeightVector::two_task(solve_alpha_two_task(g1, g2)?);
    let combined = combine(&[g1, g2], &alpha)?;
    let norm = dot(&combined, &combined).sqrt();
    let next = descent_step(params, &combined, eta)?;
    Ok((
        next,
        MooStepReport {
            alpha,
            combined_gradient_norm: norm,
            step_taken: norm > 0.0,
        },
    ))
}
