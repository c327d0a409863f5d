//! Maximum-likelihood logistic regression of treatment on binary covariates.
//!
//! Rows are collapsed to covariate patterns first, so each Newton iteration
//! costs `O(patterns · d²)` regardless of sample size.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::model::{Covariates, ObservationalDataset};

pub const MAX_ITERATIONS: usize = 500;
/// Per-row gradient tolerance; the stopping rule scales it by the sample size.
pub const GRADIENT_TOLERANCE: f64 = 1e-10;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub coef: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

impl LogisticFit {
    pub fn linear_predictor(&self, w: Covariates) -> f64 {
        self.intercept + w.dot(&self.coef)
    }

    pub fn predict(&self, w: Covariates) -> f64 {
        sigmoid(self.linear_predictor(w))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Pattern {
    x: DVector<f64>,
    treated: f64,
    total: f64,
}

fn log_likelihood(patterns: &[Pattern], theta: &DVector<f64>) -> f64 {
    patterns
        .iter()
        .map(|p| {
            let z = p.x.dot(theta);
            -p.treated * softplus(-z) - (p.total - p.treated) * softplus(z)
        })
        .sum()
}

fn gradient_and_information(patterns: &[Pattern], theta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let k = theta.len();
    let mut grad = DVector::zeros(k);
    let mut info = DMatrix::zeros(k, k);
    for p in patterns {
        let s = sigmoid(p.x.dot(theta));
        grad.axpy(p.treated - p.total * s, &p.x, 1.0);
        info.ger(p.total * s * (1.0 - s), &p.x, &p.x, 1.0);
    }
    (grad, info)
}

/// Newton–Raphson with step halving on the log-likelihood. Stops once the
/// gradient norm is at most `n ·` [`GRADIENT_TOLERANCE`] or after
/// [`MAX_ITERATIONS`]; the fit is returned either way with `converged` set
/// accordingly.
pub fn fit(data: &ObservationalDataset) -> LogisticFit {
    let dim = data.dim();
    let mut counts: BTreeMap<Covariates, (f64, f64)> = BTreeMap::new();
    for row in data.rows() {
        let e = counts.entry(row.w).or_insert((0.0, 0.0));
        e.0 += row.arm.bit() as f64;
        e.1 += 1.0;
    }
    let patterns: Vec<Pattern> = counts
        .into_iter()
        .map(|(w, (treated, total))| {
            let mut x = DVector::zeros(dim + 1);
            x[0] = 1.0;
            for j in 0..dim {
                x[j + 1] = w.get(j) as f64;
            }
            Pattern { x, treated, total }
        })
        .collect();

    let tolerance = GRADIENT_TOLERANCE * (data.len() as f64).max(1.0);
    let mut theta = DVector::zeros(dim + 1);
    let mut ll = log_likelihood(&patterns, &theta);
    let mut iterations = 0;
    let (mut grad, mut info) = gradient_and_information(&patterns, &theta);
    while grad.norm() > tolerance && iterations < MAX_ITERATIONS {
        iterations += 1;
        let step = newton_step(&info, &grad);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let candidate = &theta + &step * scale;
            let cand_ll = log_likelihood(&patterns, &candidate);
            if cand_ll >= ll {
                theta = candidate;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
        (grad, info) = gradient_and_information(&patterns, &theta);
    }
    let gradient_norm = grad.norm();
    let converged = gradient_norm <= tolerance;
    if !converged {
        log::warn!(
            "logistic propensity fit stopped after {iterations} iterations with gradient norm {gradient_norm:e}"
        );
    }
    LogisticFit {
        intercept: theta[0],
        coef: theta.iter().skip(1).copied().collect(),
        iterations,
        gradient_norm,
        converged,
    }
}

/// Solves `info · step = grad`, adding a growing ridge when the information
/// matrix is singular (separated or constant covariates).
fn newton_step(info: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let scale = info.diagonal().amax().max(1.0);
    let mut ridge = 0.0;
    loop {
        let mut m = info.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += ridge;
        }
        if let Some(chol) = m.cholesky() {
            return chol.solve(grad);
        }
        ridge = if ridge == 0.0 { scale * 1e-12 } else { ridge * 10.0 };
    }
}
