//! Polynomial-lasso baseline.
//!
//! A classical parametric reference model: expand a one-dimensional
//! predictor into powers `x^p` for `p = 1..degree`, standardize the
//! features to zero mean and unit population variance, and fit by cyclic
//! coordinate descent on the lasso objective
//!
//! `(1/2n) * ||y - intercept - Z beta||^2 + lambda * ||beta||_1`
//!
//! with the intercept left unpenalized. Coefficients are reported back in
//! the original basis so [`predict_lasso`] is a plain polynomial
//! evaluation. [`select_lambda`] picks the penalty by deterministic k-fold
//! cross-validation (folds by sample index modulo k, pooled MAE).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::stats::{mean, population_variance};

/// Coefficient-change tolerance used when the caller has no preference.
pub const DEFAULT_LASSO_TOL: f64 = 1e-10;
/// Sweep cap used when the caller has no preference.
pub const DEFAULT_LASSO_MAX_ITER: usize = 100_000;
/// Polynomial degree used by the benchmark baseline.
pub const DEFAULT_LASSO_DEGREE: usize = 5;
/// Fold count used by the benchmark baseline.
pub const DEFAULT_CV_FOLDS: usize = 5;

/// Penalty grid used by the benchmark baseline: 20 log-spaced points on
/// [1e-4, 10].
pub fn default_lambda_grid() -> Vec<f64> {
    let (lo, hi) = (1e-4_f64.ln(), 10.0_f64.ln());
    (0..20)
        .map(|i| (lo + (hi - lo) * i as f64 / 19.0).exp())
        .collect()
}

/// A fitted polynomial lasso model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LassoModel {
    pub degree: usize,
    pub lambda: f64,
    /// Length `degree + 1`, intercept first, original (unstandardized)
    /// basis.
    pub coefficients: Vec<f64>,
    /// Mean of each power feature, length `degree`.
    pub feature_means: Vec<f64>,
    /// Population standard deviation of each power feature, length
    /// `degree`; always positive.
    pub feature_scales: Vec<f64>,
    pub converged: bool,
    /// Coordinate-descent sweeps performed.
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum LassoError {
    #[error("polynomial features need a one-dimensional predictor, got dimension {dim}")]
    NotOneDimensional { dim: usize },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("{name} out of range: {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("feature x^{power} has zero variance (constant predictor)")]
    ZeroVarianceFeature { power: usize },
    #[error("lambda grid is empty")]
    EmptyGrid,
    #[error("{k} folds on {n} samples would leave fold {fold} empty")]
    EmptyFold { k: usize, n: usize, fold: usize },
}

/// Soft-threshold operator `sign(v) * max(|v| - lambda, 0)`.
fn soft_threshold(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// One cyclic coordinate-descent sweep over standardized columns `z`
/// (each with unit population variance), updating `beta` and the residual
/// `r = yc - Z beta` in place. Returns the largest coefficient change.
fn cd_sweep(z: &[Vec<f64>], r: &mut [f64], beta: &mut [f64], lambda: f64) -> f64 {
    let n = r.len() as f64;
    let mut max_delta = 0.0_f64;
    for (p, col) in z.iter().enumerate() {
        let old = beta[p];
        // rho = beta_p + (1/n) <z_p, r>; the quadratic coefficient is 1
        // because the column has unit variance.
        let mut dot = 0.0;
        for (zi, ri) in col.iter().zip(r.iter()) {
            dot += zi * ri;
        }
        let new = soft_threshold(old + dot / n, lambda);
        if new != old {
            let shift = old - new;
            for (zi, ri) in col.iter().zip(r.iter_mut()) {
                *ri += zi * shift;
            }
            beta[p] = new;
        }
        max_delta = max_delta.max((new - old).abs());
    }
    max_delta
}

/// Lasso objective in the standardized basis, for descent checks.
#[cfg(test)]
fn standardized_objective(r: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let n = r.len() as f64;
    let rss: f64 = r.iter().map(|v| v * v).sum();
    rss / (2.0 * n) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

/// Power-feature columns `x^p` for `p = 1..=degree`, column-major.
fn power_features(xs: &[f64], degree: usize) -> Vec<Vec<f64>> {
    let mut cols = Vec::with_capacity(degree);
    let mut current: Vec<f64> = xs.to_vec();
    cols.push(current.clone());
    for _ in 2..=degree {
        for (c, &x) in current.iter_mut().zip(xs) {
            *c *= x;
        }
        cols.push(current.clone());
    }
    cols
}

/// Fits the polynomial lasso on a one-dimensional dataset.
pub fn fit_lasso(
    ds: &Dataset,
    degree: usize,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LassoModel, LassoError> {
    if ds.dim() != 1 {
        return Err(LassoError::NotOneDimensional { dim: ds.dim() });
    }
    if ds.len() < 2 {
        return Err(LassoError::TooFewSamples { need: 2, got: ds.len() });
    }
    if degree < 1 {
        return Err(LassoError::BadParameter { name: "degree", value: degree as f64 });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(LassoError::BadParameter { name: "lambda", value: lambda });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(LassoError::BadParameter { name: "tol", value: tol });
    }
    if max_iter < 1 {
        return Err(LassoError::BadParameter { name: "max_iter", value: max_iter as f64 });
    }
    if ds.len() <= degree {
        eprintln!(
            "warning: fitting a degree-{degree} polynomial on {} samples; \
             the fit is underdetermined",
            ds.len()
        );
    }

    let xs: Vec<f64> = ds.samples().iter().map(|s| s.x[0]).collect();
    let ys = ds.responses();
    let y_mean = mean(&ys);

    // Standardize each power column to zero mean, unit population
    // variance.
    let mut cols = power_features(&xs, degree);
    let mut feature_means = Vec::with_capacity(degree);
    let mut feature_scales = Vec::with_capacity(degree);
    for (p, col) in cols.iter_mut().enumerate() {
        let mu = mean(col);
        let var = population_variance(col);
        if var == 0.0 {
            return Err(LassoError::ZeroVarianceFeature { power: p + 1 });
        }
        let sd = var.sqrt();
        for v in col.iter_mut() {
            *v = (*v - mu) / sd;
        }
        feature_means.push(mu);
        feature_scales.push(sd);
    }

    // Centered response; the unpenalized intercept of the standardized
    // problem is exactly mean(y).
    let mut residual: Vec<f64> = ys.iter().map(|y| y - y_mean).collect();
    let mut beta = vec![0.0_f64; degree];
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        let max_delta = cd_sweep(&cols, &mut residual, &mut beta, lambda);
        iterations += 1;
        if max_delta <= tol {
            converged = true;
            break;
        }
    }

    // Map back to the original basis.
    let mut coefficients = Vec::with_capacity(degree + 1);
    let mut intercept = y_mean;
    for p in 0..degree {
        intercept -= beta[p] * feature_means[p] / feature_scales[p];
    }
    coefficients.push(intercept);
    for p in 0..degree {
        coefficients.push(beta[p] / feature_scales[p]);
    }

    Ok(LassoModel {
        degree,
        lambda,
        coefficients,
        feature_means,
        feature_scales,
        converged,
        iterations,
    })
}

/// Evaluates the fitted polynomial at `x`.
pub fn predict_lasso(model: &LassoModel, x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in model.coefficients.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Picks the penalty from `lambda_grid` by k-fold cross-validation:
/// deterministic folds (sample index modulo k), pooled mean absolute
/// error, exact ties resolved toward the larger (stronger) penalty.
/// Returns the winning lambda with its CV error.
pub fn select_lambda(
    ds: &Dataset,
    degree: usize,
    lambda_grid: &[f64],
    k_folds: usize,
) -> Result<(f64, f64), LassoError> {
    if lambda_grid.is_empty() {
        return Err(LassoError::EmptyGrid);
    }
    if k_folds < 2 {
        return Err(LassoError::BadParameter { name: "k_folds", value: k_folds as f64 });
    }
    let n = ds.len();
    if n < k_folds {
        return Err(LassoError::EmptyFold { k: k_folds, n, fold: n });
    }

    // Folds and their training complements are fixed across lambdas.
    let mut train_sets = Vec::with_capacity(k_folds);
    let mut test_sets = Vec::with_capacity(k_folds);
    for fold in 0..k_folds {
        let train: Vec<usize> = (0..n).filter(|i| i % k_folds != fold).collect();
        let test: Vec<usize> = (0..n).filter(|i| i % k_folds == fold).collect();
        train_sets.push(ds.subset(&train));
        test_sets.push(ds.subset(&test));
    }

    let mut best: Option<(f64, f64)> = None;
    for &lambda in lambda_grid {
        let mut abs_err = 0.0;
        for (train, test) in train_sets.iter().zip(&test_sets) {
            let model = fit_lasso(train, degree, lambda, DEFAULT_LASSO_TOL, DEFAULT_LASSO_MAX_ITER)?;
            for s in test.samples() {
                abs_err += (predict_lasso(&model, s.x[0]) - s.y).abs();
            }
        }
        let cv = abs_err / n as f64;
        let better = match best {
            None => true,
            Some((b_lambda, b_cv)) => cv < b_cv || (cv == b_cv && lambda > b_lambda),
        };
        if better {
            best = Some((lambda, cv));
        }
    }
    Ok(best.expect("grid checked nonempty"))
}
