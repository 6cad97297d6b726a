//! Euclidean-distance regression and a generic 1-D descent solver.
//!
//! Instead of weighting squared residuals, this estimator minimizes the
//! total Euclidean distance from the candidate point `(x, z)` to the
//! samples `(x_i, y_i)`:
//!
//! `C(z) = sum_i sqrt(|x - x_i|^2 + (z - y_i)^2)`
//!
//! The minimizer has no closed form; [`solve_fixed_point`] iterates the
//! stationarity condition rearranged as a weighted mean of the responses,
//! with weights `1/d_i` (inverse current distances):
//!
//! `z <- sum_i (y_i / d_i) / sum_i (1 / d_i)`
//!
//! starting from the mean response. Distances are clamped below at 1e-12
//! so a candidate sitting exactly on a sample cannot divide by zero.
//! [`solve_gradient`] is a derivative-free fallback for arbitrary smooth
//! scalar objectives (finite-difference gradient plus backtracking line
//! search) used to cross-check the fixed point and by parameter tuning.

use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::Dataset;
use crate::stats::{mean, CompensatedSum};

/// Convergence tolerance on the iterate step used by the solvers when the
/// caller has no preference.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Iteration cap used by the solvers when the caller has no preference.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Distances are clamped below at this value inside the fixed-point update.
const DISTANCE_FLOOR: f64 = 1e-12;

/// Outcome of an iterative solve. `converged == false` is not an error:
/// the best iterate found is still returned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveResult {
    /// Final iterate.
    pub z: f64,
    /// Iterations actually performed.
    pub iterations: usize,
    /// Size of the last step (or last gradient step for the descent
    /// solver); `0.0` when converged on entry.
    pub residual: f64,
    /// Whether the stopping tolerance was met within the iteration cap.
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("query has {got} coordinates, dataset dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{name} must be positive and finite, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("objective is not finite at z = {z}")]
    NonFiniteObjective { z: f64 },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn check(ds: &Dataset, x: &[f64]) -> Result<(), SolverError> {
    if ds.is_empty() {
        return Err(SolverError::EmptyDataset);
    }
    if x.len() != ds.dim() {
        return Err(SolverError::DimensionMismatch {
            expected: ds.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Squared predictor distance `|x - x_i|^2` for sample `i`.
fn predictor_sq(x: &[f64], xi: &[f64]) -> f64 {
    x.iter()
        .zip(xi)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum()
}

/// Total Euclidean distance from `(x, z)` to every sample.
pub fn euclid_cost(ds: &Dataset, x: &[f64], z: f64) -> Result<f64, SolverError> {
    check(ds, x)?;
    if !z.is_finite() {
        return Err(SolverError::NonFiniteObjective { z });
    }
    let mut total = CompensatedSum::new();
    for s in ds.samples() {
        let dz = z - s.y;
        total.add((predictor_sq(x, &s.x) + dz * dz).sqrt());
    }
    Ok(total.value())
}

/// One fixed-point update from `z`: the inverse-distance weighted mean of
/// the responses. Exposed so callers can observe the per-step cost descent.
pub fn fixed_point_step(ds: &Dataset, x: &[f64], z: f64) -> Result<f64, SolverError> {
    check(ds, x)?;
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for s in ds.samples() {
        let dz = z - s.y;
        let d = (predictor_sq(x, &s.x) + dz * dz).sqrt().max(DISTANCE_FLOOR);
        num.add(s.y / d);
        den.add(1.0 / d);
    }
    Ok(num.value() / den.value())
}

/// Minimizes [`euclid_cost`] in `z` by fixed-point iteration from the mean
/// response. Stops when the step size drops to `tol` or the iteration cap
/// is reached (reported via [`SolveResult::converged`], never an error).
pub fn solve_fixed_point(
    ds: &Dataset,
    x: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult, SolverError> {
    check(ds, x)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SolverError::BadParameter { name: "tol", value: tol });
    }
    let mut z = mean(&ds.responses());
    let mut residual = 0.0;
    for it in 1..=max_iter {
        let next = fixed_point_step(ds, x, z)?;
        residual = (next - z).abs();
        z = next;
        if residual <= tol {
            return Ok(SolveResult { z, iterations: it, residual, converged: true });
        }
    }
    Ok(SolveResult { z, iterations: max_iter, residual, converged: false })
}

/// Minimizes a smooth scalar objective by descent along the sign of a
/// central finite-difference gradient with a backtracking (halving) line
/// search: each iteration tries a move of length `step` downhill and halves
/// it until the objective decreases.
///
/// Returns an error if the objective evaluates to a non-finite value at
/// any visited iterate, naming that iterate. The solve reports convergence
/// when the gradient magnitude falls within `tol` or the accepted step
/// length shrinks to `tol` relative to the iterate's scale; a step that
/// fails to decrease the objective after the backtracking floor terminates
/// at the current iterate with `converged == false`.
pub fn solve_gradient(
    objective: impl Fn(f64) -> f64,
    init: f64,
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult, SolverError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(SolverError::BadParameter { name: "step", value: step });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SolverError::BadParameter { name: "tol", value: tol });
    }
    let eval = |z: f64| -> Result<f64, SolverError> {
        let v = objective(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SolverError::NonFiniteObjective { z })
        }
    };

    let mut z = init;
    let mut fz = eval(z)?;
    for it in 0..max_iter {
        let h = 1e-6 * z.abs().max(1.0);
        let grad = (eval(z + h)? - eval(z - h)?) / (2.0 * h);
        if grad.abs() <= tol {
            return Ok(SolveResult { z, iterations: it, residual: grad.abs(), converged: true });
        }
        // Backtracking: halve the trial step length until the objective
        // decreases along the downhill direction.
        let mut alpha = step;
        let mut moved = false;
        while alpha > 1e-20 {
            let cand = z - alpha * grad.signum();
            let fc = eval(cand)?;
            if fc < fz {
                z = cand;
                fz = fc;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            // No descent direction at this resolution: the iterate is as
            // good as the line search can certify.
            return Ok(SolveResult {
                z,
                iterations: it + 1,
                residual: grad.abs(),
                converged: false,
            });
        }
        if alpha <= tol * z.abs().max(1.0) {
            // The accepted step length has shrunk to the tolerance scale:
            // further moves cannot relocate the iterate meaningfully.
            return Ok(SolveResult {
                z,
                iterations: it + 1,
                residual: grad.abs(),
                converged: true,
            });
        }
    }
    let h = 1e-6 * z.abs().max(1.0);
    let grad = (eval(z + h)? - eval(z - h)?) / (2.0 * h);
    Ok(SolveResult {
        z,
        iterations: max_iter,
        residual: grad.abs(),
        converged: grad.abs() <= tol,
    })
}
