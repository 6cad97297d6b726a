//! Kernel parameter selection by variance matching.
//!
//! The guiding rule: pick the kernel strength so the variance of the
//! leave-one-out predictions matches the variance the model is *supposed*
//! to explain. With no noise that target is the full response variance;
//! with noise it is a fraction of it. Three selectors build on this:
//!
//! * [`tune_r`] — matches `Var(e)` to `explained_fraction * Var(Y)` over a
//!   single strength parameter `r` (log grid + golden-section refinement).
//! * [`iterate_randomness`] — estimates the explained fraction itself from
//!   the data by alternating *tune r* / *re-estimate noise share*, damped
//!   to keep the alternation from oscillating.
//! * [`tune_two_param`] — jointly tunes `(r, q)` of the shifted
//!   exponential kernel against a weighted blend of the variance-match
//!   loss and a normalized fit term.
//!
//! All of them score candidates by leave-one-out (see the estimator):
//! in-sample predictions under a singular kernel reproduce the responses
//! exactly, which collapses every objective here.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::estimator::{predict_loo, CachedLoo, ExactMatchPolicy, EstimatorError};
use crate::kernels::KernelSpec;
use crate::solver::{solve_gradient, SolverError};
use crate::stats::{mean_square, population_variance, sse};

/// Responses (or leave-one-out denominators) smaller than this in absolute
/// value are excluded from relative indices.
pub const ZERO_GUARD: f64 = 1e-9;

/// Default search interval for the exponential base `r`.
pub const DEFAULT_R_BOUNDS: (f64, f64) = (1.0 + 1e-6, 1e12);

/// Default damping factor for [`iterate_randomness`].
pub const DEFAULT_DAMPING: f64 = 0.3;

/// Default round cap for [`iterate_randomness`].
pub const DEFAULT_MAX_ROUNDS: usize = 12;

/// Default weight of the variance-match term in [`tune_two_param`].
pub const DEFAULT_LAMBDA_VAR: f64 = 0.7;

/// Default weight of the fit term in [`tune_two_param`].
pub const DEFAULT_LAMBDA_FIT: f64 = 0.3;

/// Default search interval for the shift `q` in [`tune_two_param`].
pub const DEFAULT_Q_BOUNDS: (f64, f64) = (0.0, 10.0);

/// One round of a tuning run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRound {
    pub round: usize,
    pub r: f64,
    pub explained_fraction: f64,
    pub randomness_index: f64,
}

/// Outcome of a tuning run, serializable with its full trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    /// Kernel with the selected parameters filled in.
    pub kernel: KernelSpec,
    /// `Var(e) / Var(Y)` achieved by the selected kernel.
    pub variance_ratio: f64,
    /// Mean relative deviation of the leave-one-out predictions.
    pub randomness_index: f64,
    /// Fraction of the response variance treated as explainable, in (0, 1].
    pub explained_fraction: f64,
    /// Per-round trace (one entry per tuning round or descent start).
    pub rounds: Vec<TraceRound>,
    pub converged: bool,
}

/// Relative-deviation index with the count of near-zero responses that
/// were left out of the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomnessIndex {
    pub index: f64,
    pub excluded: usize,
}

#[derive(Debug, Error)]
pub enum TuningError {
    #[error("{name} out of range: {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error(
        "leave-one-out predictions have zero variance; \
         the variance-ratio loss is infinite for this kernel"
    )]
    DegenerateVariance,
    #[error(
        "every candidate produced zero-variance leave-one-out predictions; \
         the responses carry no variance to match (constant data?)"
    )]
    AllCandidatesDegenerate,
    #[error("responses too close to zero for relative index")]
    ResponsesNearZero,
    #[error("prediction and response lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no descent start produced a finite objective")]
    AllStartsFailed,
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

/// `(Var(Y)/Var(e) - 1)^2` on precomputed variances.
fn loss_from_variances(var_y: f64, var_e: f64) -> f64 {
    let ratio = var_y / var_e - 1.0;
    ratio * ratio
}

/// `(Var(e)/(ef * Var(Y)) - 1)^2`: zero exactly when the leave-one-out
/// predictions carry the targeted fraction of the response variance.
fn ef_loss(var_e: f64, var_y: f64, ef: f64) -> f64 {
    let ratio = var_e / (ef * var_y) - 1.0;
    ratio * ratio
}

/// Variance-match loss `(Var(Y)/Var(e) - 1)^2` where `e` are the
/// leave-one-out predictions under `family(r)` and `Var` is the population
/// variance. Zero-variance predictions make the loss infinite, reported as
/// [`TuningError::DegenerateVariance`].
pub fn variance_match_loss(
    r: f64,
    ds: &Dataset,
    family: impl Fn(f64) -> KernelSpec,
) -> Result<f64, TuningError> {
    if !(r.is_finite() && r > 1.0) {
        return Err(TuningError::BadParameter { name: "r", value: r });
    }
    if ds.len() < 3 {
        return Err(TuningError::TooFewSamples { need: 3, got: ds.len() });
    }
    let e = predict_loo(ds, &family(r), ExactMatchPolicy::MeanOfMatches)?;
    let var_e = population_variance(&e);
    if var_e == 0.0 {
        return Err(TuningError::DegenerateVariance);
    }
    let var_y = population_variance(&ds.responses());
    Ok(loss_from_variances(var_y, var_e))
}

/// Mean of `|e_i / y_i - 1|` over the samples with `|y_i| >= 1e-9`;
/// near-zero responses are excluded and counted instead of dividing.
pub fn randomness_index(e: &[f64], y: &[f64]) -> Result<RandomnessIndex, TuningError> {
    if e.len() != y.len() {
        return Err(TuningError::LengthMismatch { left: e.len(), right: y.len() });
    }
    let mut total = 0.0;
    let mut included = 0usize;
    for (&ei, &yi) in e.iter().zip(y) {
        if yi.abs() < ZERO_GUARD {
            continue;
        }
        total += (ei / yi - 1.0).abs();
        included += 1;
    }
    if included == 0 {
        return Err(TuningError::ResponsesNearZero);
    }
    Ok(RandomnessIndex {
        index: total / included as f64,
        excluded: y.len() - included,
    })
}

// ---------------------------------------------------------------------------
// Shared leave-one-out evaluator
// ---------------------------------------------------------------------------

/// Cached-distance evaluator shared across the candidates of one tuning
/// run.
struct LooEval<'a> {
    cache: CachedLoo<'a>,
    ys: Vec<f64>,
    var_y: f64,
}

/// Leave-one-out predictions of one candidate with their variance; `None`
/// variance marks the degenerate (zero-variance) case.
struct LooScore {
    e: Vec<f64>,
    var_e: Option<f64>,
}

impl<'a> LooEval<'a> {
    fn new(ds: &'a Dataset, probe: &KernelSpec) -> Result<Self, TuningError> {
        if ds.len() < 3 {
            return Err(TuningError::TooFewSamples { need: 3, got: ds.len() });
        }
        let ys = ds.responses();
        let var_y = population_variance(&ys);
        Ok(LooEval {
            cache: CachedLoo::new(ds, probe.multidim_mode),
            ys,
            var_y,
        })
    }

    fn score(&mut self, kernel: &KernelSpec) -> Result<LooScore, TuningError> {
        let e = self.cache.predictions(kernel, ExactMatchPolicy::MeanOfMatches)?;
        let v = population_variance(&e);
        let var_e = if v == 0.0 { None } else { Some(v) };
        Ok(LooScore { e, var_e })
    }
}

// ---------------------------------------------------------------------------
// tune_r
// ---------------------------------------------------------------------------

const GRID_POINTS: usize = 32;
/// Golden ratio section constant (sqrt(5) - 1) / 2.
const INVPHI: f64 = 0.618_033_988_749_894_9;

fn check_r_bounds(bounds: (f64, f64)) -> Result<(), TuningError> {
    let (lo, hi) = bounds;
    if !(lo.is_finite() && lo > 1.0) {
        return Err(TuningError::BadParameter { name: "r_bounds.lo", value: lo });
    }
    if !(hi.is_finite() && hi >= lo) {
        return Err(TuningError::BadParameter { name: "r_bounds.hi", value: hi });
    }
    Ok(())
}

/// Best candidate tracker with the documented tie-break toward smaller r.
struct Best {
    r: f64,
    loss: f64,
    any_finite: bool,
}

impl Best {
    fn new() -> Self {
        Best { r: f64::NAN, loss: f64::INFINITY, any_finite: false }
    }

    fn offer(&mut self, r: f64, loss: f64) {
        if loss.is_finite() {
            self.any_finite = true;
        }
        if loss < self.loss || (loss == self.loss && self.any_finite && r < self.r) {
            self.r = r;
            self.loss = loss;
        }
    }
}

/// Core of [`tune_r`] on a prepared evaluator; returns the selected r and
/// its leave-one-out predictions for reuse by the iteration driver.
fn tune_r_inner<F: Fn(f64) -> KernelSpec>(
    eval: &mut LooEval,
    family: &F,
    bounds: (f64, f64),
    ef: f64,
) -> Result<(f64, LooScore), TuningError> {
    check_r_bounds(bounds)?;
    if !(ef > 0.0 && ef <= 1.0) {
        return Err(TuningError::BadParameter { name: "explained_fraction", value: ef });
    }
    let (lo, hi) = bounds;
    let var_y = eval.var_y;
    let probe = |eval: &mut LooEval, r: f64| -> Result<f64, TuningError> {
        let score = eval.score(&family(r))?;
        Ok(match score.var_e {
            Some(v) if var_y > 0.0 => ef_loss(v, var_y, ef),
            _ => f64::INFINITY,
        })
    };

    let mut best = Best::new();
    if lo == hi {
        let loss = probe(eval, lo)?;
        best.offer(lo, loss);
    } else {
        // Coarse pass: log-spaced grid.
        let (ulo, uhi) = (lo.ln(), hi.ln());
        let step = (uhi - ulo) / (GRID_POINTS - 1) as f64;
        let mut grid_best_idx = 0usize;
        for i in 0..GRID_POINTS {
            let u = if i + 1 == GRID_POINTS { uhi } else { ulo + step * i as f64 };
            let r = u.exp();
            let loss = probe(eval, r)?;
            if loss < best.loss || (loss == best.loss && best.any_finite && r < best.r) {
                grid_best_idx = i;
            }
            best.offer(r, loss);
        }
        if best.any_finite {
            // Refine around the best grid point by golden section in log
            // space until the bracket's relative width reaches 1e-4.
            let width_goal = (1.0_f64 + 1e-4).ln();
            let mut a = ulo + step * grid_best_idx.saturating_sub(1) as f64;
            let mut b = (ulo + step * (grid_best_idx + 1) as f64).min(uhi);
            let mut c = b - INVPHI * (b - a);
            let mut d = a + INVPHI * (b - a);
            let mut fc = probe(eval, c.exp())?;
            let mut fd = probe(eval, d.exp())?;
            best.offer(c.exp(), fc);
            best.offer(d.exp(), fd);
            while b - a > width_goal {
                if fc <= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INVPHI * (b - a);
                    fc = probe(eval, c.exp())?;
                    best.offer(c.exp(), fc);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INVPHI * (b - a);
                    fd = probe(eval, d.exp())?;
                    best.offer(d.exp(), fd);
                }
            }
        }
    }

    if !best.any_finite {
        return Err(TuningError::AllCandidatesDegenerate);
    }
    let score = eval.score(&family(best.r))?;
    Ok((best.r, score))
}

/// Selects the kernel strength `r` in `r_bounds` so the leave-one-out
/// prediction variance matches `explained_fraction * Var(Y)`: coarse
/// 32-point log grid, then golden-section refinement to relative width
/// 1e-4; exact loss ties resolve toward the smaller (smoother) r.
pub fn tune_r(
    ds: &Dataset,
    family: impl Fn(f64) -> KernelSpec,
    r_bounds: (f64, f64),
    explained_fraction: f64,
) -> Result<TuningResult, TuningError> {
    check_r_bounds(r_bounds)?;
    let mut eval = LooEval::new(ds, &family(r_bounds.0))?;
    let (r, score) = tune_r_inner(&mut eval, &family, r_bounds, explained_fraction)?;
    let variance_ratio = score.var_e.unwrap_or(0.0) / eval.var_y;
    let idx = randomness_index(&score.e, &eval.ys)?;
    Ok(TuningResult {
        kernel: family(r),
        variance_ratio,
        randomness_index: idx.index,
        explained_fraction,
        rounds: vec![TraceRound {
            round: 1,
            r,
            explained_fraction,
            randomness_index: idx.index,
        }],
        converged: true,
    })
}

// ---------------------------------------------------------------------------
// iterate_randomness
// ---------------------------------------------------------------------------

/// Implied noise share of the responses given leave-one-out predictions
/// `e`: `Var(rho) * mean(e^2) / Var(Y)` with `rho_i = y_i / e_i`, clamped
/// to [0, 0.95]. A ratio enters the pool only where both the response and
/// the prediction clear the zero guard scaled to the response RMS: near a
/// response zero the multiplicative noise leaves no trace in `y_i`, and a
/// near-zero denominator turns the ratio into pure prediction noise, so
/// keeping such samples would let a handful of exploding ratios dominate
/// the variance. Fewer than two usable ratios mean no noise evidence:
/// share 0.
fn noise_share(e: &[f64], ys: &[f64], var_y: f64) -> f64 {
    let floor = (0.05 * mean_square(ys).sqrt()).max(ZERO_GUARD);
    let rho: Vec<f64> = e
        .iter()
        .zip(ys)
        .filter(|(ei, yi)| ei.abs() >= floor && yi.abs() >= floor)
        .map(|(&ei, &yi)| yi / ei)
        .collect();
    if rho.len() < 2 || var_y <= 0.0 {
        return 0.0;
    }
    (population_variance(&rho) * mean_square(e) / var_y).clamp(0.0, 0.95)
}

/// Alternates [`tune_r`] with a re-estimate of the explained fraction:
/// round `t` tunes `r` at the current fraction `EF_t` (starting at 1),
/// infers the noise share `s_t` from the residual ratios, and moves the
/// fraction toward `1 - s_t` with damping `alpha`. Stops when the fraction
/// settles within 1e-3 or after `max_rounds`.
pub fn iterate_randomness(
    ds: &Dataset,
    family: impl Fn(f64) -> KernelSpec,
    max_rounds: usize,
    damping: f64,
) -> Result<TuningResult, TuningError> {
    if max_rounds < 1 {
        return Err(TuningError::BadParameter { name: "max_rounds", value: max_rounds as f64 });
    }
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(TuningError::BadParameter { name: "damping", value: damping });
    }
    let mut eval = LooEval::new(ds, &family(DEFAULT_R_BOUNDS.0))?;
    let var_y = eval.var_y;

    let mut ef = 1.0_f64;
    let mut rounds = Vec::new();
    let mut converged = false;
    let mut last: Option<(f64, LooScore)> = None;
    for round in 1..=max_rounds {
        let (r, score) = tune_r_inner(&mut eval, &family, DEFAULT_R_BOUNDS, ef)?;
        let idx = randomness_index(&score.e, &eval.ys)?;
        rounds.push(TraceRound {
            round,
            r,
            explained_fraction: ef,
            randomness_index: idx.index,
        });
        let s = noise_share(&score.e, &eval.ys, var_y);
        let next = ((1.0 - damping) * ef + damping * (1.0 - s)).clamp(0.05, 1.0);
        let delta = (next - ef).abs();
        ef = next;
        last = Some((r, score));
        if delta <= 1e-3 {
            converged = true;
            break;
        }
    }
    let (r, score) = last.expect("max_rounds >= 1 guarantees at least one round");
    let idx = randomness_index(&score.e, &eval.ys)?;
    Ok(TuningResult {
        kernel: family(r),
        variance_ratio: score.var_e.unwrap_or(0.0) / var_y,
        randomness_index: idx.index,
        explained_fraction: ef,
        rounds,
        converged,
    })
}

// ---------------------------------------------------------------------------
// tune_two_param
// ---------------------------------------------------------------------------

/// Loss sentinel for candidates whose evaluation degenerates; finite so
/// the descent can step away from it.
const SENTINEL: f64 = 1e30;

/// Jointly selects `(r, q)` of the shifted exponential kernel by
/// minimizing `lambda_var * variance_match_loss + lambda_fit *
/// SSE(e, Y) / Var(Y) / n` with four descent starts on a log grid of the
/// bounds; per-coordinate finite-difference descent, best final objective
/// wins. The variance term must outweigh the fit term
/// (`lambda_var > lambda_fit > 0`).
pub fn tune_two_param(
    ds: &Dataset,
    r_bounds: (f64, f64),
    q_bounds: (f64, f64),
    lambda_var: f64,
    lambda_fit: f64,
) -> Result<TuningResult, TuningError> {
    check_r_bounds(r_bounds)?;
    let (qlo, qhi) = q_bounds;
    if !(qlo.is_finite() && qlo >= 0.0) {
        return Err(TuningError::BadParameter { name: "q_bounds.lo", value: qlo });
    }
    if !(qhi.is_finite() && qhi >= qlo) {
        return Err(TuningError::BadParameter { name: "q_bounds.hi", value: qhi });
    }
    if !(lambda_var.is_finite() && lambda_fit.is_finite() && lambda_var > lambda_fit && lambda_fit > 0.0)
    {
        return Err(TuningError::BadParameter { name: "lambda_var/lambda_fit", value: lambda_var });
    }

    let eval = RefCell::new(LooEval::new(ds, &KernelSpec::exp_base_shifted(r_bounds.0, qlo))?);
    let n = ds.len() as f64;
    let var_y = eval.borrow().var_y;
    let (ulo, uhi) = (r_bounds.0.ln(), r_bounds.1.ln());

    // Objective on clamped coordinates; degenerate evaluations land on the
    // sentinel so the descent avoids them instead of crashing.
    let objective = |u: f64, q: f64| -> f64 {
        let r = u.clamp(ulo, uhi).exp();
        let q = q.clamp(qlo, qhi);
        let kernel = KernelSpec::exp_base_shifted(r, q);
        let mut ev = eval.borrow_mut();
        match ev.score(&kernel) {
            Ok(LooScore { e, var_e: Some(var_e) }) if var_y > 0.0 => {
                lambda_var * loss_from_variances(var_y, var_e)
                    + lambda_fit * (sse(&e, &ev.ys) / var_y / n)
            }
            _ => SENTINEL,
        }
    };

    // Four starts at the 25%/75% log-quantiles of each bound (a single
    // point when a bound is degenerate).
    let r_starts = if ulo == uhi {
        vec![ulo]
    } else {
        vec![ulo + 0.25 * (uhi - ulo), ulo + 0.75 * (uhi - ulo)]
    };
    let q_starts = if qlo == qhi {
        vec![qlo]
    } else if qlo > 0.0 {
        let (wlo, whi) = (qlo.ln(), qhi.ln());
        vec![
            (wlo + 0.25 * (whi - wlo)).exp(),
            (wlo + 0.75 * (whi - wlo)).exp(),
        ]
    } else {
        vec![qlo + 0.25 * (qhi - qlo), qlo + 0.75 * (qhi - qlo)]
    };

    let mut best: Option<(f64, f64, f64, Vec<TraceRound>)> = None;
    let mut trace = Vec::new();
    let mut start_no = 0usize;
    for &u0 in &r_starts {
        for &q0 in &q_starts {
            start_no += 1;
            let (mut u, mut q) = (u0, q0);
            // Alternate per-coordinate descents until a full sweep stops
            // improving the objective; each inner solve runs to its own
            // tolerance.
            let mut sweep_j = objective(u, q);
            for _ in 0..12 {
                if let Ok(res) =
                    solve_gradient(|uu| objective(uu, q), u, 2.0, 1e-8, 400)
                {
                    u = res.z.clamp(ulo, uhi);
                }
                if qlo < qhi {
                    let qstep = 0.25 * (qhi - qlo);
                    if let Ok(res) =
                        solve_gradient(|qq| objective(u, qq), q, qstep, 1e-8, 400)
                    {
                        q = res.z.clamp(qlo, qhi);
                    }
                }
                let next_j = objective(u, q);
                if sweep_j - next_j <= 1e-13 * (1.0 + next_j.abs()) {
                    sweep_j = next_j;
                    break;
                }
                sweep_j = next_j;
            }
            let j = sweep_j;
            if j >= SENTINEL {
                continue;
            }
            let kernel = KernelSpec::exp_base_shifted(u.exp(), q);
            let score = eval.borrow_mut().score(&kernel)?;
            let idx = randomness_index(&score.e, &eval.borrow().ys)?;
            trace.push(TraceRound {
                round: start_no,
                r: u.exp(),
                explained_fraction: 1.0,
                randomness_index: idx.index,
            });
            if best.as_ref().map_or(true, |b| j < b.2) {
                best = Some((u.exp(), q, j, Vec::new()));
            }
        }
    }

    let (r, q, _, _) = best.ok_or(TuningError::AllStartsFailed)?;
    let kernel = KernelSpec::exp_base_shifted(r, q);
    let score = eval.borrow_mut().score(&kernel)?;
    let idx = randomness_index(&score.e, &eval.borrow().ys)?;
    Ok(TuningResult {
        kernel,
        variance_ratio: score.var_e.unwrap_or(0.0) / var_y,
        randomness_index: idx.index,
        explained_fraction: 1.0,
        rounds: trace,
        converged: true,
    })
}

/// Objective value of [`tune_two_param`] at explicit `(r, q)`, for audits
/// and cross-checks.
pub fn two_param_objective(
    ds: &Dataset,
    r: f64,
    q: f64,
    lambda_var: f64,
    lambda_fit: f64,
) -> Result<f64, TuningError> {
    if !(r.is_finite() && r > 1.0) {
        return Err(TuningError::BadParameter { name: "r", value: r });
    }
    let kernel = KernelSpec::exp_base_shifted(r, q);
    let e = predict_loo(ds, &kernel, ExactMatchPolicy::MeanOfMatches)?;
    let var_e = population_variance(&e);
    if var_e == 0.0 {
        return Err(TuningError::DegenerateVariance);
    }
    let ys = ds.responses();
    let var_y = population_variance(&ys);
    let n = ds.len() as f64;
    Ok(lambda_var * loss_from_variances(var_y, var_e)
        + lambda_fit * (sse(&e, &ys) / var_y / n))
}
