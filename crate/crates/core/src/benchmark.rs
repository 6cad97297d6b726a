//! Benchmark orchestration: x-axis kernel regression versus the
//! polynomial-lasso baseline on one config, with reproducible reports.
//!
//! A run proceeds in four labeled stages — data, tune, fit, eval — and
//! failures carry their stage. Synthetic configs score both methods
//! against the *true* target function on a fresh 512-point evaluation
//! grid, with the outer 2% per edge excluded from headline metrics and
//! reported separately (estimates degrade where data thins out). CSV
//! configs score on a seeded held-out split instead, where only the noisy
//! responses are available.
//!
//! Reports serialize as pretty JSON (`schema_version` 1) with the
//! prediction vectors in a `predictions.csv` sidecar, so every metric can
//! be recomputed from the artifacts alone. Given the same config and
//! seeds, reports are byte-identical apart from the runtime fields.

use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{gen_synthetic, load_csv, Dataset, SynthSpec};
use crate::estimator::{linspace, predict_grid, predict_loo, ExactMatchPolicy};
use crate::kernels::KernelSpec;
use crate::lasso::{
    default_lambda_grid, fit_lasso, predict_lasso, select_lambda, LassoError, LassoModel,
    DEFAULT_CV_FOLDS, DEFAULT_LASSO_DEGREE, DEFAULT_LASSO_MAX_ITER, DEFAULT_LASSO_TOL,
};
use crate::rng::SplitMix64;
use crate::stats::population_variance;
use crate::tuning::{
    iterate_randomness, randomness_index, tune_r, tune_two_param, TraceRound, TuningError,
    TuningResult, DEFAULT_DAMPING, DEFAULT_LAMBDA_FIT, DEFAULT_LAMBDA_VAR, DEFAULT_MAX_ROUNDS,
    DEFAULT_R_BOUNDS,
};

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("prediction and target lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric inputs are empty")]
    EmptyInput,
    #[error("the reference error must be positive to compare against, got {0}")]
    NonPositiveError(f64),
    #[error("test_fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("cannot split {n} samples into nonempty train and test parts")]
    DegenerateSplit { n: usize },
    #[error("benchmarks require a one-dimensional predictor, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("eval.grid_points must be at least 8, got {0}")]
    BadGridPoints(usize),
    #[error("eval.edge_fraction must lie in [0, 0.4], got {0}")]
    BadEdgeFraction(f64),
    #[error("metric {name} is not finite ({value})")]
    NonFiniteMetric { name: &'static str, value: f64 },
    #[error("data stage: {source}")]
    Data {
        #[source]
        source: Box<dyn StdError + Send + Sync>,
    },
    #[error("tune stage: {source}")]
    Tune {
        #[source]
        source: TuningError,
    },
    #[error("fit stage: {source}")]
    Fit {
        #[source]
        source: LassoError,
    },
    #[error("eval stage: {source}")]
    Eval {
        #[source]
        source: Box<dyn StdError + Send + Sync>,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed predictions sidecar at row {row}: {detail}")]
    BadSidecar { row: usize, detail: String },
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

fn check_pair(pred: &[f64], target: &[f64]) -> Result<(), BenchError> {
    if pred.len() != target.len() {
        return Err(BenchError::LengthMismatch { left: pred.len(), right: target.len() });
    }
    if pred.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(pred: &[f64], target: &[f64]) -> Result<f64, BenchError> {
    check_pair(pred, target)?;
    let total: f64 = pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum();
    Ok(total / pred.len() as f64)
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64, BenchError> {
    check_pair(pred, target)?;
    let total: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((total / pred.len() as f64).sqrt())
}

/// Relative improvement of the new method over the baseline, in percent:
/// `(err_base / err_new - 1) * 100`. Positive when the new method's error
/// is smaller.
pub fn percent_advantage(err_base: f64, err_new: f64) -> Result<f64, BenchError> {
    if !(err_new > 0.0) || !err_new.is_finite() || !err_base.is_finite() {
        return Err(BenchError::NonPositiveError(err_new));
    }
    Ok((err_base / err_new - 1.0) * 100.0)
}

/// Deterministic shuffle-and-partition split. The test part receives
/// `floor(n * test_fraction)` samples (at least one); both parts keep
/// their samples in original dataset order.
pub fn split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), BenchError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(BenchError::BadFraction(test_fraction));
    }
    let n = ds.len();
    let test_len = ((n as f64 * test_fraction).floor() as usize).max(1);
    if n < 2 || test_len >= n {
        return Err(BenchError::DegenerateSplit { n });
    }
    let order = SplitMix64::new(seed).shuffled_indices(n);
    let mut test: Vec<usize> = order[..test_len].to_vec();
    let mut train: Vec<usize> = order[test_len..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

/// Where the benchmark data comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Generate from a synthetic spec; methods are scored against the true
    /// function on a fresh grid.
    Synthetic(SynthSpec),
    /// Load a CSV and score on a seeded held-out split.
    Csv {
        path: String,
        #[serde(default = "default_response")]
        response: String,
        #[serde(default = "default_test_fraction")]
        test_fraction: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_response() -> String {
    "y".into()
}

fn default_test_fraction() -> f64 {
    0.25
}

/// How the x-axis kernel is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuneMethod {
    /// Use this kernel as-is.
    Fixed(KernelSpec),
    /// Match the leave-one-out variance to a fraction of the response
    /// variance.
    VarianceMatch {
        #[serde(default = "default_ef")]
        explained_fraction: f64,
        #[serde(default = "default_r_bounds")]
        r_bounds: (f64, f64),
    },
    /// Estimate the explained fraction from the data by damped iteration.
    IterateRandomness {
        #[serde(default = "default_max_rounds")]
        max_rounds: usize,
        #[serde(default = "default_damping")]
        damping: f64,
    },
    /// Jointly tune (r, q) of the shifted exponential kernel.
    TwoParam {
        #[serde(default = "default_r_bounds")]
        r_bounds: (f64, f64),
        #[serde(default = "default_q_bounds")]
        q_bounds: (f64, f64),
        #[serde(default = "default_lambda_var")]
        lambda_var: f64,
        #[serde(default = "default_lambda_fit")]
        lambda_fit: f64,
    },
}

fn default_ef() -> f64 {
    1.0
}

fn default_r_bounds() -> (f64, f64) {
    DEFAULT_R_BOUNDS
}

fn default_q_bounds() -> (f64, f64) {
    crate::tuning::DEFAULT_Q_BOUNDS
}

fn default_max_rounds() -> usize {
    DEFAULT_MAX_ROUNDS
}

fn default_damping() -> f64 {
    DEFAULT_DAMPING
}

fn default_lambda_var() -> f64 {
    DEFAULT_LAMBDA_VAR
}

fn default_lambda_fit() -> f64 {
    DEFAULT_LAMBDA_FIT
}

impl Default for TuneMethod {
    fn default() -> Self {
        TuneMethod::IterateRandomness {
            max_rounds: DEFAULT_MAX_ROUNDS,
            damping: DEFAULT_DAMPING,
        }
    }
}

/// Baseline configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LassoConfig {
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_folds")]
    pub k_folds: usize,
}

fn default_degree() -> usize {
    DEFAULT_LASSO_DEGREE
}

fn default_folds() -> usize {
    DEFAULT_CV_FOLDS
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            degree: DEFAULT_LASSO_DEGREE,
            lambda_grid: default_lambda_grid(),
            k_folds: DEFAULT_CV_FOLDS,
        }
    }
}

/// Evaluation-grid configuration (synthetic data only).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_edge_fraction")]
    pub edge_fraction: f64,
}

fn default_grid_points() -> usize {
    512
}

fn default_edge_fraction() -> f64 {
    0.02
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { grid_points: 512, edge_fraction: 0.02 }
    }
}

/// Full benchmark configuration; every field except `data` has a default,
/// so minimal JSON configs stay minimal while reports echo the resolved
/// values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub data: DataSource,
    #[serde(default)]
    pub tuning: TuneMethod,
    #[serde(default)]
    pub lasso: LassoConfig,
    #[serde(default)]
    pub eval: EvalConfig,
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

/// Held-out (or true-function) scores of one method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub mae: f64,
    pub rmse: f64,
    /// Metrics over the excluded edge region; absent for CSV runs.
    pub mae_edge: Option<f64>,
    pub rmse_edge: Option<f64>,
    /// Wall-clock seconds spent tuning/fitting plus predicting. The only
    /// non-deterministic report field.
    pub runtime_seconds: f64,
}

/// Evaluation-point table backing every metric; stored as a sidecar CSV
/// rather than inside the JSON.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PredictionTable {
    pub xs: Vec<f64>,
    pub target: Vec<f64>,
    pub pointwise: Vec<f64>,
    pub lasso: Vec<f64>,
    /// Whether the point counts toward headline metrics (false = edge).
    pub interior: Vec<bool>,
}

/// Recomputed scores of one method, as [`score_predictions`] returns them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreSet {
    pub mae: f64,
    pub rmse: f64,
    pub mae_edge: Option<f64>,
    pub rmse_edge: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: u32,
    /// The fully resolved configuration this report was produced from.
    pub config: BenchConfig,
    /// FNV-1a 64-bit hex fingerprint of the CSV bytes; absent for
    /// synthetic data.
    pub data_fingerprint: Option<String>,
    pub n_train: usize,
    pub n_eval: usize,
    /// Selected x-axis kernel.
    pub kernel: KernelSpec,
    /// Tuning outcome with its full trace.
    pub tuning: TuningResult,
    pub lasso_lambda: f64,
    pub lasso_cv_error: f64,
    pub lasso_model: LassoModel,
    pub pointwise: MethodMetrics,
    pub lasso: MethodMetrics,
    /// `(lasso.mae / pointwise.mae - 1) * 100`.
    pub percent_advantage: f64,
    /// Same comparison on RMSE.
    pub percent_advantage_rmse: f64,
    /// Backing predictions; persisted as `predictions.csv` next to the
    /// report, not inside the JSON.
    #[serde(skip)]
    pub predictions: PredictionTable,
}

fn subset(values: &[f64], keep: &[bool], want: bool) -> Vec<f64> {
    values
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k == want)
        .map(|(&v, _)| v)
        .collect()
}

/// Recomputes both methods' scores and the advantage figures from a
/// prediction table. [`run_benchmark`] itself uses this, so stored metrics
/// are self-consistent with the stored predictions by construction.
pub fn score_predictions(
    table: &PredictionTable,
) -> Result<(ScoreSet, ScoreSet, f64, f64), BenchError> {
    let n = table.xs.len();
    if n == 0 {
        return Err(BenchError::EmptyInput);
    }
    for len in [
        table.target.len(),
        table.pointwise.len(),
        table.lasso.len(),
        table.interior.len(),
    ] {
        if len != n {
            return Err(BenchError::LengthMismatch { left: len, right: n });
        }
    }
    let has_edge = table.interior.iter().any(|&k| !k);
    let score = |pred: &[f64]| -> Result<ScoreSet, BenchError> {
        let pi = subset(pred, &table.interior, true);
        let ti = subset(&table.target, &table.interior, true);
        let (m, r) = (mae(&pi, &ti)?, rmse(&pi, &ti)?);
        let (me, re) = if has_edge {
            let pe = subset(pred, &table.interior, false);
            let te = subset(&table.target, &table.interior, false);
            (Some(mae(&pe, &te)?), Some(rmse(&pe, &te)?))
        } else {
            (None, None)
        };
        Ok(ScoreSet { mae: m, rmse: r, mae_edge: me, rmse_edge: re })
    };
    let pw = score(&table.pointwise)?;
    let ls = score(&table.lasso)?;
    let adv = percent_advantage(ls.mae, pw.mae)?;
    let adv_rmse = percent_advantage(ls.rmse, pw.rmse)?;
    Ok((pw, ls, adv, adv_rmse))
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct PreparedData {
    train: Dataset,
    eval_xs: Vec<f64>,
    target: Vec<f64>,
    interior: Vec<bool>,
    fingerprint: Option<String>,
}

fn prepare_data(config: &BenchConfig) -> Result<PreparedData, BenchError> {
    let eval = &config.eval;
    if eval.grid_points < 8 {
        return Err(BenchError::BadGridPoints(eval.grid_points));
    }
    if !(eval.edge_fraction >= 0.0 && eval.edge_fraction <= 0.4) {
        return Err(BenchError::BadEdgeFraction(eval.edge_fraction));
    }
    match &config.data {
        DataSource::Synthetic(spec) => {
            if spec.dim() != 1 {
                return Err(BenchError::NotOneDimensional(spec.dim()));
            }
            let ds = gen_synthetic(spec)
                .map_err(|e| BenchError::Data { source: Box::new(e) })?;
            let (lo, hi) = spec.domain[0];
            let xs = linspace(lo, hi, eval.grid_points);
            let target: Vec<f64> = xs
                .iter()
                .map(|&x| spec.target_function.eval(x))
                .collect();
            let margin = eval.edge_fraction * (hi - lo);
            let interior: Vec<bool> = xs
                .iter()
                .map(|&x| x >= lo + margin && x <= hi - margin)
                .collect();
            Ok(PreparedData { train: ds, eval_xs: xs, target, interior, fingerprint: None })
        }
        DataSource::Csv { path, response, test_fraction, seed } => {
            let bytes = fs::read(path).map_err(|source| BenchError::Io {
                path: PathBuf::from(path),
                source,
            })?;
            let fingerprint = format!("{:016x}", fnv1a64(&bytes));
            let ds = load_csv(Path::new(path), response)
                .map_err(|e| BenchError::Data { source: Box::new(e) })?;
            if ds.dim() != 1 {
                return Err(BenchError::NotOneDimensional(ds.dim()));
            }
            let (train, test) = split(&ds, *test_fraction, *seed)?;
            let eval_xs: Vec<f64> = test.samples().iter().map(|s| s.x[0]).collect();
            let target = test.responses();
            let interior = vec![true; eval_xs.len()];
            Ok(PreparedData {
                train,
                eval_xs,
                target,
                interior,
                fingerprint: Some(fingerprint),
            })
        }
    }
}

/// Tunes (or adopts) the x-axis kernel on the training data.
fn tune_kernel(train: &Dataset, method: &TuneMethod) -> Result<TuningResult, BenchError> {
    let wrap = |source| BenchError::Tune { source };
    match method {
        TuneMethod::Fixed(spec) => {
            spec.validate()
                .map_err(|e| wrap(TuningError::Estimator(e.into())))?;
            // Report the fixed kernel's achieved diagnostics so the trace
            // is never empty.
            let e = predict_loo(train, spec, ExactMatchPolicy::MeanOfMatches)
                .map_err(|e| wrap(e.into()))?;
            let ys = train.responses();
            let var_y = population_variance(&ys);
            let ratio = if var_y > 0.0 {
                population_variance(&e) / var_y
            } else {
                0.0
            };
            let idx = randomness_index(&e, &ys).map_err(wrap)?;
            Ok(TuningResult {
                kernel: spec.clone(),
                variance_ratio: ratio,
                randomness_index: idx.index,
                explained_fraction: 1.0,
                rounds: vec![TraceRound {
                    round: 1,
                    r: spec.r.unwrap_or(0.0),
                    explained_fraction: 1.0,
                    randomness_index: idx.index,
                }],
                converged: true,
            })
        }
        TuneMethod::VarianceMatch { explained_fraction, r_bounds } => {
            tune_r(train, KernelSpec::exp_base, *r_bounds, *explained_fraction).map_err(wrap)
        }
        TuneMethod::IterateRandomness { max_rounds, damping } => {
            iterate_randomness(train, KernelSpec::exp_base, *max_rounds, *damping).map_err(wrap)
        }
        TuneMethod::TwoParam { r_bounds, q_bounds, lambda_var, lambda_fit } => {
            tune_two_param(train, *r_bounds, *q_bounds, *lambda_var, *lambda_fit).map_err(wrap)
        }
    }
}

fn ensure_finite(name: &'static str, value: f64) -> Result<f64, BenchError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(BenchError::NonFiniteMetric { name, value })
    }
}

/// Runs one full benchmark: prepare data, tune the kernel, tune and fit
/// the baseline, score both methods on the evaluation targets.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchmarkReport, BenchError> {
    let data = prepare_data(config)?;
    let n_train = data.train.len();
    let n_eval = data.eval_xs.len();

    // X-axis method: tune, then predict the evaluation grid.
    let started = Instant::now();
    let tuning = tune_kernel(&data.train, &config.tuning)?;
    let kernel = tuning.kernel.clone();
    let grid: Vec<Vec<f64>> = data.eval_xs.iter().map(|&x| vec![x]).collect();
    let curve = predict_grid(&data.train, &kernel, &grid, ExactMatchPolicy::MeanOfMatches)
        .map_err(|e| BenchError::Eval { source: Box::new(e) })?;
    let pointwise_pred = curve.values;
    let pointwise_seconds = started.elapsed().as_secs_f64();

    // Baseline: cross-validate the penalty, fit, predict.
    let started = Instant::now();
    let lc = &config.lasso;
    let (lambda, cv_error) = select_lambda(&data.train, lc.degree, &lc.lambda_grid, lc.k_folds)
        .map_err(|source| BenchError::Fit { source })?;
    let model = fit_lasso(
        &data.train,
        lc.degree,
        lambda,
        DEFAULT_LASSO_TOL,
        DEFAULT_LASSO_MAX_ITER,
    )
    .map_err(|source| BenchError::Fit { source })?;
    let lasso_pred: Vec<f64> = data.eval_xs.iter().map(|&x| predict_lasso(&model, x)).collect();
    let lasso_seconds = started.elapsed().as_secs_f64();

    let predictions = PredictionTable {
        xs: data.eval_xs,
        target: data.target,
        pointwise: pointwise_pred,
        lasso: lasso_pred,
        interior: data.interior,
    };
    let (pw, ls, adv, adv_rmse) = score_predictions(&predictions)?;
    ensure_finite("pointwise.mae", pw.mae)?;
    ensure_finite("pointwise.rmse", pw.rmse)?;
    ensure_finite("lasso.mae", ls.mae)?;
    ensure_finite("lasso.rmse", ls.rmse)?;
    ensure_finite("percent_advantage", adv)?;
    ensure_finite("percent_advantage_rmse", adv_rmse)?;

    Ok(BenchmarkReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        data_fingerprint: data.fingerprint,
        n_train,
        n_eval,
        kernel,
        tuning,
        lasso_lambda: lambda,
        lasso_cv_error: cv_error,
        lasso_model: model,
        pointwise: MethodMetrics {
            mae: pw.mae,
            rmse: pw.rmse,
            mae_edge: pw.mae_edge,
            rmse_edge: pw.rmse_edge,
            runtime_seconds: pointwise_seconds,
        },
        lasso: MethodMetrics {
            mae: ls.mae,
            rmse: ls.rmse,
            mae_edge: ls.mae_edge,
            rmse_edge: ls.rmse_edge,
            runtime_seconds: lasso_seconds,
        },
        percent_advantage: adv,
        percent_advantage_rmse: adv_rmse,
        predictions,
    })
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Writes `report.json` plus the `predictions.csv` sidecar into `dir`
/// (created if missing). Returns the report path.
pub fn write_report(report: &BenchmarkReport, dir: &Path) -> Result<PathBuf, BenchError> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let report_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report)?;
    fs::write(&report_path, json.as_bytes()).map_err(|source| BenchError::Io {
        path: report_path.clone(),
        source,
    })?;

    let csv_path = dir.join("predictions.csv");
    let mut text = String::from("x,target,pointwise,lasso,interior\n");
    let t = &report.predictions;
    for i in 0..t.xs.len() {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            t.xs[i],
            t.target[i],
            t.pointwise[i],
            t.lasso[i],
            u8::from(t.interior[i]),
        ));
    }
    fs::write(&csv_path, text.as_bytes()).map_err(|source| BenchError::Io {
        path: csv_path,
        source,
    })?;
    Ok(report_path)
}

/// Reads a report directory written by [`write_report`], restoring the
/// prediction table from the sidecar.
pub fn read_report(dir: &Path) -> Result<BenchmarkReport, BenchError> {
    let report_path = dir.join("report.json");
    let json = fs::read_to_string(&report_path).map_err(|source| BenchError::Io {
        path: report_path,
        source,
    })?;
    let mut report: BenchmarkReport = serde_json::from_str(&json)?;

    let csv_path = dir.join("predictions.csv");
    let text = fs::read_to_string(&csv_path).map_err(|source| BenchError::Io {
        path: csv_path,
        source,
    })?;
    let mut table = PredictionTable::default();
    for (row, line) in text.lines().enumerate().skip(1) {
        let mut fields = line.split(',');
        let mut take = |what: &str| -> Result<f64, BenchError> {
            fields
                .next()
                .ok_or_else(|| BenchError::BadSidecar {
                    row,
                    detail: format!("missing column {what}"),
                })?
                .parse::<f64>()
                .map_err(|e| BenchError::BadSidecar { row, detail: format!("{what}: {e}") })
        };
        table.xs.push(take("x")?);
        table.target.push(take("target")?);
        table.pointwise.push(take("pointwise")?);
        table.lasso.push(take("lasso")?);
        table.interior.push(take("interior")? != 0.0);
    }
    report.predictions = table;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TargetFunction;

    fn linear_config(n: usize, seed: u64) -> BenchConfig {
        BenchConfig {
            data: DataSource::Synthetic(SynthSpec {
                target_function: TargetFunction::Linear,
                n,
                domain: vec![(0.0, 4.0)],
                noise: (1.0, 1.0),
                seed,
            }),
            tuning: TuneMethod::default(),
            lasso: LassoConfig { degree: 2, ..LassoConfig::default() },
            eval: EvalConfig { grid_points: 128, edge_fraction: 0.02 },
        }
    }

    #[test]
    fn metric_trivia() {
        let t = [1.0, 2.0];
        assert_eq!(mae(&t, &t).unwrap(), 0.0);
        assert_eq!(rmse(&t, &t).unwrap(), 0.0);

        let pred = [2.0, 1.0];
        let target = [1.0, 2.0];
        assert_eq!(mae(&pred, &target).unwrap(), 1.0);
        assert_eq!(rmse(&pred, &target).unwrap(), 1.0);

        let pred = [1.0, 5.0];
        let target = [1.0, 2.0];
        assert_eq!(mae(&pred, &target).unwrap(), 1.5);
        assert!((rmse(&pred, &target).unwrap() - 4.5_f64.sqrt()).abs() < 1e-12);
        assert!((rmse(&pred, &target).unwrap() - 2.1213).abs() < 1e-4);

        assert!(matches!(
            mae(&[1.0], &[1.0, 2.0]),
            Err(BenchError::LengthMismatch { .. })
        ));
        assert!(matches!(mae(&[], &[]), Err(BenchError::EmptyInput)));
    }

    #[test]
    fn advantage_reproduces_published_rows() {
        let rows = [
            (0.16057744, 0.15342135612367921, 4.66433),
            (0.15614923, 0.1474352255852411, 5.91039),
            (0.15644323, 0.1497225507429759, 4.48875),
        ];
        for (base, new, want) in rows {
            let got = percent_advantage(base, new).unwrap();
            assert!((got - want).abs() < 1e-4, "{base}/{new}: {got} vs {want}");
        }
        assert_eq!(percent_advantage(0.5, 0.5).unwrap(), 0.0);
        assert!(matches!(
            percent_advantage(1.0, 0.0),
            Err(BenchError::NonPositiveError(_))
        ));
    }

    #[test]
    fn advantage_is_decreasing_in_the_new_error() {
        let mut last = f64::INFINITY;
        for err_new in [0.1, 0.2, 0.5, 1.0, 2.0] {
            let adv = percent_advantage(1.0, err_new).unwrap();
            assert!(adv < last);
            last = adv;
        }
    }

    #[test]
    fn split_sizes_determinism_and_partition() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * 2.0).collect();
        let ds = Dataset::from_xy(&xs, &ys);
        let (train, test) = split(&ds, 0.3, 99).unwrap();
        assert_eq!((train.len(), test.len()), (7, 3));

        let (train2, test2) = split(&ds, 0.3, 99).unwrap();
        assert_eq!(train.samples(), train2.samples());
        assert_eq!(test.samples(), test2.samples());

        let mut all: Vec<f64> = train
            .samples()
            .iter()
            .chain(test.samples())
            .map(|s| s.x[0])
            .collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, xs);

        assert!(matches!(split(&ds, 0.0, 1), Err(BenchError::BadFraction(_))));
        let tiny = Dataset::from_xy(&[0.0], &[0.0]);
        assert!(matches!(split(&tiny, 0.5, 1), Err(BenchError::DegenerateSplit { n: 1 })));
    }

    #[test]
    fn noiseless_linear_is_easy_for_both_methods() {
        // A sharp fixed inverse-power kernel interpolates between dense
        // noiseless samples, so both methods should recover the line to
        // well under 1e-3 mean absolute error on the interior grid.
        let config = BenchConfig {
            tuning: TuneMethod::Fixed(KernelSpec::inverse_power(8.0)),
            eval: EvalConfig::default(),
            ..linear_config(3000, 3)
        };
        let report = run_benchmark(&config).unwrap();
        assert!(report.pointwise.mae <= 1e-3, "pointwise mae {}", report.pointwise.mae);
        assert!(report.lasso.mae <= 1e-3, "lasso mae {}", report.lasso.mae);
        // Advantage is recomputable from the stored errors, bit for bit.
        let again = percent_advantage(report.lasso.mae, report.pointwise.mae).unwrap();
        assert_eq!(report.percent_advantage, again);
        let again = percent_advantage(report.lasso.rmse, report.pointwise.rmse).unwrap();
        assert_eq!(report.percent_advantage_rmse, again);
    }

    #[test]
    fn stored_metrics_match_rescored_predictions() {
        let report = run_benchmark(&linear_config(60, 11)).unwrap();
        let (pw, ls, adv, adv_rmse) = score_predictions(&report.predictions).unwrap();
        assert_eq!(pw.mae, report.pointwise.mae);
        assert_eq!(ls.rmse, report.lasso.rmse);
        assert_eq!(adv, report.percent_advantage);
        assert_eq!(adv_rmse, report.percent_advantage_rmse);
        assert!(pw.mae_edge.is_some(), "synthetic runs report edge metrics");
    }

    #[test]
    fn report_round_trips_and_rescoring_is_stable() {
        let report = run_benchmark(&linear_config(60, 11)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_report(&report, dir.path()).unwrap();
        let back = read_report(dir.path()).unwrap();
        assert_eq!(back, report);

        let (pw, ls, adv, adv_rmse) = score_predictions(&back.predictions).unwrap();
        assert!((pw.mae - report.pointwise.mae).abs() <= 1e-12);
        assert!((pw.rmse - report.pointwise.rmse).abs() <= 1e-12);
        assert!((ls.mae - report.lasso.mae).abs() <= 1e-12);
        assert!((adv - report.percent_advantage).abs() <= 1e-12);
        assert!((adv_rmse - report.percent_advantage_rmse).abs() <= 1e-12);
    }

    #[test]
    fn same_config_gives_identical_reports_apart_from_runtimes() {
        let a = run_benchmark(&linear_config(50, 21)).unwrap();
        let b = run_benchmark(&linear_config(50, 21)).unwrap();
        let normalize = |mut r: BenchmarkReport| {
            r.pointwise.runtime_seconds = 0.0;
            r.lasso.runtime_seconds = 0.0;
            serde_json::to_string_pretty(&r).unwrap()
        };
        assert_eq!(normalize(a), normalize(b));
    }

    #[test]
    fn csv_source_reports_fingerprint_and_no_edge_metrics() {
        let spec = SynthSpec {
            target_function: TargetFunction::Sine,
            n: 40,
            domain: vec![(0.0, 6.0)],
            noise: (0.8, 1.2),
            seed: 9,
        };
        let ds = gen_synthetic(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("data.csv");
        crate::dataset::write_csv(&ds, &csv_path).unwrap();

        let config = BenchConfig {
            data: DataSource::Csv {
                path: csv_path.to_string_lossy().into_owned(),
                response: "y".into(),
                test_fraction: 0.25,
                seed: 4,
            },
            tuning: TuneMethod::VarianceMatch {
                explained_fraction: 0.9,
                r_bounds: DEFAULT_R_BOUNDS,
            },
            lasso: LassoConfig { degree: 3, ..LassoConfig::default() },
            eval: EvalConfig::default(),
        };
        let report = run_benchmark(&config).unwrap();
        assert!(report.data_fingerprint.is_some());
        assert_eq!(report.n_eval, 10);
        assert_eq!(report.n_train, 30);
        assert!(report.pointwise.mae_edge.is_none());
        assert!(report.lasso.rmse_edge.is_none());
    }

    #[test]
    fn missing_csv_fails_naming_the_path() {
        let config = BenchConfig {
            data: DataSource::Csv {
                path: "/nonexistent/nope.csv".into(),
                response: "y".into(),
                test_fraction: 0.25,
                seed: 0,
            },
            tuning: TuneMethod::default(),
            lasso: LassoConfig::default(),
            eval: EvalConfig::default(),
        };
        let err = run_benchmark(&config).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/nope.csv"), "{err}");
    }

    #[test]
    fn minimal_config_json_resolves_all_defaults() {
        let json = r#"{
            "data": { "synthetic": {
                "target_function": "sine", "n": 30,
                "domain": [[0.0, 6.0]], "noise": [0.9, 1.1], "seed": 1
            } }
        }"#;
        let config: BenchConfig = serde_json::from_str(json).unwrap();
        assert_eq!(config.eval.grid_points, 512);
        assert_eq!(config.lasso.degree, DEFAULT_LASSO_DEGREE);
        assert_eq!(config.lasso.lambda_grid.len(), 20);
        assert!(matches!(config.tuning, TuneMethod::IterateRandomness { .. }));
        let echoed = serde_json::to_string(&config).unwrap();
        let back: BenchConfig = serde_json::from_str(&echoed).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn fixed_kernel_method_reports_diagnostics() {
        let config = BenchConfig {
            data: DataSource::Synthetic(SynthSpec {
                target_function: TargetFunction::Square,
                n: 50,
                domain: vec![(0.5, 3.0)],
                noise: (0.9, 1.1),
                seed: 17,
            }),
            tuning: TuneMethod::Fixed(KernelSpec::exp_base(8.0)),
            lasso: LassoConfig { degree: 2, ..LassoConfig::default() },
            eval: EvalConfig { grid_points: 64, edge_fraction: 0.02 },
        };
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.kernel, KernelSpec::exp_base(8.0));
        assert!(report.tuning.variance_ratio > 0.0);
        assert_eq!(report.tuning.rounds.len(), 1);
    }
}
