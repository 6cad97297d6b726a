//! Pointwise distance-weighted regression.
//!
//! The estimator at the heart of this crate predicts a response at a query
//! point as the weighted mean of all observed responses, with weights that
//! decay with distance along the predictor axes. That weighted mean is the
//! closed-form minimizer of the weighted squared-error cost
//! `sum_i w(x - x_i) * (z - y_i)^2`, so "fitting" requires no training
//! phase at all — only a kernel choice.
//!
//! Modules:
//!
//! - [`rng`]: deterministic splitmix64 generator (the reproducibility
//!   contract for all randomness in the crate).
//! - [`dataset`]: samples, CSV I/O, synthetic data generation,
//!   normalization.
//! - [`kernels`]: the distance-weighting families and their validation.
//! - [`estimator`]: pointwise prediction, grids, leave-one-out.
//! - [`solver`]: the Euclidean-distance variant (minimizing summed straight
//!   line distances to the samples) plus a generic scalar gradient-descent
//!   minimizer used as a cross-check oracle.
//! - [`tuning`]: variance-matching kernel tuning, the randomness index, the
//!   damped explained-fraction iteration, and two-parameter tuning.
//! - [`lasso`]: a polynomial lasso baseline fit by coordinate descent.
//! - [`benchmark`]: train/eval splits, error metrics, and a harness that
//!   compares the pointwise estimator against the lasso baseline.

pub mod benchmark;
pub mod dataset;
pub mod estimator;
pub mod kernels;
pub mod lasso;
pub mod rng;
pub mod solver;
pub(crate) mod stats;
pub mod tuning;

pub use benchmark::{
    mae, percent_advantage, rmse, run_benchmark, split, BenchConfig, BenchmarkReport,
};
pub use dataset::{Dataset, Sample, SynthSpec, TargetFunction};
pub use estimator::{predict_at, predict_grid, predict_loo, ExactMatchPolicy, PredictionCurve};
pub use kernels::{KernelFamily, KernelSpec, MultidimMode};
pub use lasso::{fit_lasso, predict_lasso, select_lambda, LassoModel};
pub use solver::{euclid_cost, solve_fixed_point, solve_gradient, SolveResult};
pub use tuning::{
    iterate_randomness, randomness_index, tune_r, tune_two_param, variance_match_loss,
    TuningResult,
};
