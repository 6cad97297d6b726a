//! Pointwise prediction.
//!
//! The estimate at a query `x` is the weighted mean
//! `Z = sum_i w_i y_i / sum_i w_i`, `w_i = weight(kernel, x - x_i)` — the
//! closed-form minimizer of the weighted cost `sum_i w_i (Z - y_i)^2`.
//!
//! Exact matches under a singular kernel (inverse power, zero shift) are
//! resolved by policy before weighting: the default returns the arithmetic
//! mean of the matched responses, which is the limit of the weighted
//! average as the query approaches the data point. The same rule is applied
//! to samples whose *near*-zero distance makes the weight overflow to
//! `+inf`: those samples dominate, so the estimate is their mean.
//!
//! Numerics: numerator and denominator accumulate in dataset order with
//! compensated summation, which is what backs the crate's 1e-12
//! equivariance tolerances and cross-platform reproducibility.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::kernels::{CompiledKernel, KernelError, KernelSpec, MultidimMode};
use crate::stats::CompensatedSum;

/// What to do when the query coincides with training predictors under a
/// singular kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExactMatchPolicy {
    /// Return the arithmetic mean of the matched responses (the limit of
    /// the weighted average). Default.
    #[default]
    MeanOfMatches,
    /// Signal the singularity as an error.
    Error,
}

/// A grid of query points with their predictions.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionCurve {
    pub grid: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub kernel: KernelSpec,
    pub policy: ExactMatchPolicy,
}

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("query has {got} coordinates, dataset dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular kernel at an exact predictor match at {x:?} ({matches} match(es))")]
    ExactMatch { x: Vec<f64>, matches: usize },
    #[error("all kernel weights underflowed to zero at query {x:?}")]
    DegenerateWeights { x: Vec<f64> },
    #[error("at point {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<EstimatorError>,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Core weighted average with an optional skipped sample (for
/// leave-one-out). Accumulates in dataset order.
fn weighted_average(
    ds: &Dataset,
    ck: &CompiledKernel,
    x: &[f64],
    policy: ExactMatchPolicy,
    skip: Option<usize>,
) -> Result<f64, EstimatorError> {
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    // Samples at exactly zero combined distance under a singular kernel.
    let mut match_sum = 0.0;
    let mut match_count = 0usize;
    // Samples whose weight overflowed to +inf (near-zero distance).
    let mut dominant_sum = 0.0;
    let mut dominant_count = 0usize;

    let mut delta = vec![0.0; x.len()];
    for (j, s) in ds.samples().iter().enumerate() {
        if skip == Some(j) {
            continue;
        }
        for (d, (&xa, &sa)) in delta.iter_mut().zip(x.iter().zip(&s.x)) {
            *d = xa - sa;
        }
        let sq = ck.combined_square(&delta);
        if ck.singular && sq == 0.0 {
            match_sum += s.y;
            match_count += 1;
            continue;
        }
        let w = ck.apply(sq);
        if w.is_infinite() {
            dominant_sum += s.y;
            dominant_count += 1;
            continue;
        }
        num.add(w * s.y);
        den.add(w);
    }

    if match_count > 0 {
        return match policy {
            ExactMatchPolicy::MeanOfMatches => Ok(match_sum / match_count as f64),
            ExactMatchPolicy::Error => Err(EstimatorError::ExactMatch {
                x: x.to_vec(),
                matches: match_count,
            }),
        };
    }
    if dominant_count > 0 {
        return Ok(dominant_sum / dominant_count as f64);
    }
    let total = den.value();
    if total == 0.0 {
        return Err(EstimatorError::DegenerateWeights { x: x.to_vec() });
    }
    Ok(num.value() / total)
}

fn check_query(ds: &Dataset, x: &[f64]) -> Result<(), EstimatorError> {
    if ds.is_empty() {
        return Err(EstimatorError::EmptyDataset);
    }
    if x.len() != ds.dim() {
        return Err(EstimatorError::DimensionMismatch {
            expected: ds.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Predicts the response at `x` as the kernel-weighted mean of all
/// responses.
pub fn predict_at(
    ds: &Dataset,
    kernel: &KernelSpec,
    x: &[f64],
    policy: ExactMatchPolicy,
) -> Result<f64, EstimatorError> {
    check_query(ds, x)?;
    let ck = kernel.compile()?;
    weighted_average(ds, &ck, x, policy, None)
}

/// Element-wise [`predict_at`] over a grid; grid order is preserved and
/// per-point failures carry the offending grid index. Points are scored
/// concurrently when a rayon pool with more than one thread is active;
/// results are identical either way.
pub fn predict_grid(
    ds: &Dataset,
    kernel: &KernelSpec,
    grid: &[Vec<f64>],
    policy: ExactMatchPolicy,
) -> Result<PredictionCurve, EstimatorError> {
    if ds.is_empty() {
        return Err(EstimatorError::EmptyDataset);
    }
    let ck = kernel.compile()?;
    let values: Vec<f64> = grid
        .par_iter()
        .enumerate()
        .map(|(index, x)| {
            check_query(ds, x)
                .and_then(|()| weighted_average(ds, &ck, x, policy, None))
                .map_err(|source| EstimatorError::AtIndex {
                    index,
                    source: Box::new(source),
                })
        })
        .collect::<Result<_, _>>()?;
    Ok(PredictionCurve {
        grid: grid.to_vec(),
        values,
        kernel: kernel.clone(),
        policy,
    })
}

/// Leave-one-out predictions: `e_i` is [`predict_at`] at `x_i` with sample
/// `i` removed.
pub fn predict_loo(
    ds: &Dataset,
    kernel: &KernelSpec,
    policy: ExactMatchPolicy,
) -> Result<Vec<f64>, EstimatorError> {
    if ds.len() < 2 {
        return Err(EstimatorError::TooFewSamples { need: 2, got: ds.len() });
    }
    let ck = kernel.compile()?;
    ds.samples()
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            weighted_average(ds, &ck, &s.x, policy, Some(i)).map_err(|source| {
                EstimatorError::AtIndex {
                    index: i,
                    source: Box::new(source),
                }
            })
        })
        .collect()
}

/// Inclusive linearly spaced grid with `count` points (`count == 1` yields
/// just `lo`).
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
        .collect()
}

/// Writes a curve as CSV with columns `d1..db,z`.
pub fn write_curve_csv(curve: &PredictionCurve, path: &Path) -> Result<(), EstimatorError> {
    let io_err = |source| EstimatorError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dim = curve.grid.first().map_or(1, Vec::len);
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let mut line = String::new();
    for a in 1..=dim {
        line.push_str(&format!("d{a},"));
    }
    line.push('z');
    writeln!(w, "{line}").map_err(io_err)?;
    for (x, z) in curve.grid.iter().zip(&curve.values) {
        line.clear();
        for v in x {
            line.push_str(&format!("{v},"));
        }
        line.push_str(&format!("{z}"));
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

// ---------------------------------------------------------------------------
// Cached leave-one-out for tuning loops
// ---------------------------------------------------------------------------

/// Pairwise-distance cache for repeated LOO evaluation of *different*
/// kernel parameters over one dataset (the tuning hot path: one LOO pass
/// per candidate parameter, dozens of candidates).
///
/// The combined squared offsets `s_ij` depend only on the data and the
/// multidim mode, so they are computed once; each candidate then applies
/// its weight function to the cached values. Accumulation per point is in
/// dataset order with compensated sums — bit-identical to
/// [`predict_loo`], which the tests assert.
///
/// Above [`CachedLoo::MAX_CACHED_N`] samples the quadratic table would be
/// too large; the evaluator transparently recomputes offsets on the fly
/// instead (same arithmetic, no cache).
pub(crate) struct CachedLoo<'a> {
    ds: &'a Dataset,
    ys: Vec<f64>,
    mode: MultidimMode,
    /// Packed strict upper triangle: entry for pair (i, j), i < j, at
    /// `i*(2n-i-1)/2 + (j-i-1)`. Empty when n exceeds MAX_CACHED_N.
    sq: Vec<f64>,
    /// Scratch weight table matching `sq`, reused across candidates.
    weights: Vec<f64>,
}

impl<'a> CachedLoo<'a> {
    pub(crate) const MAX_CACHED_N: usize = 3000;

    pub(crate) fn new(ds: &'a Dataset, mode: MultidimMode) -> Self {
        let n = ds.len();
        let use_cache = n <= Self::MAX_CACHED_N;
        let mut sq = Vec::new();
        if use_cache && n >= 2 {
            sq.reserve_exact(n * (n - 1) / 2);
            let mut delta = vec![0.0; ds.dim()];
            // The apply() below only needs s, which is symmetric in (i, j),
            // so one triangle suffices.
            let probe = probe_kernel(mode);
            for i in 0..n {
                let xi = &ds.samples()[i].x;
                for j in (i + 1)..n {
                    let xj = &ds.samples()[j].x;
                    for (d, (&a, &b)) in delta.iter_mut().zip(xi.iter().zip(xj)) {
                        *d = a - b;
                    }
                    sq.push(probe.combined_square(&delta));
                }
            }
        }
        let weights = vec![0.0; sq.len()];
        CachedLoo {
            ds,
            ys: ds.responses(),
            mode,
            sq,
            weights,
        }
    }

    #[inline]
    fn tri_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        let n = self.ds.len();
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    /// LOO predictions under `kernel`, which must use the cache's multidim
    /// mode.
    pub(crate) fn predictions(
        &mut self,
        kernel: &KernelSpec,
        policy: ExactMatchPolicy,
    ) -> Result<Vec<f64>, EstimatorError> {
        if kernel.multidim_mode != self.mode {
            return Err(EstimatorError::Kernel(KernelError::Invalid(
                "kernel multidim mode changed during tuning".into(),
            )));
        }
        let ck = kernel.compile()?;
        let n = self.ds.len();
        if n < 2 {
            return Err(EstimatorError::TooFewSamples { need: 2, got: n });
        }
        if self.sq.is_empty() {
            // Too large to cache: defer to the direct path.
            return predict_loo(self.ds, kernel, policy);
        }
        for (w, &s) in self.weights.iter_mut().zip(&self.sq) {
            *w = ck.apply(s);
        }

        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut num = CompensatedSum::new();
            let mut den = CompensatedSum::new();
            let mut match_sum = 0.0;
            let mut match_count = 0usize;
            let mut dominant_sum = 0.0;
            let mut dominant_count = 0usize;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let idx = if i < j { self.tri_index(i, j) } else { self.tri_index(j, i) };
                let s = self.sq[idx];
                if ck.singular && s == 0.0 {
                    match_sum += self.ys[j];
                    match_count += 1;
                    continue;
                }
                let w = self.weights[idx];
                if w.is_infinite() {
                    dominant_sum += self.ys[j];
                    dominant_count += 1;
                    continue;
                }
                num.add(w * self.ys[j]);
                den.add(w);
            }
            let value = if match_count > 0 {
                match policy {
                    ExactMatchPolicy::MeanOfMatches => match_sum / match_count as f64,
                    ExactMatchPolicy::Error => {
                        return Err(EstimatorError::AtIndex {
                            index: i,
                            source: Box::new(EstimatorError::ExactMatch {
                                x: self.ds.samples()[i].x.clone(),
                                matches: match_count,
                            }),
                        })
                    }
                }
            } else if dominant_count > 0 {
                dominant_sum / dominant_count as f64
            } else {
                let total = den.value();
                if total == 0.0 {
                    return Err(EstimatorError::AtIndex {
                        index: i,
                        source: Box::new(EstimatorError::DegenerateWeights {
                            x: self.ds.samples()[i].x.clone(),
                        }),
                    });
                }
                num.value() / total
            };
            out.push(value);
        }
        Ok(out)
    }
}

/// A compiled kernel used only for its `combined_square`; family is
/// irrelevant.
fn probe_kernel(mode: MultidimMode) -> CompiledKernel {
    KernelSpec::uniform()
        .with_mode(mode)
        .compile()
        .expect("uniform kernel always compiles")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_synthetic, SynthSpec, TargetFunction};
    use crate::rng::SplitMix64;

    fn any_policy() -> ExactMatchPolicy {
        ExactMatchPolicy::MeanOfMatches
    }

    #[test]
    fn symmetric_pair_predicts_midpoint() {
        let ds = Dataset::from_xy(&[-1.0, 1.0], &[0.0, 2.0]);
        for kernel in [
            KernelSpec::exp_base(2.0),
            KernelSpec::inverse_power(2.0),
            KernelSpec::uniform(),
        ] {
            let z = predict_at(&ds, &kernel, &[0.0], any_policy()).unwrap();
            assert!((z - 1.0).abs() < 1e-15, "{}: {z}", kernel.describe());
        }
    }

    #[test]
    fn constant_responses_predict_the_constant() {
        let ds = Dataset::from_xy(&[0.0, 1.0, 5.0, -2.0], &[3.5, 3.5, 3.5, 3.5]);
        for x in [-10.0, 0.3, 7.0] {
            let z = predict_at(&ds, &KernelSpec::exp_base(1.7), &[x], any_policy()).unwrap();
            assert!((z - 3.5).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_square_weights_give_two_point_eight() {
        // weights at x=0: 1/(0-1)^2 = 1 and 1/(0-2)^2 = 0.25,
        // so Z = (2*1 + 6*0.25) / 1.25 = 2.8. The oracle test for this
        // value (grid-search over the weighted cost) lives in
        // tests/estimator_oracles.rs.
        let ds = Dataset::from_xy(&[1.0, 2.0], &[2.0, 6.0]);
        let z = predict_at(&ds, &KernelSpec::inverse_power(2.0), &[0.0], any_policy()).unwrap();
        assert!((z - 2.8).abs() < 1e-12);
    }

    #[test]
    fn exact_match_policy_mean_and_error() {
        let ds = Dataset::from_xy(&[1.0, 1.0, 2.0], &[4.0, 6.0, 0.0]);
        let k = KernelSpec::inverse_power(2.0);
        let z = predict_at(&ds, &k, &[1.0], ExactMatchPolicy::MeanOfMatches).unwrap();
        assert_eq!(z, 5.0);
        match predict_at(&ds, &k, &[1.0], ExactMatchPolicy::Error) {
            Err(EstimatorError::ExactMatch { matches, .. }) => assert_eq!(matches, 2),
            other => panic!("expected ExactMatch, got {other:?}"),
        }
    }

    #[test]
    fn near_singular_weights_dominate_instead_of_poisoning() {
        // Distance small enough that s^2 underflows and 1/s^2 overflows to
        // +inf, but not an exact match: the sample should simply dominate
        // the estimate rather than produce NaN.
        let tiny = 1e-100;
        let ds = Dataset::from_xy(&[0.0, 1.0], &[5.0, -5.0]);
        let z = predict_at(&ds, &KernelSpec::inverse_power(4.0), &[tiny], any_policy()).unwrap();
        assert!(z.is_finite());
        assert!((z - 5.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_weights_error_names_the_query() {
        // exp_base with enormous r: all weights underflow at a distant query.
        let ds = Dataset::from_xy(&[0.0, 0.5], &[1.0, 2.0]);
        let k = KernelSpec::exp_base(1e300);
        match predict_at(&ds, &k, &[50.0], any_policy()) {
            Err(EstimatorError::DegenerateWeights { x }) => assert_eq!(x, vec![50.0]),
            other => panic!("expected DegenerateWeights, got {other:?}"),
        }
    }

    #[test]
    fn empty_dataset_and_dimension_mismatch_error() {
        let empty = Dataset::empty(1);
        assert!(matches!(
            predict_at(&empty, &KernelSpec::uniform(), &[0.0], any_policy()),
            Err(EstimatorError::EmptyDataset)
        ));
        let ds = Dataset::from_xy(&[1.0], &[1.0]);
        assert!(matches!(
            predict_at(&ds, &KernelSpec::uniform(), &[0.0, 1.0], any_policy()),
            Err(EstimatorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn grid_edge_cases() {
        let ds = Dataset::from_xy(&[0.0, 1.0], &[1.0, 3.0]);
        let k = KernelSpec::exp_base(2.0);
        let empty = predict_grid(&ds, &k, &[], any_policy()).unwrap();
        assert!(empty.grid.is_empty() && empty.values.is_empty());
        let single = predict_grid(&ds, &k, &[vec![0.5]], any_policy()).unwrap();
        assert_eq!(single.values.len(), 1);
        let direct = predict_at(&ds, &k, &[0.5], any_policy()).unwrap();
        assert_eq!(single.values[0], direct);
    }

    #[test]
    fn grid_errors_carry_the_point_index() {
        let ds = Dataset::from_xy(&[0.0, 1.0], &[1.0, 3.0]);
        let k = KernelSpec::inverse_power(2.0);
        let grid = vec![vec![0.5], vec![1.0], vec![0.25]];
        match predict_grid(&ds, &k, &grid, ExactMatchPolicy::Error) {
            Err(EstimatorError::AtIndex { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected AtIndex, got {other:?}"),
        }
    }

    #[test]
    fn loo_trivial_pairs_and_triples() {
        let ds = Dataset::from_xy(&[0.0, 1.0], &[1.0, 3.0]);
        let e = predict_loo(&ds, &KernelSpec::uniform(), any_policy()).unwrap();
        assert_eq!(e, vec![3.0, 1.0]);

        let ds = Dataset::from_xy(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]);
        let e = predict_loo(&ds, &KernelSpec::uniform(), any_policy()).unwrap();
        assert_eq!(e, vec![1.5, 1.0, 0.5]);

        let single = Dataset::from_xy(&[0.0], &[1.0]);
        assert!(matches!(
            predict_loo(&single, &KernelSpec::uniform(), any_policy()),
            Err(EstimatorError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn cached_loo_is_bit_identical_to_direct_loo() {
        let spec = SynthSpec {
            target_function: TargetFunction::Sine,
            n: 60,
            domain: vec![(0.0, 6.0)],
            noise: (0.5, 1.5),
            seed: 17,
        };
        let ds = gen_synthetic(&spec).unwrap();
        for kernel in [
            KernelSpec::exp_base(3.0),
            KernelSpec::exp_base_shifted(2.0, 0.1),
            KernelSpec::inverse_power_shifted(2.0, 0.01),
            KernelSpec::uniform(),
        ] {
            let direct = predict_loo(&ds, &kernel, any_policy()).unwrap();
            let mut cache = CachedLoo::new(&ds, kernel.multidim_mode);
            let cached = cache.predictions(&kernel, any_policy()).unwrap();
            assert_eq!(direct, cached, "kernel {}", kernel.describe());
        }
    }

    #[test]
    fn cached_loo_handles_exact_duplicates_like_direct() {
        let ds = Dataset::from_xy(&[1.0, 1.0, 2.0, 3.0], &[4.0, 6.0, 1.0, 0.0]);
        let kernel = KernelSpec::inverse_power(2.0);
        let direct = predict_loo(&ds, &kernel, any_policy()).unwrap();
        let mut cache = CachedLoo::new(&ds, kernel.multidim_mode);
        let cached = cache.predictions(&kernel, any_policy()).unwrap();
        assert_eq!(direct, cached);
        // Duplicate x=1 rows: LOO at sample 0 exact-matches sample 1.
        assert_eq!(direct[0], 6.0);
        assert_eq!(direct[1], 4.0);
    }

    #[test]
    fn convex_hull_bound_holds_on_random_data() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..50 {
            let n = 2 + rng.next_index(20);
            let xs: Vec<f64> = (0..n).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.uniform_in(-10.0, 10.0)).collect();
            let ds = Dataset::from_xy(&xs, &ys);
            let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let q = rng.uniform_in(-6.0, 6.0);
            for kernel in [
                KernelSpec::exp_base(1.0 + rng.uniform_in(0.1, 5.0)),
                KernelSpec::inverse_power_shifted(2.0, 0.05),
                KernelSpec::uniform(),
            ] {
                let z = predict_at(&ds, &kernel, &[q], any_policy()).unwrap();
                assert!(z >= lo - 1e-12 && z <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn shift_and_scale_equivariance() {
        let mut rng = SplitMix64::new(77);
        let xs: Vec<f64> = (0..40).map(|_| rng.uniform_in(0.0, 10.0)).collect();
        let ys: Vec<f64> = (0..40).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let ds = Dataset::from_xy(&xs, &ys);
        let kernel = KernelSpec::exp_base(2.5);
        let shifted = Dataset::from_xy(&xs, &ys.iter().map(|y| y + 1.5).collect::<Vec<_>>());
        let scaled = Dataset::from_xy(&xs, &ys.iter().map(|y| y * -3.25).collect::<Vec<_>>());
        for q in linspace(0.5, 9.5, 21) {
            let z = predict_at(&ds, &kernel, &[q], any_policy()).unwrap();
            let zs = predict_at(&shifted, &kernel, &[q], any_policy()).unwrap();
            let zm = predict_at(&scaled, &kernel, &[q], any_policy()).unwrap();
            assert!((zs - (z + 1.5)).abs() < 1e-12, "shift at {q}");
            assert!((zm - z * -3.25).abs() < 1e-12 * z.abs().max(1.0), "scale at {q}");
        }
    }

    #[test]
    fn r_near_one_recovers_the_global_mean() {
        let mut rng = SplitMix64::new(5);
        let xs: Vec<f64> = (0..30).map(|_| rng.uniform_in(0.0, 4.0)).collect();
        let ys: Vec<f64> = (0..30).map(|_| rng.uniform_in(1.0, 3.0)).collect();
        let ds = Dataset::from_xy(&xs, &ys);
        let mean = crate::stats::mean(&ys);
        let kernel = KernelSpec::exp_base(1.0 + 1e-9);
        for q in [-1.0, 0.7, 2.2, 5.0] {
            let z = predict_at(&ds, &kernel, &[q], any_policy()).unwrap();
            assert!(((z - mean) / mean).abs() < 1e-6);
        }
    }

    #[test]
    fn linspace_is_inclusive() {
        let g = linspace(0.0, 1.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert!((g[3] - 0.3).abs() < 1e-15);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn curve_csv_has_documented_columns() {
        let ds = Dataset::from_xy(&[0.0, 1.0], &[0.0, 1.0]);
        let curve = predict_grid(
            &ds,
            &KernelSpec::exp_base(2.0),
            &[vec![0.0], vec![0.5], vec![1.0]],
            any_policy(),
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_curve_csv(&curve, f.path()).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "d1,z");
        assert_eq!(lines.count(), 3);
    }
}
