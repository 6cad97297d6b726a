//! Helpers shared by the integration-test targets.

#![allow(dead_code)]

use pointwise::dataset::{gen_synthetic, SynthSpec, TargetFunction};
use pointwise::Dataset;

/// Seeded one-dimensional sine dataset with multiplicative noise.
pub fn sine_data(n: usize, domain: (f64, f64), noise: (f64, f64), seed: u64) -> Dataset {
    gen_synthetic(&SynthSpec {
        target_function: TargetFunction::Sine,
        n,
        domain: vec![domain],
        noise,
        seed,
    })
    .expect("valid synthetic spec")
}

/// Seeded one-dimensional quadratic dataset with multiplicative noise.
pub fn square_data(n: usize, domain: (f64, f64), noise: (f64, f64), seed: u64) -> Dataset {
    gen_synthetic(&SynthSpec {
        target_function: TargetFunction::Square,
        n,
        domain: vec![domain],
        noise,
        seed,
    })
    .expect("valid synthetic spec")
}

/// Brute-force scalar minimizer: a dense grid pass over `[lo, hi]` followed
/// by repeated grid refinement around the incumbent. Deliberately naive so
/// it shares no code with the solvers it audits.
pub fn grid_argmin(cost: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize, rounds: usize) -> f64 {
    assert!(points >= 3 && hi > lo && rounds >= 1);
    let (mut lo, mut hi) = (lo, hi);
    let mut best_z = lo;
    for _ in 0..rounds {
        let step = (hi - lo) / (points - 1) as f64;
        let mut best = f64::INFINITY;
        for k in 0..points {
            let z = lo + step * k as f64;
            let c = cost(z);
            if c < best {
                best = c;
                best_z = z;
            }
        }
        lo = (best_z - step).max(lo);
        hi = (best_z + step).min(hi);
    }
    best_z
}
