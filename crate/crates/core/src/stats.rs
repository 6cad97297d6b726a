//! Small shared numeric helpers: compensated accumulation and population
//! moments. Internal to the crate; every module that sums floats in a
//! contract-relevant place goes through [`CompensatedSum`] so results do
//! not depend on incidental refactorings of loop structure.

/// Neumaier-compensated accumulator (an error-free-transformation running
/// sum). Adding values in a fixed order yields a result with error bounded
/// by ~2 ulps independent of length, which is what makes the crate's
/// equivariance and reproducibility guarantees hold at 1e-12 tolerances.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        CompensatedSum { sum: 0.0, comp: 0.0 }
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in order.
pub(crate) fn sum(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Arithmetic mean (compensated). Empty input returns NaN; callers are
/// expected to have checked for emptiness where it matters.
pub(crate) fn mean(values: &[f64]) -> f64 {
    sum(values) / values.len() as f64
}

/// Population variance: `sum((v - mean)^2) / n`. This crate uses the
/// population convention (divide by `n`, not `n - 1`) everywhere.
pub(crate) fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    let mut acc = CompensatedSum::new();
    for &v in values {
        let d = v - m;
        acc.add(d * d);
    }
    acc.value() / values.len() as f64
}

/// Mean of squares (compensated).
pub(crate) fn mean_square(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v * v);
    }
    acc.value() / values.len() as f64
}

/// Sum of squared differences `sum((a_i - b_i)^2)`; caller guarantees equal
/// lengths.
pub(crate) fn sse(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = CompensatedSum::new();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc.add(d * d);
    }
    acc.value()
}
