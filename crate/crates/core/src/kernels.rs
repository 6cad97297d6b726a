//! Distance-weighting kernels.
//!
//! A kernel maps the predictor offset `delta = x - x_i` to a nonnegative
//! weight. All families act on one combined scalar `s`, built from the
//! per-dimension squared offsets either by summing (`sum` mode, the
//! default: the squared Euclidean distance, nonsingular when only one
//! coordinate matches) or by multiplying (`product` mode):
//!
//! - `inverse_power`:          `w = 1 / s^(p/2)` — singular at `s = 0`
//! - `inverse_power_shifted`:  `w = 1 / (s^(p/2) + k)`
//! - `exp_base`:               `w = 1 / r^s`, computed as `exp(-s ln r)`
//! - `exp_base_shifted`:       `w = 1 / (r^s + q)`
//! - `uniform`:                `w = 1`
//!
//! For univariate data `s = delta^2`, so `inverse_power` with `p` is
//! `1/|delta|^p` and `exp_base` is the bell-shaped `r^(-delta^2)` with the
//! base `r > 1` controlling locality (large `r` = tight bandwidth; as
//! `r -> 1+` every weight tends to 1 and the estimate tends to the global
//! mean).
//!
//! Overflow policy: exponential weights that underflow saturate to `0.0`
//! (never infinity or NaN). Inverse-power weights at *near*-zero distances
//! can overflow to `+inf`; the estimator resolves those by letting the
//! infinite-weight samples dominate, which is their mathematical limit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How per-dimension squared offsets combine into the scalar the family
/// acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultidimMode {
    /// `s = sum_a delta_a^2` (squared Euclidean distance). Default.
    Sum,
    /// `s = prod_a delta_a^2`.
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    InversePower,
    InversePowerShifted,
    ExpBase,
    ExpBaseShifted,
    Uniform,
}

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("invalid kernel: {0}")]
    Invalid(String),
    #[error("singular kernel weight at zero distance (inverse power with zero shift)")]
    SingularAtZeroDistance,
    #[error("kernel weight input must be finite")]
    NonFiniteDistance,
}

fn default_p() -> f64 {
    2.0
}

fn default_mode() -> MultidimMode {
    MultidimMode::Sum
}

/// Full description of a kernel. Serializes with exactly the field names
/// `family`, `p`, `shift`, `r`, `multidim_mode`; `p` defaults to 2, `shift`
/// to 0, `multidim_mode` to `sum`, and `r` is required only by the
/// exponential families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Power for the inverse-power families (applied to `s^(p/2)`).
    #[serde(default = "default_p")]
    pub p: f64,
    /// Denominator shift: `k` for `inverse_power_shifted`, `q` for
    /// `exp_base_shifted`.
    #[serde(default)]
    pub shift: f64,
    /// Base for the exponential families; must exceed 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default = "default_mode")]
    pub multidim_mode: MultidimMode,
}

impl KernelSpec {
    pub fn uniform() -> Self {
        KernelSpec {
            family: KernelFamily::Uniform,
            p: default_p(),
            shift: 0.0,
            r: None,
            multidim_mode: default_mode(),
        }
    }

    pub fn inverse_power(p: f64) -> Self {
        KernelSpec { family: KernelFamily::InversePower, p, ..Self::uniform() }
    }

    pub fn inverse_power_shifted(p: f64, k: f64) -> Self {
        KernelSpec {
            family: KernelFamily::InversePowerShifted,
            p,
            shift: k,
            ..Self::uniform()
        }
    }

    pub fn exp_base(r: f64) -> Self {
        KernelSpec { family: KernelFamily::ExpBase, r: Some(r), ..Self::uniform() }
    }

    pub fn exp_base_shifted(r: f64, q: f64) -> Self {
        KernelSpec {
            family: KernelFamily::ExpBaseShifted,
            r: Some(r),
            shift: q,
            ..Self::uniform()
        }
    }

    pub fn with_mode(mut self, mode: MultidimMode) -> Self {
        self.multidim_mode = mode;
        self
    }

    /// Checks parameter domains: `p > 0`, `shift >= 0`, `r > 1` and present
    /// for exponential families, and no stray parameters set on families
    /// that do not use them.
    pub fn validate(&self) -> Result<(), KernelError> {
        let err = |m: String| Err(KernelError::Invalid(m));
        match self.family {
            KernelFamily::Uniform => {
                if self.r.is_some() {
                    return err("uniform kernel takes no base r".into());
                }
                if self.shift != 0.0 {
                    return err("uniform kernel takes no shift".into());
                }
            }
            KernelFamily::InversePower | KernelFamily::InversePowerShifted => {
                if !(self.p.is_finite() && self.p > 0.0) {
                    return err(format!("power p must be positive and finite, got {}", self.p));
                }
                if self.r.is_some() {
                    return err("inverse power kernels take no base r".into());
                }
                if self.family == KernelFamily::InversePower && self.shift != 0.0 {
                    return err("inverse_power takes no shift; use inverse_power_shifted".into());
                }
                if !(self.shift.is_finite() && self.shift >= 0.0) {
                    return err(format!("shift must be nonnegative and finite, got {}", self.shift));
                }
            }
            KernelFamily::ExpBase | KernelFamily::ExpBaseShifted => {
                match self.r {
                    None => return err("exponential kernels require a base r".into()),
                    Some(r) if !(r.is_finite() && r > 1.0) => {
                        return err(format!("base r must be finite and greater than 1, got {r}"));
                    }
                    _ => {}
                }
                if self.family == KernelFamily::ExpBase && self.shift != 0.0 {
                    return err("exp_base takes no shift; use exp_base_shifted".into());
                }
                if !(self.shift.is_finite() && self.shift >= 0.0) {
                    return err(format!("shift must be nonnegative and finite, got {}", self.shift));
                }
            }
        }
        Ok(())
    }

    /// True when the weight diverges at zero distance (inverse power with a
    /// zero shift). Callers must resolve exact matches before weighting.
    pub fn is_singular(&self) -> bool {
        match self.family {
            KernelFamily::InversePower => true,
            KernelFamily::InversePowerShifted => self.shift == 0.0,
            _ => false,
        }
    }

    /// Weight for the offset `delta = x - x_i`. Validates parameters and
    /// inputs; hot paths compile once via [`CompiledKernel`] instead.
    pub fn weight(&self, delta: &[f64]) -> Result<f64, KernelError> {
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(KernelError::NonFiniteDistance);
        }
        let compiled = self.compile()?;
        let s = compiled.combined_square(delta);
        if compiled.singular && s == 0.0 {
            return Err(KernelError::SingularAtZeroDistance);
        }
        Ok(compiled.apply(s))
    }

    /// Canonical one-line text form, stable across runs:
    /// `uniform`, `inverse_power(p=..[,k=..],mode=..)`,
    /// `exp_base(r=..[,q=..],mode=..)`.
    pub fn describe(&self) -> String {
        let mode = match self.multidim_mode {
            MultidimMode::Sum => "sum",
            MultidimMode::Product => "product",
        };
        let r = self.r.unwrap_or(f64::NAN);
        match self.family {
            KernelFamily::Uniform => "uniform".to_string(),
            KernelFamily::InversePower => format!("inverse_power(p={},mode={mode})", self.p),
            KernelFamily::InversePowerShifted => {
                format!("inverse_power(p={},k={},mode={mode})", self.p, self.shift)
            }
            KernelFamily::ExpBase => format!("exp_base(r={r},mode={mode})"),
            KernelFamily::ExpBaseShifted => {
                format!("exp_base(r={r},q={},mode={mode})", self.shift)
            }
        }
    }

    /// Validates and pre-computes per-family constants for repeated
    /// weighting.
    pub(crate) fn compile(&self) -> Result<CompiledKernel, KernelError> {
        self.validate()?;
        let shape = match self.family {
            KernelFamily::Uniform => Shape::Uniform,
            KernelFamily::InversePower | KernelFamily::InversePowerShifted => Shape::InversePower {
                p_half: self.p * 0.5,
                shift: self.shift,
            },
            KernelFamily::ExpBase | KernelFamily::ExpBaseShifted => Shape::ExpBase {
                ln_r: self.r.expect("validated").ln(),
                shift: self.shift,
            },
        };
        Ok(CompiledKernel {
            mode: self.multidim_mode,
            singular: self.is_singular(),
            shape,
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Uniform,
    InversePower { p_half: f64, shift: f64 },
    ExpBase { ln_r: f64, shift: f64 },
}

/// A validated kernel with constants precomputed; the estimator's inner
/// loops call [`combined_square`](CompiledKernel::combined_square) and
/// [`apply`](CompiledKernel::apply) directly.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompiledKernel {
    mode: MultidimMode,
    pub(crate) singular: bool,
    shape: Shape,
}

impl CompiledKernel {
    /// Combined squared offset `s` for `delta = x - x_i`.
    pub(crate) fn combined_square(&self, delta: &[f64]) -> f64 {
        match self.mode {
            MultidimMode::Sum => delta.iter().map(|d| d * d).sum(),
            MultidimMode::Product => delta.iter().map(|d| d * d).product(),
        }
    }

    /// Weight as a function of the combined squared offset. Total over
    /// `s >= 0` except the documented singularity (`s == 0` on a singular
    /// kernel yields `+inf`); exponential underflow saturates to `0.0`.
    pub(crate) fn apply(&self, s: f64) -> f64 {
        match self.shape {
            Shape::Uniform => 1.0,
            Shape::InversePower { p_half, shift } => {
                // p == 2 keeps `s` untouched (pow(s, 1) == s exactly), so the
                // common case costs one add and one divide.
                let powed = if p_half == 1.0 { s } else { s.powf(p_half) };
                1.0 / (powed + shift)
            }
            Shape::ExpBase { ln_r, shift } => {
                if shift == 0.0 {
                    // exp(-s ln r) underflows gracefully to 0 for huge s.
                    (-s * ln_r).exp()
                } else {
                    // r^s may overflow to +inf; 1/(inf + q) saturates to 0.
                    1.0 / ((s * ln_r).exp() + shift)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exp_base_halves_at_unit_offset_for_base_two() {
        let k = KernelSpec::exp_base(2.0);
        let w = k.weight(&[1.0]).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        assert_eq!(k.weight(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn inverse_power_is_reciprocal_squared_distance() {
        let k = KernelSpec::inverse_power(2.0);
        assert_eq!(k.weight(&[2.0]).unwrap(), 0.25);
        let shifted = KernelSpec::inverse_power_shifted(2.0, 1.0);
        assert_eq!(shifted.weight(&[0.0]).unwrap(), 1.0);
        assert_eq!(shifted.weight(&[1.0]).unwrap(), 0.5);
    }

    #[test]
    fn uniform_ignores_distance() {
        let k = KernelSpec::uniform();
        assert_eq!(k.weight(&[123.0]).unwrap(), 1.0);
        assert_eq!(k.weight(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn singular_kernel_errors_at_zero_distance() {
        let k = KernelSpec::inverse_power(2.0);
        assert_eq!(k.weight(&[0.0]).unwrap_err(), KernelError::SingularAtZeroDistance);
        let k0 = KernelSpec::inverse_power_shifted(2.0, 0.0);
        assert!(k0.is_singular());
        assert!(!KernelSpec::inverse_power_shifted(2.0, 0.5).is_singular());
    }

    #[test]
    fn exponential_overflow_saturates_to_zero() {
        let w = KernelSpec::exp_base(2000.0).weight(&[100.0]).unwrap();
        assert_eq!(w, 0.0);
        let w = KernelSpec::exp_base_shifted(2000.0, 0.5).weight(&[100.0]).unwrap();
        assert_eq!(w, 0.0);
        assert!(!w.is_nan());
    }

    #[test]
    fn product_and_sum_modes_differ_as_documented() {
        let sum = KernelSpec::inverse_power_shifted(2.0, 1.0);
        let prod = sum.clone().with_mode(MultidimMode::Product);
        // deltas (1, 2): sum mode s = 5, product mode s = 4
        assert_eq!(sum.weight(&[1.0, 2.0]).unwrap(), 1.0 / 6.0);
        assert_eq!(prod.weight(&[1.0, 2.0]).unwrap(), 0.2);
        // product mode is singular whenever any single coordinate matches
        let singular = KernelSpec::inverse_power(2.0).with_mode(MultidimMode::Product);
        assert_eq!(
            singular.weight(&[0.0, 3.0]).unwrap_err(),
            KernelError::SingularAtZeroDistance
        );
    }

    #[test]
    fn describe_canonical_forms() {
        assert_eq!(
            KernelSpec::exp_base(1.2).describe(),
            "exp_base(r=1.2,mode=sum)"
        );
        assert_eq!(KernelSpec::uniform().describe(), "uniform");
        assert_eq!(
            KernelSpec::inverse_power_shifted(2.0, 0.01)
                .with_mode(MultidimMode::Product)
                .describe(),
            "inverse_power(p=2,k=0.01,mode=product)"
        );
        assert_eq!(
            KernelSpec::exp_base_shifted(3.0, 0.5).describe(),
            "exp_base(r=3,q=0.5,mode=sum)"
        );
        assert_eq!(
            KernelSpec::inverse_power(4.0).describe(),
            "inverse_power(p=4,mode=sum)"
        );
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(KernelSpec::exp_base(1.0).validate().is_err());
        assert!(KernelSpec::exp_base(0.5).validate().is_err());
        assert!(KernelSpec::exp_base(f64::INFINITY).validate().is_err());
        assert!(KernelSpec::inverse_power(0.0).validate().is_err());
        assert!(KernelSpec::inverse_power(-2.0).validate().is_err());
        assert!(KernelSpec::inverse_power_shifted(2.0, -0.1).validate().is_err());
        assert!(KernelSpec::exp_base_shifted(2.0, -0.1).validate().is_err());
        let mut missing_r = KernelSpec::exp_base(2.0);
        missing_r.r = None;
        assert!(missing_r.validate().is_err());
        assert!(KernelSpec::exp_base(2.0).validate().is_ok());
        assert!(KernelSpec::uniform().validate().is_ok());
    }

    #[test]
    fn json_uses_the_documented_field_names() {
        let k = KernelSpec::exp_base(1.5);
        let value: serde_json::Value = serde_json::to_value(&k).unwrap();
        let obj = value.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|s| s.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(keys, vec!["family", "multidim_mode", "p", "r", "shift"]);
        assert_eq!(obj["family"], "exp_base");
        assert_eq!(obj["multidim_mode"], "sum");

        let parsed: KernelSpec =
            serde_json::from_str(r#"{"family":"exp_base","r":2.5}"#).unwrap();
        assert_eq!(parsed.p, 2.0);
        assert_eq!(parsed.shift, 0.0);
        assert_eq!(parsed.multidim_mode, MultidimMode::Sum);
        assert!(parsed.validate().is_ok());

        let uniform: KernelSpec = serde_json::from_str(r#"{"family":"uniform"}"#).unwrap();
        assert_eq!(uniform, KernelSpec::uniform());
    }

    #[test]
    fn json_round_trip_preserves_spec() {
        for k in [
            KernelSpec::uniform(),
            KernelSpec::inverse_power(3.0),
            KernelSpec::inverse_power_shifted(2.0, 0.01).with_mode(MultidimMode::Product),
            KernelSpec::exp_base(1.8),
            KernelSpec::exp_base_shifted(2.0, 0.25),
        ] {
            let text = serde_json::to_string(&k).unwrap();
            let back: KernelSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(k, back);
            assert_eq!(k.describe(), back.describe());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn weights_are_symmetric_positive_and_monotone(
            d1 in -5.0f64..5.0,
            d2 in -5.0f64..5.0,
            r in 1.0001f64..1e6,
            p in 0.5f64..4.0,
            k in 1e-6f64..1.0,
        ) {
            let kernels = [
                KernelSpec::exp_base(r),
                KernelSpec::exp_base_shifted(r, k),
                KernelSpec::inverse_power_shifted(p, k),
                KernelSpec::uniform(),
            ];
            for kern in &kernels {
                let w1 = kern.weight(&[d1]).unwrap();
                let w1_neg = kern.weight(&[-d1]).unwrap();
                prop_assert_eq!(w1, w1_neg); // symmetry is exact
                prop_assert!(w1.is_finite() && w1 > 0.0);
                // monotone nonincreasing in |delta|
                let (near, far) = if d1.abs() <= d2.abs() { (d1, d2) } else { (d2, d1) };
                let wn = kern.weight(&[near]).unwrap();
                let wf = kern.weight(&[far]).unwrap();
                prop_assert!(wn >= wf);
            }
        }

        #[test]
        fn exp_base_weight_decreases_in_r(d in 0.01f64..5.0) {
            let rs = [1.0001, 1.2, 2.0, 2000.0];
            let ws: Vec<f64> = rs
                .iter()
                .map(|&r| KernelSpec::exp_base(r).weight(&[d]).unwrap())
                .collect();
            for pair in ws.windows(2) {
                prop_assert!(pair[0] > pair[1]);
            }
        }
    }
}
