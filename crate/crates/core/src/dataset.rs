//! Samples, datasets, CSV I/O, synthetic data, and normalization.
//!
//! A [`Dataset`] is a list of samples with a fixed predictor dimension `b`.
//! CSV files carry one header row; on load, the response column is picked
//! by name and every other column becomes a predictor (in header order).
//! Floats are written in shortest round-trip form, so
//! `load_csv(write_csv(ds))` reproduces `ds` exactly.
//!
//! Synthetic data follows a fixed recipe: predictors drawn uniformly from
//! the domain box, response `f(x) * M` with `M` uniform in the noise range.
//! The draw order (per sample: predictor coordinates in dimension order,
//! then the multiplier) is part of the reproducibility contract along with
//! the [`crate::rng`] generator.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::stats;

/// One observation: predictor vector `x` and response `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: f64) -> Self {
        Sample { x, y }
    }
}

/// A list of samples sharing one predictor dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    samples: Vec<Sample>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: Box<csv::Error>,
    },
    #[error("row {row}, column {column:?}: cannot parse {value:?} as a finite number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("duplicate header name {name:?}")]
    DuplicateHeader { name: String },
    #[error("response column {name:?} not found; available columns: {available:?}")]
    MissingResponseColumn { name: String, available: Vec<String> },
    #[error("CSV has a header but no data rows")]
    EmptyData,
    #[error("CSV needs at least one predictor column besides the response")]
    NoPredictorColumns,
    #[error("sample {index} has {got} predictors, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("dataset has no samples")]
    NoSamples,
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("column {column} has zero spread; cannot normalize it")]
    ZeroSpread { column: usize },
    #[error("column index {column} out of range (predictors 0..{dim}, response {dim})")]
    ColumnOutOfRange { column: usize, dim: usize },
    #[error("column index {column} requested twice")]
    DuplicateColumn { column: usize },
}

impl Dataset {
    /// Builds a dataset from samples, inferring the dimension from the
    /// first one. All samples must agree on the dimension.
    pub fn new(samples: Vec<Sample>) -> Result<Self, DatasetError> {
        let first = samples.first().ok_or(DatasetError::NoSamples)?;
        let dim = first.x.len();
        for (index, s) in samples.iter().enumerate() {
            if s.x.len() != dim {
                return Err(DatasetError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: s.x.len(),
                });
            }
        }
        Ok(Dataset { dim, samples })
    }

    /// An empty dataset with an explicit dimension (useful for exercising
    /// empty-input error paths).
    pub fn empty(dim: usize) -> Self {
        Dataset { dim, samples: Vec::new() }
    }

    /// Convenience constructor for univariate data.
    pub fn from_xy(xs: &[f64], ys: &[f64]) -> Self {
        assert_eq!(xs.len(), ys.len(), "from_xy needs equal-length slices");
        Dataset {
            dim: 1,
            samples: xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| Sample::new(vec![x], y))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Predictor dimension `b`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Responses in dataset order.
    pub fn responses(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y).collect()
    }

    /// New dataset containing the samples at `indices` (in that order).
    pub fn subset(&self, indices: &[usize]) -> Self {
        Dataset {
            dim: self.dim,
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

/// Loads a dataset from a comma-separated UTF-8 file with a header row.
/// `response_column` names the response; every other column is a predictor,
/// in header order. Cells must parse as finite numbers.
pub fn load_csv(path: &Path, response_column: &str) -> Result<Dataset, DatasetError> {
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DatasetError::Csv {
            path: path.to_path_buf(),
            source: Box::new(e),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();

    for (i, name) in headers.iter().enumerate() {
        if headers[..i].iter().any(|other| other == name) {
            return Err(DatasetError::DuplicateHeader { name: name.clone() });
        }
    }

    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| DatasetError::MissingResponseColumn {
            name: response_column.to_string(),
            available: headers.clone(),
        })?;
    if headers.len() < 2 {
        return Err(DatasetError::NoPredictorColumns);
    }

    let mut samples = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DatasetError::Csv {
            path: path.to_path_buf(),
            source: Box::new(e),
        })?;
        let parse = |cell: &str, column: &str| -> Result<f64, DatasetError> {
            let bad = || DatasetError::BadCell {
                row: row_idx + 1,
                column: column.to_string(),
                value: cell.to_string(),
            };
            let v: f64 = cell.parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        let mut x = Vec::with_capacity(headers.len() - 1);
        let mut y = 0.0;
        for (col_idx, cell) in record.iter().enumerate() {
            let name = &headers[col_idx];
            let v = parse(cell, name)?;
            if col_idx == response_idx {
                y = v;
            } else {
                x.push(v);
            }
        }
        samples.push(Sample::new(x, y));
    }
    if samples.is_empty() {
        return Err(DatasetError::EmptyData);
    }
    Dataset::new(samples)
}

/// Writes a dataset as CSV. Header is `x,y` for univariate data and
/// `d1,..,db,y` otherwise; floats use shortest round-trip formatting so a
/// reload reproduces the values exactly.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<(), DatasetError> {
    let io_err = |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let mut line = String::new();
    if dataset.dim() == 1 {
        line.push_str("x,y");
    } else {
        for a in 1..=dataset.dim() {
            line.push_str(&format!("d{a},"));
        }
        line.push('y');
    }
    writeln!(w, "{line}").map_err(io_err)?;
    for s in dataset.samples() {
        line.clear();
        for v in &s.x {
            line.push_str(&format!("{v},"));
        }
        line.push_str(&format!("{}", s.y));
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Ground-truth function for synthetic data. Univariate; for
/// multi-dimensional domains it is applied to the coordinate sum (which
/// reduces to `f(x)` in one dimension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFunction {
    Square,
    Sine,
    Linear,
    /// Polynomial with the given coefficients, constant term first.
    Poly(Vec<f64>),
}

impl TargetFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TargetFunction::Square => t * t,
            TargetFunction::Sine => t.sin(),
            TargetFunction::Linear => t,
            TargetFunction::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck),
        }
    }

    /// Evaluates at a predictor vector (sum of coordinates, see above).
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.eval(x.iter().sum())
    }
}

/// Recipe for a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub target_function: TargetFunction,
    pub n: usize,
    /// One closed interval per predictor dimension.
    pub domain: Vec<(f64, f64)>,
    /// Multiplicative noise range `[lo, hi]`; the response is
    /// `f(x) * M` with `M` uniform in this range.
    pub noise: (f64, f64),
    pub seed: u64,
}

impl SynthSpec {
    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let err = |msg: String| Err(DatasetError::InvalidSpec(msg));
        if self.n == 0 {
            return err("n must be at least 1".into());
        }
        if self.domain.is_empty() {
            return err("domain needs at least one interval".into());
        }
        for (a, &(lo, hi)) in self.domain.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return err(format!("domain interval {a} must be finite with lo <= hi, got [{lo}, {hi}]"));
            }
        }
        let (nlo, nhi) = self.noise;
        if !nlo.is_finite() || !nhi.is_finite() || nlo > nhi {
            return err(format!("noise range must be finite with lo <= hi, got [{nlo}, {nhi}]"));
        }
        if let TargetFunction::Poly(c) = &self.target_function {
            if c.is_empty() {
                return err("poly target needs at least one coefficient".into());
            }
            if c.iter().any(|v| !v.is_finite()) {
                return err("poly coefficients must be finite".into());
            }
        }
        Ok(())
    }
}

/// Generates a synthetic dataset: predictors uniform in the domain box,
/// response `f(x) * M` with `M` uniform in the noise range. Fully
/// determined by `spec.seed`.
pub fn gen_synthetic(spec: &SynthSpec) -> Result<Dataset, DatasetError> {
    gen_synthetic_with_multipliers(spec).map(|(ds, _)| ds)
}

/// Like [`gen_synthetic`], but also returns the noise multiplier `M` used
/// for each sample — the ground truth that noise-recovery checks compare
/// against.
pub fn gen_synthetic_with_multipliers(
    spec: &SynthSpec,
) -> Result<(Dataset, Vec<f64>), DatasetError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut samples = Vec::with_capacity(spec.n);
    let mut multipliers = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let x: Vec<f64> = spec
            .domain
            .iter()
            .map(|&(lo, hi)| rng.uniform_in(lo, hi))
            .collect();
        let m = rng.uniform_in(spec.noise.0, spec.noise.1);
        let y = spec.target_function.eval_point(&x) * m;
        samples.push(Sample::new(x, y));
        multipliers.push(m);
    }
    Ok((Dataset::new(samples)?, multipliers))
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeMode {
    None,
    /// `(v - mean) / population_std`.
    Zscore,
    /// `(v - min) / (max - min)`.
    Minmax,
}

/// Per-column affine transform captured by [`normalize`]:
/// `normalized = (value - offset) / scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnTransform {
    /// Column index: `0..b` are predictors, `b` is the response.
    pub column: usize,
    pub offset: f64,
    pub scale: f64,
}

fn column_values(ds: &Dataset, column: usize) -> Vec<f64> {
    if column == ds.dim() {
        ds.responses()
    } else {
        ds.samples().iter().map(|s| s.x[column]).collect()
    }
}

fn apply_to_column(ds: &mut Dataset, column: usize, f: impl Fn(f64) -> f64) {
    for s in &mut ds.samples {
        if column == ds.dim {
            s.y = f(s.y);
        } else {
            s.x[column] = f(s.x[column]);
        }
    }
}

/// Normalizes the selected columns (indices `0..b` for predictors, `b` for
/// the response) and returns the transformed dataset together with the
/// per-column parameters needed to invert the map.
pub fn normalize(
    ds: &Dataset,
    mode: NormalizeMode,
    columns: &[usize],
) -> Result<(Dataset, Vec<ColumnTransform>), DatasetError> {
    if ds.is_empty() {
        return Err(DatasetError::NoSamples);
    }
    for (i, &c) in columns.iter().enumerate() {
        if c > ds.dim() {
            return Err(DatasetError::ColumnOutOfRange { column: c, dim: ds.dim() });
        }
        if columns[..i].contains(&c) {
            return Err(DatasetError::DuplicateColumn { column: c });
        }
    }

    let mut out = ds.clone();
    let mut transforms = Vec::with_capacity(columns.len());
    for &column in columns {
        let values = column_values(ds, column);
        let (offset, scale) = match mode {
            NormalizeMode::None => (0.0, 1.0),
            NormalizeMode::Zscore => {
                let m = stats::mean(&values);
                let sd = stats::population_variance(&values).sqrt();
                if sd == 0.0 {
                    return Err(DatasetError::ZeroSpread { column });
                }
                (m, sd)
            }
            NormalizeMode::Minmax => {
                let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if hi - lo == 0.0 {
                    return Err(DatasetError::ZeroSpread { column });
                }
                (lo, hi - lo)
            }
        };
        apply_to_column(&mut out, column, |v| (v - offset) / scale);
        transforms.push(ColumnTransform { column, offset, scale });
    }
    Ok((out, transforms))
}

/// Inverts [`normalize`]: applies `value * scale + offset` per recorded
/// column transform.
pub fn denormalize(ds: &Dataset, transforms: &[ColumnTransform]) -> Result<Dataset, DatasetError> {
    let mut out = ds.clone();
    for t in transforms {
        if t.column > ds.dim() {
            return Err(DatasetError::ColumnOutOfRange { column: t.column, dim: ds.dim() });
        }
        apply_to_column(&mut out, t.column, |v| v * t.scale + t.offset);
    }
    Ok(out)
}
