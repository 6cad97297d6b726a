//! Command-line surface for the pointwise regression toolkit: synthetic
//! data generation, curve fitting, kernel tuning, benchmarking, and
//! plot-data emission.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pointwise::benchmark::{percent_advantage, write_report, BenchConfig};
use pointwise::dataset::{gen_synthetic, load_csv, write_csv, SynthSpec, TargetFunction};
use pointwise::estimator::{linspace, predict_at, predict_grid, write_curve_csv};
use pointwise::kernels::{KernelSpec, MultidimMode};
use pointwise::run_benchmark;
use pointwise::tuning::{
    iterate_randomness, tune_r, tune_two_param, TuningError, TuningResult, DEFAULT_DAMPING,
    DEFAULT_LAMBDA_FIT, DEFAULT_LAMBDA_VAR, DEFAULT_MAX_ROUNDS, DEFAULT_Q_BOUNDS,
    DEFAULT_R_BOUNDS,
};
use pointwise::{Dataset, ExactMatchPolicy};

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

enum CliError {
    /// Bad flags or parameter validation: exit 2.
    Usage(String),
    /// Failure while doing the work (I/O, degenerate data): exit 1.
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn runtime(msg: impl std::fmt::Display) -> Self {
        CliError::Runtime(msg.to_string())
    }
}

/// Tuning errors split by blame: parameter problems are usage errors, data
/// problems are runtime errors.
impl From<TuningError> for CliError {
    fn from(e: TuningError) -> Self {
        match e {
            TuningError::BadParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

// ---------------------------------------------------------------------------
// Flag grammar
// ---------------------------------------------------------------------------

/// "lo,hi" pair of reals.
fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi but got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    Ok((lo, hi))
}

/// "start:end:count" inclusive grid request.
#[derive(Clone, Copy, Debug)]
struct GridSpec {
    start: f64,
    end: f64,
    count: usize,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:end:count but got {s:?}"));
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("bad number {:?}", parts[0]))?;
    let end: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("bad number {:?}", parts[1]))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("bad count {:?}", parts[2]))?;
    if count == 0 {
        return Err("grid count must be at least 1".into());
    }
    if !(start.is_finite() && end.is_finite()) {
        return Err("grid endpoints must be finite".into());
    }
    Ok(GridSpec { start, end, count })
}

/// Comma-separated list of reals (polynomial coefficients).
fn parse_coeffs(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad coefficient {c:?}"))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FnFlag {
    Square,
    Sine,
    Linear,
    Poly,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyFlag {
    Uniform,
    InversePower,
    InversePowerShifted,
    ExpBase,
    ExpBaseShifted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeFlag {
    Sum,
    Product,
}

impl From<ModeFlag> for MultidimMode {
    fn from(m: ModeFlag) -> Self {
        match m {
            ModeFlag::Sum => MultidimMode::Sum,
            ModeFlag::Product => MultidimMode::Product,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TuneMode {
    Variance,
    Iterate,
    TwoParam,
}

/// Kernel selection shared by `fit` and `plotdata`: either inline flags or
/// a full JSON spec.
#[derive(Args, Debug)]
struct KernelFlags {
    /// Kernel family.
    #[arg(long, value_enum)]
    family: Option<FamilyFlag>,
    /// Power p for the inverse-power families (default 2).
    #[arg(long)]
    p: Option<f64>,
    /// Denominator shift: k for inverse-power-shifted, q for
    /// exp-base-shifted (default 0).
    #[arg(long)]
    shift: Option<f64>,
    /// Base r for the exponential families; must exceed 1.
    #[arg(long)]
    r: Option<f64>,
    /// How multi-dimensional squared distances combine.
    #[arg(long, value_enum, default_value = "sum")]
    mode: ModeFlag,
    /// Full kernel spec as inline JSON instead of the flags above.
    #[arg(long, conflicts_with_all = ["family", "p", "shift", "r"])]
    kernel_json: Option<String>,
}

impl KernelFlags {
    fn build(&self) -> Result<KernelSpec, CliError> {
        let kernel = if let Some(text) = &self.kernel_json {
            serde_json::from_str::<KernelSpec>(text)
                .map_err(|e| CliError::usage(format!("bad --kernel-json: {e}")))?
        } else {
            let family = self.family.ok_or_else(|| {
                CliError::usage("select a kernel with --family or --kernel-json")
            })?;
            let spec = match family {
                FamilyFlag::Uniform => KernelSpec::uniform(),
                FamilyFlag::InversePower => KernelSpec::inverse_power(self.p.unwrap_or(2.0)),
                FamilyFlag::InversePowerShifted => KernelSpec::inverse_power_shifted(
                    self.p.unwrap_or(2.0),
                    self.shift.unwrap_or(0.0),
                ),
                FamilyFlag::ExpBase => {
                    let r = self
                        .r
                        .ok_or_else(|| CliError::usage("exp-base needs --r"))?;
                    KernelSpec::exp_base(r)
                }
                FamilyFlag::ExpBaseShifted => {
                    let r = self
                        .r
                        .ok_or_else(|| CliError::usage("exp-base-shifted needs --r"))?;
                    KernelSpec::exp_base_shifted(r, self.shift.unwrap_or(0.0))
                }
            };
            spec.with_mode(self.mode.into())
        };
        kernel
            .validate()
            .map_err(|e| CliError::usage(e.to_string()))?;
        Ok(kernel)
    }
}

// ---------------------------------------------------------------------------
// Command tree
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "pointwise",
    version,
    about = "Distance-weighted pointwise regression toolkit"
)]
struct Cli {
    /// Worker threads for grid evaluation (outputs are identical at any
    /// thread count).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset CSV and echo the resolved spec as JSON.
    Gen(GenArgs),
    /// Fit a prediction curve over a query grid and write it as CSV.
    Fit(FitArgs),
    /// Like fit, plus a CSV of given points and in-sample estimates for
    /// plotting.
    Plotdata(PlotdataArgs),
    /// Tune kernel parameters on a dataset and write the result as JSON.
    Tune(TuneArgs),
    /// Run a benchmark config, or print the percent advantage for a pair of
    /// errors.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Target function.
    #[arg(long = "fn", value_enum)]
    target: FnFlag,
    /// Polynomial coefficients c0,c1,... (poly target only).
    #[arg(long, value_parser = parse_coeffs, required_if_eq("target", "poly"))]
    coeffs: Option<Vec<f64>>,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    /// Predictor domain as lo,hi.
    #[arg(long, value_parser = parse_pair, default_value = "0,1")]
    domain: (f64, f64),
    /// Multiplicative noise range as lo,hi (1,1 means noiseless).
    #[arg(long, value_parser = parse_pair, default_value = "1,1")]
    noise: (f64, f64),
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Input dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Response column name.
    #[arg(long, default_value = "y")]
    response: String,
    #[command(flatten)]
    kernel: KernelFlags,
    /// Query grid as start:end:count (both endpoints included).
    #[arg(long, value_parser = parse_grid)]
    grid: GridSpec,
    /// Output curve CSV path.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PlotdataArgs {
    #[command(flatten)]
    fit: FitArgs,
    /// Output CSV of raw points with a role column (given | estimate).
    #[arg(long)]
    points_out: PathBuf,
}

#[derive(Args, Debug)]
struct TuneArgs {
    /// Input dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Response column name.
    #[arg(long, default_value = "y")]
    response: String,
    /// Tuning mode.
    #[arg(long, value_enum)]
    mode: TuneMode,
    /// Kernel family to tune (variance/iterate modes; two-param always
    /// tunes exp-base-shifted).
    #[arg(long, value_enum, default_value = "exp-base")]
    family: FamilyFlag,
    /// Fixed shift q when tuning exp-base-shifted in variance/iterate
    /// modes.
    #[arg(long, default_value_t = 0.0)]
    shift: f64,
    /// Target explained fraction of the response variance (variance mode).
    #[arg(long, default_value_t = 1.0)]
    ef: f64,
    /// Lower bound for r.
    #[arg(long, default_value_t = DEFAULT_R_BOUNDS.0)]
    r_lo: f64,
    /// Upper bound for r.
    #[arg(long, default_value_t = DEFAULT_R_BOUNDS.1)]
    r_hi: f64,
    /// Maximum iteration rounds (iterate mode).
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    rounds: usize,
    /// Damping factor for the explained-fraction update (iterate mode).
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    alpha: f64,
    /// Lower bound for q (two-param mode).
    #[arg(long, default_value_t = DEFAULT_Q_BOUNDS.0)]
    q_lo: f64,
    /// Upper bound for q (two-param mode).
    #[arg(long, default_value_t = DEFAULT_Q_BOUNDS.1)]
    q_hi: f64,
    /// Weight of the variance-match term (two-param mode).
    #[arg(long, default_value_t = DEFAULT_LAMBDA_VAR)]
    lambda_var: f64,
    /// Weight of the fit term (two-param mode).
    #[arg(long, default_value_t = DEFAULT_LAMBDA_FIT)]
    lambda_fit: f64,
    /// Output JSON path for the tuning result.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Benchmark config JSON path.
    #[arg(long, required_unless_present = "print_advantage")]
    config: Option<PathBuf>,
    /// Directory for report.json and predictions.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Print the percent advantage for (baseline error, new error) and
    /// exit.
    #[arg(long, num_args = 2, value_names = ["ERR_BASE", "ERR_NEW"])]
    print_advantage: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Command bodies
// ---------------------------------------------------------------------------

fn cmd_gen(args: &GenArgs) -> CliResult {
    let target_function = match args.target {
        FnFlag::Square => TargetFunction::Square,
        FnFlag::Sine => TargetFunction::Sine,
        FnFlag::Linear => TargetFunction::Linear,
        FnFlag::Poly => TargetFunction::Poly(args.coeffs.clone().unwrap_or_default()),
    };
    let spec = SynthSpec {
        target_function,
        n: args.n,
        domain: vec![args.domain],
        noise: args.noise,
        seed: args.seed,
    };
    // Spec problems are flag problems: validate before generating.
    spec.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let ds = gen_synthetic(&spec).map_err(CliError::runtime)?;
    write_csv(&ds, &args.out).map_err(CliError::runtime)?;
    let echo = serde_json::to_string_pretty(&spec).map_err(CliError::runtime)?;
    println!("{echo}");
    Ok(())
}

fn load_data(path: &Path, response: &str) -> Result<Dataset, CliError> {
    load_csv(path, response).map_err(CliError::runtime)
}

fn fit_curve(args: &FitArgs) -> Result<(Dataset, KernelSpec), CliError> {
    let kernel = args.kernel.build()?;
    let ds = load_data(&args.data, &args.response)?;
    if ds.dim() != 1 {
        return Err(CliError::usage(format!(
            "--grid describes a one-dimensional query grid but the data has \
             {} predictor columns",
            ds.dim()
        )));
    }
    let grid: Vec<Vec<f64>> = linspace(args.grid.start, args.grid.end, args.grid.count)
        .into_iter()
        .map(|v| vec![v])
        .collect();
    let curve = predict_grid(&ds, &kernel, &grid, ExactMatchPolicy::MeanOfMatches)
        .map_err(CliError::runtime)?;
    write_curve_csv(&curve, &args.out).map_err(CliError::runtime)?;
    println!(
        "fit {} points with {} over [{}, {}] x {} -> {}",
        ds.len(),
        kernel.describe(),
        args.grid.start,
        args.grid.end,
        args.grid.count,
        args.out.display()
    );
    Ok((ds, kernel))
}

fn cmd_fit(args: &FitArgs) -> CliResult {
    fit_curve(args).map(|_| ())
}

fn cmd_plotdata(args: &PlotdataArgs) -> CliResult {
    let (ds, kernel) = fit_curve(&args.fit)?;
    // Given points first, then the in-sample estimates at the same
    // predictors, mirroring the given/estimate plotting convention.
    let mut text = String::new();
    for d in 1..=ds.dim() {
        let _ = write!(text, "d{d},");
    }
    text.push_str("y,role\n");
    for s in ds.samples() {
        for v in &s.x {
            let _ = write!(text, "{v},");
        }
        let _ = writeln!(text, "{},given", s.y);
    }
    for s in ds.samples() {
        let z = predict_at(&ds, &kernel, &s.x, ExactMatchPolicy::MeanOfMatches)
            .map_err(CliError::runtime)?;
        for v in &s.x {
            let _ = write!(text, "{v},");
        }
        let _ = writeln!(text, "{z},estimate");
    }
    std::fs::write(&args.points_out, text.as_bytes())
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.points_out.display())))?;
    println!("points -> {}", args.points_out.display());
    Ok(())
}

fn cmd_tune(args: &TuneArgs) -> CliResult {
    let ds = load_data(&args.data, &args.response)?;
    let r_bounds = (args.r_lo, args.r_hi);
    let family = |r: f64| -> KernelSpec {
        match args.family {
            FamilyFlag::ExpBaseShifted => KernelSpec::exp_base_shifted(r, args.shift),
            _ => KernelSpec::exp_base(r),
        }
    };
    let result: TuningResult = match args.mode {
        TuneMode::Variance | TuneMode::Iterate => {
            if !matches!(
                args.family,
                FamilyFlag::ExpBase | FamilyFlag::ExpBaseShifted
            ) {
                return Err(CliError::usage(
                    "tuning searches the exponential families; pick --family \
                     exp-base or exp-base-shifted",
                ));
            }
            match args.mode {
                TuneMode::Variance => tune_r(&ds, family, r_bounds, args.ef)?,
                _ => iterate_randomness(&ds, family, args.rounds, args.alpha)?,
            }
        }
        TuneMode::TwoParam => {
            if !matches!(
                args.family,
                FamilyFlag::ExpBase | FamilyFlag::ExpBaseShifted
            ) {
                return Err(CliError::usage(
                    "two-param mode tunes exp-base-shifted; pick --family \
                     exp-base or exp-base-shifted",
                ));
            }
            if args.shift != 0.0 {
                return Err(CliError::usage(
                    "two-param mode searches the shift itself; --shift \
                     cannot be fixed",
                ));
            }
            tune_two_param(
                &ds,
                r_bounds,
                (args.q_lo, args.q_hi),
                args.lambda_var,
                args.lambda_fit,
            )?
        }
    };
    let json = serde_json::to_string_pretty(&result).map_err(CliError::runtime)?;
    std::fs::write(&args.out, json.as_bytes())
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "tuned {} | variance ratio {:.6} | explained fraction {:.6} | rounds {} | converged {}",
        result.kernel.describe(),
        result.variance_ratio,
        result.explained_fraction,
        result.rounds.len(),
        result.converged
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CliResult {
    if let Some(pair) = &args.print_advantage {
        let adv = percent_advantage(pair[0], pair[1])
            .map_err(|e| CliError::usage(e.to_string()))?;
        println!("{adv:.5}");
        return Ok(());
    }
    let path = args.config.as_ref().expect("required_unless_present");
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let config: BenchConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))?;
    let report = run_benchmark(&config).map_err(CliError::runtime)?;
    let report_path = write_report(&report, &args.out_dir).map_err(CliError::runtime)?;
    println!(
        "pointwise mae {:.6} rmse {:.6} | lasso mae {:.6} rmse {:.6} | advantage {:.5}% -> {}",
        report.pointwise.mae,
        report.pointwise.rmse,
        report.lasso.mae,
        report.lasso.rmse,
        report.percent_advantage,
        report_path.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        // Outputs do not depend on the pool size; ignore re-initialization.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Plotdata(args) => cmd_plotdata(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
