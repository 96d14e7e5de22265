//! Command-line surface for `geomeas`: evaluate the measure, write contour grids,
//! build decompositions and compare the formulas with the numerical routes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use geomeas::decomposition::{decomposition_for, average_entanglement, verify_decomposition};
use geomeas::ghz::{build_state, deltoid_margin, DELTOID_SLACK};
use geomeas::measure::{
    bures_from_value, closed_form_lower_cathetus, closed_form_measure, groverian_from_value,
    measure_via_fidelity_obs4, measure_via_legendre_2d,
};
use geomeas::oracle::{convex_roof_upper_bound, OracleConfig};
use geomeas::sampling::seeded_rng;
use geomeas::{eval_measure, GhzParams, MeasureResult, Method, Optimizer, SeparabilityClass};

/// Tolerance for formula vs. Legendre-grid agreement.
pub const LEGENDRE_TOL: f64 = 1e-6;
/// Tolerance for formula vs. fidelity-route agreement.
pub const FIDELITY_TOL: f64 = 1e-8;
/// Slack for class monotonicity and the oracle sandwich.
pub const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Comparison(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Verification(_) => 5,
            CliError::Comparison(_) => 6,
        }
    }
}

impl From<geomeas::Error> for CliError {
    fn from(e: geomeas::Error) -> Self {
        use geomeas::Error as E;
        match e {
            E::Domain(_) => CliError::Domain(e.to_string()),
            E::Verification { .. } | E::NotConverged { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn stdout_error(source: io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source }
}

#[derive(Debug, Parser)]
#[command(name = "geomeas", version, about = "Geometric measure of entanglement for GHZ-symmetric states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E_G^(k) at one point of the triangle
    Eval(EvalArgs),
    /// Write E_G^(k) on a triangular grid as CSV or JSON
    Contour(ContourArgs),
    /// Build and verify the pure-state ensemble on the f- = 0 edge (three qubits)
    Decompose(DecomposeArgs),
    /// Compare the formulas with the numerical routes on random points
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodFlag {
    Auto,
    Closed,
    Obs1,
    Obs2,
    Obs3,
    Obs4,
    Legendre2d,
    Oracle,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Number of qubits
    #[arg(short = 'n', long, default_value_t = 3)]
    pub n_qubits: usize,
    /// Fidelity with |GHZ+>
    #[arg(long = "fp", allow_negative_numbers = true)]
    pub f_plus: f64,
    /// Fidelity with |GHZ->
    #[arg(long = "fm", allow_negative_numbers = true, default_value_t = 0.0)]
    pub f_minus: f64,
    /// Separability class (defaults to n)
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodFlag::Auto)]
    pub method: MethodFlag,
    /// Pre-scan points per axis for legendre2d
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Random ensembles for the oracle method
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Ensemble size for the oracle method (defaults to 2^n)
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Grid request for `contour`.
#[derive(Debug, Args)]
pub struct ContourArgs {
    #[arg(short = 'n', long, default_value_t = 3)]
    pub n_qubits: usize,
    /// Comma-separated classes (defaults to n)
    #[arg(short = 'k', long = "classes", value_delimiter = ',')]
    pub classes: Vec<usize>,
    /// Grid points per axis, at least 2
    #[arg(short = 'r', long, default_value_t = 51)]
    pub resolution: usize,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Fidelity with |GHZ+>, in [1/4, 1]
    #[arg(long = "fp", allow_negative_numbers = true)]
    pub f_plus: f64,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
    /// See-saw restarts per ensemble element
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(short = 'n', long, default_value_t = 3)]
    pub n_qubits: usize,
    /// Comma-separated classes (defaults to 2..=n)
    #[arg(short = 'k', long = "classes", value_delimiter = ',')]
    pub classes: Vec<usize>,
    #[arg(short = 's', long, default_value_t = 100)]
    pub samples: usize,
    /// Points also checked against the convex-roof upper bound
    #[arg(long, default_value_t = 3)]
    pub oracle_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pre-scan points per axis for legendre2d
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

/// Twelve significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Contour(a) => cmd_contour(&a).map(|_| ()),
        Command::Decompose(a) => cmd_decompose(&a, out),
        Command::Compare(a) => cmd_compare(&a, out).map(|_| ()),
    }
}

fn class_for(n: usize, k: Option<usize>) -> Result<SeparabilityClass, CliError> {
    Ok(SeparabilityClass::new(k.unwrap_or(n), n)?)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond { Ok(()) } else { Err(CliError::Usage(msg())) }
}

/// Evaluates one point with the requested method.
pub fn evaluate(a: &EvalArgs) -> Result<MeasureResult, CliError> {
    let params = GhzParams::new(a.n_qubits, a.f_plus, a.f_minus)?;
    let cls = class_for(a.n_qubits, a.k)?;
    let k = cls.k();
    let result = match a.method {
        MethodFlag::Auto => eval_measure(params, cls)?,
        MethodFlag::Closed => closed_form_measure(params, cls)?.ok_or_else(|| {
            CliError::Domain("no closed form at this point; use --method auto".into())
        })?,
        MethodFlag::Obs1 => {
            require(a.n_qubits == 3 && k == 3, || "obs1 needs n = 3 and k = 3".into())?;
            eval_measure(params, cls)?
        }
        MethodFlag::Obs2 => {
            require(k >= 3, || "obs2 needs k >= 3".into())?;
            eval_measure(params, cls)?
        }
        MethodFlag::Obs3 => {
            require(k == 2, || "obs3 needs k = 2".into())?;
            eval_measure(params, cls)?
        }
        MethodFlag::Obs4 => {
            require(a.n_qubits == 3 && k == 3, || "obs4 needs n = 3 and k = 3".into())?;
            measure_via_fidelity_obs4(params)?
        }
        MethodFlag::Legendre2d => {
            require(k >= 3, || "legendre2d needs k >= 3".into())?;
            measure_via_legendre_2d(params, cls, a.grid)?
        }
        MethodFlag::Oracle => {
            require(a.n_qubits <= 4, || "the oracle is limited to n <= 4".into())?;
            let rho = build_state(params)?;
            let cfg = OracleConfig { restarts: a.restarts, seed: a.seed, ..OracleConfig::default() };
            let size = a.ensemble.unwrap_or(1 << a.n_qubits);
            let value = convex_roof_upper_bound(&rho, k, size, &cfg)?;
            MeasureResult { value, optimizer: Optimizer::default(), method: Method::ConvexRoof }
        }
    };
    Ok(result)
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let r = evaluate(a)?;
    let mut text = format!("value: {}\nmethod: {}\n", fmt_num(r.value), r.method);
    if let Some(mu) = r.optimizer.mu {
        text += &format!("mu: {}\n", fmt_num(mu));
    }
    if let Some(nu) = r.optimizer.nu {
        text += &format!("nu: {}\n", fmt_num(nu));
    }
    text += &format!(
        "bures: {}\ngroverian: {}\n",
        fmt_num(bures_from_value(r.value)),
        fmt_num(groverian_from_value(r.value))
    );
    out.write_all(text.as_bytes()).map_err(stdout_error)
}

/// One contour row.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourRow {
    pub f_plus: f64,
    pub f_minus: f64,
    pub k: usize,
    pub value: f64,
}

#[derive(Serialize)]
struct JsonRow {
    f_plus: String,
    f_minus: String,
    k: usize,
    value: String,
}

/// In-triangle grid points `(i, j)/(r - 1)` with `i + j <= r - 1`, `f⁺` outer.
pub fn triangle_grid(resolution: usize) -> Vec<(f64, f64)> {
    let m = resolution - 1;
    let step = |i: usize| i as f64 / m as f64;
    (0..=m).flat_map(|i| (0..=m - i).map(move |j| (step(i), step(j)))).collect()
}

/// Values of every requested class on the grid, in output order.
pub fn contour_rows(n: usize, classes: &[usize], resolution: usize) -> Result<Vec<ContourRow>, CliError> {
    require(resolution >= 2, || format!("resolution must be >= 2, got {resolution}"))?;
    let mut ks: Vec<usize> = if classes.is_empty() { vec![n] } else { classes.to_vec() };
    ks.sort_unstable();
    ks.dedup();
    let classes: Vec<SeparabilityClass> =
        ks.iter().map(|&k| SeparabilityClass::new(k, n)).collect::<Result<_, _>>()?;
    GhzParams::new(n, 0.0, 0.0)?;
    let points = triangle_grid(resolution);
    let rows: Result<Vec<Vec<ContourRow>>, geomeas::Error> = points
        .par_iter()
        .map(|&(fp, fm)| {
            let params = GhzParams::new(n, fp, fm)?;
            classes
                .iter()
                .map(|&cls| {
                    let value = eval_measure(params, cls)?.value;
                    Ok(ContourRow { f_plus: fp, f_minus: fm, k: cls.k(), value })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub fn render_csv(rows: &[ContourRow]) -> String {
    let mut s = String::from("f_plus,f_minus,k,value\n");
    for r in rows {
        s += &format!("{},{},{},{}\n", fmt_num(r.f_plus), fmt_num(r.f_minus), r.k, fmt_num(r.value));
    }
    s
}

pub fn render_json(rows: &[ContourRow]) -> String {
    let recs: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            f_plus: fmt_num(r.f_plus),
            f_minus: fmt_num(r.f_minus),
            k: r.k,
            value: fmt_num(r.value),
        })
        .collect();
    serde_json::to_string_pretty(&recs).expect("rows serialize") + "\n"
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes the grid and returns the number of rows.
pub fn cmd_contour(a: &ContourArgs) -> Result<usize, CliError> {
    let rows = contour_rows(a.n_qubits, &a.classes, a.resolution)?;
    let body = match a.format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&rows),
    };
    write_file(&a.output, &body)?;
    Ok(rows.len())
}

#[derive(Serialize)]
struct JsonElement {
    weight: String,
    amplitudes: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct JsonDecomposition {
    f_plus: String,
    elements: Vec<JsonElement>,
    residual: String,
    average_entanglement: String,
    formula: String,
}

pub fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let fp = a.f_plus;
    require((0.25..=1.0).contains(&fp), || {
        format!("f+ = {fp} outside [1/4, 1]; below 1/4 the state is fully separable")
    })?;
    let dec = decomposition_for(fp)?;
    let target = build_state(GhzParams::new(3, fp, 0.0)?)?;
    let residual = verify_decomposition(&dec, &target)?;
    let cfg = OracleConfig { restarts: a.restarts, seed: a.seed, ..OracleConfig::default() };
    let average = average_entanglement(&dec, 3, &cfg)?;
    let doc = JsonDecomposition {
        f_plus: fmt_num(fp),
        elements: dec
            .iter()
            .map(|(w, psi)| JsonElement {
                weight: fmt_num(*w),
                amplitudes: psi.amplitudes().iter().map(|c| [fmt_num(c.re), fmt_num(c.im)]).collect(),
            })
            .collect(),
        residual: fmt_num(residual),
        average_entanglement: fmt_num(average),
        formula: fmt_num(closed_form_lower_cathetus(fp)?),
    };
    write_file(&a.output, &(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"))?;
    writeln!(
        out,
        "elements: {}\nresidual: {}\naverage_entanglement: {}",
        dec.len(),
        fmt_num(residual),
        fmt_num(average)
    )
    .map_err(stdout_error)
}

/// Maximum deviations found by `compare`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompareReport {
    pub samples: usize,
    pub max_legendre_dev: f64,
    pub max_fidelity_dev: f64,
    pub fidelity_points: usize,
    pub monotonicity_violations: usize,
    pub sandwich_violations: usize,
    pub oracle_points: usize,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.max_legendre_dev < LEGENDRE_TOL
            && self.max_fidelity_dev < FIDELITY_TOL
            && self.monotonicity_violations == 0
            && self.sandwich_violations == 0
    }
}

/// Uniform point of the triangle `f⁺, f⁻ >= 0`, `f⁺ + f⁻ <= 1`.
pub fn random_triangle_point(rng: &mut impl Rng) -> (f64, f64) {
    let (u, v): (f64, f64) = (rng.random(), rng.random());
    if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) }
}

struct SampleOutcome {
    legendre_dev: f64,
    fidelity_dev: Option<f64>,
    monotone: bool,
}

fn compare_point(
    n: usize,
    classes: &[SeparabilityClass],
    fp: f64,
    fm: f64,
    grid: usize,
) -> Result<SampleOutcome, CliError> {
    let params = GhzParams::new(n, fp, fm)?;
    let mut values = Vec::with_capacity(classes.len());
    let mut legendre_dev: f64 = 0.0;
    let mut fidelity_dev = None;
    for &cls in classes {
        let v = eval_measure(params, cls)?.value;
        if cls.k() >= 3 {
            let l = measure_via_legendre_2d(params, cls, grid)?.value;
            legendre_dev = legendre_dev.max((v - l).abs());
        }
        if n == 3 && cls.k() == 3 && deltoid_margin(fp.max(fm), fp.min(fm), 3) < -DELTOID_SLACK {
            fidelity_dev = Some((v - measure_via_fidelity_obs4(params)?.value).abs());
        }
        values.push(v);
    }
    let monotone = values.windows(2).all(|w| w[0] <= w[1] + ORDER_TOL);
    Ok(SampleOutcome { legendre_dev, fidelity_dev, monotone })
}

/// Runs the comparison; `Err(Comparison)` if any tolerance is exceeded.
pub fn compare(a: &CompareArgs) -> Result<CompareReport, CliError> {
    require(a.samples >= 1, || "samples must be >= 1".into())?;
    let n = a.n_qubits;
    let mut ks: Vec<usize> = if a.classes.is_empty() { (2..=n).collect() } else { a.classes.clone() };
    ks.sort_unstable();
    ks.dedup();
    let classes: Vec<SeparabilityClass> =
        ks.iter().map(|&k| SeparabilityClass::new(k, n)).collect::<Result<_, _>>()?;
    GhzParams::new(n, 0.0, 0.0)?;

    let mut rng = seeded_rng(a.seed);
    let points: Vec<(f64, f64)> = (0..a.samples).map(|_| random_triangle_point(&mut rng)).collect();
    let outcomes: Vec<SampleOutcome> = points
        .par_iter()
        .map(|&(fp, fm)| compare_point(n, &classes, fp, fm, a.grid))
        .collect::<Result<_, _>>()?;

    let mut report = CompareReport { samples: a.samples, ..CompareReport::default() };
    for o in &outcomes {
        report.max_legendre_dev = report.max_legendre_dev.max(o.legendre_dev);
        if let Some(d) = o.fidelity_dev {
            report.max_fidelity_dev = report.max_fidelity_dev.max(d);
            report.fidelity_points += 1;
        }
        report.monotonicity_violations += usize::from(!o.monotone);
    }

    if n <= 4 {
        let oracle_points = &points[..a.oracle_samples.min(points.len())];
        let cfg = OracleConfig { restarts: 8, seed: a.seed, ..OracleConfig::default() };
        let violations: Vec<bool> = oracle_points
            .iter()
            .enumerate()
            .map(|(i, &(fp, fm))| -> Result<bool, CliError> {
                let params = GhzParams::new(n, fp, fm)?;
                let rho = build_state(params)?;
                let cls = *classes.last().expect("at least one class");
                let cfg = cfg.with_seed(a.seed.wrapping_add(i as u64));
                let upper = convex_roof_upper_bound(&rho, cls.k(), 1 << n, &cfg)?;
                Ok(eval_measure(params, cls)?.value > upper + ORDER_TOL)
            })
            .collect::<Result<_, _>>()?;
        report.oracle_points = violations.len();
        report.sandwich_violations = violations.iter().filter(|v| **v).count();
    }
    Ok(report)
}

pub fn render_report(r: &CompareReport) -> String {
    format!(
        "samples: {}\nmax |formula - legendre2d|: {}\nmax |formula - obs4|: {} ({} entangled points)\n\
         monotonicity violations: {}\noracle sandwich violations: {} ({} points)\nstatus: {}\n",
        r.samples,
        fmt_num(r.max_legendre_dev),
        fmt_num(r.max_fidelity_dev),
        r.fidelity_points,
        r.monotonicity_violations,
        r.sandwich_violations,
        r.oracle_points,
        if r.passed() { "ok" } else { "FAILED" }
    )
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<CompareReport, CliError> {
    let report = compare(a)?;
    out.write_all(render_report(&report).as_bytes()).map_err(stdout_error)?;
    if !report.passed() {
        return Err(CliError::Comparison("comparison tolerances exceeded".into()));
    }
    Ok(report)
}
