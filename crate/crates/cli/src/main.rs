//! Command-line front end: formula evaluation on grids, samplers,
//! convergence studies, spline tabulation, and total-positivity reports,
//! emitting CSV or JSON with the resolved configuration embedded.

mod parse;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use orbint::convergence::{estimate_limits, verify_convergence, ConvergenceError};
use orbint::ergodic::charfn_f1;
use orbint::orbital::{orbital_charfn_det, orbital_charfn_series, OnevarEvaluator, OrbitalError};
use orbint::sampling::sample_dirichlet_projection;
use orbint::splines::{approx_fourier, bspline_eval, bspline_normalization, SplineError};
use orbint::tp::{etp_test, tp_test, TpError};
use orbint::{EvalPoint, Spectrum};

use parse::{
    parse_density, parse_family, parse_float_list, parse_grid, parse_sampler, parse_size_list,
    SamplerKind,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed used when neither `--seed` nor `ORBINT_SEED` is given.
const DEFAULT_SEED: u64 = 17;

#[derive(Parser)]
#[command(
    name = "orbint",
    version,
    about = "Orbital integrals, ergodic characteristic functions, splines, and total positivity",
    after_help = "Exit codes: 0 success, 2 invalid input, 3 numerical-reliability failure, 4 divergence detected.\n\
                  The default seed comes from ORBINT_SEED when set."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed (overrides the ORBINT_SEED environment variable)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,

    /// Output format for tabular data
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate characteristic functions on grids or at points
    #[command(subcommand)]
    Eval(EvalTarget),
    /// Estimate limit parameters of a spectrum family and measure |f_n - F|
    Converge(ConvergeArgs),
    /// Draw Monte Carlo samples (CSV matrices or JSON summaries)
    Sample(SampleArgs),
    /// Tabulate a fundamental spline density
    Spline(SplineArgs),
    /// Run total-positivity determinant tests on a density
    Tp(TpArgs),
}

#[derive(Subcommand)]
enum EvalTarget {
    /// Ergodic-measure characteristic function F(a)
    CharfnF(CharfnFArgs),
    /// Orbital-measure characteristic function (series and/or determinant)
    Orbital(OrbitalArgs),
    /// Approximate Fourier transform of a spline (product formula)
    Fourier(FourierArgs),
}

#[derive(Args)]
struct CharfnFArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma1: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma2: f64,
    /// Signed x parameters, comma separated
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Grid start:stop:step
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
struct OrbitalArgs {
    /// Orbit spectrum, comma separated
    #[arg(long, allow_hyphen_values = true)]
    spectrum: String,
    /// Full evaluation point a_1,...,a_n (series and determinant routes)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// One-variable sweep start:stop:step (series route)
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value = "both", value_parser = ["series", "det", "both"])]
    method: String,
    /// Series truncation order
    #[arg(long, default_value_t = 40)]
    order: usize,
}

#[derive(Args)]
struct FourierArgs {
    /// Knots, comma separated, strictly ascending
    #[arg(long, allow_hyphen_values = true)]
    knots: String,
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Family spec: linear:x1,...  gaussian:g  wishart:y,frac  explicit:FILE
    #[arg(long)]
    family: String,
    /// Ascending matrix sizes, comma separated (at least 3)
    #[arg(long)]
    sizes: String,
    /// Half-width of the argument grid for the error measurement
    #[arg(long, default_value_t = 2.0)]
    a_max: f64,
    /// Number of grid points per side
    #[arg(long, default_value_t = 20)]
    a_steps: usize,
    /// Extreme eigenvalues tracked per sign
    #[arg(long, default_value_t = 20)]
    k_max: usize,
    /// Convergence/snapping tolerance for the estimates
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct SampleArgs {
    /// Sampler spec: orbital:l1,l2,...  gaussian:g  rank-one:y  dirac:g
    /// finite-rank:z:x1,x2  dirichlet:theta:t1,t2,...
    #[arg(long, allow_hyphen_values = true)]
    sampler: String,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Matrix size (defaults to the spectrum length for orbital samplers)
    #[arg(long)]
    size: Option<usize>,
    /// Corner size reported in JSON summaries
    #[arg(long)]
    corner: Option<usize>,
}

#[derive(Args)]
struct SplineArgs {
    #[arg(long, allow_hyphen_values = true)]
    knots: String,
    /// Tabulation grid start:stop:step (defaults to the support in 1000 steps)
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Args)]
struct TpArgs {
    /// Density spec: normal:g  exponential:y  normal-exp:g:y  exp-pair:y1:y2
    /// bimodal:g:sep  csv:FILE
    #[arg(long)]
    density: String,
    /// Highest determinant order tested
    #[arg(long, default_value_t = 4)]
    orders: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Also run the extended (derivative) test
    #[arg(long, default_value_t = false)]
    etp: bool,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Numerical(String),
    Divergence(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Divergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Numerical(m) | CliError::Divergence(m) => m,
        }
    }
}

impl From<OrbitalError> for CliError {
    fn from(e: OrbitalError) -> Self {
        match e {
            OrbitalError::TruncationUnreliable { .. } => CliError::Numerical(format!("orbital: {e}")),
            _ => CliError::Invalid(format!("orbital: {e}")),
        }
    }
}

impl From<SplineError> for CliError {
    fn from(e: SplineError) -> Self {
        match e {
            SplineError::Quadrature(_) => CliError::Numerical(format!("spline: {e}")),
            _ => CliError::Invalid(format!("spline: {e}")),
        }
    }
}

impl From<ConvergenceError> for CliError {
    fn from(e: ConvergenceError) -> Self {
        match e {
            ConvergenceError::Divergence { .. } => CliError::Divergence(format!("converge: {e}")),
            ConvergenceError::Orbital(OrbitalError::TruncationUnreliable { .. }) => {
                CliError::Numerical(format!("converge: {e}"))
            }
            _ => CliError::Invalid(format!("converge: {e}")),
        }
    }
}

impl From<TpError> for CliError {
    fn from(e: TpError) -> Self {
        match e {
            TpError::DerivativeNoise { .. } | TpError::InsufficientCoverage { .. } => {
                CliError::Numerical(format!("tp: {e}"))
            }
            _ => CliError::Invalid(format!("tp: {e}")),
        }
    }
}

fn resolved_seed(cli: &Cli) -> u64 {
    cli.seed
        .or_else(|| std::env::var("ORBINT_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(DEFAULT_SEED)
}

fn write_output(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Invalid(format!("stdout: {e}"))),
    }
}

/// CSV with `# config: {...}` and `# version:` header lines.
fn csv_document(config: &serde_json::Value, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# config: {config}\n"));
    out.push_str(&format!("# version: {VERSION}\n"));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

fn json_document(config: serde_json::Value, body: serde_json::Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), config);
    doc.insert("version".into(), json!(VERSION));
    if let serde_json::Value::Object(map) = body {
        for (k, v) in map {
            doc.insert(k, v);
        }
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).unwrap();
    text.push('\n');
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval(target) => match target {
            EvalTarget::CharfnF(args) => eval_charfn_f(cli, args),
            EvalTarget::Orbital(args) => eval_orbital(cli, args),
            EvalTarget::Fourier(args) => eval_fourier(cli, args),
        },
        Command::Converge(args) => converge(cli, args),
        Command::Sample(args) => sample(cli, args),
        Command::Spline(args) => spline(cli, args),
        Command::Tp(args) => tp(cli, args),
    }
}

fn eval_charfn_f(cli: &Cli, args: &CharfnFArgs) -> Result<(), CliError> {
    let xs = parse_float_list(&args.x)?;
    let params = orbint::ErgodicParams::new(args.gamma1, args.gamma2, &xs, args.theta)
        .map_err(|e| CliError::Invalid(format!("charfn-f: {e}")))?;
    let grid = parse_grid(&args.grid)?;
    let config = json!({
        "command": "eval charfn-f",
        "gamma1": args.gamma1, "gamma2": args.gamma2, "x": xs, "theta": args.theta,
        "grid": args.grid, "format": cli.format,
    });
    let values: Vec<(f64, Complex64)> = grid.iter().map(|&a| (a, charfn_f1(&params, a))).collect();
    let text = if cli.format == "json" {
        let rows: Vec<_> = values
            .iter()
            .map(|(a, v)| json!({"a": a, "re": v.re, "im": v.im}))
            .collect();
        json_document(config, json!({ "values": rows }))
    } else {
        let rows: Vec<String> =
            values.iter().map(|(a, v)| format!("{a},{},{}", v.re, v.im)).collect();
        csv_document(&config, "a,re,im", &rows)
    };
    write_output(cli, &text)
}

fn eval_orbital(cli: &Cli, args: &OrbitalArgs) -> Result<(), CliError> {
    if args.order > 100_000 {
        return Err(CliError::Invalid(format!("orbital: order {} is too large", args.order)));
    }
    let eigen = parse_float_list(&args.spectrum)?;
    let spectrum =
        Spectrum::new(eigen.clone()).map_err(|e| CliError::Invalid(format!("orbital: {e}")))?;
    let config = json!({
        "command": "eval orbital",
        "spectrum": eigen, "a": args.a, "grid": args.grid,
        "method": args.method, "order": args.order, "format": cli.format,
    });

    match (&args.a, &args.grid) {
        (Some(point_text), None) => {
            let entries = parse_float_list(point_text)?;
            let point =
                EvalPoint::new(entries).map_err(|e| CliError::Invalid(format!("orbital: {e}")))?;
            let mut fields = serde_json::Map::new();
            let mut csv_header = vec!["a".to_string()];
            let mut csv_row = vec![point
                .entries()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";")];
            if args.method != "det" {
                let series = orbital_charfn_series(&spectrum, &point, args.order)?;
                fields.insert("series_re".into(), json!(series.value.re));
                fields.insert("series_im".into(), json!(series.value.im));
                fields.insert("tail_bound".into(), json!(series.tail_bound));
                fields.insert("reliable".into(), json!(series.is_reliable()));
                csv_header.extend(["series_re".into(), "series_im".into(), "tail_bound".into()]);
                csv_row.extend([
                    series.value.re.to_string(),
                    series.value.im.to_string(),
                    series.tail_bound.to_string(),
                ]);
            }
            if args.method != "series" {
                let det = orbital_charfn_det(&spectrum, &point)?;
                fields.insert("det_re".into(), json!(det.re));
                fields.insert("det_im".into(), json!(det.im));
                csv_header.extend(["det_re".into(), "det_im".into()]);
                csv_row.extend([det.re.to_string(), det.im.to_string()]);
            }
            let text = if cli.format == "json" {
                json_document(config, serde_json::Value::Object(fields))
            } else {
                csv_document(&config, &csv_header.join(","), &[csv_row.join(",")])
            };
            write_output(cli, &text)
        }
        (None, Some(grid_text)) => {
            if args.method == "det" {
                return Err(CliError::Invalid(
                    "orbital: the determinant route needs a full-size --a point; \
                     one-variable sweeps pad with coincident zero eigenvalues"
                        .into(),
                ));
            }
            let grid = parse_grid(grid_text)?;
            let mut evaluator = OnevarEvaluator::new(&spectrum);
            let mut rows = Vec::with_capacity(grid.len());
            let mut json_rows = Vec::with_capacity(grid.len());
            for &a in &grid {
                let r = evaluator.eval(a, args.order);
                rows.push(format!(
                    "{a},{},{},{},{}",
                    r.value.re,
                    r.value.im,
                    r.tail_bound,
                    r.is_reliable()
                ));
                json_rows.push(json!({
                    "a": a, "re": r.value.re, "im": r.value.im,
                    "tail_bound": r.tail_bound, "reliable": r.is_reliable(),
                }));
            }
            let text = if cli.format == "json" {
                json_document(config, json!({ "values": json_rows }))
            } else {
                csv_document(&config, "a,re,im,tail_bound,reliable", &rows)
            };
            write_output(cli, &text)
        }
        _ => Err(CliError::Invalid(
            "orbital: provide exactly one of --a (full point) or --grid (one-variable sweep)"
                .into(),
        )),
    }
}

fn eval_fourier(cli: &Cli, args: &FourierArgs) -> Result<(), CliError> {
    let knots = parse_float_list(&args.knots)?;
    let kv = orbint::KnotVector::new(knots.clone())
        .map_err(|e| CliError::Invalid(format!("fourier: {e}")))?;
    let grid = parse_grid(&args.grid)?;
    let config = json!({
        "command": "eval fourier", "knots": knots, "grid": args.grid, "format": cli.format,
    });
    let values: Vec<(f64, Complex64)> = grid.iter().map(|&a| (a, approx_fourier(&kv, a))).collect();
    let text = if cli.format == "json" {
        let rows: Vec<_> = values
            .iter()
            .map(|(a, v)| json!({"a": a, "re": v.re, "im": v.im}))
            .collect();
        json_document(config, json!({ "values": rows }))
    } else {
        let rows: Vec<String> =
            values.iter().map(|(a, v)| format!("{a},{},{}", v.re, v.im)).collect();
        csv_document(&config, "a,re,im", &rows)
    };
    write_output(cli, &text)
}

fn converge(cli: &Cli, args: &ConvergeArgs) -> Result<(), CliError> {
    if !(args.a_max > 0.0) || args.a_steps == 0 {
        return Err(CliError::Invalid(
            "converge: --a-max must be positive and --a-steps at least 1".into(),
        ));
    }
    let family = parse_family(&args.family)?;
    let sizes = parse_size_list(&args.sizes)?;
    let estimate = estimate_limits(&family, &sizes, args.k_max, args.tol)?;
    let params = estimate.params();
    let a_grid: Vec<f64> = (-(args.a_steps as i64)..=args.a_steps as i64)
        .map(|i| args.a_max * i as f64 / args.a_steps as f64)
        .collect();
    let errors = verify_convergence(&family, &params, &sizes, &a_grid)?;
    let config = json!({
        "command": "converge", "family": args.family, "sizes": sizes,
        "a_max": args.a_max, "a_steps": args.a_steps, "k_max": args.k_max, "tol": args.tol,
    });
    let per_size: Vec<_> = sizes
        .iter()
        .zip(&errors)
        .map(|(n, e)| json!({"n": n, "max_error": e}))
        .collect();
    let body = json!({
        "estimate": estimate,
        "limit_params": params,
        "errors": per_size,
    });
    write_output(cli, &json_document(config, body))
}

fn sample(cli: &Cli, args: &SampleArgs) -> Result<(), CliError> {
    let seed = resolved_seed(cli);
    let kind = parse_sampler(&args.sampler)?;
    let config = json!({
        "command": "sample", "sampler": args.sampler, "count": args.count,
        "size": args.size, "corner": args.corner, "seed": seed, "format": cli.format,
    });
    match kind {
        SamplerKind::Dirichlet { theta, t_values } => {
            let draws = sample_dirichlet_projection(theta, &t_values, args.count, seed)
                .map_err(|e| CliError::Invalid(format!("sample: {e}")))?;
            let text = if cli.format == "json" {
                json_document(config, json!({ "draws": draws }))
            } else {
                let rows: Vec<String> = draws.iter().map(|v| v.to_string()).collect();
                csv_document(&config, "value", &rows)
            };
            write_output(cli, &text)
        }
        SamplerKind::Matrix(variant) => {
            let size = match (&variant, args.size) {
                (orbint::sampling::SamplerVariant::Orbital(s), None) => s.n(),
                (orbint::sampling::SamplerVariant::Orbital(s), Some(n)) => {
                    if n != s.n() {
                        return Err(CliError::Invalid(format!(
                            "sample: orbital spectra fix the size; got --size {n} for an H({}) orbit",
                            s.n()
                        )));
                    }
                    n
                }
                (_, Some(n)) => n,
                (_, None) => 4,
            };
            if size == 0 {
                return Err(CliError::Invalid("sample: --size must be positive".into()));
            }
            let spec = orbint::SamplerSpec::new(variant, size, seed)
                .map_err(|e| CliError::Invalid(format!("sample: {e}")))?;
            let corner = args.corner.unwrap_or_else(|| size.min(4));
            if corner == 0 || corner > size {
                return Err(CliError::Invalid(format!(
                    "sample: --corner must lie in 1..={size}"
                )));
            }
            let text = if cli.format == "json" {
                let summaries: Vec<_> = spec
                    .stream()
                    .take(args.count)
                    .map(|s| s.summary_json(corner))
                    .collect();
                json_document(config, json!({ "samples": summaries }))
            } else {
                let rows: Vec<String> =
                    spec.stream().take(args.count).map(|s| s.to_csv_row()).collect();
                let header: Vec<String> = (0..size)
                    .flat_map(|i| (i..size).map(move |j| (i, j)))
                    .flat_map(|(i, j)| [format!("re_{i}{j}"), format!("im_{i}{j}")])
                    .collect();
                csv_document(&config, &header.join(","), &rows)
            };
            write_output(cli, &text)
        }
    }
}

fn spline(cli: &Cli, args: &SplineArgs) -> Result<(), CliError> {
    let knots = parse_float_list(&args.knots)?;
    let kv = orbint::KnotVector::new(knots.clone())
        .map_err(|e| CliError::Invalid(format!("spline: {e}")))?;
    let grid = match &args.grid {
        Some(g) => parse_grid(g)?,
        None => {
            let (lo, hi) = kv.support();
            let step = (hi - lo) / 1000.0;
            (0..=1000).map(|i| lo + i as f64 * step).collect()
        }
    };
    let normalization = bspline_normalization(&kv)?;
    let config = json!({
        "command": "spline", "knots": knots, "grid": args.grid,
        "normalization": normalization, "format": cli.format,
    });
    let text = if cli.format == "json" {
        let rows: Vec<_> = grid
            .iter()
            .map(|&t| json!({"t": t, "density": bspline_eval(&kv, t)}))
            .collect();
        json_document(config, json!({ "values": rows }))
    } else {
        let rows: Vec<String> =
            grid.iter().map(|&t| format!("{t},{}", bspline_eval(&kv, t))).collect();
        csv_document(&config, "t,density", &rows)
    };
    write_output(cli, &text)
}

fn tp(cli: &Cli, args: &TpArgs) -> Result<(), CliError> {
    let seed = resolved_seed(cli);
    let density = parse_density(&args.density)?;
    let report = tp_test(&density, args.orders, args.trials, seed)?;
    let config = json!({
        "command": "tp", "density": args.density, "orders": args.orders,
        "trials": args.trials, "etp": args.etp, "seed": seed,
    });
    let mut body = serde_json::Map::new();
    body.insert("tp".into(), serde_json::to_value(&report).unwrap());
    if args.etp {
        let etp_order = args.orders.min(orbint::tp::ETP_MAX_ORDER);
        let etp_report = etp_test(&density, etp_order, &[], args.trials, seed)?;
        body.insert("etp".into(), serde_json::to_value(&etp_report).unwrap());
    }
    write_output(cli, &json_document(config, serde_json::Value::Object(body)))
}
