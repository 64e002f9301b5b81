//! Command-line front end: one JSON object per query, CSV for curve scans.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use rug::Float;
use serde_json::{json, Value};

use crate::beta_shift::BetaError;
use crate::cf_expansion::{expand_x, CfError};
use crate::correspondence::{
    beta_of_lambda, curve_point, lambda_of_beta, phi, CorrespondenceError, CurvePoint,
};
use crate::lambda_dynamics::{code_orbit, lambda_from_tau, omega_infinity, DynamicsError, LambdaContext};
use crate::numerics::{NumericContext, NumericsError, Real};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

pub const CSV_HEADER: &str = "tau,lambda,beta,entropy,omega_prefix";

#[derive(Debug, Parser)]
#[command(name = "lambda-beta", version, about = "λ-continued fractions, T_λ and the β(λ) correspondence")]
pub struct Cli {
    /// Working precision in bits (overrides LB_PRECISION_BITS).
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch structure of T_λ.
    Context(ParamArgs),
    /// First n digits of the coding ω_λ(x).
    Code(PointArgs),
    /// λ-continued fraction expansion of x with convergents.
    Expand(PointArgs),
    /// β(λ), ω_λ(∞) and the entropy log β(λ).
    Beta(BetaArgs),
    /// λ(β), the inverse correspondence.
    Lambda(LambdaArgs),
    /// The conjugacy φ_λ(x) ∈ [0, 1).
    Phi(PhiArgs),
    /// CSV of τ ↦ β(2cos(π/τ)) on a grid.
    Scan(ScanArgs),
    /// Runs the invariant suite; exit status 1 on any failure.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// τ > 2, with λ = 2cos(π/τ).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 128)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, default_value = "1e-10")]
    pub tol: String,
    /// Digits of ω_λ(∞) to report.
    #[arg(long, default_value_t = 32)]
    pub prefix_len: usize,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value = "1e-10")]
    pub tol: String,
    #[arg(long, default_value_t = 32)]
    pub prefix_len: usize,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value = "1e-10")]
    pub tol: String,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub tau_min: String,
    #[arg(long)]
    pub tau_max: String,
    #[arg(long)]
    pub step: String,
    #[arg(long, default_value = "1e-10")]
    pub tol: String,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file; the CSV goes to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 24)]
    pub prefix_len: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Fast subset of the suite.
    #[arg(long)]
    pub quick: bool,
}

/// Resolved scan parameters.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub tau_min: Real,
    pub tau_max: Real,
    pub step: Real,
    pub tol: Real,
    pub workers: usize,
    pub prefix_len: usize,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::NonConvergence(_) => EXIT_NONCONVERGENCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::NonConvergence(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::NoSignChange { .. } | NumericsError::NonConvergence { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<BetaError> for CliError {
    fn from(e: BetaError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CfError> for CliError {
    fn from(e: CfError) -> Self {
        match e {
            CfError::DivisionNearZero { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CorrespondenceError> for CliError {
    fn from(e: CorrespondenceError) -> Self {
        match e {
            CorrespondenceError::Numerics(n) => n.into(),
            CorrespondenceError::PrefixTooShort(_) => CliError::NonConvergence(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn numeric_context(cli: &Cli) -> Result<NumericContext, CliError> {
    match cli.precision_bits {
        Some(bits) => NumericContext::with_precision(bits).map_err(|e| CliError::Usage(e.to_string())),
        None => NumericContext::from_env().map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Command::Selftest(args) = &cli.command {
        // low precisions are accepted here on purpose, to watch the suite fail
        let nctx = match cli.precision_bits {
            Some(bits) => NumericContext::unchecked(bits),
            None => NumericContext::from_env().map_err(|e| CliError::Usage(e.to_string()))?,
        };
        let report = selftest::run_suite(&nctx, args.quick);
        for line in report.lines() {
            writeln!(out, "{line}")?;
        }
        return Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE });
    }
    let nctx = numeric_context(cli)?;
    let value = match &cli.command {
        Command::Context(p) => cmd_context(p, &nctx)?,
        Command::Code(p) => cmd_code(p, &nctx)?,
        Command::Expand(p) => cmd_expand(p, &nctx)?,
        Command::Beta(b) => cmd_beta(b, &nctx)?,
        Command::Lambda(l) => cmd_lambda(l, &nctx)?,
        Command::Phi(p) => cmd_phi(p, &nctx)?,
        Command::Scan(s) => match cmd_scan(s, &nctx, out)? {
            Some(v) => v,
            None => return Ok(EXIT_OK),
        },
        Command::Selftest(_) => unreachable!(),
    };
    serde_json::to_writer_pretty(&mut *out, &value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(EXIT_OK)
}

fn parse_real(name: &str, s: &str, nctx: &NumericContext) -> Result<Real, CliError> {
    nctx.parse(s)
        .filter(|v| !v.is_nan())
        .ok_or_else(|| CliError::Usage(format!("--{name}: cannot parse '{s}' as a number")))
}

fn parse_tol(s: &str, nctx: &NumericContext) -> Result<Real, CliError> {
    let t = parse_real("tol", s, nctx)?;
    if !t.is_finite() || t <= 0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let bits = nctx.precision_bits().saturating_sub(8) as i32;
    if t < Float::with_val(nctx.precision_bits(), Float::i_exp(1, -bits)) {
        return Err(CliError::Usage(format!(
            "--tol {:e} is below what {} bits of precision can resolve",
            t.to_f64(),
            nctx.precision_bits()
        )));
    }
    Ok(t)
}

fn resolve_lambda(p: &ParamArgs, nctx: &NumericContext) -> Result<Real, CliError> {
    match (&p.lambda, &p.tau) {
        (Some(l), None) => parse_real("lambda", l, nctx),
        (None, Some(t)) => Ok(lambda_from_tau(&parse_real("tau", t, nctx)?, nctx)?),
        _ => Err(CliError::Usage("exactly one of --lambda, --tau is required".into())),
    }
}

/// JSON number, or `null` for values JSON cannot represent (±∞).
fn num(x: &Real) -> Value {
    let v = x.to_f64();
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn decimal(x: &Real) -> String {
    x.to_string_radix(10, Some(40))
}

fn meta(nctx: &NumericContext) -> Value {
    json!({
        "precision_bits": nctx.precision_bits(),
        "boundary_tol": nctx.boundary_tol(),
    })
}

fn with_meta(mut body: Value, nctx: &NumericContext, tol: Option<&Real>) -> Value {
    let obj = body.as_object_mut().expect("object");
    if let Value::Object(m) = meta(nctx) {
        for (k, v) in m {
            obj.insert(k, v);
        }
    }
    if let Some(t) = tol {
        obj.insert("tol".into(), num(t));
    }
    body
}

pub fn cmd_context(p: &ParamArgs, nctx: &NumericContext) -> Result<Value, CliError> {
    let lambda = resolve_lambda(p, nctx)?;
    let ctx = LambdaContext::new(&lambda, nctx)?;
    Ok(with_meta(
        json!({
            "lambda": num(ctx.lambda()),
            "theta": num(ctx.theta()),
            "i_lambda": ctx.i_lambda(),
            "breakpoints": ctx.breakpoints().iter().map(num).collect::<Vec<_>>(),
            "ell_lambda": num(ctx.ell_lambda()),
            "degenerate": ctx.degenerate(),
            "p_values": ctx.p_values().iter().map(num).collect::<Vec<_>>(),
        }),
        nctx,
        None,
    ))
}

fn point(p: &PointArgs, nctx: &NumericContext) -> Result<(LambdaContext, Real), CliError> {
    let lambda = resolve_lambda(&p.param, nctx)?;
    let ctx = LambdaContext::new(&lambda, nctx)?;
    let x = parse_real("x", &p.x, nctx)?;
    if p.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok((ctx, x))
}

pub fn cmd_code(p: &PointArgs, nctx: &NumericContext) -> Result<Value, CliError> {
    let (ctx, x) = point(p, nctx)?;
    let code = code_orbit(&ctx, &x, p.n)?;
    Ok(with_meta(
        json!({
            "lambda": num(ctx.lambda()),
            "x": num(&x),
            "n": p.n,
            "digits": code.digits,
            "confidence": code.confidence,
            "period": code.period,
        }),
        nctx,
        None,
    ))
}

pub fn cmd_expand(p: &PointArgs, nctx: &NumericContext) -> Result<Value, CliError> {
    let (ctx, x) = point(p, nctx)?;
    let e = expand_x(&ctx, &x, p.n)?;
    let convergents: Vec<Value> = e
        .convergents
        .iter()
        .map(|c| {
            json!({
                "cf_prefix_len": c.cf_prefix_len,
                "value": num(&c.value),
                "cylinder_width": num(&c.cylinder_width),
            })
        })
        .collect();
    let residual = e.convergents.last().map(|c| num(&c.cylinder_width)).unwrap_or(json!(0.0));
    Ok(with_meta(
        json!({
            "lambda": num(ctx.lambda()),
            "x": num(&x),
            "n": p.n,
            "code": e.code.digits,
            "cf": e.cf.digits(),
            "cf_display": e.cf.to_string(),
            "cf_alternating": e.cf.alternating().to_string(),
            "finite": e.finite,
            "convergents": convergents,
            "residual_bound": residual,
        }),
        nctx,
        None,
    ))
}

pub fn cmd_beta(b: &BetaArgs, nctx: &NumericContext) -> Result<Value, CliError> {
    let lambda = resolve_lambda(&b.param, nctx)?;
    let tol = parse_tol(&b.tol, nctx)?;
    let ctx = LambdaContext::new(&lambda, nctx)?;
    let sol = beta_of_lambda(&ctx, &tol)?;
    let entropy = Float::with_val(nctx.precision_bits(), sol.beta.ln_ref());
    Ok(with_meta(
        json!({
            "lambda": num(ctx.lambda()),
            "beta": num(&sol.beta),
            "beta_decimal": decimal(&sol.beta),
            "omega_prefix": sol.omega.resized(b.prefix_len).to_string(),
            "periodic": sol.periodic,
            "entropy": num(&entropy),
        }),
        nctx,
        Some(&tol),
    ))
}

pub fn cmd_lambda(l: &LambdaArgs, nctx: &NumericContext) -> Result<Value, CliError> {
    let beta = parse_real("beta", &l.beta, nctx)?;
    let tol = parse_tol(&l.tol, nctx)?;
    let lambda = lambda_of_beta(&beta, &tol, nctx)?;
    let ctx = LambdaContext::new(&lambda, nctx)?;
    let omega = omega_infinity(&ctx, l.prefix_len.max(1));
    let entropy = Float::with_val(nctx.precision_bits(), beta.ln_ref());
    Ok(with_meta(
        json!({
            "beta": num(&beta),
            "lambda": num(&lambda),
            "lambda_decimal": decimal(&lambda),
            "omega_prefix": omega.resized(l.prefix_len).to_string(),
            "periodic": omega.period.is_some(),
            "entropy": num(&entropy),
        }),
        nctx,
        Some(&tol),
    ))
}

pub fn cmd_phi(p: &PhiArgs, nctx: &NumericContext) -> Result<Value, CliError> {
    let (ctx, x) = point(&p.point, nctx)?;
    let tol = parse_tol(&p.tol, nctx)?;
    let sol = beta_of_lambda(&ctx, &tol)?;
    let v = phi(&ctx, &sol.context, &x, p.point.n)?;
    Ok(with_meta(
        json!({
            "lambda": num(ctx.lambda()),
            "beta": num(&sol.beta),
            "x": num(&x),
            "n": p.point.n,
            "t": num(&v.t),
            "tail_bound": num(&v.tail_bound),
            "digits": v.code.digits,
        }),
        nctx,
        Some(&tol),
    ))
}

impl ScanConfig {
    pub fn from_args(s: &ScanArgs, nctx: &NumericContext) -> Result<Self, CliError> {
        let tau_min = parse_real("tau-min", &s.tau_min, nctx)?;
        let tau_max = parse_real("tau-max", &s.tau_max, nctx)?;
        let step = parse_real("step", &s.step, nctx)?;
        let tol = parse_tol(&s.tol, nctx)?;
        if tau_min <= 2 || !tau_max.is_finite() {
            return Err(CliError::Usage("--tau-min must exceed 2".into()));
        }
        if tau_min >= tau_max {
            return Err(CliError::Usage("empty range: --tau-min must be below --tau-max".into()));
        }
        let span = Float::with_val(nctx.precision_bits(), &tau_max - &tau_min);
        if step <= 0 || step >= span {
            return Err(CliError::Usage("--step must be positive and shorter than the range".into()));
        }
        let workers = match s.workers {
            Some(0) => return Err(CliError::Usage("--workers must be positive".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        Ok(Self {
            tau_min,
            tau_max,
            step,
            tol,
            workers,
            prefix_len: s.prefix_len,
        })
    }

    /// Grid `τ_min + i·step` up to `τ_max`, allowing for rounding in the
    /// last step.
    pub fn grid(&self) -> Vec<Real> {
        let prec = self.tau_min.prec();
        let span = Float::with_val(prec, &self.tau_max - &self.tau_min);
        let ratio = (span / &self.step).to_f64();
        let count = (ratio + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let mut t = Float::with_val(prec, &self.step * i as u64);
                t += &self.tau_min;
                t
            })
            .collect()
    }
}

/// Evaluates the curve on the grid of `config`, in τ order.
pub fn scan_points(config: &ScanConfig, nctx: &NumericContext) -> Result<Vec<CurvePoint>, CliError> {
    let grid = config.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<Result<CurvePoint, CorrespondenceError>> = pool.install(|| {
        grid.par_iter()
            .map(|tau| curve_point(tau, &config.tol, config.prefix_len, nctx))
            .collect()
    });
    rows.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

/// `%.15g`-style rendering: 15 significant digits, trailing zeros dropped.
pub fn format_sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn write_csv(rows: &[CurvePoint], sink: &mut dyn Write) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            format_sig15(r.tau),
            format_sig15(r.lambda),
            format_sig15(r.beta),
            format_sig15(r.entropy),
            r.omega_prefix.clone(),
        ])?;
    }
    w.flush()
}

pub fn cmd_scan(s: &ScanArgs, nctx: &NumericContext, out: &mut dyn Write) -> Result<Option<Value>, CliError> {
    let config = ScanConfig::from_args(s, nctx)?;
    let rows = scan_points(&config, nctx)?;
    match &s.out {
        None => {
            write_csv(&rows, out)?;
            Ok(None)
        }
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_csv(&rows, &mut file).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Some(with_meta(
                json!({
                    "out": path.display().to_string(),
                    "rows": rows.len(),
                    "workers": config.workers,
                }),
                nctx,
                Some(&config.tol),
            )))
        }
    }
}
