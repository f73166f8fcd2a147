use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptic_rmatrix::averaging::{average_residual, AverageIdentity, AverageInputs, AveragingConfig, TailMode};
use elliptic_rmatrix::degenerate::{
    build_degenerate_r, default_samples, degenerate_kernel, degeneration_ladder, CaseId, DegenerateKernelId, DegenerateKind, LadderBase,
    LimitKernel, TrigParams,
};
use elliptic_rmatrix::green::fourier::fourier_truncation;
use elliptic_rmatrix::green::{g0, g_lambda, gamma_fourier, StripPoint};
use elliptic_rmatrix::rmatrix::{build_r, RMatrix4};
use elliptic_rmatrix::verify::{run_suite, suite_listing, Suite, SuiteConfig};
use elliptic_rmatrix::{format_complex, parse_complex, theta, EllipticParams, Error, C64};
use serde_json::{json, Value};

const THREADS_VAR: &str = "ELLIPTIC_RMATRIX_THREADS";

#[derive(Parser, Debug)]
#[command(name = "elliptic-rmatrix", version, about = "Elliptic Green kernels, dynamical r-matrices and their identity checks")]
struct Cli {
    /// Print the suite names with the identity each one checks, then exit.
    #[arg(long)]
    list_suites: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one kernel or r-matrix.
    Eval(EvalArgs),
    /// Run a randomized identity suite.
    Verify(VerifyArgs),
    /// Errors of a degeneration ladder.
    Degenerate(DegenerateArgs),
    /// Convergence table of an averaging sum.
    Average(AverageArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Theta,
    G0,
    #[value(name = "g_lambda", alias = "g-lambda")]
    GLambda,
    Gamma,
    Phi,
    #[value(name = "psi_tilde", alias = "psi-tilde")]
    PsiTilde,
    #[value(name = "psi_cth", alias = "psi-cth")]
    PsiCth,
    #[value(name = "psi_mu", alias = "psi-mu")]
    PsiMu,
    #[value(name = "r_elliptic", alias = "r-elliptic")]
    RElliptic,
    #[value(name = "r_a", alias = "r-a")]
    RA,
    #[value(name = "r_b", alias = "r-b")]
    RB,
    #[value(name = "r_c", alias = "r-c")]
    RC,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    K0,
    Cyl,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    kernel: KernelArg,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Strip variant for phi, psi_tilde, psi_mu and the cylinder matrices.
    #[arg(long, value_enum, default_value = "plus")]
    sign: SignArg,
    /// Test-function family for r_a and r_b.
    #[arg(long, value_enum, default_value = "cyl")]
    family: Family,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to the suite's own tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, default_value_t = 128)]
    quadrature_nodes: usize,
    /// Series order for duality, projections and green-series.
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaseArg {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LimitArg {
    G0,
    GLambda,
    PsiMu,
}

#[derive(Args, Debug)]
struct DegenerateArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Comma-separated, strictly increasing (ω for a and c, Im τ for b).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    scales: Vec<f64>,
    #[arg(long, value_enum, default_value = "g0")]
    kernel: LimitArg,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Fixed modulus for case a.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Paired,
    Plain,
    OneSided,
}

#[derive(Args, Debug)]
struct AverageArgs {
    #[arg(long)]
    identity: String,
    /// Comma-separated, strictly increasing truncations N.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n_list: Vec<usize>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, value_enum, default_value = "paired")]
    mode: ModeArg,
    /// Add the analytic tail Σ_{|n|>N} to the rational sums.
    #[arg(long)]
    tail_correction: bool,
    #[arg(long, value_enum, default_value = "csv")]
    output: Output,
}

/// Usage or domain problem: exit code 2.
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, UsageError>;

fn complex(name: &str, s: &Option<String>) -> CliResult<Option<C64>> {
    s.as_deref().map(|t| parse_complex(t).map_err(|e| UsageError(format!("--{name}: {e}")))).transpose()
}

fn required(name: &str, s: &Option<String>) -> CliResult<C64> {
    complex(name, s)?.ok_or_else(|| UsageError(format!("--{name} is required here")))
}

fn params(s: &Option<String>) -> CliResult<EllipticParams> {
    Ok(EllipticParams::new(required("tau", s)?)?)
}

fn trig(mu: &Option<String>, eta: &Option<String>) -> CliResult<Option<TrigParams>> {
    match (complex("mu", mu)?, complex("eta", eta)?) {
        (Some(m), Some(e)) => Ok(Some(TrigParams::new(m, e)?)),
        (None, None) => Ok(None),
        _ => Err(UsageError("--mu and --eta must be given together".into())),
    }
}

fn matrix_json(r: &RMatrix4) -> Value {
    Value::Array(r.to_rows().iter().map(|row| Value::Array(row.iter().map(|z| json!(format_complex(*z))).collect())).collect())
}

fn matrix_csv(r: &RMatrix4) -> String {
    let mut out = String::from("row,col,re,im\n");
    for (i, row) in r.to_rows().iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", i + 1, j + 1, z.re, z.im));
        }
    }
    out
}

fn cmd_eval(a: &EvalArgs) -> CliResult<String> {
    let mut inputs = serde_json::Map::new();
    let mut echo = |name: &str, z: C64| {
        inputs.insert(name.to_string(), json!(format_complex(z)));
        z
    };
    let plus = matches!(a.sign, SignArg::Plus);
    enum Out {
        Scalar(C64),
        Matrix(RMatrix4),
    }
    let out = match a.kernel {
        KernelArg::Theta => {
            let p = params(&a.tau)?;
            echo("tau", p.tau());
            Out::Scalar(theta(echo("u", required("u", &a.u)?), &p)?)
        }
        KernelArg::G0 => {
            let p = params(&a.tau)?;
            echo("tau", p.tau());
            Out::Scalar(g0(echo("w", required("w", &a.w)?), &p)?)
        }
        KernelArg::GLambda => {
            let p = params(&a.tau)?;
            echo("tau", p.tau());
            let w = echo("w", required("w", &a.w)?);
            Out::Scalar(g_lambda(w, echo("lambda", required("lambda", &a.lambda)?), &p)?)
        }
        KernelArg::Gamma => {
            let p = params(&a.tau)?;
            echo("tau", p.tau());
            let w = echo("w", required("w", &a.w)?);
            let sp = StripPoint::lower(w, &p)?;
            Out::Scalar(gamma_fourier(&sp, &p, fourier_truncation(w.im, &p, 1e-16))?)
        }
        KernelArg::Phi | KernelArg::PsiTilde | KernelArg::PsiCth | KernelArg::PsiMu => {
            let w = echo("w", required("w", &a.w)?);
            let id = match (a.kernel, plus) {
                (KernelArg::Phi, true) => DegenerateKernelId::PhiPlus,
                (KernelArg::Phi, false) => DegenerateKernelId::PhiMinus,
                (KernelArg::PsiTilde, true) => DegenerateKernelId::PsiTildePlus,
                (KernelArg::PsiTilde, false) => DegenerateKernelId::PsiTildeMinus,
                (KernelArg::PsiCth, _) => DegenerateKernelId::PsiCth,
                (_, true) => DegenerateKernelId::PsiMuPlus,
                (_, false) => DegenerateKernelId::PsiMuMinus,
            };
            let t = match (id, &a.mu) {
                (DegenerateKernelId::PsiCth, None) => {
                    let eta = required("eta", &a.eta)?;
                    // cth only needs η; any in-zone μ completes the pair
                    Some(TrigParams::new(C64::new(0.5, 0.5 * eta.im / eta.re), eta)?)
                }
                _ => trig(&a.mu, &a.eta)?,
            };
            if let Some(t) = t {
                echo("eta", t.eta());
                if matches!(id, DegenerateKernelId::PsiMuPlus | DegenerateKernelId::PsiMuMinus) {
                    echo("mu", t.mu());
                }
            }
            Out::Scalar(degenerate_kernel(id, w, t)?.value)
        }
        KernelArg::RElliptic => {
            let p = params(&a.tau)?;
            echo("tau", p.tau());
            let u = echo("u", required("u", &a.u)?);
            let v = echo("v", required("v", &a.v)?);
            Out::Matrix(build_r(u, v, echo("lambda", required("lambda", &a.lambda)?), &p)?)
        }
        KernelArg::RA | KernelArg::RB | KernelArg::RC => {
            let u = echo("u", required("u", &a.u)?);
            let v = echo("v", required("v", &a.v)?);
            let kind = match (a.kernel, a.family, plus) {
                (KernelArg::RA, Family::K0, _) => DegenerateKind::RaK0,
                (KernelArg::RA, Family::Cyl, true) => DegenerateKind::RaCyl,
                (KernelArg::RA, Family::Cyl, false) => DegenerateKind::RaCylMinus,
                (KernelArg::RB, Family::K0, _) => DegenerateKind::RbK0,
                (KernelArg::RB, Family::Cyl, true) => DegenerateKind::RbCyl,
                (KernelArg::RB, Family::Cyl, false) => DegenerateKind::RbCylMinus,
                _ => DegenerateKind::RcCyl,
            };
            let t = trig(&a.mu, &a.eta)?;
            if kind == DegenerateKind::RcCyl && t.is_none() {
                return Err(UsageError("r_c needs --mu and --eta".into()));
            }
            if let Some(t) = t {
                echo("mu", t.mu());
                echo("eta", t.eta());
            }
            Out::Matrix(build_degenerate_r(kind, u, v, t)?)
        }
    };
    let name = a.kernel.to_possible_value().map(|v| v.get_name().replace('-', "_")).unwrap_or_default();
    Ok(match (out, a.output) {
        (Out::Scalar(z), Output::Json) => {
            pretty(&json!({ "kernel": name, "inputs": Value::Object(inputs), "value": format_complex(z) }))
        }
        (Out::Scalar(z), Output::Csv) => format!("kernel,re,im\n{name},{},{}\n", z.re, z.im),
        (Out::Matrix(r), Output::Json) => pretty(&json!({ "kernel": name, "inputs": Value::Object(inputs), "matrix": matrix_json(&r) })),
        (Out::Matrix(r), Output::Csv) => matrix_csv(&r),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<(String, bool)> {
    let suite: Suite = a.suite.parse()?;
    let mut cfg = SuiteConfig::new(suite, a.samples, a.seed);
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    cfg.tau = complex("tau", &a.tau)?;
    if let Some(t) = cfg.tau {
        EllipticParams::new(t)?;
    }
    cfg.lambda = complex("lambda", &a.lambda)?;
    if let Some(l) = cfg.lambda {
        let Some(t) = cfg.tau else {
            return Err(UsageError("--lambda needs a fixed --tau so the band -Im tau < Im lambda < 0 can be checked".into()));
        };
        if !(l.im < 0.0 && l.im > -t.im) {
            return Err(UsageError(format!("lambda out of band: need -Im tau < Im lambda < 0, got Im lambda = {} with Im tau = {}", l.im, t.im)));
        }
    }
    cfg.trig = trig(&a.mu, &a.eta)?;
    cfg.quadrature_nodes = a.quadrature_nodes;
    if let Some(n) = a.truncation {
        cfg.truncation = n;
    }
    eprintln!("{}", suite.header());
    let report = run_suite(suite, &cfg)?;
    let text = match a.output {
        Output::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Output::Csv => report.to_csv(),
    };
    Ok((text, report.passed))
}

fn cmd_degenerate(a: &DegenerateArgs) -> CliResult<String> {
    let case = match a.case {
        CaseArg::A => CaseId::A,
        CaseArg::B => CaseId::B,
        CaseArg::C => CaseId::C,
    };
    let mut base = LadderBase::default();
    if let Some(t) = complex("tau", &a.tau)? {
        EllipticParams::new(t)?;
        base.tau = t;
    }
    base.trig = trig(&a.mu, &a.eta)?;
    if case == CaseId::C && base.trig.is_none() {
        base.trig = Some(TrigParams::new(C64::new(0.5, 0.0), C64::new(1.0, 0.0))?);
    }
    let kernel = match a.kernel {
        LimitArg::G0 => LimitKernel::G0,
        LimitArg::GLambda => LimitKernel::GLambda(required("lambda", &a.lambda)?),
        LimitArg::PsiMu => LimitKernel::PsiMu,
    };
    let rows = degeneration_ladder(case, &a.scales, kernel, &default_samples(case), base)?;
    Ok(match a.output {
        Output::Csv => {
            let mut s = String::from("scale,kernel_id,max_error,fitted_rate,modular\n");
            for r in &rows {
                s.push_str(&format!("{},{},{:e},{},{}\n", r.scale, r.kernel_id.name(), r.max_error, r.fitted_rate, r.modular));
            }
            s
        }
        Output::Json => pretty(&Value::Array(
            rows.iter()
                .map(|r| {
                    json!({ "scale": r.scale, "kernel_id": r.kernel_id.name(), "max_error": r.max_error,
                            "fitted_rate": r.fitted_rate, "modular": r.modular })
                })
                .collect(),
        )),
    })
}

fn cmd_average(a: &AverageArgs) -> CliResult<String> {
    let identity = AverageIdentity::parse(&a.identity)?;
    if a.n_list.is_empty() || a.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(UsageError("--n-list must be a non-empty, strictly increasing list".into()));
    }
    let (du, dl, dt) = match identity {
        AverageIdentity::Ctg => ("0.3+0.2i", "0.15-0.25i", "0.9i"),
        AverageIdentity::GLambdaPlus | AverageIdentity::GLambdaMinus => ("0.25+0.1i", "0.2-0.3i", "0.8i"),
        _ => ("0.3-0.2i", "0.15-0.25i", "0.8i"),
    };
    let or = |s: &Option<String>, d: &str| s.clone().or_else(|| Some(d.to_string()));
    let u = required("u", &or(&a.u, du))?;
    let lambda = required("lambda", &or(&a.lambda, dl))?;
    let inputs = if identity.is_elliptic() {
        let p = params(&or(&a.tau, dt))?;
        let t = p.im_tau();
        if identity != AverageIdentity::Ctg && !(lambda.im < 0.0 && lambda.im > -t) {
            return Err(UsageError(format!("lambda out of band: need -Im tau < Im lambda < 0, got Im lambda = {} with Im tau = {t}", lambda.im)));
        }
        AverageInputs { u, lambda, params: Some(p), trig: None }
    } else {
        let t = match trig(&a.mu, &a.eta)? {
            Some(t) => t,
            None => TrigParams::new(C64::new(0.5, 0.0), C64::new(1.0, 0.0))?,
        };
        if t.mu().im != 0.0 {
            return Err(UsageError(format!("mu outside the zone of convergence: the lattice sum needs real mu, got {}", format_complex(t.mu()))));
        }
        AverageInputs { u, lambda, params: None, trig: Some(t) }
    };
    let mode = match a.mode {
        ModeArg::Paired => TailMode::Paired,
        ModeArg::Plain => TailMode::Plain,
        ModeArg::OneSided => TailMode::OneSided,
    };
    let rows = a
        .n_list
        .iter()
        .map(|&n| {
            let cfg = AveragingConfig::new(n, mode).with_tail_correction(a.tail_correction);
            average_residual(identity, &inputs, &cfg).map(|r| (n, r))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let paired = mode == TailMode::Paired;
    Ok(match a.output {
        Output::Csv => {
            let mut s = String::from("N,residual,paired\n");
            for (n, r) in &rows {
                s.push_str(&format!("{n},{r:e},{paired}\n"));
            }
            s
        }
        Output::Json => {
            pretty(&Value::Array(rows.iter().map(|(n, r)| json!({ "N": n, "residual": r, "paired": paired })).collect()))
        }
    })
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| UsageError(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<(String, bool)> {
    configure_threads()?;
    if cli.list_suites {
        return Ok((suite_listing(), true));
    }
    match cli.command {
        None => Err(UsageError("no subcommand given; try --help".into())),
        Some(Command::Eval(a)) => cmd_eval(&a).map(|s| (s, true)),
        Some(Command::Verify(a)) => cmd_verify(&a),
        Some(Command::Degenerate(a)) => cmd_degenerate(&a).map(|s| (s, true)),
        Some(Command::Average(a)) => cmd_average(&a).map(|s| (s, true)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
