use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qmetric_core::actions::{Action, CotangentElement, GLElement, GroupElement, Point};
use qmetric_core::matrix::{ComplexMatrix, HermitianMatrix, MatrixJson};
use qmetric_core::monotone::MonotoneFunctionSpec;
use qmetric_core::petz::{gradient_field, metric_eval, MetricSpec};
use qmetric_core::state::{DensityState, StatePoint, TangentVector};
use qmetric_core::verify::{self, SuiteConfig, SuiteReport};
use qmetric_core::{Error, Tolerances};

const EXIT_VIOLATIONS: u8 = 2;
const EXIT_ERROR: u8 = 1;

#[derive(Parser)]
#[command(name = "qmetric", version, about = "Verify monotone quantum metrics and the group actions behind their gradients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every suite.
    RunAll(SuiteArgs),
    /// Gradients against fundamental fields of the deformed actions.
    Gradient(SuiteArgs),
    /// Lie brackets of fundamental and gradient fields.
    Commutators(SuiteArgs),
    /// Properties of the Petz metrics.
    Metric(SuiteArgs),
    /// Operator-monotonicity boundary of the deformation family.
    KappaScan(SuiteArgs),
    /// Axioms, intertwining and conjugacy of the group actions.
    Actions(SuiteArgs),
    /// Evaluate a function, gradient, metric or action on given inputs.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SuiteArgs {
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated deformation parameters.
    #[arg(long, value_delimiter = ',')]
    kappas: Option<Vec<f64>>,
    /// Comma-separated function specs, e.g. bh,wy,bkm,gl:0.3.
    #[arg(long, value_delimiter = ',')]
    specs: Option<Vec<String>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time per suite (reports are then not reproducible).
    #[arg(long)]
    timing: bool,
}

impl SuiteArgs {
    fn config(&self) -> Result<SuiteConfig, Error> {
        let mut cfg = SuiteConfig::default();
        if let Some(d) = &self.dims {
            cfg.dims = d.clone();
        }
        if let Some(k) = &self.kappas {
            cfg.kappas = k.clone();
        }
        if let Some(s) = &self.specs {
            cfg.specs = s.iter().map(|x| x.parse()).collect::<Result<_, _>>()?;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        cfg.seed = self.seed;
        cfg.tol_scale = self.tol_scale;
        cfg.timing = self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Function spec, e.g. bkm or gl:0.5.
    #[arg(long)]
    spec: Option<String>,
    /// Scalar argument: prints f(x).
    #[arg(long)]
    x: Option<f64>,
    /// State JSON (`kind` density or positive, `dim`, `re`, `im`).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Observable matrix JSON: prints the gradient of its expectation value.
    #[arg(long)]
    observable: Option<PathBuf>,
    /// Two tangent matrix JSON files: prints the metric value.
    #[arg(long, num_args = 2)]
    tangents: Option<Vec<PathBuf>>,
    /// Metric prefactor.
    #[arg(long, default_value_t = 1.0)]
    prefactor: f64,
    /// Action name: alpha, beta-hat, beta, beta-kappa, gamma-hat, gamma-kappa, zeta.
    #[arg(long)]
    action: Option<String>,
    /// Group element matrix JSON (the unitary part for cotangent actions).
    #[arg(long)]
    element: Option<PathBuf>,
    /// Shift matrix JSON for cotangent actions.
    #[arg(long)]
    shift: Option<PathBuf>,
    /// Point acted on by zeta (Hermitian matrix JSON).
    #[arg(long)]
    point: Option<PathBuf>,
    #[arg(long)]
    kappa: Option<f64>,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, Error> {
    ComplexMatrix::from_json_str(&read(path)?)
}

fn read_hermitian(path: &Path) -> Result<HermitianMatrix, Error> {
    HermitianMatrix::new(read_matrix(path)?, Tolerances::default().hermitian)
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn eval(args: &EvalArgs) -> Result<String, Error> {
    let spec = args.spec.as_deref().map(str::parse::<MonotoneFunctionSpec>).transpose()?;
    if let Some(action) = &args.action {
        return eval_action(args, action);
    }
    let spec = spec.ok_or_else(|| Error::Parse("eval needs --spec or --action".into()))?;
    if let Some(x) = args.x {
        return Ok(format!("{:?}", spec.eval(x)?));
    }
    let state = args.state.as_deref().ok_or_else(|| Error::Parse("eval needs --x or --state".into()))?;
    let rho = match StatePoint::from_json_str(&read(state)?)? {
        StatePoint::Density(r) => r,
        StatePoint::Positive(_) => return Err(Error::Parse("gradient and metric need a density state".into())),
    };
    let metric = MetricSpec::new(spec, args.prefactor)?;
    if let Some(a) = &args.observable {
        let g = gradient_field(&metric, &read_hermitian(a)?, &rho)?;
        return Ok(json(&g.matrix().matrix().to_json()));
    }
    if let Some(t) = &args.tangents {
        let v = TangentVector::state(read_hermitian(&t[0])?)?;
        let w = TangentVector::state(read_hermitian(&t[1])?)?;
        return Ok(format!("{:?}", metric_eval(&metric, &rho, &v, &w)?));
    }
    Err(Error::Parse("eval with --state needs --observable or --tangents".into()))
}

fn eval_action(args: &EvalArgs, name: &str) -> Result<String, Error> {
    let action = Action::from_name(name, args.kappa)?;
    let element_path = args.element.as_deref().ok_or_else(|| Error::Parse("--action needs --element".into()))?;
    let m = read_matrix(element_path)?;
    let n = m.dim();
    let g = match action {
        Action::Alpha | Action::BetaHat | Action::Beta | Action::BetaKappa(_) => GroupElement::Gl(GLElement::new(m)?),
        _ => {
            let shift = match &args.shift {
                Some(p) => read_hermitian(p)?,
                None => HermitianMatrix::zeros(n),
            };
            GroupElement::Cotangent(CotangentElement::new(m, shift)?)
        }
    };
    let x = match action {
        Action::Zeta => {
            let p = args.point.as_deref().ok_or_else(|| Error::Parse("zeta needs --point".into()))?;
            Point::Hermitian(read_hermitian(p)?)
        }
        _ => {
            let p = args.state.as_deref().ok_or_else(|| Error::Parse(format!("{name} needs --state")))?;
            match (StatePoint::from_json_str(&read(p)?)?, action) {
                (StatePoint::Positive(w), Action::BetaHat | Action::GammaHat) => Point::Cone(w),
                (StatePoint::Density(r), Action::BetaHat | Action::GammaHat) => Point::Cone(r.as_positive().clone()),
                (StatePoint::Density(r), _) => Point::State(r),
                (StatePoint::Positive(w), _) => Point::State(DensityState::from_positive(w)?),
            }
        }
    };
    let moved = action.apply(&g, &x)?;
    let out: StatePointOrMatrix = match moved {
        Point::Cone(w) => StatePointOrMatrix::State(StatePoint::Positive(w).to_json()),
        Point::State(r) => StatePointOrMatrix::State(StatePoint::Density(r).to_json()),
        Point::Hermitian(h) => StatePointOrMatrix::Matrix(h.matrix().to_json()),
    };
    Ok(json(&out))
}

#[derive(Serialize)]
#[serde(untagged)]
enum StatePointOrMatrix {
    State(qmetric_core::state::StateJson),
    Matrix(MatrixJson),
}

fn write_out(out: Option<&Path>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{body}").map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

fn render(args: &SuiteArgs, suites: &[SuiteReport], whole: Option<&verify::RunAllReport>) -> Result<String, Error> {
    match args.format {
        Format::Json => Ok(match whole {
            Some(r) => json(r),
            None => json(&suites[0]),
        }),
        Format::Csv => {
            let mut buf = Vec::new();
            verify::write_csv(suites, &mut buf)?;
            Ok(String::from_utf8(buf).expect("csv is utf-8").trim_end().to_string())
        }
    }
}

fn run_suite(args: &SuiteArgs, run: fn(&SuiteConfig) -> qmetric_core::Result<SuiteReport>) -> Result<bool, Error> {
    let report = run(&args.config()?)?;
    write_out(args.out.as_deref(), &render(args, std::slice::from_ref(&report), None)?)?;
    Ok(report.passed)
}

fn dispatch(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::RunAll(args) => {
            let report = verify::run_all(&args.config()?)?;
            write_out(args.out.as_deref(), &render(&args, &report.suites, Some(&report))?)?;
            Ok(report.passed)
        }
        Command::Gradient(args) => run_suite(&args, verify::suite_gradient_equals_fundamental),
        Command::Commutators(args) => run_suite(&args, verify::suite_commutators),
        Command::Metric(args) => run_suite(&args, verify::suite_metric_properties),
        Command::KappaScan(args) => run_suite(&args, verify::suite_kappa_scan),
        Command::Actions(args) => run_suite(&args, verify::suite_action_structure),
        Command::Eval(args) => {
            let body = eval(&args)?;
            write_out(None, &body)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VIOLATIONS),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
