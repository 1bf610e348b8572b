//! Command-line front end. Results go to standard output (or `--out`), one-line
//! diagnostics to standard error.
//!
//! Exit codes: 0 success, 1 not certified, 2 usage or input error, 3 numeric failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::certification::{
    certify_diagonal, certify_lti, certify_ltv, certify_nonlinear_grid, certify_row_rule, certify_scaled_l1,
    check_bendixson, check_gas, control_check, Certificate, ControlProblem, Verdict,
};
use crate::compound::{add_compound, k_content, mult_compound, schwarz_n_minus_1, transform_add_compound, wedge_columns};
use crate::domain::BoxDomain;
use crate::dynamics::{
    asymptotic_subspace, floquet, frame_from, integrate, variational_frame, volume_trace, DomainPolicy,
    FloquetOptions, IntegrationOptions, DEFAULT_HORIZON,
};
use crate::error::Error;
use crate::io;
use crate::matrix::Matrix;
use crate::measures::{measure, measure_k_direct, MeasureSpec, Norm};
use crate::models::{self, seir_orbit_diagnostics, ModelEntry, ModelFile};
use crate::spectra::{compound_spectrum_check, eigenvalues};

/// Comma-separated lists parse as one value; a bare `Vec` would make clap expect repeated flags.
type Floats = Vec<f64>;
type Counts = Vec<usize>;

#[derive(Parser, Debug)]
#[command(name = "kcontract", version, about = "Compound matrices, matrix measures and k-contraction certificates")]
#[command(args_override_self = true)]
struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for grid evaluation (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplicative or additive compound of a matrix.
    Compound(CompoundArgs),
    /// Wedge product of the columns of a matrix.
    Wedge(WedgeArgs),
    /// Matrix measure of a matrix or of its k-th additive compound.
    Measure(MeasureArgs),
    /// Eigenvalues, or the compound spectral check with --k.
    Spectrum(SpectrumArgs),
    /// Integrate a model and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Parallelotope volume trace under the variational flow.
    Volume(VolumeArgs),
    /// Locate a periodic orbit and report its Floquet multipliers.
    Floquet(FloquetArgs),
    /// Run one of the contraction certificates.
    Certify(CertifyArgs),
    /// Dimension of the decaying subspace of a linear system.
    Subspace(SubspaceArgs),
    /// k-dimensional content of a parameterized set by quadrature.
    Kcontent(KcontentArgs),
    /// Orbit-scaling diagnostics for the seir3 model.
    SeirDiagnostics(SeirArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CompoundKind {
    Additive,
    Multiplicative,
    /// `A^[n-1]` through the entry-permutation formula.
    Schwarz,
}

#[derive(Args, Debug)]
struct CompoundArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "multiplicative")]
    kind: CompoundKind,
    /// Report `T^(k) A^[k] (T^(k))^-1` for this coordinate change (additive only).
    #[arg(long)]
    transform: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WedgeArgs {
    /// Matrix whose columns are the vectors.
    #[arg(long)]
    vectors: PathBuf,
    #[arg(long, default_value = "l2")]
    norm: Norm,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "l2")]
    norm: Norm,
    /// Scaling `M` for `μ(M A M^-1)` (of the compound when --k is given).
    #[arg(long)]
    scaling: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// Built-in model: lti, diag2, oscillator, cos_ltv, seir3, hopf.
    #[arg(long)]
    model: Option<String>,
    /// Model parameter file `{"name", "params"}`.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    /// Constant matrix for the lti model.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StepArgs {
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_STEP)]
    h: f64,
    /// Keep every N-th step in the output.
    #[arg(long, default_value_t = 1)]
    record_every: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    step: StepArgs,
    #[arg(long, default_value_t = 10.0)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    x0: Option<Floats>,
    /// Also integrate a frame of the first k unit vectors and write its columns.
    #[arg(long)]
    k: Option<usize>,
    /// Treat leaving the model domain as an error.
    #[arg(long)]
    strict_domain: bool,
}

#[derive(Args, Debug)]
struct VolumeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    step: StepArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    t: f64,
    #[arg(long, default_value = "l2")]
    norm: Norm,
    /// Base point when no initial points are given.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    x0: Option<Floats>,
    /// JSON list of k+1 initial points; the frame starts at `a^i - a^(k+1)`.
    #[arg(long)]
    initials: Option<PathBuf>,
    /// Simplex coordinates of the base point (default: barycentre).
    #[arg(long, value_parser = parse_list)]
    anchor: Option<Floats>,
}

#[derive(Args, Debug)]
struct FloquetArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_STEP)]
    h: f64,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    seed: Option<Floats>,
    /// Overrides the model's period.
    #[arg(long)]
    period: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum RuleArg {
    Lti,
    Nonlinear,
    Diagonal,
    Row,
    ScaledL1,
    Bendixson,
    Gas,
    Control,
}

#[derive(Args, Debug)]
struct BoxArgs {
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    lower: Option<Floats>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    upper: Option<Floats>,
    /// Grid points per axis: one value for all axes or one per axis.
    #[arg(long, value_parser = parse_counts)]
    counts: Option<Counts>,
    /// Intersect the box with `{sum x <= 1}`.
    #[arg(long)]
    simplex: bool,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    rule: RuleArg,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    domain: BoxArgs,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value = "l2")]
    norm: Norm,
    #[arg(long)]
    scaling: Option<PathBuf>,
    /// Positive weights for the scaled-L1 rule.
    #[arg(long, value_parser = parse_list)]
    weights: Option<Floats>,
    /// Time grid `t0:t1:count` for time-varying models.
    #[arg(long, value_parser = parse_times)]
    times: Option<Floats>,
    /// Weight matrix P of the control check (default identity).
    #[arg(long)]
    p: Option<PathBuf>,
    /// Constant input matrix G of the control check.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Feedback gain k in `u = -k G^T P x` (0 leaves the loop open).
    #[arg(long, default_value_t = 0.0)]
    gain: f64,
}

#[derive(Args, Debug)]
struct SubspaceArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: f64,
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_STEP)]
    h: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Shape {
    /// Sphere of the given radius (2-content).
    Sphere,
    /// Arc of y = x^2 over [0, 1] (1-content).
    Parabola,
    /// Image of the unit cube under the columns of --matrix.
    Linear,
}

#[derive(Args, Debug)]
struct KcontentArgs {
    #[arg(long, value_enum)]
    shape: Shape,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Quadrature cells per parameter axis.
    #[arg(long, default_value_t = 200)]
    cells: usize,
}

#[derive(Args, Debug)]
struct SeirArgs {
    /// Parameter override `name=value` (lambda, zeta, c, q, p, gamma); repeatable.
    #[arg(long = "param", value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    /// Trajectory CSV `t,x1,x2,x3` to analyse instead of simulating.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long, value_parser = parse_list)]
    x0: Option<Floats>,
    #[arg(long, default_value_t = 200.0)]
    t: f64,
    /// Start of the analysed window (default: half of --t).
    #[arg(long)]
    from: Option<f64>,
    #[command(flatten)]
    step: StepArgs,
    /// Include every sample in the output.
    #[arg(long)]
    samples: bool,
}

fn parse_list(s: &str) -> std::result::Result<Floats, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{}': {}", v, e)))
        .collect()
}

fn parse_counts(s: &str) -> std::result::Result<Counts, String> {
    s.split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("'{}': {}", v, e)))
        .collect()
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{}'", s))?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("'{}': {}", v, e))?;
    Ok((k.trim().to_string(), v))
}

fn parse_times(s: &str) -> std::result::Result<Floats, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected t0:t1:count, got '{}'", s));
    }
    let t0: f64 = parts[0].parse().map_err(|e| format!("{}", e))?;
    let t1: f64 = parts[1].parse().map_err(|e| format!("{}", e))?;
    let n: usize = parts[2].parse().map_err(|e| format!("{}", e))?;
    if n == 0 || t1 < t0 {
        return Err(format!("bad time grid '{}'", s));
    }
    if n == 1 {
        return Ok(vec![t0]);
    }
    Ok((0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect())
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::UnknownModel(_) | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other),
        }
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

struct Outcome {
    text: String,
    certified: Option<bool>,
}

impl Outcome {
    fn json<T: Serialize>(v: &T) -> Self {
        Outcome {
            text: serde_json::to_string_pretty(v).expect("serializable") + "\n",
            certified: None,
        }
    }

    fn csv(text: String) -> Self {
        Outcome { text, certified: None }
    }

    fn certificate(c: &Certificate) -> Self {
        Outcome {
            certified: Some(c.verdict == Verdict::Certified),
            ..Outcome::json(c)
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Turns a JSON config object into flag tokens.
fn config_tokens(path: &Path) -> std::result::Result<Vec<OsString>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {}", path.display(), e))?;
    let obj = value
        .as_object()
        .ok_or_else(|| format!("{}: config must be a JSON object", path.display()))?;
    let mut out = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &Value| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(format!("config key '{}': unsupported value {}", key, other)),
        };
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined = items.iter().map(scalar).collect::<std::result::Result<Vec<_>, _>>()?.join(",");
                out.push(flag.into());
                out.push(joined.into());
            }
            Value::Object(map) if key == "params" || key == "param" => {
                for (pk, pv) in map {
                    out.push("--param".into());
                    out.push(format!("{}={}", pk, scalar(pv)?).into());
                }
            }
            other => {
                out.push(flag.into());
                out.push(scalar(other)?.into());
            }
        }
    }
    Ok(out)
}

/// Splices `--config` contents in right after the verb so later explicit flags win.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut config = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().to_string();
        if s == "--config" {
            config = Some(PathBuf::from(it.next().ok_or("--config needs a file")?));
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let tokens = config_tokens(&path)?;
    // program name, then the first non-flag token is the verb
    let verb_pos = rest
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| !a.to_string_lossy().starts_with('-'))
        .map(|(i, _)| i)
        .ok_or("no command given")?;
    let mut out: Vec<OsString> = rest[..=verb_pos].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&rest[verb_pos + 1..]);
    Ok(out)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e);
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(usage(format!("thread pool: {}", e))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &outcome.text).map_err(|e| format!("{}: {}", path.display(), e)),
                None => stdout.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {}", e);
                return 2;
            }
            match outcome.certified {
                Some(false) => 1,
                _ => 0,
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {}", msg.replace('\n', " "));
            2
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().replace('\n', " "));
            3
        }
    }
}

fn dispatch(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Compound(a) => cmd_compound(a),
        Command::Wedge(a) => cmd_wedge(a),
        Command::Measure(a) => cmd_measure(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Volume(a) => cmd_volume(a),
        Command::Floquet(a) => cmd_floquet(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Subspace(a) => cmd_subspace(a),
        Command::Kcontent(a) => cmd_kcontent(a),
        Command::SeirDiagnostics(a) => cmd_seir(a),
    }
}

fn cmd_compound(a: &CompoundArgs) -> CmdResult {
    let m = io::read_matrix(&a.matrix)?;
    let out = match a.kind {
        CompoundKind::Schwarz => schwarz_n_minus_1(&m)?,
        CompoundKind::Multiplicative => {
            let k = a.k.ok_or_else(|| usage("--k is required"))?;
            if a.transform.is_some() {
                return Err(usage("--transform applies to additive compounds"));
            }
            mult_compound(&m, k)?
        }
        CompoundKind::Additive => {
            let k = a.k.ok_or_else(|| usage("--k is required"))?;
            match &a.transform {
                Some(t) => transform_add_compound(&io::read_matrix(t)?, &m, k)?,
                None => add_compound(&m, k)?,
            }
        }
    };
    Ok(Outcome::json(&out))
}

fn cmd_wedge(a: &WedgeArgs) -> CmdResult {
    let m = io::read_matrix(&a.vectors)?;
    let w = wedge_columns(&m)?;
    #[derive(Serialize)]
    struct Out {
        n: usize,
        k: usize,
        coords: Vec<f64>,
        norm: Norm,
        value: f64,
    }
    Ok(Outcome::json(&Out {
        n: w.n,
        k: w.k,
        value: w.norm(a.norm),
        coords: w.coords,
        norm: a.norm,
    }))
}

fn cmd_measure(a: &MeasureArgs) -> CmdResult {
    let m = io::read_matrix(&a.matrix)?;
    let scaling = a.scaling.as_deref().map(io::read_matrix).transpose()?;
    let result = match (a.k, scaling) {
        (Some(k), None) => measure_k_direct(&m, k, a.norm)?,
        (Some(k), Some(s)) => measure(&add_compound(&m, k)?, &MeasureSpec::scaled(a.norm, s))?,
        (None, s) => measure(
            &m,
            &MeasureSpec {
                norm: a.norm,
                scaling: s,
            },
        )?,
    };
    Ok(Outcome::json(&result))
}

fn cmd_spectrum(a: &SpectrumArgs) -> CmdResult {
    let m = io::read_matrix(&a.matrix)?;
    match a.k {
        Some(k) => Ok(Outcome::json(&compound_spectrum_check(&m, k)?)),
        None => Ok(Outcome::json(&eigenvalues(&m)?)),
    }
}

fn load_model(a: &ModelArgs) -> std::result::Result<ModelEntry, Failure> {
    let overrides: BTreeMap<String, f64> = a.params.iter().cloned().collect();
    if let Some(path) = &a.model_file {
        let mut file: ModelFile = io::read_json(path)?;
        file.params.extend(overrides);
        if let Some(m) = &a.matrix {
            file.matrix = Some(io::read_matrix(m)?);
        }
        return Ok(file.instantiate()?);
    }
    match (a.model.as_deref(), &a.matrix) {
        (Some("lti") | None, Some(path)) => {
            if !overrides.is_empty() {
                return Err(usage("the lti model takes no parameters"));
            }
            Ok(models::lti(io::read_matrix(path)?)?)
        }
        (Some(name), None) => Ok(models::model(name, &overrides)?),
        (Some(name), Some(_)) => Err(usage(format!("model '{}' takes no --matrix", name))),
        (None, None) => Err(usage("give --model, --model-file or --matrix")),
    }
}

fn initial_state(entry: &ModelEntry, x0: &Option<Floats>) -> std::result::Result<Vec<f64>, Failure> {
    let x = x0.clone().unwrap_or_else(|| entry.default_state.clone());
    if x.len() != entry.system.dim() {
        return Err(usage(format!(
            "initial state has {} entries, model dimension is {}",
            x.len(),
            entry.system.dim()
        )));
    }
    Ok(x)
}

fn unit_frame(n: usize, k: usize) -> std::result::Result<Matrix, Failure> {
    if k == 0 || k > n {
        return Err(usage(format!("--k must lie in [1, {}]", n)));
    }
    let mut w = Matrix::zeros(n, k);
    for i in 0..k {
        w[(i, i)] = 1.0;
    }
    Ok(w)
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let entry = load_model(&a.model)?;
    let x0 = initial_state(&entry, &a.x0)?;
    let policy = if a.strict_domain {
        DomainPolicy::Error
    } else {
        DomainPolicy::Warn
    };
    let opts = IntegrationOptions::with_step(a.step.h)
        .record_every(a.step.record_every)
        .domain_policy(policy);
    match a.k {
        Some(k) => {
            let w0 = unit_frame(entry.system.dim(), k)?;
            let frame = frame_from(&entry.system, &x0, &w0, a.t0, a.t, &opts)?;
            Ok(Outcome::csv(io::frame_csv(&frame)))
        }
        None => {
            let traj = integrate(&entry.system, &x0, a.t0, a.t, &opts)?;
            Ok(Outcome::csv(io::trajectory_csv(&traj.times, &traj.states)))
        }
    }
}

fn cmd_volume(a: &VolumeArgs) -> CmdResult {
    let entry = load_model(&a.model)?;
    let n = entry.system.dim();
    let opts = IntegrationOptions::with_step(a.step.h).record_every(a.step.record_every);
    let frame = match &a.initials {
        Some(path) => {
            let initials: Vec<Vec<f64>> = io::read_json(path)?;
            if initials.len() != a.k + 1 {
                return Err(usage(format!("--initials needs {} points", a.k + 1)));
            }
            let r = a
                .anchor
                .clone()
                .unwrap_or_else(|| vec![1.0 / (a.k + 1) as f64; a.k]);
            variational_frame(&entry.system, &initials, &r, 0.0, a.t, &opts)?
        }
        None => {
            let x0 = initial_state(&entry, &a.x0)?;
            frame_from(&entry.system, &x0, &unit_frame(n, a.k)?, 0.0, a.t, &opts)?
        }
    };
    let trace = volume_trace(&frame, a.norm)?;
    Ok(Outcome::csv(io::trace_csv(&trace)))
}

fn cmd_floquet(a: &FloquetArgs) -> CmdResult {
    let entry = load_model(&a.model)?;
    let system = match a.period {
        Some(p) => entry.system.clone().with_period(p)?,
        None => entry.system.clone(),
    };
    let seed = initial_state(&entry, &a.seed)?;
    let opts = FloquetOptions {
        h: a.h,
        ..Default::default()
    };
    Ok(Outcome::json(&floquet(&system, &seed, &opts)?))
}

fn build_box(args: &BoxArgs, entry: Option<&ModelEntry>, n: usize) -> std::result::Result<BoxDomain, Failure> {
    let mut b = match (&args.lower, &args.upper) {
        (Some(l), Some(u)) => BoxDomain::new(l.clone(), u.clone())?,
        (None, None) => match entry.and_then(|e| e.system.domain()) {
            Some(d) => d.clone(),
            None => return Err(usage("this rule needs --lower and --upper")),
        },
        _ => return Err(usage("give both --lower and --upper")),
    };
    if b.dim() != n {
        return Err(usage(format!("box has dimension {}, system has {}", b.dim(), n)));
    }
    if let Some(c) = &args.counts {
        b = match c.len() {
            1 => b.with_uniform_count(c[0])?,
            _ => b.with_counts(c.clone())?,
        };
    }
    if args.simplex {
        b = b.with_sum_cap(1.0);
    }
    Ok(b)
}

/// Matrix samples `(t, A(t))` for the diagonal and row rules.
fn matrix_samples(a: &CertifyArgs) -> std::result::Result<Vec<(f64, Matrix)>, Failure> {
    let entry = load_model(&a.model)?;
    let coef = entry
        .coefficient
        .clone()
        .ok_or_else(|| usage(format!("model '{}' is not linear", entry.name)))?;
    let times = a.times.clone().unwrap_or_else(|| vec![0.0]);
    Ok(times.into_iter().map(|t| (t, coef(t))).collect())
}

fn cmd_certify(a: &CertifyArgs) -> CmdResult {
    let scaling = a.scaling.as_deref().map(io::read_matrix).transpose()?;
    let spec = MeasureSpec {
        norm: a.norm,
        scaling,
    };
    let cert = match a.rule {
        RuleArg::Lti => {
            let entry = load_model(&a.model)?;
            let coef = entry
                .coefficient
                .clone()
                .ok_or_else(|| usage(format!("model '{}' is not linear", entry.name)))?;
            match &a.times {
                Some(times) => certify_ltv(|t| coef(t), a.k, &spec, times)?,
                None if entry.system.is_autonomous() => certify_lti(&coef(0.0), a.k, &spec)?,
                None => return Err(usage("time-varying model needs --times t0:t1:count")),
            }
        }
        RuleArg::Nonlinear => {
            let entry = load_model(&a.model)?;
            let omega = build_box(&a.domain, Some(&entry), entry.system.dim())?;
            certify_nonlinear_grid(&entry.system, &omega, a.k, &spec, a.times.as_deref())?
        }
        RuleArg::Diagonal => certify_diagonal(&matrix_samples(a)?, a.k)?,
        RuleArg::Row => certify_row_rule(&matrix_samples(a)?)?,
        RuleArg::ScaledL1 => {
            let entry = load_model(&a.model)?;
            let omega = build_box(&a.domain, Some(&entry), entry.system.dim())?;
            let v = a.weights.as_ref().ok_or_else(|| usage("--weights is required"))?;
            certify_scaled_l1(&entry.system, &omega, a.k, v)?
        }
        RuleArg::Bendixson => {
            let entry = load_model(&a.model)?;
            let omega = build_box(&a.domain, Some(&entry), entry.system.dim())?;
            check_bendixson(&entry.system, &omega, a.norm)?
        }
        RuleArg::Gas => {
            let entry = load_model(&a.model)?;
            let omega = build_box(&a.domain, Some(&entry), entry.system.dim())?;
            check_gas(&entry.system, &omega, a.norm)?
        }
        RuleArg::Control => {
            let drift = a.model.matrix.as_deref().ok_or_else(|| usage("--matrix (linear drift) is required"))?;
            let am = io::read_matrix(drift)?;
            let n = am.require_square()?;
            let p = match &a.p {
                Some(path) => io::read_matrix(path)?,
                None => Matrix::identity(n),
            };
            let g = match &a.input {
                Some(path) => io::read_matrix(path)?,
                None => Matrix::zeros(n, 1),
            };
            if g.rows() != n || p.shape() != (n, n) {
                return Err(usage("P must be n x n and G must have n rows"));
            }
            // u = −k Gᵀ P x, so G u = −k G Gᵀ P x
            let kgp = g.matmul(&g.transpose())?.matmul(&p)?.scale(-a.gain);
            let gtp = g.transpose().matmul(&p)?.scale(-a.gain);
            let (a1, a2, g1, k1) = (am.clone(), am, g, kgp);
            let problem = ControlProblem::new(
                n,
                move |x| a1.mul_vec(x),
                move |_| a2.clone(),
                move |_| g1.clone(),
                move |x| gtp.mul_vec(x),
                move |_| k1.clone(),
            )?;
            let omega = build_box(&a.domain, None, n)?;
            control_check(&problem, &p, &omega)?
        }
    };
    Ok(Outcome::certificate(&cert))
}

fn cmd_subspace(a: &SubspaceArgs) -> CmdResult {
    let entry = load_model(&a.model)?;
    let coef = entry
        .coefficient
        .clone()
        .ok_or_else(|| usage(format!("model '{}' is not linear", entry.name)))?;
    let report = asymptotic_subspace(|t| coef(t), entry.system.dim(), a.k, a.horizon, a.h)?;
    Ok(Outcome::json(&report))
}

fn cmd_kcontent(a: &KcontentArgs) -> CmdResult {
    #[derive(Serialize)]
    struct Out {
        shape: String,
        value: f64,
        exact: f64,
        abs_error: f64,
        cells: usize,
    }
    let c = a.cells.max(1);
    let (name, value, exact) = match a.shape {
        Shape::Sphere => {
            let r = a.radius;
            let v = k_content(
                |p: &[f64]| {
                    let (u, w) = (p[0], p[1]);
                    vec![r * u.sin() * w.cos(), r * u.sin() * w.sin(), r * u.cos()]
                },
                &[0.0, 0.0],
                &[std::f64::consts::PI, 2.0 * std::f64::consts::PI],
                &[c, c],
            )?;
            ("sphere", v, 4.0 * std::f64::consts::PI * r * r)
        }
        Shape::Parabola => {
            let v = k_content(|p: &[f64]| vec![p[0], p[0] * p[0]], &[0.0], &[1.0], &[c])?;
            ("parabola", v, 5f64.sqrt() / 2.0 + 2f64.asinh() / 4.0)
        }
        Shape::Linear => {
            let m = io::read_matrix(a.matrix.as_deref().ok_or_else(|| usage("--matrix is required"))?)?;
            let k = m.cols();
            let mm = m.clone();
            let v = k_content(move |p: &[f64]| mm.mul_vec(p), &vec![0.0; k], &vec![1.0; k], &vec![c; k])?;
            ("linear", v, wedge_columns(&m)?.norm(Norm::L2))
        }
    };
    Ok(Outcome::json(&Out {
        shape: name.into(),
        value,
        exact,
        abs_error: (value - exact).abs(),
        cells: c,
    }))
}

fn cmd_seir(a: &SeirArgs) -> CmdResult {
    let params: BTreeMap<String, f64> = a.params.iter().cloned().collect();
    let entry = models::model("seir3", &params)?;
    let seir = entry.seir.clone().expect("seir3 entry carries its parameters");
    let (times, states) = match &a.trajectory {
        Some(path) => io::read_trajectory_csv(path, Some(3))?,
        None => {
            let x0 = initial_state(&entry, &a.x0)?;
            let from = a.from.unwrap_or(0.5 * a.t);
            let opts = IntegrationOptions::with_step(a.step.h).record_every(a.step.record_every);
            let traj = integrate(&entry.system, &x0, 0.0, a.t, &opts)?;
            traj.times
                .into_iter()
                .zip(traj.states)
                .filter(|(t, _)| *t >= from)
                .unzip()
        }
    };
    let mut report = seir_orbit_diagnostics(&seir, &times, &states)?;
    #[derive(Serialize)]
    struct Out {
        parameters: BTreeMap<String, f64>,
        t_start: f64,
        t_end: f64,
        #[serde(flatten)]
        report: crate::models::SeirDiagnostics,
    }
    if !a.samples {
        report.samples.clear();
    }
    Ok(Outcome::json(&Out {
        parameters: entry.parameters,
        t_start: times[0],
        t_end: times[times.len() - 1],
        report,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_list("1, -2.5").unwrap(), vec![1.0, -2.5]);
        assert_eq!(parse_kv("zeta=0.5").unwrap(), ("zeta".to_string(), 0.5));
        assert!(parse_kv("zeta").is_err());
        assert_eq!(parse_times("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_times("0:1").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(["kcontract", "frobnicate"], &mut out, &mut err), 2);
        assert_eq!(run_with(["kcontract", "certify", "--rule", "lti", "--bogus"], &mut out, &mut err), 2);
        assert_eq!(run_with(["kcontract", "--help"], &mut out, &mut err), 0);
    }

    #[test]
    fn config_is_spliced_after_verb() {
        let dir = std::env::temp_dir().join(format!("kcontract-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.json");
        fs::write(&cfg, r#"{"k": 3, "norm": "l1", "params": {"zeta": 0.5}}"#).unwrap();
        let args: Vec<OsString> = ["kcontract", "--config", cfg.to_str().unwrap(), "measure", "--k", "2"]
            .iter()
            .map(OsString::from)
            .collect();
        let expanded: Vec<String> = expand_config(args)
            .unwrap()
            .iter()
            .map(|s| s.to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            expanded,
            vec!["kcontract", "measure", "--k", "3", "--norm", "l1", "--param", "zeta=0.5", "--k", "2"]
        );
        fs::remove_dir_all(&dir).unwrap();
    }
}
