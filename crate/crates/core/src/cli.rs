//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the process exit code:
//! 0 success, 1 usage error, 2 verification failure, 3 resource cap exceeded.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analysis::{
    distance_curve, minorization_report, mixing_time, relaxation_mixing_bounds, spectrum, verify_coupling_bound,
};
use crate::combinatorics::{rational_string, Rational};
use crate::coupling::{coalescence_experiment, StartPair};
use crate::error::Error;
use crate::kernel::{block_count_matrix, lumped_matrix, state_count, Label};
use crate::oracle::{draw_log_csv, StamSampler};
use crate::partitions::{SetPartition, Tuple};
use crate::rng::{RngStream, GENERATOR};
use crate::simulate::{default_steps, lumped_trajectory, sample_partitions};
use crate::fmt_f64;

/// Largest `n` accepted by the exact-analysis commands.
pub const ANALYSIS_CAP: usize = 12;
/// Largest `n` for which a full lumped matrix is written out.
pub const MATRIX_EXPORT_CAP: usize = 7;
/// Largest `n` accepted by the samplers.
pub const SAMPLER_CAP: usize = 255;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "burnside", version, about = "Burnside process on set partitions: samplers, exact kernels, mixing analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    Lumped,
    BlockCount,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample set partitions by running the Burnside chain.
    Sample(SampleArgs),
    /// Exact uniform samples from Stam's urn sampler, with a draw log.
    Stam(StamArgs),
    /// One lumped trajectory.
    Trajectory(TrajectoryArgs),
    /// Exact transition matrix.
    Matrix(MatrixArgs),
    /// Eigenvalues and the spectral bounds.
    Spectrum(SizeArgs),
    /// Exact distance to stationarity against the analytic bounds.
    Tvcurve(CurveArgs),
    /// Coalescence experiment for the coupled chains.
    Couple(CoupleArgs),
    /// Exact minorization constant (k < n).
    Minorize(MinorizeArgs),
    /// Check every applicable bound; exits 2 on any violation.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    /// Alphabet size (default n).
    #[arg(long)]
    pub k: Option<usize>,
    /// Chain steps per sample (default from the mixing bound for --eps).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StamArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting partition as a growth string such as "0,1,0" (default one block).
    #[arg(long)]
    pub start: Option<String>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = MatrixKind::Lumped)]
    pub kind: MatrixKind,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 60)]
    pub tmax: usize,
}

#[derive(Debug, Args)]
pub struct CoupleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub tmax: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start the right chain from stationarity instead of the far extreme.
    #[arg(long)]
    pub stationary: bool,
}

#[derive(Debug, Args)]
pub struct MinorizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 60)]
    pub tmax: usize,
    /// Accuracy used for the relaxation-time sandwich.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn cap(n: usize, limit: usize) -> Result<(), Failure> {
    if n > limit {
        return Err(Error::CapExceeded { n, cap: limit }.into());
    }
    Ok(())
}

fn positive(n: usize, k: usize) -> Result<(), Failure> {
    if n == 0 || k == 0 {
        return Err(usage("--n and --k must be at least 1"));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<(), Failure> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// What a command produced: JSON body or CSV text.
enum Output {
    Json(Value),
    Csv(String),
}

struct Meta {
    command: &'static str,
    command_line: String,
    fields: Map<String, Value>,
}

impl Meta {
    fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("command".into(), self.command.into());
        m.insert("command_line".into(), self.command_line.clone().into());
        m.extend(self.fields.clone());
        Value::Object(m)
    }

    fn csv_header(&self) -> String {
        let mut out = format!(
            "# version: {}\n# command: {}\n# command_line: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.command_line
        );
        for (k, v) in &self.fields {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out
    }
}

fn render(meta: &Meta, output: Output) -> String {
    match output {
        Output::Json(body) => {
            let mut obj = Map::new();
            obj.insert("metadata".into(), meta.json());
            match body {
                Value::Object(fields) => obj.extend(fields),
                other => {
                    obj.insert("result".into(), other);
                }
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
            s.push('\n');
            s
        }
        Output::Csv(body) => meta.csv_header() + &body,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` (or `--out`) and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = pool.install(|| execute(&cli, command_line));
    match result {
        Ok((text, code)) => {
            let written = match &cli.out {
                Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            if code == EXIT_VERIFY {
                let _ = writeln!(err, "verification failed");
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, command_line: String) -> Result<(String, i32), Failure> {
    let mut code = EXIT_OK;
    let new_meta = |command| Meta { command, command_line: command_line.clone(), fields: Map::new() };
    let (meta, output) = match &cli.command {
        Command::Sample(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            cap(a.n, SAMPLER_CAP)?;
            check_eps(a.eps)?;
            let steps = a.steps.unwrap_or_else(|| default_steps(a.n, k, a.eps));
            let samples = sample_partitions(a.n, k, steps, a.count, a.seed)?;
            let mut meta = new_meta("sample");
            meta.set("n", a.n).set("k", k).set("steps", steps).set("count", a.count).set("seed", a.seed);
            meta.set("generator", GENERATOR);
            let output = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => Output::Csv(samples.iter().map(|x| format!("{x}\n")).collect()),
                Format::Json => Output::Json(json!({ "samples": samples.iter().map(|x| x.to_string()).collect::<Vec<_>>() })),
            };
            (meta, output)
        }
        Command::Stam(a) => {
            if a.n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            cap(a.n, SAMPLER_CAP)?;
            let sampler = StamSampler::new(a.n)?;
            let mut rng = RngStream::new(a.seed, 0).rng();
            let draws: Vec<_> = (0..a.count).map(|_| sampler.sample(&mut rng)).collect();
            let mut meta = new_meta("stam");
            meta.set("n", a.n).set("count", a.count).set("seed", a.seed).set("generator", GENERATOR);
            meta.set("max_urns", sampler.max_urns()).set("tail_bound", sampler.tail_bound());
            let output = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => Output::Csv(draw_log_csv(&draws)),
                Format::Json => Output::Json(json!({
                    "draws": draws.iter().map(|d| json!({
                        "rgs": d.partition.to_string(),
                        "urn_count": d.urn_count,
                        "block_count": d.partition.block_count(),
                        "empty_urns": d.empty_urns,
                    })).collect::<Vec<_>>()
                })),
            };
            (meta, output)
        }
        Command::Trajectory(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            cap(a.n, SAMPLER_CAP)?;
            check_eps(a.eps)?;
            let start = match &a.start {
                Some(s) => s.parse::<SetPartition>()?,
                None => SetPartition::one_block(a.n),
            };
            if start.n() != a.n {
                return Err(usage(format!("--start has {} elements, expected {}", start.n(), a.n)));
            }
            let steps = a.steps.unwrap_or_else(|| default_steps(a.n, k, a.eps));
            let traj = lumped_trajectory(&start, k, steps, RngStream::new(a.seed, 0))?;
            let meta = new_meta("trajectory");
            let output = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => Output::Csv(traj.to_csv()),
                Format::Json => Output::Json(json!({
                    "n": a.n, "k": k, "seed": a.seed, "steps": steps, "generator": GENERATOR,
                    "states": traj.states.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                })),
            };
            (meta, output)
        }
        Command::Matrix(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            let m = match a.kind {
                MatrixKind::Lumped => {
                    cap(a.n, MATRIX_EXPORT_CAP)?;
                    lumped_matrix(a.n, k)?
                }
                MatrixKind::BlockCount => {
                    cap(a.n, ANALYSIS_CAP)?;
                    block_count_matrix(a.n, k)?
                }
            };
            let mut meta = new_meta("matrix");
            meta.set("n", a.n).set("k", k);
            let output = match cli.format.unwrap_or(Format::Json) {
                Format::Json => Output::Json(m.to_json()),
                Format::Csv => {
                    let label = |l: &Label| match l {
                        Label::Partition(x) => format!("\"{x}\""),
                        Label::BlockCount(j) => j.to_string(),
                    };
                    let mut s = String::from("label");
                    m.labels().iter().for_each(|l| s.push_str(&format!(",{}", label(l))));
                    s.push('\n');
                    for (x, l) in m.labels().iter().enumerate() {
                        s.push_str(&label(l));
                        m.row(x).for_each(|v| s.push_str(&format!(",{}", rational_string(v))));
                        s.push('\n');
                    }
                    Output::Csv(s)
                }
            };
            (meta, output)
        }
        Command::Spectrum(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            cap(a.n, ANALYSIS_CAP)?;
            let report = spectrum(a.n, k)?;
            let mut meta = new_meta("spectrum");
            meta.set("n", a.n).set("k", k);
            let output = match cli.format.unwrap_or(Format::Json) {
                Format::Json => Output::Json(report.to_json()),
                Format::Csv => {
                    let values = if report.eigenvalues.is_empty() { &report.block_eigenvalues } else { &report.eigenvalues };
                    let mut s = String::from("index,eigenvalue\n");
                    values.iter().enumerate().for_each(|(i, v)| s.push_str(&format!("{i},{}\n", fmt_f64(*v))));
                    Output::Csv(s)
                }
            };
            (meta, output)
        }
        Command::Tvcurve(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            cap(a.n, ANALYSIS_CAP)?;
            let curve = distance_curve(&block_count_matrix(a.n, k)?, a.tmax)?;
            let mut meta = new_meta("tvcurve");
            meta.set("n", a.n).set("k", k).set("tmax", a.tmax);
            meta.set("exact_through", curve.d_exact.len() as i64 - 1);
            meta.set("float_error_bound", curve.float_error_bound);
            let output = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => Output::Csv(curve.to_csv()),
                Format::Json => Output::Json(curve.to_json()),
            };
            (meta, output)
        }
        Command::Couple(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            cap(a.n, SAMPLER_CAP)?;
            let start = if a.stationary {
                cap(a.n, ANALYSIS_CAP)?;
                StartPair::StationaryRight(Tuple::new(vec![1; a.n], k)?)
            } else {
                StartPair::Extremes
            };
            let curve = coalescence_experiment(a.n, k, a.tmax, a.trials, a.seed, &start)?;
            let mut meta = new_meta("couple");
            meta.set("start", if a.stationary { "stationary-right" } else { "extremes" });
            meta.set("generator", GENERATOR);
            let output = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => Output::Csv(curve.to_csv()),
                Format::Json => Output::Json(json!({
                    "n": a.n, "k": k, "trials": a.trials, "seed": a.seed,
                    "t_values": curve.t_values().collect::<Vec<_>>(),
                    "survival": curve.survival,
                    "bound": curve.t_values().map(|t| curve.bound(t)).collect::<Vec<_>>(),
                })),
            };
            (meta, output)
        }
        Command::Minorize(a) => {
            positive(a.n, a.k)?;
            cap(a.n, ANALYSIS_CAP)?;
            check_eps(a.eps)?;
            let report = minorization_report(a.n, a.k)?;
            let mut meta = new_meta("minorize");
            meta.set("n", a.n).set("k", a.k);
            let body = report.to_json(a.eps);
            let output = match cli.format.unwrap_or(Format::Json) {
                Format::Json => Output::Json(body),
                Format::Csv => Output::Csv(key_value_csv(&body)),
            };
            (meta, output)
        }
        Command::Verify(a) => {
            let k = a.k.unwrap_or(a.n);
            positive(a.n, k)?;
            cap(a.n, ANALYSIS_CAP)?;
            check_eps(a.eps)?;
            let checks = verify_suite(a.n, k, a.tmax, a.eps)?;
            let all_hold = checks.iter().all(|c| c.holds);
            if !all_hold {
                code = EXIT_VERIFY;
            }
            let mut meta = new_meta("verify");
            meta.set("n", a.n).set("k", k).set("tmax", a.tmax).set("eps", a.eps);
            let output = match cli.format.unwrap_or(Format::Json) {
                Format::Json => Output::Json(json!({
                    "all_hold": all_hold,
                    "checks": checks.iter().map(|c| json!({"name": c.name, "holds": c.holds, "detail": c.detail})).collect::<Vec<_>>(),
                })),
                Format::Csv => {
                    let mut s = String::from("name,holds,detail\n");
                    checks.iter().for_each(|c| s.push_str(&format!("{},{},\"{}\"\n", c.name, c.holds, c.detail)));
                    Output::Csv(s)
                }
            };
            (meta, output)
        }
    };
    Ok((render(&meta, output), code))
}

fn key_value_csv(v: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(m) = v {
        for (k, v) in m {
            let v = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k},{v}\n"));
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

/// Every bound that applies to `(n, k)`.
pub fn verify_suite(n: usize, k: usize, t_max: usize, eps: f64) -> crate::Result<Vec<Check>> {
    let mut checks = Vec::new();
    let report = spectrum(n, k)?;
    let in_range = report.block_eigenvalues.iter().all(|l| (-1.0 - 1e-10..=1.0 + 1e-10).contains(l));
    let ones = report.block_eigenvalues.iter().filter(|l| (*l - 1.0).abs() < 1e-10).count();
    checks.push(Check {
        name: "spectrum",
        holds: in_range && ones == 1,
        detail: format!("eigenvalues in [-1, 1]: {in_range}; eigenvalue 1 multiplicity {ones}"),
    });
    checks.push(Check {
        name: "poincare",
        holds: report.poincare_holds,
        detail: format!("lambda_1 = {} <= {}", fmt_f64(report.lambda_1), fmt_f64(report.poincare_upper)),
    });
    if let Some(c) = report.cheeger_lower {
        checks.push(Check {
            name: "cheeger",
            holds: report.cheeger_holds,
            detail: format!("{} <= lambda_1 = {}", fmt_f64(c), fmt_f64(report.lambda_1)),
        });
    }
    if k >= n {
        let c = verify_coupling_bound(n, k, t_max)?;
        checks.push(Check {
            name: "coupling",
            holds: c.holds,
            detail: match c.first_violation {
                None => format!("d(t) <= n(1-1/(2k))^t for t <= {t_max}; min margin {}", fmt_f64(c.min_margin)),
                Some(t) => format!("violated at t = {t}"),
            },
        });
    } else {
        let rep = minorization_report(n, k)?;
        let curve = distance_curve(&block_count_matrix(n, k)?, t_max)?;
        let step = Rational::from_integer(1.into()) - &rep.c;
        let mut bound = Rational::from_integer(1.into());
        let mut violation = None;
        for t in curve.t_values() {
            let ok = match curve.exact(t) {
                Some(d) => d <= &bound,
                None => curve.d[t] <= crate::combinatorics::rational_to_f64(&bound) + 1e-12,
            };
            if !ok && violation.is_none() {
                violation = Some(t);
            }
            bound *= &step;
        }
        checks.push(Check {
            name: "minorization",
            holds: rep.c >= rep.floor && violation.is_none(),
            detail: format!(
                "c = {} >= {}; d(t) <= (1-c)^t for t <= {t_max}: {}",
                rational_string(&rep.c),
                rational_string(&rep.floor),
                violation.is_none()
            ),
        });
    }
    let pi_min = 1.0 / crate::combinatorics::rational_to_f64(&Rational::from_integer(state_count(n, k)));
    let relax = relaxation_mixing_bounds(report.lambda_1.max(0.0), pi_min, eps)?;
    let horizon = t_max.max(relax.upper as usize);
    let curve = distance_curve(&block_count_matrix(n, k)?, horizon)?;
    let t_mix = mixing_time(&curve, eps);
    checks.push(Check {
        name: "relaxation",
        holds: t_mix.is_some_and(|t| relax.lower <= t as f64 && t as u64 <= relax.upper),
        detail: format!(
            "{} <= t_mix({eps}) = {} <= {}",
            fmt_f64(relax.lower),
            t_mix.map_or("unreached".into(), |t| t.to_string()),
            relax.upper
        ),
    });
    Ok(checks)
}
