//! The `causal` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification failure or
//! invalid input order, 3 ground set over a cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::{verify_algebra_axioms, verify_union_laws, AlgebraError, Caps};
use crate::io::{CausalityJson, LoadError};
use crate::measure::{verify_measure_axioms_with, CausalMeasure, MeasureError, MeasureKind, MEASURE_TOLERANCE};
use crate::minkowski::{
    bekenstein_hawking_alpha, horizon_area, horizon_entropy, monte_carlo_cross_section, sprinkle, sprinkle_to_json,
    ConeKind, ConeSetDescriptor, Event, MinkowskiError, SprinkleConfig, SprinkleMode, SprinkleJson,
};
use crate::order::{Causality, Crossing, OrderError};
use crate::reconstruction::{verify_t_reversal, ReconstructionError, RibbonEngine};
use crate::report::{LawEntry, LawReport, Verdict};
use crate::fixtures;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "causal", version, about = "Finite causal orders, causal set algebra and horizon entropy")]
struct Cli {
    /// TOML file with defaults for seed, max_n, alpha, k_b, l_p, tolerance and mc_samples.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample events in a box and write the induced causality.
    Sprinkle(SprinkleArgs),
    /// Run verification suites, one JSON line per law.
    Verify(VerifyArgs),
    /// Reconstruct the order from the set algebra and diff it with the input.
    Reconstruct(InputArgs),
    /// Horizon entropy of a truncated cone or diamond in 3+1 dimensions.
    Entropy(EntropyArgs),
    /// Hasse diagram in DOT format.
    Dot(InputArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Causality JSON (or sprinkle output).
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Built-in causality: chain3, diamond4, l5, l33.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Largest ground set for exhaustive modes.
    #[arg(long)]
    max_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Uniform,
    Lattice,
}

#[derive(Debug, Args)]
struct SprinkleArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Per-axis intervals, time first: `0:1,0:1`. Defaults to the unit box.
    #[arg(long = "box")]
    bounds: Option<String>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Mode::Uniform)]
    mode: Mode,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Crossing,
    UnionLaws,
    Axioms,
    TReversal,
    Measure,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma separated; all suites when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Vec<Suite>,
    /// Measure JSON for the measure suite; `σ ≡ 1` when omitted.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Relative tolerance for measure equalities.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    FutureCone,
    PastCone,
    Diamond,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    #[arg(long, value_enum, default_value_t = Shape::FutureCone)]
    shape: Shape,
    /// Apex event `t,x,y,z`; the origin by default.
    #[arg(long)]
    apex: Option<String>,
    /// Upper apex of a diamond.
    #[arg(long)]
    top: Option<String>,
    /// Truncation time of a cone.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "kB")]
    k_b: Option<f64>,
    #[arg(long)]
    l_p: Option<f64>,
    /// Use `α = k_B / (4 l_p²)`.
    #[arg(long)]
    bh: bool,
    /// Monte-Carlo cross-check of the cross-section area; 0 disables it.
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance for the Monte-Carlo cross-check.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Defaults read from `--config`; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    seed: Option<u64>,
    max_n: Option<usize>,
    alpha: Option<f64>,
    k_b: Option<f64>,
    l_p: Option<f64>,
    tolerance: Option<f64>,
    mc_samples: Option<u64>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failed(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILED,
            message: message.into(),
        }
    }
}

impl From<OrderError> for Failure {
    fn from(e: OrderError) -> Self {
        let code = match e {
            OrderError::GroundSetTooLarge { .. } => EXIT_CAP,
            _ => EXIT_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::GroundSetTooLarge { .. } => Failure {
                code: EXIT_CAP,
                message: e.to_string(),
            },
            AlgebraError::Order(o) => o.into(),
            other => Failure::failed(other.to_string()),
        }
    }
}

impl From<ReconstructionError> for Failure {
    fn from(e: ReconstructionError) -> Self {
        match e {
            ReconstructionError::GroundSetTooLarge { .. } => Failure {
                code: EXIT_CAP,
                message: e.to_string(),
            },
            ReconstructionError::Algebra(a) => a.into(),
            other => Failure::failed(other.to_string()),
        }
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Algebra(a) => a.into(),
            MeasureError::Order(o) => o.into(),
            other => Failure::failed(other.to_string()),
        }
    }
}

impl From<MinkowskiError> for Failure {
    fn from(e: MinkowskiError) -> Self {
        match e {
            MinkowskiError::Order(o) => o.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Order(o) => o.into(),
            other => Failure::failed(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => toml::from_str(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
    }
}

fn load_causality(args: &InputArgs) -> Result<Causality, Failure> {
    match (&args.input, &args.fixture) {
        (Some(path), _) => {
            let text = read(path)?;
            let raw: CausalityJson = match serde_json::from_str::<SprinkleJson>(&text) {
                Ok(s) => s.causality,
                Err(_) => serde_json::from_str(&text).map_err(LoadError::from)?,
            };
            Ok(raw.into_causality()?)
        }
        (None, Some(name)) => fixtures::by_name(name).ok_or_else(|| Failure::usage(format!("unknown fixture {name}"))),
        (None, None) => Err(Failure::usage("one of --input or --fixture is required")),
    }
}

fn caps_for(c: &Causality, max_n: Option<usize>) -> Result<Caps, Failure> {
    let caps = max_n.map_or_else(Caps::default, Caps::limited_to);
    if let Some(limit) = max_n {
        if c.len() > limit {
            return Err(Failure {
                code: EXIT_CAP,
                message: format!("ground set of {} points exceeds --max-n {limit}", c.len()),
            });
        }
    }
    Ok(caps)
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("stdout: {e}"))),
    }
}

fn parse_bounds(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    text.split(',')
        .map(|axis| {
            let (lo, hi) = axis
                .split_once(':')
                .ok_or_else(|| Failure::usage(format!("box axis {axis:?} is not lo:hi")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Failure::usage(format!("box bound {s:?}: {e}")));
            Ok((num(lo)?, num(hi)?))
        })
        .collect()
}

fn parse_event(text: &str) -> Result<Event, Failure> {
    text.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| Failure::usage(format!("coordinate {c:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Event)
}

fn cmd_sprinkle(args: SprinkleArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let bounds = match &args.bounds {
        Some(text) => parse_bounds(text)?,
        None => vec![(0.0, 1.0); args.dim + 1],
    };
    let config = SprinkleConfig {
        d: args.dim,
        bounds,
        n: args.n,
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        mode: match args.mode {
            Mode::Uniform => SprinkleMode::UniformIid,
            Mode::Lattice => SprinkleMode::IntegerLattice,
        },
    };
    let (c, events) = sprinkle(&config)?;
    emit(args.output.as_deref(), &(sprinkle_to_json(&c, &events) + "\n"), stdout)
}

fn crossing_entry(c: &Causality) -> LawEntry {
    let crossing = c.crossing_property();
    let counterexample = match crossing {
        Crossing::Holds => None,
        Crossing::Fails { x, y, z, w } => {
            let p = c.points();
            Some(json!({"x": p[x], "y": p[y], "z": p[z], "w": p[w]}))
        }
    };
    LawEntry {
        law: "crossing_property".into(),
        verdict: if counterexample.is_some() { Verdict::Fails } else { Verdict::Holds },
        checked: 1,
        skipped: 0,
        counterexample,
    }
}

fn cmd_verify(args: VerifyArgs, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let c = load_causality(&args.input)?;
    let caps = caps_for(&c, args.input.max_n.or(cfg.max_n))?;
    let tolerance = args.tolerance.or(cfg.tolerance).unwrap_or(MEASURE_TOLERANCE);
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Failure::usage("--tolerance must be positive"));
    }
    let suites = if args.suite.is_empty() {
        vec![Suite::Crossing, Suite::UnionLaws, Suite::Axioms, Suite::TReversal, Suite::Measure]
    } else {
        args.suite.clone()
    };
    let mut report = LawReport::default();
    for suite in suites {
        match suite {
            Suite::Crossing => report.entries.push(crossing_entry(&c)),
            Suite::UnionLaws => report.extend(verify_union_laws(&c, caps)?),
            Suite::Axioms => report.extend(verify_algebra_axioms(&c, caps)?),
            Suite::TReversal => report.extend(verify_t_reversal(&c, caps)?),
            Suite::Measure => {
                let sigma = match &args.measure {
                    Some(path) => CausalMeasure::from_json(&c, &read(path)?)?,
                    None => CausalMeasure::constant(&c, MeasureKind::Divergent, 1.0, caps)?,
                };
                report.extend(verify_measure_axioms_with(&c, &sigma, tolerance)?);
            }
        }
    }
    emit(args.input.output.as_deref(), &report.to_json_lines(), stdout)?;
    if let Some(first) = report.failures().next() {
        let witness = first.counterexample.clone().unwrap_or(Value::Null);
        let _ = writeln!(stderr, "{} fails: {witness}", first.law);
        return Err(Failure {
            code: EXIT_FAILED,
            message: String::new(),
        });
    }
    Ok(())
}

fn cmd_reconstruct(args: InputArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = load_causality(&args)?;
    let caps = caps_for(&c, args.max_n.or(cfg.max_n))?;
    let report = RibbonEngine::new(&c, caps)?.report();
    let text = serde_json::to_string(&report).expect("serializable") + "\n";
    emit(args.output.as_deref(), &text, stdout)?;
    if let Some(first) = report.theorem_violations.first() {
        return Err(Failure::failed(format!("theorem violated: {first}")));
    }
    Ok(())
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cmd_entropy(args: EntropyArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let apex = match &args.apex {
        Some(text) => parse_event(text)?,
        None => Event(vec![0.0; 4]),
    };
    let top = args.top.as_deref().map(parse_event).transpose()?;
    let desc = match args.shape {
        Shape::FutureCone => ConeSetDescriptor {
            kind: ConeKind::TruncatedFutureCone,
            apex,
            second_apex: top,
            cut: args.t,
        },
        Shape::PastCone => ConeSetDescriptor {
            kind: ConeKind::TruncatedPastCone,
            apex,
            second_apex: None,
            cut: args.t,
        },
        Shape::Diamond => ConeSetDescriptor::diamond(
            apex,
            top.ok_or_else(|| Failure::usage("--top is required for a diamond"))?,
        ),
    };
    let k_b = args.k_b.or(cfg.k_b).unwrap_or(1.0);
    let l_p = args.l_p.or(cfg.l_p).unwrap_or(1.0);
    let alpha = if args.bh {
        bekenstein_hawking_alpha(k_b, l_p)
    } else {
        args.alpha.or(cfg.alpha).unwrap_or(1.0)
    };
    let s = horizon_entropy(&desc, alpha)?;
    let mut out = json!({
        "shape": desc.kind,
        "alpha": alpha,
        "entropy": finite_or_null(s.value),
        "unbounded": s.unbounded,
        "at_time": s.at_time,
    });
    if args.bh {
        out["bekenstein_hawking"] = json!({
            "k_B": k_b,
            "l_p": l_p,
            "entropy_in_units_of_kB_over_lp2": finite_or_null(s.value / (k_b / (l_p * l_p))),
        });
    }
    let mut failure = None;
    let samples = args.mc_samples.or(cfg.mc_samples).unwrap_or(0);
    if let (Some(t), true) = (s.at_time, samples > 0) {
        let tolerance = args.tolerance.or(cfg.tolerance).unwrap_or(0.01);
        let analytic = horizon_area(&desc, t)?;
        let estimate = monte_carlo_cross_section(&desc, t, samples, args.seed.or(cfg.seed).unwrap_or(0))?;
        let relative_error = if analytic == 0.0 {
            estimate.abs()
        } else {
            (estimate - analytic).abs() / analytic
        };
        let within = relative_error <= tolerance;
        out["monte_carlo"] = json!({
            "samples": samples,
            "area_analytic": analytic,
            "area_estimate": estimate,
            "relative_error": relative_error,
            "within_tolerance": within,
        });
        if !within {
            failure = Some(Failure::failed(format!(
                "Monte-Carlo area {estimate} differs from {analytic} by {relative_error:.4}"
            )));
        }
    }
    emit(args.output.as_deref(), &(out.to_string() + "\n"), stdout)?;
    failure.map_or(Ok(()), Err)
}

fn cmd_dot(args: InputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = load_causality(&args)?;
    emit(args.output.as_deref(), &c.to_dot(), stdout)
}

/// Runs the command line, writing to the given streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = load_config(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Sprinkle(a) => cmd_sprinkle(a, &cfg, stdout),
        Command::Verify(a) => cmd_verify(a, &cfg, stdout, stderr),
        Command::Reconstruct(a) => cmd_reconstruct(a, &cfg, stdout),
        Command::Entropy(a) => cmd_entropy(a, &cfg, stdout),
        Command::Dot(a) => cmd_dot(a, stdout),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(stderr, "error: {}", f.message);
            }
            f.code
        }
    }
}
