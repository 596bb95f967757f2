//! Command-line front end: `mzo <subcommand> [flags]`.
//!
//! A JSON file passed with `--config` may supply any flag by its long name
//! (`{"seed": 7, "kind": "thm22", "n": [4, 5, 6]}`); flags given on the command
//! line win. The resolved settings are echoed as `config` in every JSON report.
//!
//! Exit status: 0 on success, 2 for usage and argument errors, 3 when a
//! module exhausts a resource budget, 1 otherwise. Failures also print a JSON
//! record `{"error": kind, "message": text}` on stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analysis::{
    bound_table, bound_table_csv, experiment_cor_2_3, experiment_fact_cs, experiment_theorem_2_2,
    experiment_zero_one, lambda_a_upper_bound, BadEventSpec, DeltaChoice, ExperimentConfig,
    MnMethod,
};
use crate::efgame::{GameLimits, Solver};
use crate::error::{Error, Result};
use crate::logic::{parse, AxiomTask, Compiled, Formula};
use crate::metric_core::{pair_at, pair_count, DistanceVector};
use crate::model_builder::{
    build_circulant, enumerate_grid_tasks, verify_axioms, AxiomFamily, GridSpec, SpaceBuilder,
};
use crate::sampling::{
    sample_cube, sample_d_n, sample_mn_rejection, sample_s_like, substream, DeltaSchedule,
    HitAndRun, SamplerConfig, SamplerMethod, DEFAULT_MAX_REJECTIONS,
};
use crate::space_io::{parse_space, space_to_csv, space_to_json};

#[derive(Debug, Parser)]
#[command(name = "mzo", version, about = "Continuous logic on random finite metric spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Seed for all randomness (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for experiments.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format (json or csv) printed to stdout, or a file path whose
    /// extension picks the format.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// JSON file supplying flag values; command-line flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw distance vectors from the cube, M_n, D_n or an S-like region.
    Sample(SampleArgs),
    /// Evaluate a sentence on a finite metric space.
    Eval(EvalArgs),
    /// Decide an epsilon-Ehrenfeucht-Fraisse game between two spaces.
    Game(GameArgs),
    /// Build a class-C space (circulant or random).
    Build(BuildArgs),
    /// Check a space against the grid family of extension axioms.
    Verify(VerifyArgs),
    /// Run a seeded Monte Carlo experiment.
    Experiment(ExperimentArgs),
    /// Tabulate the analytic failure bounds over a range of sizes.
    Bound(BoundArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Eval(_) => "eval",
            Command::Game(_) => "game",
            Command::Build(_) => "build",
            Command::Verify(_) => "verify",
            Command::Experiment(_) => "experiment",
            Command::Bound(_) => "bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    Cube,
    MnReject,
    MnHar,
    Dn,
    SLike,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SampleArgs {
    /// Number of points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of samples (default 1).
    #[arg(long)]
    pub count: Option<usize>,
    /// Sampler (default mn-reject).
    #[arg(long, value_enum)]
    pub method: Option<SampleMethod>,
    /// Fixed concentration; overrides the schedule.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Schedule scale C in delta(n) = min(cap, C n^-c) (default 1).
    #[arg(long)]
    pub delta_scale: Option<f64>,
    /// Schedule exponent c (default 1/3).
    #[arg(long)]
    pub delta_exp: Option<f64>,
    /// Schedule cap (default 0.49).
    #[arg(long)]
    pub delta_cap: Option<f64>,
    /// Size of the free block for s-like.
    #[arg(long)]
    pub k: Option<usize>,
    /// Hit-and-run burn-in steps (default 50 * C(n,2)).
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Hit-and-run steps between samples (default C(n,2)).
    #[arg(long)]
    pub thinning: Option<usize>,
    /// Rejection budget per sample (default 10^7).
    #[arg(long)]
    pub max_rejections: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EvalArgs {
    /// Formula file, or the formula text itself.
    #[arg(long)]
    pub formula: Option<String>,
    /// Space file (.json or .csv).
    #[arg(long)]
    pub space: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GameArgs {
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Write player II's winning strategy to this file.
    #[arg(long)]
    pub emit_strategy: Option<PathBuf>,
    /// Refuse games with rounds * ln(|X| |Y|) above this (default 30).
    #[arg(long)]
    pub max_log_size: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildKind {
    Circulant,
    Random,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub kind: Option<BuildKind>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Circulant ring values for gaps 1..n/2, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ring: Option<Vec<f64>>,
    /// Circulant without --ring: cycle through the grid with this step.
    #[arg(long)]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Grid step (default 0.25).
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Largest base size (default 1).
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    FactCs,
    Thm22,
    Cor23,
    ZeroOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MnMethodArg {
    Auto,
    Rejection,
    HitAndRun,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: Option<ExperimentName>,
    /// Sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Axiom tolerance (thm22, cor23) or closeness threshold (zero-one).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed concentration; overrides the schedule.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub delta_scale: Option<f64>,
    #[arg(long)]
    pub delta_exp: Option<f64>,
    #[arg(long)]
    pub delta_cap: Option<f64>,
    /// Axiom tasks as JSON (a family or a list of tasks); defaults to the grid family.
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    /// Grid step for the default family (default 0.25).
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Largest base size for the default family (default 1).
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Sentence for zero-one: a file or the formula text.
    #[arg(long)]
    pub formula: Option<String>,
    /// Limiting value the zero-one experiment compares against.
    #[arg(long)]
    pub sigma_as: Option<f64>,
    /// Sampler for M_n (default auto).
    #[arg(long, value_enum)]
    pub method: Option<MnMethodArg>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    #[arg(long)]
    pub max_rejections: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct BoundArgs {
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of axiom tasks (default 1).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Measure bound for A (default min(1, (2 epsilon)^C(k,2))).
    #[arg(long)]
    pub lambda_a: Option<f64>,
    /// Inclusive range of sizes, `a..b` or `a:b`.
    #[arg(long)]
    pub n_range: Option<String>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub params: Value,
}

const GLOBAL_KEYS: [&str; 3] = ["seed", "threads", "out"];

fn to_object<T: Serialize>(value: &T) -> Result<Map<String, Value>> {
    match serde_json::to_value(value)? {
        Value::Object(map) => Ok(map.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        _ => Ok(Map::new()),
    }
}

/// Overlays the non-null fields of `flags` on `file` and reads the result back.
fn overlay<T: Serialize + DeserializeOwned>(flags: &T, mut file: Map<String, Value>) -> Result<T> {
    file.extend(to_object(flags)?);
    serde_json::from_value(Value::Object(file))
        .map_err(|e| Error::Argument(format!("invalid configuration: {e}")))
}

fn load_config(path: &Path, command: &str) -> Result<(Map<String, Value>, Map<String, Value>)> {
    let text = fs::read_to_string(path)?;
    let Value::Object(mut map) = serde_json::from_str(&text)? else {
        return Err(Error::Argument("config file must hold a JSON object".into()));
    };
    if let Some(named) = map.remove("command") {
        if named.as_str() != Some(command) {
            return Err(Error::Argument(format!(
                "config file is for command {named}, not {command:?}"
            )));
        }
    }
    let mut global = Map::new();
    for key in GLOBAL_KEYS {
        if let Some(v) = map.remove(key) {
            global.insert(key.to_string(), v);
        }
    }
    Ok((global, map))
}

fn resolve<T: Serialize + DeserializeOwned>(
    global: &GlobalArgs,
    params: &T,
    command: &str,
) -> Result<(GlobalArgs, T, RunConfig)> {
    let (file_global, file_params) = match &global.config {
        Some(path) => load_config(path, command)?,
        None => (Map::new(), Map::new()),
    };
    let merged_global: GlobalArgs = overlay(global, file_global)?;
    let merged: T = overlay(params, file_params)?;
    let run = RunConfig {
        command: command.to_string(),
        seed: merged_global.seed.unwrap_or(0),
        threads: merged_global.threads,
        out: merged_global.out.clone(),
        params: Value::Object(to_object(&merged)?),
    };
    Ok((merged_global, merged, run))
}

fn required<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::Argument(format!("missing required flag --{flag}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Where output goes: stdout in some format, or a file.
struct Sink {
    format: Format,
    path: Option<PathBuf>,
}

impl Sink {
    fn new(out: Option<&str>, default: Format) -> Sink {
        match out {
            None => Sink { format: default, path: None },
            Some("json") => Sink { format: Format::Json, path: None },
            Some("csv") => Sink { format: Format::Csv, path: None },
            Some(path) => {
                let format = if path.ends_with(".csv") { Format::Csv } else { Format::Json };
                Sink { format, path: Some(PathBuf::from(path)) }
            }
        }
    }

    fn deliver(&self, text: &str, stdout: &mut dyn Write) -> Result<()> {
        match &self.path {
            Some(path) => fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn json_text(value: &Value) -> Result<String> {
    Ok(ensure_newline(serde_json::to_string_pretty(value)?))
}

fn read_space_file(path: &Path) -> Result<crate::metric_core::FiniteMetricSpace> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read space file {}: {e}", path.display())))?;
    parse_space(&text)
}

/// Reads a formula from a file when `arg` names one, else parses `arg` itself.
fn read_formula(arg: &str) -> Result<Formula> {
    let path = Path::new(arg);
    if path.is_file() {
        parse(&fs::read_to_string(path)?)
    } else {
        parse(arg)
    }
}

fn schedule(scale: Option<f64>, exp: Option<f64>, cap: Option<f64>) -> Result<DeltaSchedule> {
    let d = DeltaSchedule::default();
    DeltaSchedule::new(scale.unwrap_or(d.scale), exp.unwrap_or(d.exponent), cap.unwrap_or(d.cap))
}

fn cmd_sample(global: &GlobalArgs, a: &SampleArgs, run: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let n = required(&a.n, "n")?;
    let count = a.count.unwrap_or(1);
    let method = a.method.unwrap_or(SampleMethod::MnReject);
    let max = a.max_rejections.unwrap_or(DEFAULT_MAX_REJECTIONS);
    let delta = match a.delta {
        Some(d) => d,
        None => schedule(a.delta_scale, a.delta_exp, a.delta_cap)?.delta_at(n),
    };
    let seed = run.seed;
    let sampler = SamplerConfig {
        seed,
        method: SamplerMethod::HitAndRun,
        burn_in: a.burn_in,
        thinning: a.thinning,
        max_rejections: max,
    };
    let mut chain = HitAndRun::new(n, &sampler);
    let mut chain_rng = substream(seed, 0, 0);
    let mut samples: Vec<(DistanceVector, u64)> = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = substream(seed, 0, i as u64);
        let drawn = match method {
            SampleMethod::Cube => (sample_cube(n, &mut rng), 1),
            SampleMethod::MnReject => sample_mn_rejection(n, &mut rng, max)?,
            SampleMethod::Dn => sample_d_n(n, delta, &mut rng, max)?,
            SampleMethod::SLike => sample_s_like(required(&a.k, "k")?, n, delta, &mut rng, max)?,
            SampleMethod::MnHar => {
                let steps = sampler.thinning_for(n) + if i == 0 { sampler.burn_in_for(n) } else { 0 };
                (chain.next_sample(&mut chain_rng)?, steps as u64)
            }
        };
        samples.push(drawn);
    }
    let sink = Sink::new(global.out.as_deref(), Format::Json);
    let text = match sink.format {
        Format::Csv => {
            let mut out = String::from("index,attempts");
            for p in 0..pair_count(n) {
                let (i, j) = pair_at(p, n);
                out.push_str(&format!(",d_{}_{}", i + 1, j + 1));
            }
            out.push('\n');
            for (idx, (d, attempts)) in samples.iter().enumerate() {
                out.push_str(&format!("{idx},{attempts}"));
                for c in d.coords() {
                    out.push_str(&format!(",{c}"));
                }
                out.push('\n');
            }
            out
        }
        _ => {
            let records: Vec<Value> = samples
                .iter()
                .map(|(d, attempts)| json!({"n": n, "d": d.coords(), "attempts": attempts}))
                .collect();
            let mut report = json!({"config": run, "samples": records});
            if matches!(method, SampleMethod::Dn | SampleMethod::SLike) {
                report["delta"] = json!(delta);
            }
            json_text(&report)?
        }
    };
    sink.deliver(&text, stdout)
}

fn cmd_eval(global: &GlobalArgs, a: &EvalArgs, run: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let formula = read_formula(&required(&a.formula, "formula")?)?;
    let space = read_space_file(&required(&a.space, "space")?)?;
    let value = Compiled::sentence(&formula)?.eval(&space, &[])?;
    let sink = Sink::new(global.out.as_deref(), Format::Text);
    let text = match sink.format {
        Format::Text => format!("{value}\n"),
        Format::Csv => format!("value\n{value}\n"),
        Format::Json => json_text(&json!({
            "config": run,
            "formula": formula.to_string(),
            "value": value,
        }))?,
    };
    sink.deliver(&text, stdout)
}

fn cmd_game(global: &GlobalArgs, a: &GameArgs, run: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let x = read_space_file(&required(&a.x, "x")?)?;
    let y = read_space_file(&required(&a.y, "y")?)?;
    let rounds = required(&a.rounds, "rounds")?;
    let epsilon = required(&a.epsilon, "epsilon")?;
    let limits = GameLimits {
        max_log_size: a.max_log_size.unwrap_or(GameLimits::default().max_log_size),
    };
    let mut solver = Solver::new(&x, &y, rounds, epsilon, limits)?;
    let ii_wins = solver.solve();
    let mut report = json!({
        "config": run,
        "winner": if ii_wins { "II" } else { "I" },
        "explored_states": solver.explored_states(),
    });
    if let Some(path) = &a.emit_strategy {
        if ii_wins {
            let strategy = solver.extract_strategy()?;
            fs::write(path, ensure_newline(serde_json::to_string_pretty(&strategy)?))?;
            report["strategy"] = serde_json::to_value(&strategy)?;
        } else {
            report["strategy"] = Value::Null;
        }
    }
    let sink = Sink::new(global.out.as_deref(), Format::Json);
    sink.deliver(&json_text(&report)?, stdout)
}

fn cmd_build(global: &GlobalArgs, a: &BuildArgs, run: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let n = required(&a.n, "n")?;
    let kind = required(&a.kind, "kind")?;
    let space = match (kind, &a.ring) {
        (BuildKind::Circulant, Some(ring)) => build_circulant(n, ring)?,
        (BuildKind::Circulant, None) => {
            let step = a.grid_step.ok_or_else(|| {
                Error::Argument("circulant build needs --ring or --grid-step".into())
            })?;
            SpaceBuilder::Circulant { grid_step: step }.build(n, run.seed)?
        }
        (BuildKind::Random, _) => SpaceBuilder::Random.build(n, run.seed)?,
    };
    let sink = Sink::new(global.out.as_deref(), Format::Json);
    let text = match sink.format {
        Format::Csv => space_to_csv(&space)?,
        _ => ensure_newline(space_to_json(&space)?),
    };
    sink.deliver(&text, stdout)
}

fn grid_family(grid_step: Option<f64>, kmax: Option<usize>, epsilon: f64) -> Result<AxiomFamily> {
    enumerate_grid_tasks(&GridSpec::new(grid_step.unwrap_or(0.25))?, kmax.unwrap_or(1), epsilon)
}

fn cmd_verify(global: &GlobalArgs, a: &VerifyArgs, run: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let space = read_space_file(&required(&a.space, "space")?)?;
    let family = grid_family(a.grid_step, a.kmax, required(&a.epsilon, "epsilon")?)?;
    let report = verify_axioms(&space, &family)?;
    let value = json!({
        "config": run,
        "family": family.description,
        "tasks": family.len(),
        "satisfied": report.satisfied(),
        "max_value": report.max_value,
        "values": report.values,
    });
    Sink::new(global.out.as_deref(), Format::Json).deliver(&json_text(&value)?, stdout)
}

/// A tasks file holds either a whole family or a bare list of tasks.
#[derive(Deserialize)]
#[serde(untagged)]
enum TasksFile {
    Family(AxiomFamily),
    List(Vec<AxiomTask>),
}

fn read_tasks(path: &Path) -> Result<AxiomFamily> {
    let text = fs::read_to_string(path)?;
    Ok(match serde_json::from_str::<TasksFile>(&text)? {
        TasksFile::Family(f) => f,
        TasksFile::List(tasks) => AxiomFamily {
            description: format!("{} tasks from {}", tasks.len(), path.display()),
            tasks,
        },
    })
}

fn cmd_experiment(
    global: &GlobalArgs,
    a: &ExperimentArgs,
    run: &RunConfig,
    stdout: &mut dyn Write,
) -> Result<()> {
    let kind = required(&a.kind, "kind")?;
    let mut cfg = ExperimentConfig::new(required(&a.n, "n")?, required(&a.trials, "trials")?, run.seed);
    cfg.delta = match a.delta {
        Some(delta) => DeltaChoice::Fixed { delta },
        None => DeltaChoice::Schedule(schedule(a.delta_scale, a.delta_exp, a.delta_cap)?),
    };
    cfg.mn_method = match a.method.unwrap_or(MnMethodArg::Auto) {
        MnMethodArg::Auto => MnMethod::Auto,
        MnMethodArg::Rejection => MnMethod::Rejection,
        MnMethodArg::HitAndRun => MnMethod::HitAndRun,
    };
    cfg.burn_in = a.burn_in;
    cfg.thinning = a.thinning;
    cfg.max_rejections = a.max_rejections.unwrap_or(DEFAULT_MAX_REJECTIONS);
    cfg.threads = global.threads;

    let family = || -> Result<AxiomFamily> {
        match &a.tasks {
            Some(path) => read_tasks(path),
            None => grid_family(a.grid_step, a.kmax, required(&a.epsilon, "epsilon")?),
        }
    };
    let mut report = match kind {
        ExperimentName::FactCs => experiment_fact_cs(&cfg)?,
        ExperimentName::Thm22 => experiment_theorem_2_2(&family()?, &cfg)?,
        ExperimentName::Cor23 => experiment_cor_2_3(&family()?, &cfg)?,
        ExperimentName::ZeroOne => {
            let sigma = read_formula(&required(&a.formula, "formula")?)?;
            let sigma_as = required(&a.sigma_as, "sigma-as")?;
            experiment_zero_one(&sigma, sigma_as, required(&a.epsilon, "epsilon")?, &cfg)?
        }
    };
    report.config = serde_json::to_value(run)?;
    let sink = Sink::new(global.out.as_deref(), Format::Csv);
    let text = match sink.format {
        Format::Csv => report.to_csv(),
        _ => ensure_newline(report.to_json()?),
    };
    sink.deliver(&text, stdout)
}

/// Parses `a..b`, `a..=b` or `a:b` as an inclusive range.
pub fn parse_n_range(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::Argument(format!("bad --n-range {text:?}; expected a..b or a:b"));
    let (lo, hi) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .or_else(|| text.split_once(':'))
        .ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn cmd_bound(global: &GlobalArgs, a: &BoundArgs, run: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let k = required(&a.k, "k")?;
    let epsilon = required(&a.epsilon, "epsilon")?;
    let spec = BadEventSpec {
        k,
        epsilon,
        delta: required(&a.delta, "delta")?,
        m: a.m.unwrap_or(1),
        lambda_a: a.lambda_a.unwrap_or_else(|| lambda_a_upper_bound(k, epsilon)),
    };
    let rows = bound_table(&spec, parse_n_range(&required(&a.n_range, "n-range")?)?)?;
    let sink = Sink::new(global.out.as_deref(), Format::Csv);
    let text = match sink.format {
        Format::Csv => bound_table_csv(&rows),
        _ => json_text(&json!({"config": run, "spec": spec, "rows": rows}))?,
    };
    sink.deliver(&text, stdout)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let name = cli.command.name();
    macro_rules! run {
        ($args:expr, $f:ident) => {{
            let (global, args, run) = resolve(&cli.global, $args, name)?;
            $f(&global, &args, &run, stdout)
        }};
    }
    match &cli.command {
        Command::Sample(a) => run!(a, cmd_sample),
        Command::Eval(a) => run!(a, cmd_eval),
        Command::Game(a) => run!(a, cmd_game),
        Command::Build(a) => run!(a, cmd_build),
        Command::Verify(a) => run!(a, cmd_verify),
        Command::Experiment(a) => run!(a, cmd_experiment),
        Command::Bound(a) => run!(a, cmd_bound),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Argument(_) => 2,
        Error::Resource(_) => 3,
        _ => 1,
    }
}

fn error_record(kind: &str, message: &str) -> String {
    json!({"error": kind, "message": message}).to_string()
}

/// Runs the command line `argv` (program name first) and returns the exit status.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = stdout.write_all(text.as_bytes());
                return 0;
            }
            let _ = writeln!(stderr, "{}", text.trim_end());
            let _ = writeln!(stderr, "{}", error_record("usage", text.lines().next().unwrap_or("")));
            return 2;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_record(e.kind(), &e.to_string()));
            exit_code(&e)
        }
    }
}

/// Entry point for the `mzo` binary.
pub fn main_exit() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
