//! Command-line front end for the `ipta` model checker.
//!
//! Every subcommand loads a model, binds its constants and runs part of the
//! pipeline: `check` answers queries, `stats` and `export` describe the
//! explored state space, `bench` sweeps one constant across all engines and
//! `prune` checks command distributions for minimality.
//!
//! Results go to stdout as one line of `key=value` fields per record, or as a
//! single JSON document with `--json`. Warnings and errors go to stderr. The
//! exit code is 0 on success, 2 when a threshold query does not hold and 1 on
//! any error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ipta::explore::{build_imdp, BuildOptions, Imdp};
use ipta::lang::minimal::{apply_pruning, check_commands, CommandReport};
use ipta::lang::{self, LangError, Query, Value};
use ipta::pipeline::{self, run_query, Engine, Outcome, System};
use ipta::solve::{Criterion, Direction, Method, SolveSettings};
use ipta::{fmt_prob, Prob};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

/// Largest difference tolerated between the `ipta` and `ptastar` values of
/// one benchmark instance.
pub const AGREEMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{source}", path.display())]
    Model {
        path: PathBuf,
        source: Box<pipeline::Error>,
    },
    #[error("query: {0}")]
    Query(LangError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Pipeline(Box<pipeline::Error>),
    #[error("engines disagree at {param}={requests}: ipta {ipta}, ptastar {ptastar}")]
    Disagreement {
        param: String,
        requests: i64,
        ipta: f64,
        ptastar: f64,
    },
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl From<pipeline::Error> for CliError {
    fn from(e: pipeline::Error) -> Self {
        CliError::Pipeline(Box::new(e))
    }
}

#[derive(Debug, Parser)]
#[command(name = "ipta", version, about = "Model checker for interval probabilistic timed automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute probabilities or verdicts for one or more queries.
    Check(CheckArgs),
    /// Print state, choice and transition counts per engine.
    Stats(StatsArgs),
    /// Sweep an integer constant and time every engine on each value.
    Bench(BenchArgs),
    /// Write the explored interval MDP in its textual format.
    Export(ExportArgs),
    /// Check command distributions for minimality and optionally prune them.
    Prune(PruneArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file.
    pub model: PathBuf,
    /// Binds a constant, as in `--const L=0.7`. Repeatable.
    #[arg(long = "const", value_name = "NAME=VALUE")]
    pub constants: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Ipta,
    Ptastar,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Topological,
    Jacobi,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Probability `y` of the first outcome of every two-outcome interval
    /// edge under the sample engine. Without it the sample engine places
    /// each outcome at the same relative position inside its interval.
    #[arg(long, value_name = "RATIONAL")]
    pub value: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// Expand every state, including those that already decide the query.
    #[arg(long)]
    pub no_reduce: bool,
    #[arg(long, default_value_t = BuildOptions::default().state_limit)]
    pub state_limit: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Stopping threshold for value iteration.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long = "max-iters", default_value_t = 100_000)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Topological)]
    pub method: MethodArg,
    /// Compare successive vectors relative to their magnitude.
    #[arg(long)]
    pub relative: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Query text, or a file with one query per line.
    pub query: String,
    #[arg(long, value_enum, default_value_t = EngineArg::Ipta)]
    pub engine: EngineArg,
    #[command(flatten)]
    pub engine_args: EngineArgs,
    #[command(flatten)]
    pub explore: ExploreArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Explore only what this query needs.
    #[arg(long)]
    pub query: Option<String>,
    /// Engines to report; repeatable. Defaults to all three.
    #[arg(long, value_enum)]
    pub engine: Vec<EngineArg>,
    #[command(flatten)]
    pub engine_args: EngineArgs,
    #[command(flatten)]
    pub explore: ExploreArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    pub query: String,
    /// Values of the swept constant: `FROM..TO` or `FROM..TO:STEP`, inclusive.
    #[arg(long, default_value = "10..50:10", value_parser = parse_range)]
    pub requests: RequestRange,
    /// Name of the swept constant.
    #[arg(long, default_value = "REQUESTS")]
    pub param: String,
    /// Runs per engine and value; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[command(flatten)]
    pub engine_args: EngineArgs,
    #[command(flatten)]
    pub explore: ExploreArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Explore only what this query needs and mark its target states.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long, value_enum, default_value_t = EngineArg::Ipta)]
    pub engine: EngineArg,
    #[command(flatten)]
    pub engine_args: EngineArgs,
    #[command(flatten)]
    pub explore: ExploreArgs,
    /// Output file; stdout when absent.
    #[arg(long, short = 'o', value_name = "PATH")]
    pub export: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write the model with every non-minimal command pruned.
    #[arg(long)]
    pub fix: bool,
    /// Where `--fix` writes the model. When absent the model goes to stdout
    /// and the report to stderr.
    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// Inclusive range of integer values with a positive step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RequestRange {
    pub from: i64,
    pub to: i64,
    pub step: i64,
}

impl RequestRange {
    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        (self.from..=self.to).step_by(self.step as usize)
    }
}

pub fn parse_range(s: &str) -> Result<RequestRange, String> {
    let (span, step) = match s.split_once(':') {
        Some((span, step)) => (span, step.trim().parse::<i64>().map_err(|e| e.to_string())?),
        None => (s, 1),
    };
    let (from, to) = match span.split_once("..") {
        Some((a, b)) => (a, b),
        None => (span, span),
    };
    let from = from.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let to = to.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if step < 1 || from > to {
        return Err(format!("`{s}` is not a non-empty range with a positive step"));
    }
    Ok(RequestRange { from, to, step })
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, out, err),
        Command::Stats(a) => cmd_stats(a, out, err),
        Command::Bench(a) => cmd_bench(a, out, err),
        Command::Export(a) => cmd_export(a, out, err),
        Command::Prune(a) => cmd_prune(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn bindings(args: &ModelArgs) -> Result<Vec<(String, Value)>, CliError> {
    args.constants
        .iter()
        .map(|b| {
            lang::parse_binding(b).map_err(|e| CliError::Usage(format!("--const {b}: {e}")))
        })
        .collect()
}

fn load(args: &ModelArgs, extra: &[(String, Value)]) -> Result<System, CliError> {
    let text = read(&args.model)?;
    let mut b = bindings(args)?;
    b.extend_from_slice(extra);
    System::parse(&text, &b).map_err(|source| CliError::Model {
        path: args.model.clone(),
        source: Box::new(source),
    })
}

/// Queries from `arg`: the contents of a file when one exists at that path,
/// otherwise `arg` itself as a single query.
fn load_queries(arg: &str) -> Result<Vec<Query>, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        let queries = lang::parse_queries(&text).map_err(|source| CliError::Model {
            path: path.to_owned(),
            source: Box::new(source.into()),
        })?;
        if queries.is_empty() {
            return Err(CliError::Usage(format!("{arg} contains no queries")));
        }
        Ok(queries)
    } else {
        Ok(vec![lang::parse_query(arg).map_err(CliError::Query)?])
    }
}

fn single_query(arg: &str) -> Result<Query, CliError> {
    let mut queries = load_queries(arg)?;
    if queries.len() != 1 {
        return Err(CliError::Usage(format!(
            "{arg} holds {} queries; this command takes one",
            queries.len()
        )));
    }
    Ok(queries.remove(0))
}

fn parse_value(text: &str) -> Result<Prob, CliError> {
    let bad = || CliError::Usage(format!("--value {text}: expected a rational number"));
    let e = lang::parse_expr(text).map_err(|_| bad())?;
    lang::eval::eval_closed(&e)
        .and_then(|v| v.to_rational())
        .ok_or_else(bad)
}

fn engine(arg: EngineArg, args: &EngineArgs) -> Result<Engine, CliError> {
    let value = args.value.as_deref().map(parse_value).transpose()?;
    Ok(match arg {
        EngineArg::Ipta | EngineArg::Ptastar if value.is_some() => {
            return Err(CliError::Usage(
                "--value only applies to --engine sample".into(),
            ))
        }
        EngineArg::Ipta => Engine::Ipta,
        EngineArg::Ptastar => Engine::PtaStar,
        EngineArg::Sample => Engine::Sample(value),
    })
}

fn build_options(args: &ExploreArgs) -> BuildOptions {
    BuildOptions {
        state_limit: args.state_limit,
        reduce: !args.no_reduce,
    }
}

fn solve_settings(args: &SolveArgs) -> Result<SolveSettings, CliError> {
    if args.epsilon.is_nan() || args.epsilon <= 0.0 {
        return Err(CliError::Usage("--epsilon must be positive".into()));
    }
    Ok(SolveSettings {
        epsilon: args.epsilon,
        max_iterations: args.max_iters,
        criterion: if args.relative {
            Criterion::Relative
        } else {
            Criterion::Absolute
        },
        method: match args.method {
            MethodArg::Topological => Method::Topological,
            MethodArg::Jacobi => Method::Jacobi,
        },
    })
}

/// Explores `system` under `engine`, restricted to `query` when given.
fn explore(
    system: &System,
    engine: &Engine,
    query: Option<&Query>,
    options: &BuildOptions,
) -> Result<Imdp, CliError> {
    let encoded = system.encoded(engine)?;
    let compiled = query.map(|q| encoded.compile(q)).transpose()?;
    Ok(build_imdp(&encoded.automaton, compiled.as_ref(), options).map_err(pipeline::Error::from)?)
}

/// Writes each distinct warning once.
#[derive(Default)]
struct Warnings {
    seen: std::collections::BTreeSet<String>,
}

impl Warnings {
    fn emit(&mut self, err: &mut dyn Write, message: String) -> std::io::Result<()> {
        if self.seen.insert(message.clone()) {
            writeln!(err, "warning: {message}")?;
        }
        Ok(())
    }

    fn model(&mut self, imdp: &Imdp, err: &mut dyn Write) -> std::io::Result<()> {
        if imdp.strict_constraints {
            self.emit(
                err,
                "the model or query uses strict clock constraints; integer clock semantics may differ from dense time".into(),
            )?;
        }
        if let Some(&s) = imdp.timelocks.first() {
            self.emit(
                err,
                format!(
                    "{} timelock state(s) where time cannot pass and no edge is enabled, first {}",
                    imdp.timelocks.len(),
                    imdp.describe_state(s as usize)
                ),
            )?;
        }
        Ok(())
    }
}

fn seconds(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Writes `record` as one line of space-separated `key=value` fields.
/// Strings containing spaces, quotes or `=` are written as JSON strings;
/// arrays are joined with commas; absent fields are skipped.
pub fn write_record(out: &mut dyn Write, record: &impl Serialize) -> std::io::Result<()> {
    let serde_json::Value::Object(fields) = serde_json::to_value(record)? else {
        panic!("records serialize as objects");
    };
    let mut parts = Vec::with_capacity(fields.len());
    for (k, v) in fields {
        match v {
            serde_json::Value::Null => {}
            v => parts.push(format!("{k}={}", field(&v))),
        }
    }
    writeln!(out, "{}", parts.join(" "))
}

fn field(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => {
            if s.is_empty() || s.contains(|c: char| c.is_whitespace() || c == '"' || c == '=') {
                serde_json::Value::String(s.clone()).to_string()
            } else {
                s.clone()
            }
        }
        serde_json::Value::Array(items) => items.iter().map(field).collect::<Vec<_>>().join(","),
        v => v.to_string(),
    }
}

fn write_json(out: &mut dyn Write, doc: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryReport {
    pub query: String,
    pub engine: &'static str,
    pub direction: &'static str,
    pub value: f64,
    pub verdict: Option<bool>,
    pub states: usize,
    pub choices: usize,
    pub transitions: usize,
    pub iterations: usize,
    pub converged: bool,
    pub build_seconds: f64,
    pub solve_seconds: f64,
}

impl QueryReport {
    fn new(query: &Query, engine: &Engine, o: &Outcome) -> QueryReport {
        QueryReport {
            query: query.to_string(),
            engine: engine.name(),
            direction: match o.check.direction {
                Direction::Min => "min",
                Direction::Max => "max",
            },
            value: o.check.value,
            verdict: o.check.verdict,
            states: o.imdp.num_states(),
            choices: o.imdp.num_choices(),
            transitions: o.imdp.num_transitions(),
            iterations: o.check.result.iterations,
            converged: o.check.result.converged,
            build_seconds: seconds(o.build_time),
            solve_seconds: seconds(o.solve_time),
        }
    }
}

#[derive(Serialize)]
struct CheckDocument<'a> {
    model: String,
    results: &'a [QueryReport],
}

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let engine = engine(a.engine, &a.engine_args)?;
    let settings = solve_settings(&a.solve)?;
    let options = build_options(&a.explore);
    let queries = load_queries(&a.query)?;
    let system = load(&a.model, &[])?;
    let mut reports = Vec::new();
    let mut warnings = Warnings::default();
    let mut code = EXIT_OK;
    for q in &queries {
        let o = run_query(&system, &engine, q, &options, &settings)?;
        warnings.model(&o.imdp, err)?;
        if !o.check.result.converged {
            warnings.emit(
                err,
                format!(
                    "{q}: value iteration stopped after {} iterations without reaching epsilon",
                    o.check.result.iterations
                ),
            )?;
        }
        if o.check.verdict == Some(false) {
            code = EXIT_VIOLATED;
        }
        let report = QueryReport::new(q, &engine, &o);
        if !a.json {
            write_record(out, &report)?;
        }
        reports.push(report);
    }
    if a.json {
        write_json(
            out,
            &CheckDocument {
                model: a.model.model.display().to_string(),
                results: &reports,
            },
        )?;
    }
    Ok(code)
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub engine: &'static str,
    pub states: usize,
    pub choices: usize,
    pub transitions: usize,
    pub timelocks: usize,
    pub seconds: f64,
}

const ALL_ENGINES: [EngineArg; 3] = [EngineArg::Ipta, EngineArg::Ptastar, EngineArg::Sample];

pub fn cmd_stats(a: &StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let engines = if a.engine.is_empty() {
        ALL_ENGINES.to_vec()
    } else {
        a.engine.clone()
    };
    if a.engine_args.value.is_some() && !engines.contains(&EngineArg::Sample) {
        return Err(CliError::Usage("--value only applies to --engine sample".into()));
    }
    let query = a.query.as_deref().map(single_query).transpose()?;
    let options = build_options(&a.explore);
    let system = load(&a.model, &[])?;
    let mut reports = Vec::new();
    let mut warnings = Warnings::default();
    for &e in &engines {
        let args = EngineArgs {
            value: a.engine_args.value.clone().filter(|_| e == EngineArg::Sample),
        };
        let engine = engine(e, &args)?;
        let start = Instant::now();
        let imdp = explore(&system, &engine, query.as_ref(), &options)?;
        let report = StatsReport {
            engine: engine.name(),
            states: imdp.num_states(),
            choices: imdp.num_choices(),
            transitions: imdp.num_transitions(),
            timelocks: imdp.timelocks.len(),
            seconds: seconds(start.elapsed()),
        };
        warnings.model(&imdp, err)?;
        if !a.json {
            write_record(out, &report)?;
        }
        reports.push(report);
    }
    if a.json {
        write_json(out, &serde_json::json!({ "model": a.model.model, "engines": reports }))?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub requests: i64,
    pub states: usize,
    pub engine: &'static str,
    pub transitions: usize,
    pub seconds: f64,
    pub value: f64,
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let query = single_query(&a.query)?;
    let settings = solve_settings(&a.solve)?;
    let options = build_options(&a.explore);
    let engines = [
        Engine::Ipta,
        Engine::PtaStar,
        engine(EngineArg::Sample, &a.engine_args)?,
    ];
    let repeat = a.repeat.max(1);
    let mut rows = Vec::new();
    let mut warnings = Warnings::default();
    for r in a.requests.values() {
        let system = load(&a.model, &[(a.param.clone(), Value::Int(r))])?;
        let mut values = Vec::new();
        for engine in &engines {
            let mut best: Option<BenchRow> = None;
            for _ in 0..repeat {
                let o = run_query(&system, engine, &query, &options, &settings)?;
                warnings.model(&o.imdp, err)?;
                if !o.check.result.converged {
                    warnings.emit(
                        err,
                        format!(
                            "{}={r} {}: value iteration did not converge",
                            a.param,
                            engine.name()
                        ),
                    )?;
                }
                let elapsed = seconds(o.build_time + o.solve_time);
                if best.as_ref().is_none_or(|b| elapsed < b.seconds) {
                    best = Some(BenchRow {
                        requests: r,
                        states: o.imdp.num_states(),
                        engine: engine.name(),
                        transitions: o.imdp.num_transitions(),
                        seconds: elapsed,
                        value: o.check.value,
                    });
                }
            }
            let row = best.expect("at least one run");
            values.push(row.value);
            if !a.json {
                write_record(out, &row)?;
                out.flush()?;
            }
            rows.push(row);
        }
        if (values[0] - values[1]).abs() > AGREEMENT_TOLERANCE {
            if a.json {
                write_json(out, &serde_json::json!({ "rows": rows }))?;
            }
            return Err(CliError::Disagreement {
                param: a.param.clone(),
                requests: r,
                ipta: values[0],
                ptastar: values[1],
            });
        }
    }
    if a.json {
        write_json(out, &serde_json::json!({ "rows": rows }))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_export(a: &ExportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let engine = engine(a.engine, &a.engine_args)?;
    let query = a.query.as_deref().map(single_query).transpose()?;
    let system = load(&a.model, &[])?;
    let imdp = explore(&system, &engine, query.as_ref(), &build_options(&a.explore))?;
    Warnings::default().model(&imdp, err)?;
    let text = imdp.export();
    match &a.export {
        Some(path) => write_file(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct PruneReport {
    pub command: String,
    pub line: u32,
    pub minimal: bool,
    /// `alternative:condition` pairs, alternatives numbered from 0 and
    /// conditions 1 (upper bound attainable) and 2 (lower bound attainable).
    pub violations: Vec<String>,
    pub bounds: Vec<String>,
    pub pruned: Vec<String>,
}

fn interval(b: &(Prob, Prob)) -> String {
    format!("[{},{}]", fmt_prob(&b.0), fmt_prob(&b.1))
}

impl PruneReport {
    fn new(r: &CommandReport) -> PruneReport {
        PruneReport {
            command: format!("{}#{}", r.module, r.index),
            line: r.pos.line,
            minimal: r.violations.is_empty(),
            violations: r
                .violations
                .iter()
                .map(|v| format!("{}:{}", v.entry, v.condition.number()))
                .collect(),
            bounds: r.bounds.iter().map(interval).collect(),
            pruned: r.pruned.iter().map(interval).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct PruneSummary {
    commands: usize,
    nonminimal: usize,
}

pub fn cmd_prune(a: &PruneArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let text = read(&a.model.model)?;
    let in_model = |source: LangError| CliError::Model {
        path: a.model.model.clone(),
        source: Box::new(source.into()),
    };
    let src = lang::parse_model(&text).map_err(in_model)?;
    let model = lang::resolve(&src, &bindings(&a.model)?).map_err(in_model)?;
    let reports = check_commands(&src, &model.constants).map_err(in_model)?;
    let records: Vec<PruneReport> = reports.iter().map(PruneReport::new).collect();
    let summary = PruneSummary {
        commands: records.len(),
        nonminimal: records.iter().filter(|r| !r.minimal).count(),
    };

    // With the fixed model on stdout, the report moves to stderr.
    let model_to_stdout = a.fix && a.output.is_none();
    let report_out: &mut dyn Write = if model_to_stdout { err } else { &mut *out };
    if a.json {
        write_json(
            report_out,
            &serde_json::json!({ "commands": records, "summary": summary }),
        )?;
    } else {
        for r in &records {
            write_record(report_out, r)?;
        }
        write_record(report_out, &summary)?;
    }
    if a.fix {
        let fixed = apply_pruning(&src, &reports).to_string();
        match &a.output {
            Some(path) => write_file(path, &fixed)?,
            None => out.write_all(fixed.as_bytes())?,
        }
    }
    Ok(EXIT_OK)
}
