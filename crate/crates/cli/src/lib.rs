//! Command-line front end and HTTP API for `cvgraph`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cvgraph::action::{Action, FreshSymbols};
use cvgraph::verify::{run_trial, trial_seed};
use cvgraph::{
    local_complement, local_complement_unitary, parse_graph, parse_rational, plan, MeasurementBasis, OutcomeKind,
    PlanQuery, TrackedState, WeightedGraph,
};
use rayon::prelude::*;
use serde_json::{json, Value};

pub mod server;

#[derive(Parser, Debug)]
#[command(name = "cvgraph", version, about = "Weighted graph state rewriting under homodyne measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply measurements to a graph and print the rewritten state.
    Apply(ApplyArgs),
    /// Local complementation at one vertex.
    Lc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
    },
    /// Check the rules against the oracle on random instances.
    Verify(VerifyArgs),
    /// Search for a measurement sequence from one graph to another.
    Plan {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        max_depth: usize,
        /// Comma-separated bases, e.g. `x,p,theta:1/2`.
        #[arg(long, value_delimiter = ',', required = true)]
        bases: Vec<String>,
    },
    /// Print a graph in Graphviz DOT.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Serve the HTTP API (and optionally a static client).
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Actions such as `2:x@m`, `3:p:b0=2`, `4:theta:1/2@0`.
    #[arg(long, num_args = 1.., required = true)]
    measure: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    random: u64,
    #[arg(long)]
    max_vertices: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the finite-squeezing check on every trial.
    #[arg(long)]
    covariance: bool,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    r_list: Vec<f64>,
    /// Report file (JSON lines); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command failed, mapped onto the exit code.
#[derive(Debug)]
enum Failure {
    Domain(String),
    Verification(String),
}

impl From<cvgraph::Error> for Failure {
    fn from(e: cvgraph::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// Runs the command line, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Apply(a) => apply(&a, out),
        Command::Lc { graph, vertex, delta } => lc(&graph, &vertex, &delta, out),
        Command::Verify(v) => verify(&v, out, err),
        Command::Plan { graph, target, max_depth, bases } => plan_cmd(&graph, &target, max_depth, &bases, out),
        Command::ExportDot { graph } => load(&graph).map(|g| {
            let _ = write!(out, "{}", g.to_dot());
        }),
        Command::Serve { port, static_dir } => serve(port, static_dir, err),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            3
        }
    }
}

fn load(path: &Path) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Applies one action, drawing a fresh outcome symbol when none is given.
/// Returns the new state and the history entry with the outcome filled in.
pub fn apply_action(
    state: &TrackedState,
    action: &Action,
    fresh: &mut FreshSymbols,
) -> cvgraph::Result<(TrackedState, Value)> {
    let mut resolved = action.clone();
    let outcome = match &action.outcome {
        Some(o) => o.clone(),
        None => fresh.fresh(),
    };
    resolved.outcome = Some(outcome.clone());
    let (next, kind) = state.measure(&action.vertex, &action.basis, &outcome, action.b0.as_ref())?;
    let kind = match kind {
        OutcomeKind::Random => json!("random"),
        OutcomeKind::Deterministic(v) => json!({ "deterministic": v.to_string() }),
    };
    Ok((next, json!({ "op": "measure", "action": resolved.to_string(), "outcome": kind })))
}

/// JSON view of a tracked state.
pub fn state_json(state: &TrackedState) -> Value {
    let constraints: serde_json::Map<String, Value> = state
        .constraints
        .substitution()
        .iter()
        .map(|(k, v)| (k.clone(), json!(v.to_string())))
        .collect();
    json!({
        "graph": state.graph.to_doc(),
        "byproducts": state.byproduct.to_docs(),
        "constraints": constraints,
    })
}

fn apply(a: &ApplyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let g = load(&a.graph)?;
    let actions: Vec<Action> = a.measure.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let mut fresh = FreshSymbols::new();
    for act in &actions {
        if let Some(o) = &act.outcome {
            fresh.reserve(o);
        }
    }
    let mut state = TrackedState::new(g);
    let mut steps = Vec::new();
    for act in &actions {
        let (next, step) = apply_action(&state, act, &mut fresh)?;
        state = next;
        steps.push(step);
    }
    let mut doc = state_json(&state);
    doc["steps"] = Value::Array(steps);
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    emit(&text, a.out.as_deref(), out)?;
    if let Some(p) = &a.dot {
        fs::write(p, state.graph.to_dot())?;
    }
    Ok(())
}

fn lc(graph: &Path, vertex: &str, delta: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let g = load(graph)?;
    let a = cvgraph::VertexId::new(vertex)?;
    let delta = parse_rational(delta)?;
    let rewritten = local_complement(&g, &a, &delta)?;
    let unitary = local_complement_unitary(&g, &a, &delta)?;
    let doc = json!({ "graph": rewritten.to_doc(), "unitary": unitary.to_docs() });
    emit(&(serde_json::to_string_pretty(&doc).expect("json") + "\n"), None, out)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if a.max_vertices == 0 {
        return Err(Failure::Domain("--max-vertices must be at least 1".into()));
    }
    let rs = a.covariance.then_some(a.r_list.as_slice());
    if let Some(rs) = rs {
        if rs.len() < 2 || rs.iter().any(|r| !(*r > 0.0)) {
            return Err(Failure::Domain("--r-list needs at least two positive values".into()));
        }
    }
    let reports = (0..a.random)
        .into_par_iter()
        .map(|i| run_trial(trial_seed(a.seed, i), a.max_vertices, rs))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&serde_json::to_string(r).expect("json"));
        text.push('\n');
    }
    emit(&text, a.out.as_deref(), out)?;
    let failed = reports.iter().filter(|r| !r.symbolic_equal).count();
    let _ = writeln!(err, "{} trials, {} failed", reports.len(), failed);
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {} trials disagree with the oracle", reports.len())));
    }
    Ok(())
}

fn plan_cmd(graph: &Path, target: &Path, max_depth: usize, bases: &[String], out: &mut dyn Write) -> Result<(), Failure> {
    let bases = bases
        .iter()
        .map(|b| b.parse::<MeasurementBasis>())
        .collect::<Result<Vec<_>, _>>()?;
    let q = PlanQuery { source: load(graph)?, target: load(target)?, max_depth, bases };
    let result = plan(&q)?;
    emit(&(serde_json::to_string_pretty(&result.to_json()).expect("json") + "\n"), None, out)
}

fn serve(port: u16, static_dir: Option<PathBuf>, err: &mut dyn Write) -> Result<(), Failure> {
    let rt = tokio::runtime::Runtime::new()?;
    let _ = writeln!(err, "listening on http://127.0.0.1:{port}");
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
        axum::serve(listener, server::router(static_dir)).await
    })?;
    Ok(())
}
