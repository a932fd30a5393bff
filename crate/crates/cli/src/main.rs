use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use luinv_core::closedform::{alternate_writings, closed_form_mixed, closed_form_pure, descriptor};
use luinv_core::contract::{eval_mixed, eval_pure, relative_error, Kind};
use luinv_core::formula::Formula;
use luinv_core::invgraph::{build_graph, connected_components, dot_export, expressible_ordering};
use luinv_core::perm::{enumerate_orbits, generator_labels, is_transitive, PermTuple};
use luinv_core::states::io::{from_json_with_limit, to_json, State};
use luinv_core::states::{ghz, random_density, random_pure, Dims, DEFAULT_MAX_TOTAL_DIM, C64};
use luinv_core::verify::run_suite;
use luinv_core::Error;

const SCHEMA_VERSION: u32 = 1;
/// Largest relative gap between the two engines before `eval` fails.
const ENGINE_TOLERANCE: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "luinv", version, about = "Local-unitary invariant polynomials of grade 1 to 3")]
struct Cli {
    /// Largest total Hilbert-space dimension accepted for states.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TOTAL_DIM)]
    max_dim: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Pure,
    Mixed,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Pure => Kind::Pure,
            KindArg::Mixed => Kind::Mixed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Ghz,
    Bell,
}

#[derive(Subcommand)]
enum Command {
    /// List the labels S_m^r / S_m.
    Enumerate {
        #[arg(long)]
        m: usize,
        /// Label arity. Defaults to the arity for `--k` subsystems.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "mixed")]
        kind: KindArg,
        /// Only transitive labels.
        #[arg(long)]
        generators_only: bool,
        /// Print the number of labels only.
        #[arg(long)]
        count: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Evaluate one invariant on a state file with both engines.
    Eval {
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated names (e, t, s, s2, ts, ts2) or image lists like [2,1,3].
        #[arg(long, allow_hyphen_values = true)]
        label: Option<String>,
        /// Defaults to the kind of the state file.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Evaluate a formula descriptor such as "Tr(tr[3](rho)^2)".
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Graph of a label, its writings and its matrix formula.
    Graph {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        label: String,
        #[arg(long, value_enum, default_value = "pure")]
        kind: KindArg,
        /// Number of subsystems, checked against the label.
        #[arg(long)]
        k: Option<usize>,
        /// Print the DOT text.
        #[arg(long)]
        dot: bool,
        /// List every writing of the pure invariant.
        #[arg(long)]
        decompose: bool,
        /// Print an adjacent-loop vertex ordering, or "none".
        #[arg(long)]
        expressible: bool,
        /// Print the closed-form descriptor.
        #[arg(long)]
        formula: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the state dimensions, e.g. 2,3.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Write a state file.
    State {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "pure")]
        kind: KindArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank of a sampled density matrix; full rank by default.
        #[arg(long)]
        rank: Option<usize>,
        /// Unnormalized GHZ or Bell vector instead of a random state.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Subsystem count and local dimension for presets.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// Failure of a check, as opposed to a usage or resource error.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn parse_label(text: &str, m: usize) -> luinv_core::Result<PermTuple> {
    PermTuple::parse(text, m)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn cmd_enumerate(
    m: usize,
    r: Option<usize>,
    k: Option<usize>,
    kind: KindArg,
    generators_only: bool,
    count: bool,
    format: Format,
) -> anyhow::Result<()> {
    let r = match (r, k) {
        (Some(r), _) => r,
        (None, Some(k)) => Kind::from(kind).arity(k),
        (None, None) => bail!(usage("enumerate needs --r or --k")),
    };
    let labels = if generators_only {
        generator_labels(m, r)?
    } else {
        enumerate_orbits(m, r)?
    };
    match (count, format) {
        (true, Format::Json) => print_json(&json!({"schema_version": SCHEMA_VERSION, "m": m, "r": r, "count": labels.len()})),
        (true, _) => println!("{}", labels.len()),
        (false, Format::Json) => {
            let rows: Vec<Value> = labels
                .iter()
                .map(|l| json!({"label": l.to_string(), "transitive": is_transitive(l.rep())}))
                .collect();
            print_json(&json!({"schema_version": SCHEMA_VERSION, "m": m, "r": r, "labels": rows}));
        }
        (false, _) => {
            for l in &labels {
                let flag = if is_transitive(l.rep()) { "transitive" } else { "intransitive" };
                println!("{l}\t{flag}");
            }
        }
    }
    Ok(())
}

fn read_state(path: &Path, max_dim: usize) -> anyhow::Result<State> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))
        .map_err(|e| anyhow!(usage(&format!("{e:#}"))))?;
    from_json_with_limit(&text, max_dim).with_context(|| format!("invalid state file {}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    m: Option<usize>,
    label: Option<String>,
    kind: Option<KindArg>,
    formula: Option<String>,
    state_path: &Path,
    format: Format,
    max_dim: usize,
) -> anyhow::Result<()> {
    let state = read_state(state_path, max_dim)?;
    let kind = match (kind.map(Kind::from), &state) {
        (Some(k), _) => k,
        (None, State::Pure(_)) => Kind::Pure,
        (None, State::Mixed(_)) => Kind::Mixed,
    };
    let mut out = json!({"schema_version": SCHEMA_VERSION, "kind": kind, "dims": state.dims().as_slice()});

    if let Some(text) = &formula {
        let f = Formula::parse(text)?;
        let v = match &state {
            State::Pure(psi) => f.eval_pure(psi)?,
            State::Mixed(rho) => f.eval(rho)?,
        };
        out["formula"] = json!(f.to_string());
        out["formula_value"] = pair(v);
        if label.is_none() {
            out["value"] = pair(v);
        }
    }

    let mut failure = None;
    if let Some(text) = &label {
        let m = m.ok_or_else(|| anyhow!(usage("--label needs --m")))?;
        let sigma = parse_label(text, m)?;
        let (oracle, closed) = match (kind, &state) {
            (Kind::Pure, State::Pure(psi)) => (
                eval_pure(&sigma, psi)?,
                (m <= 3).then(|| closed_form_pure(&sigma, psi)).transpose()?,
            ),
            (Kind::Mixed, State::Pure(psi)) => {
                let pi = psi.projector();
                (eval_mixed(&sigma, &pi)?, (m <= 3).then(|| closed_form_mixed(&sigma, &pi)).transpose()?)
            }
            (Kind::Mixed, State::Mixed(rho)) => (
                eval_mixed(&sigma, rho)?,
                (m <= 3).then(|| closed_form_mixed(&sigma, rho)).transpose()?,
            ),
            (Kind::Pure, State::Mixed(_)) => bail!(usage("a pure label needs a pure state file")),
        };
        out["label"] = json!(sigma.to_string());
        out["m"] = json!(m);
        out["value"] = pair(oracle);
        out["contract"] = pair(oracle);
        out["closed_form"] = closed.map_or(Value::Null, pair);
        let mut gaps = Vec::new();
        if let Some(c) = closed {
            gaps.push(("closed_form", relative_error(c, oracle)));
        }
        if let Some(v) = out.get("formula_value").and_then(Value::as_array) {
            let v = C64::new(v[0].as_f64().unwrap_or(f64::NAN), v[1].as_f64().unwrap_or(f64::NAN));
            gaps.push(("formula", relative_error(v, oracle)));
        }
        let worst = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
        out["difference"] = json!(worst);
        if let Some((what, gap)) = gaps.iter().find(|g| g.1.is_nan() || g.1 > ENGINE_TOLERANCE) {
            failure = Some(format!("{what} and contraction disagree: relative difference {gap:.3e}"));
        }
    } else if formula.is_none() {
        bail!(usage("eval needs --label or --formula"));
    }

    if format == Format::Json {
        print_json(&out);
    } else {
        for (key, value) in out.as_object().expect("object") {
            println!("{key}\t{value}");
        }
    }
    match failure {
        Some(msg) => Err(CheckFailed(msg).into()),
        None => Ok(()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_graph(
    m: usize,
    label: &str,
    kind: Kind,
    k: Option<usize>,
    dot: bool,
    decompose: bool,
    expressible: bool,
    formula: bool,
    format: Format,
) -> anyhow::Result<()> {
    let sigma = parse_label(label, m)?;
    if let Some(k) = k {
        if kind.arity(k) != sigma.r() {
            bail!(Error::ArityMismatch { expected: kind.arity(k), got: sigma.r() });
        }
    }
    let full = match kind {
        Kind::Pure => sigma.with_identity_appended(),
        Kind::Mixed => sigma.clone(),
    };
    let g = build_graph(&full);
    let only_dot = format == Format::Dot || (dot && !decompose && !expressible && !formula);
    if only_dot {
        print!("{}", dot_export(&g, &[]));
        return Ok(());
    }

    let mut out = json!({"schema_version": SCHEMA_VERSION, "label": sigma.to_string(), "kind": kind,
                         "graph": g.to_json(), "components": connected_components(&g).len()});
    if dot {
        out["dot"] = json!(dot_export(&g, &[]));
    }
    if decompose {
        let rows: Vec<Value> = match (kind, m <= 3) {
            (_, true) => alternate_writings(&sigma, kind)?
                .iter()
                .map(|w| json!({"class": w.class.to_string(), "formula": w.formula.to_string()}))
                .collect(),
            (Kind::Pure, false) => luinv_core::perm::sim_decompose(&sigma)?
                .members
                .iter()
                .map(|c| json!({"class": c.to_string(), "formula": Value::Null}))
                .collect(),
            (Kind::Mixed, false) => vec![json!({"class": luinv_core::perm::canonical_form(&sigma)?.to_string(), "formula": Value::Null})],
        };
        out["classes"] = json!(rows);
    }
    if expressible {
        out["ordering"] = match expressible_ordering(&g)? {
            Some(order) => json!(order.iter().map(|v| v + 1).collect::<Vec<_>>()),
            None => Value::Null,
        };
    }
    if formula {
        out["formula"] = json!(descriptor(&full, kind)?.to_string());
    }

    if format == Format::Json {
        print_json(&out);
        return Ok(());
    }
    println!("label\t{}\t{kind}", out["label"].as_str().unwrap_or_default());
    if let Some(rows) = out.get("classes").and_then(Value::as_array) {
        println!("classes\t{}", rows.len());
        for row in rows {
            let f = row["formula"].as_str().unwrap_or("-");
            println!("{}\t{f}", row["class"].as_str().unwrap_or_default());
        }
    }
    if expressible {
        match out["ordering"].as_array() {
            Some(order) => {
                let text: Vec<String> = order.iter().map(|v| v.to_string()).collect();
                println!("ordering\t{}", text.join(" "));
            }
            None => println!("ordering\tnone"),
        }
    }
    if let Some(f) = out.get("formula").and_then(Value::as_str) {
        println!("formula\t{f}");
    }
    if dot {
        print!("{}", dot_export(&g, &[]));
    }
    Ok(())
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    dims: Option<Vec<usize>>,
    report: Option<PathBuf>,
    format: Format,
    max_dim: usize,
) -> anyhow::Result<()> {
    let dims = dims.map(|d| Dims::with_limit(d, max_dim)).transpose()?;
    let reports = run_suite(suite, seed, dims.as_ref())?;
    let text = serde_json::to_string_pretty(&json!({"schema_version": SCHEMA_VERSION, "suite": suite,
                                                   "seed": seed, "reports": reports}))?;
    if let Some(path) = report {
        std::fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if format == Format::Json {
        println!("{text}");
    } else {
        for r in &reports {
            println!("{}", r.summary());
            if let Some(w) = &r.witness {
                println!("    witness: {w}");
            }
        }
    }
    let failed = reports.iter().filter(|r| r.is_failure()).count();
    if failed > 0 {
        return Err(CheckFailed(format!("{failed} of {} checks failed", reports.len())).into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_state(
    dims: Option<Vec<usize>>,
    kind: Kind,
    seed: u64,
    rank: Option<usize>,
    preset: Option<Preset>,
    k: usize,
    n: usize,
    out: Option<PathBuf>,
    max_dim: usize,
) -> anyhow::Result<()> {
    let state = match preset {
        Some(Preset::Ghz) => State::Pure(ghz(k, n)?),
        Some(Preset::Bell) => State::Pure(ghz(2, n)?),
        None => {
            let dims = dims.ok_or_else(|| anyhow!(usage("state needs --dims or --preset")))?;
            let dims = Dims::with_limit(dims, max_dim)?;
            match kind {
                Kind::Pure => State::Pure(random_pure(&dims, seed)),
                Kind::Mixed => State::Mixed(random_density(&dims, seed, rank.unwrap_or(dims.total()))?),
            }
        }
    };
    let state = match (kind, state, preset.is_some()) {
        (Kind::Mixed, State::Pure(psi), true) => State::Mixed(psi.projector()),
        (_, s, _) => s,
    };
    let text = to_json(&state);
    match out {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn usage(msg: &str) -> Error {
    Error::Parse(msg.to_string())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let max_dim = cli.max_dim;
    match cli.command {
        Command::Enumerate { m, r, k, kind, generators_only, count, format } => {
            cmd_enumerate(m, r, k, kind, generators_only, count, format)
        }
        Command::Eval { m, label, kind, formula, state, format } => {
            cmd_eval(m, label, kind, formula, &state, format, max_dim)
        }
        Command::Graph { m, label, kind, k, dot, decompose, expressible, formula, format } => {
            cmd_graph(m, &label, kind.into(), k, dot, decompose, expressible, formula, format)
        }
        Command::Verify { suite, seed, dims, report, format } => {
            cmd_verify(&suite, seed, dims, report, format, max_dim)
        }
        Command::State { dims, kind, seed, rank, preset, k, n, out } => {
            cmd_state(dims, kind.into(), seed, rank, preset, k, n, out, max_dim)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_resource() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
