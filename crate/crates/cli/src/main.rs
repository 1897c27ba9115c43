use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use walktrace_core::expander::{self, HksRange, Mode, PseudoRandomParams};
use walktrace_core::experiment::{self, ExperimentConfig, Kind, Model};
use walktrace_core::mixing;
use walktrace_core::walk::{self, Laziness, Parity, Walk};
use walktrace_core::{MultiGraph, SeedStream};

/// Random walk traces on random graphs: hitting times, Hamiltonicity,
/// expansion audits and mixing.
#[derive(Parser)]
#[command(name = "walktrace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walk on a random graph and test the trace for Hamiltonicity and connectivity.
    Simulate(SimulateArgs),
    /// Hitting times of cover, degree, connectivity, Hamiltonicity and matching.
    Hitting(ExperimentArgs),
    /// The sparsify-and-boost chain on the lazy walk over K_n.
    Pipeline(PipelineArgs),
    /// Expansion and pseudo-randomness audits of a graph or walk trace.
    Audit(AuditArgs),
    /// Exact empirical mixing time of the lazy walk.
    Mix(MixArgs),
    /// Summary table of JSONL run records.
    Summarize(SummarizeArgs),
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    /// Key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model: gnp(n,p), gnp-alpha(n,alpha), complete(n) or ghat(n,m).
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, conflicts_with = "alpha")]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Walk length (1 + epsilon) n ln n; adaptive when absent.
    #[arg(long, conflicts_with = "steps")]
    epsilon: Option<f64>,
    /// Fixed walk length.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_laziness)]
    laziness: Option<Laziness>,
    /// JSONL output; resumed if it exists. Records go to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra key=value settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Only measure the cover time, without storing the walk.
    #[arg(long)]
    cover_only: bool,
    /// Trace connectivity to test.
    #[arg(long)]
    target_connectivity: Option<usize>,
    /// Also compute hitting times.
    #[arg(long)]
    with_hitting: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Sampled sets in the expander audit of the sparsified graph.
    #[arg(long)]
    expander_samples: Option<usize>,
}

/// Audited properties, from a comma list such as `p1,p3,e1,e2,q1q2,rc`.
/// Group names `pseudorandom` (P1-P6), `trace` (E1, E2), `hks` (Q1, Q2),
/// `expander` (rc) and `all` are accepted too.
#[derive(Clone, Debug, Default)]
struct Selection {
    names: BTreeSet<String>,
    rc: bool,
    all: bool,
}

impl Selection {
    fn parse(s: &str) -> Result<Self, String> {
        let mut sel = Selection::default();
        for tok in s.split(',').map(|t| t.trim().to_ascii_lowercase()).filter(|t| !t.is_empty()) {
            let names: &[&str] = match tok.as_str() {
                "all" => {
                    sel.all = true;
                    &[]
                }
                "rc" | "expander" => {
                    sel.rc = true;
                    &[]
                }
                "pseudorandom" => &["P1", "P2", "P3", "P4", "P5", "P6"],
                "trace" => &["E1", "E2"],
                "hks" | "q1q2" => &["Q1", "Q2"],
                "q1" => &["Q1"],
                "q2" => &["Q2"],
                "e1" => &["E1"],
                "e2" => &["E2"],
                "p1" => &["P1"],
                "p2" => &["P2"],
                "p3" => &["P3"],
                "p4" => &["P4"],
                "p5" => &["P5"],
                "p6" => &["P6"],
                other => return Err(format!("unknown property '{other}'")),
            };
            sel.names.extend(names.iter().map(|n| n.to_string()));
        }
        if sel.names.is_empty() && !sel.rc && !sel.all {
            return Err("no property selected".into());
        }
        Ok(sel)
    }

    fn any(&self, prefix: char) -> bool {
        self.names.iter().any(|n| n.starts_with(prefix))
    }

    fn keeps(&self, name: &str) -> bool {
        self.all || self.names.contains(name)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    All,
    Odd,
    Even,
}

#[derive(Args)]
struct AuditArgs {
    /// Graph: a model spec or a graph file.
    #[arg(long, required_unless_present = "walk")]
    graph: Option<String>,
    /// Walk file whose trace is audited.
    #[arg(long, conflicts_with = "graph")]
    walk: Option<PathBuf>,
    /// Trace up to this step (whole walk by default).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, value_enum, default_value = "all")]
    parity: ParityArg,
    /// Comma list of p1..p6, e1, e2, q1q2 (or q1, q2), rc, or a group name:
    /// pseudorandom, trace, hks, expander, all. `rc` needs --r and --c; with
    /// `all`, the HKS and expander audits run only when --d or --r/--c are given.
    #[arg(long, alias = "property", default_value = "all", value_parser = Selection::parse)]
    properties: Selection,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long)]
    d: Option<f64>,
    /// Use the strict HKS degree range instead of the relaxed one.
    #[arg(long)]
    strict: bool,
    /// Pseudo-randomness density parameter; derived from the average degree if absent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Enumerate all sets instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MixArgs {
    /// Graph: a model spec or a graph file.
    #[arg(long)]
    graph: String,
    /// Target distance; 1/n by default.
    #[arg(long)]
    xi: Option<f64>,
    /// Evolution horizon; the reference bound by default.
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep the worst-start trajectory in the output.
    #[arg(long)]
    trajectory: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// JSONL record files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// CSV output; stdout otherwise.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_laziness(s: &str) -> Result<Laziness, String> {
    s.parse().map_err(|e: walktrace_core::Error| e.to_string())
}

fn build_config(a: &ExperimentArgs, kind: Kind, extra: &[(&str, String)]) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p, &[]).with_context(|| format!("reading config {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = kind;
    let mut set = |k: &str, v: String| cfg.set(k, &v).with_context(|| format!("setting {k}"));
    if let Some(m) = &a.model {
        set("model", m.clone())?;
    }
    if let Some(n) = a.n {
        set("n", n.to_string())?;
    }
    if let Some(p) = a.p {
        set("p", p.to_string())?;
    }
    if let Some(al) = a.alpha {
        set("alpha", al.to_string())?;
    }
    if let Some(e) = a.epsilon {
        set("epsilon", e.to_string())?;
    }
    if let Some(s) = a.steps {
        set("steps", s.to_string())?;
    }
    if let Some(k) = a.k {
        set("k", k.to_string())?;
    }
    if let Some(r) = a.runs {
        set("runs", r.to_string())?;
    }
    if let Some(s) = a.seed {
        set("seed", s.to_string())?;
    }
    if let Some(l) = a.laziness {
        set("laziness", l.as_str().to_string())?;
    }
    for (k, v) in extra {
        set(k, v.clone())?;
    }
    for kv in &a.set {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, got '{kv}'");
        };
        set(k, v.to_string())?;
    }
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &ExperimentConfig) -> Result<()> {
    let records = experiment::run_experiment(cfg)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if cfg.out.is_none() {
        for r in &records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
    } else {
        out.write_all(experiment::summarize(&records)?.to_csv().as_bytes())?;
    }
    Ok(())
}

fn load_graph(spec: &str, seed: u64) -> Result<MultiGraph> {
    if let Ok(model) = spec.parse::<Model>() {
        return Ok(model.sample(SeedStream::new(seed, 0))?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("'{spec}' is neither a graph model nor an existing file");
    }
    let file = File::open(path).with_context(|| format!("opening {spec}"))?;
    Ok(MultiGraph::read_text(BufReader::new(file))?)
}

fn write_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => writeln!(io::stdout(), "{text}")?,
    }
    Ok(())
}

fn audit(a: &AuditArgs) -> Result<()> {
    let g = match (&a.graph, &a.walk) {
        (Some(spec), _) => load_graph(spec, a.seed)?,
        (None, Some(path)) => {
            let w = Walk::read_text(BufReader::new(File::open(path)?))?;
            let parity = match a.parity {
                ParityArg::All => Parity::All,
                ParityArg::Odd => Parity::Odd,
                ParityArg::Even => Parity::Even,
            };
            walk::trace(&w, a.t.unwrap_or(w.len()).min(w.len()), parity)
        }
        (None, None) => bail!("need --graph or --walk"),
    };
    let mode = if a.exact { Mode::exact() } else { Mode::Sampled { samples: a.samples } };
    let seed = SeedStream::new(a.seed, 1);
    let n = g.n();
    let sel = &a.properties;
    let mut report = expander::AuditReport::default();
    let mut cert = None;
    if sel.rc || (sel.all && a.r.is_some() && a.c.is_some()) {
        let (Some(r), Some(c)) = (a.r, a.c) else {
            bail!("the expander audit needs --r and --c");
        };
        cert = Some(expander::is_rc_expander(&g, r, c, mode, seed.child(1))?);
    }
    if sel.all || sel.any('E') {
        report = report.merge(expander::trace_expansion_audit(&g, a.beta, mode, seed.child(2))?);
    }
    if (sel.all && a.d.is_some()) || sel.any('Q') {
        let Some(d) = a.d else {
            bail!("the HKS audit needs --d");
        };
        let range = if a.strict { HksRange::Strict } else { HksRange::Relaxed };
        report = report.merge(expander::hks_audit(&g, d, range, mode, seed.child(3))?);
    }
    if sel.all || sel.any('P') {
        let alpha = a.alpha.unwrap_or_else(|| {
            let avg = 2.0 * g.simple_edge_count() as f64 / n as f64;
            avg / (n as f64).ln()
        });
        report = report.merge(expander::pseudorandom_audit(&g, PseudoRandomParams::new(alpha, a.samples), seed.child(4))?);
    }
    report.properties.retain(|p| sel.keeps(&p.name));
    let cert = cert.map(|mut c| {
        if let Some(w) = c.witness.as_mut() {
            w.iter_mut().for_each(|v| *v += 1);
        }
        c
    });
    let passed = report.passed() && cert.as_ref().is_none_or(|c| c.pass);
    write_json(
        &serde_json::json!({
            "n": n,
            "passed": passed,
            "expander": cert,
            "report": report.one_based(),
        }),
        a.out.as_deref(),
    )
}

fn mix(a: &MixArgs) -> Result<()> {
    let g = load_graph(&a.graph, a.seed)?;
    let n = g.n();
    let xi = a.xi.unwrap_or(1.0 / n as f64);
    let bound = 3601.0 * (n as f64).ln();
    let max_steps = a.max_steps.unwrap_or(bound.ceil() as usize);
    let mut rep = mixing::empirical_mixing_time(&g, xi, max_steps, SeedStream::new(a.seed, 2))?;
    if !a.trajectory {
        rep.worst_trajectory.clear();
    }
    write_json(
        &serde_json::json!({
            "report": rep,
            "bound_3601_ln_n": bound,
            "reference_1800_ln_2n_over_xi": mixing::reference_mixing_bound(n, xi),
            "margin": rep.tau.map(|t| bound - t as f64),
        }),
        a.out.as_deref(),
    )
}

fn summarize(a: &SummarizeArgs) -> Result<()> {
    let mut records = Vec::new();
    for p in &a.inputs {
        records.extend(experiment::read_records(p).with_context(|| format!("reading {}", p.display()))?);
    }
    let csv = experiment::summarize(&records)?.to_csv();
    match &a.csv {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => {
            let kind = if a.cover_only { Kind::Cover } else { Kind::Simulate };
            let mut extra = Vec::new();
            if let Some(t) = a.target_connectivity {
                extra.push(("target_connectivity", t.to_string()));
            }
            if a.with_hitting {
                extra.push(("with_hitting", "true".to_string()));
            }
            build_config(&a.exp, kind, &extra).and_then(|c| run(&c))
        }
        Command::Hitting(a) => build_config(a, Kind::Hitting, &[]).and_then(|c| run(&c)),
        Command::Pipeline(a) => {
            let mut extra = Vec::new();
            if let Some(d) = a.delta0 {
                extra.push(("delta0", d.to_string()));
            }
            if let Some(r) = a.rho {
                extra.push(("rho", r.to_string()));
            }
            if let Some(s) = a.expander_samples {
                extra.push(("expander_samples", s.to_string()));
            }
            let mut exp = a.exp.clone();
            if exp.model.is_none() && exp.config.is_none() {
                exp.model = Some(format!("complete({})", exp.n.unwrap_or(300)));
            }
            build_config(&exp, Kind::Pipeline, &extra).and_then(|c| run(&c))
        }
        Command::Audit(a) => audit(a),
        Command::Mix(a) => mix(a),
        Command::Summarize(a) => summarize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
