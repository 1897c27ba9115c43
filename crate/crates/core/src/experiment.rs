//! Experiment configuration, per-run records, the resumable parallel runner
//! and record summaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::hamilton::{self, HamiltonOptions, Hamiltonicity};
use crate::models::{sample_ghat, sample_gnp, SeedStream};
use crate::pipeline::{self, PipelineParams, PipelineRecord, TraceAudit};
use crate::structure;
use crate::tail::cover_window;
use crate::walk::{self, CompleteGraph, HittingOptions, HittingRecord, Laziness, Parity, Topology, Walk, WalkTable, Walker};

/// A random or fixed base graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model {
    Gnp { n: usize, p: f64 },
    /// `G(n, p)` with `p = α ln n / n`.
    GnpAlpha { n: usize, alpha: f64 },
    Complete { n: usize },
    Ghat { n: usize, m: u64 },
}

impl Model {
    pub fn n(&self) -> usize {
        match *self {
            Model::Gnp { n, .. } | Model::GnpAlpha { n, .. } | Model::Complete { n } | Model::Ghat { n, .. } => n,
        }
    }

    /// Edge probability for the `G(n, p)` variants.
    pub fn p(&self) -> Option<f64> {
        match *self {
            Model::Gnp { p, .. } => Some(p),
            Model::GnpAlpha { n, alpha } => Some(alpha * (n as f64).ln() / n as f64),
            _ => None,
        }
    }

    /// `α = p n / ln n` for the `G(n, p)` variants and `K_n`.
    pub fn alpha(&self) -> Option<f64> {
        let n = self.n() as f64;
        match *self {
            Model::GnpAlpha { alpha, .. } => Some(alpha),
            Model::Gnp { p, .. } => Some(p * n / n.ln()),
            Model::Complete { .. } => Some((n - 1.0) / n.ln()),
            Model::Ghat { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if let Some(p) = self.p() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Materializes the graph. `K_n` is built explicitly.
    pub fn sample(&self, seed: SeedStream) -> Result<MultiGraph> {
        self.validate()?;
        match *self {
            Model::Complete { n } => Ok(MultiGraph::complete(n)),
            Model::Ghat { n, m } => sample_ghat(n, m, seed),
            _ => sample_gnp(self.n(), self.p().unwrap(), seed),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Model::Gnp { n, p } => write!(f, "gnp({n},{p})"),
            Model::GnpAlpha { n, alpha } => write!(f, "gnp-alpha({n},{alpha})"),
            Model::Complete { n } => write!(f, "complete({n})"),
            Model::Ghat { n, m } => write!(f, "ghat({n},{m})"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    /// `gnp(n,p)`, `gnp-alpha(n,alpha)`, `complete(n)` or `ghat(n,m)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized model '{s}'"));
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(bad)?.split(',').map(str::trim).collect();
        let int = |a: &str| a.parse::<usize>().map_err(|_| bad());
        let float = |a: &str| a.parse::<f64>().map_err(|_| bad());
        let model = match (name.trim(), args.as_slice()) {
            ("gnp", [n, p]) => Model::Gnp { n: int(n)?, p: float(p)? },
            ("gnp-alpha", [n, a]) => Model::GnpAlpha { n: int(n)?, alpha: float(a)? },
            ("complete", [n]) => Model::Complete { n: int(n)? },
            ("ghat", [n, m]) => Model::Ghat { n: int(n)?, m: m.parse().map_err(|_| bad())? },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

/// How long each walk runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "length", rename_all = "kebab-case")]
pub enum LengthSpec {
    /// `⌈(1 + ε) n ln n⌉`.
    Epsilon { epsilon: f64 },
    Steps { steps: usize },
    /// Extend in blocks of `n` until the requested times resolve, up to
    /// `10 n ln n`.
    Adaptive,
}

impl LengthSpec {
    /// Fixed length, `None` for adaptive walks.
    pub fn resolve(&self, n: usize) -> Option<usize> {
        match *self {
            LengthSpec::Epsilon { epsilon } => {
                let nf = n as f64;
                Some(((1.0 + epsilon) * nf * nf.ln()).ceil().max(1.0) as usize)
            }
            LengthSpec::Steps { steps } => Some(steps),
            LengthSpec::Adaptive => None,
        }
    }
}

impl FromStr for LengthSpec {
    type Err = Error;

    /// `adaptive`, `epsilon:<f>` or `steps:<u>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized walk length '{s}'"));
        match s.trim().split_once(':') {
            None if s.trim() == "adaptive" => Ok(LengthSpec::Adaptive),
            Some(("epsilon", e)) => Ok(LengthSpec::Epsilon { epsilon: e.parse().map_err(|_| bad())? }),
            Some(("steps", t)) => Ok(LengthSpec::Steps { steps: t.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

/// `10 n ln n`, the adaptive cap.
pub fn adaptive_cap(n: usize) -> usize {
    let nf = n as f64;
    (10.0 * nf * nf.max(2.0).ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Walk on the model, then Hamiltonicity and connectivity of the trace.
    Simulate,
    /// Hitting times of the trace properties.
    Hitting,
    /// Cover time only, without storing the walk.
    Cover,
    /// The `K_n` construction chain.
    Pipeline,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "simulate" => Ok(Kind::Simulate),
            "hitting" => Ok(Kind::Hitting),
            "cover" => Ok(Kind::Cover),
            "pipeline" => Ok(Kind::Pipeline),
            other => Err(Error::InvalidParameter(format!("unknown experiment kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(flatten)]
    pub model: Model,
    pub laziness: Laziness,
    /// Record lazy stays as loops; defaults by laziness mode.
    pub stays_as_loops: Option<bool>,
    #[serde(flatten)]
    pub length: LengthSpec,
    pub k: usize,
    /// Connectivity demanded of the trace in `simulate` runs.
    pub target_connectivity: usize,
    /// Also compute hitting times in `simulate` runs.
    pub with_hitting: bool,
    pub skip_hamilton: bool,
    pub skip_matching: bool,
    pub skip_connectivity: bool,
    pub pipeline: PipelineParams,
    /// Not echoed into records.
    #[serde(skip)]
    pub runs: usize,
    pub master_seed: u64,
    /// Add wall-clock time to each record (breaks byte-identical reruns).
    pub timing: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: Kind::Hitting,
            model: Model::Complete { n: 100 },
            laziness: Laziness::None,
            stays_as_loops: None,
            length: LengthSpec::Adaptive,
            k: 1,
            target_connectivity: 5,
            with_hitting: false,
            skip_hamilton: false,
            skip_matching: false,
            skip_connectivity: false,
            pipeline: PipelineParams::default(),
            runs: 1,
            master_seed: 0,
            timing: false,
            out: None,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse '{v}'")))
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. `n`, `p` and `alpha` rewrite the
    /// model in place.
    /// The part of the configuration stored in each record.
    pub fn echoed(&self) -> ExperimentConfig {
        ExperimentConfig { runs: 0, out: None, ..self.clone() }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "kind" => self.kind = value.parse()?,
            "model" => self.model = value.parse()?,
            "n" => {
                let n: usize = parse_num(key, value)?;
                self.model = match self.model {
                    Model::Gnp { p, .. } => Model::Gnp { n, p },
                    Model::GnpAlpha { alpha, .. } => Model::GnpAlpha { n, alpha },
                    Model::Complete { .. } => Model::Complete { n },
                    Model::Ghat { m, .. } => Model::Ghat { n, m },
                };
            }
            "p" => self.model = Model::Gnp { n: self.model.n(), p: parse_num(key, value)? },
            "alpha" => self.model = Model::GnpAlpha { n: self.model.n(), alpha: parse_num(key, value)? },
            "laziness" => self.laziness = value.parse()?,
            "stays_as_loops" => self.stays_as_loops = Some(parse_bool(key, value)?),
            "length" => self.length = value.parse()?,
            "epsilon" => self.length = LengthSpec::Epsilon { epsilon: parse_num(key, value)? },
            "steps" => self.length = LengthSpec::Steps { steps: parse_num(key, value)? },
            "k" => {
                self.k = parse_num(key, value)?;
                self.pipeline.k = self.k;
            }
            "target_connectivity" => self.target_connectivity = parse_num(key, value)?,
            "with_hitting" => self.with_hitting = parse_bool(key, value)?,
            "skip_hamilton" => self.skip_hamilton = parse_bool(key, value)?,
            "skip_matching" => self.skip_matching = parse_bool(key, value)?,
            "skip_connectivity" => self.skip_connectivity = parse_bool(key, value)?,
            "delta0" => self.pipeline.delta0 = parse_num(key, value)?,
            "rho" => self.pipeline.rho = parse_num(key, value)?,
            "expander_samples" => self.pipeline.expander_samples = parse_num(key, value)?,
            "runs" => self.runs = parse_num(key, value)?,
            "seed" | "master_seed" => self.master_seed = parse_num(key, value)?,
            "timing" => self.timing = parse_bool(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::InvalidParameter(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got '{line}'"),
            })?;
            cfg.set(k, v).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::parse_text(&std::fs::read_to_string(path)?)?;
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn stays_as_loops(&self) -> bool {
        self.stays_as_loops.unwrap_or(self.laziness.default_stays_as_loops())
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let n = self.model.n();
        if let Some(len) = self.length.resolve(n) {
            if len == 0 {
                return Err(Error::InvalidParameter("walk length resolves to 0".into()));
            }
        }
        if let LengthSpec::Epsilon { epsilon } = self.length {
            if !(epsilon > -1.0) {
                return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must exceed -1")));
            }
        }
        match self.kind {
            Kind::Pipeline => {
                if !matches!(self.model, Model::Complete { .. }) {
                    return Err(Error::InvalidParameter("pipeline runs need the complete(n) model".into()));
                }
                self.pipeline.validate(n)?;
                cover_window(n as u64, self.k as u64)?;
            }
            Kind::Hitting | Kind::Cover if n < 2 => {
                return Err(Error::InvalidParameter("hitting times need n >= 2".into()));
            }
            _ => {}
        }
        Ok(())
    }

    fn hitting_options(&self, seed: SeedStream) -> HittingOptions {
        HittingOptions {
            hamilton: HamiltonOptions { seed, ..HamiltonOptions::default() },
            skip_hamilton: self.skip_hamilton,
            skip_matching: self.skip_matching,
            skip_connectivity: self.skip_connectivity,
            ..HittingOptions::default()
        }
    }
}

/// Verdicts on the trace of a fixed-length walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceVerdict {
    /// `None` when the heuristic could not decide.
    pub hamiltonian: Option<bool>,
    pub target_connectivity: usize,
    pub k_connected: bool,
    pub min_simple_degree: usize,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: u64,
    pub seed: SeedStream,
    pub config: ExperimentConfig,
    pub start: usize,
    pub walk_len: usize,
    /// The adaptive walk hit its cap before everything resolved.
    pub capped: bool,
    pub tau_c: Option<usize>,
    #[serde(default)]
    pub hitting: Option<HittingRecord>,
    #[serde(default)]
    pub inequality_violations: Vec<String>,
    #[serde(default)]
    pub verdict: Option<TraceVerdict>,
    #[serde(default)]
    pub pipeline: Option<PipelineRecord>,
    #[serde(default)]
    pub trace_audit: Option<TraceAudit>,
    #[serde(default)]
    pub elapsed_ms: Option<u64>,
}

fn pick_start(g: Option<&MultiGraph>, n: usize, seed: SeedStream) -> Result<usize> {
    let mut rng = seed.rng();
    match g {
        None => Ok(rng.random_range(0..n)),
        Some(g) => {
            let live: Vec<usize> = (0..n).filter(|&v| g.degree(v) > 0).collect();
            if live.is_empty() {
                return Err(Error::Edgeless);
            }
            Ok(live[rng.random_range(0..live.len())])
        }
    }
}

fn requested_resolved(rec: &HittingRecord, cfg: &ExperimentConfig) -> bool {
    let n = rec.n;
    rec.tau_c.iter().all(Option::is_some)
        && rec.tau_delta.iter().all(Option::is_some)
        && (cfg.skip_connectivity || rec.tau_kappa.iter().all(Option::is_some))
        && (cfg.skip_hamilton || n < 3 || rec.tau_h.is_some())
        && (cfg.skip_matching || n % 2 == 1 || rec.tau_pm.is_some())
}

/// Grows the walk in blocks of `n` until the hitting record resolves.
fn adaptive_hitting<T: Topology + ?Sized>(
    walker: &mut Walker<'_, T>,
    cfg: &ExperimentConfig,
    opts: &HittingOptions,
) -> (HittingRecord, bool) {
    let n = walker.walk().n;
    let cap = adaptive_cap(n);
    let mut scan = walk::TraceScan::new(n, cfg.k, walker.walk().start(), walker.walk().stays_as_loops);
    let mut seen = 0;
    loop {
        let len = walker.walk().len();
        for i in seen + 1..=len {
            scan.push(walker.walk().at(i));
        }
        seen = len;
        if scan.resolved() {
            let rec = walk::hitting_times(walker.walk(), cfg.k, opts);
            let ok = requested_resolved(&rec, cfg);
            if ok || len >= cap {
                return (rec, !ok);
            }
        } else if len >= cap {
            return (walk::hitting_times(walker.walk(), cfg.k, opts), true);
        }
        walker.extend(n.min(cap - len).max(1));
    }
}

fn run_walk_kind<T: Topology + ?Sized>(
    topo: &T,
    g: Option<&MultiGraph>,
    cfg: &ExperimentConfig,
    seed: SeedStream,
    rec: &mut RunRecord,
) -> Result<()> {
    let n = cfg.model.n();
    let start = pick_start(g, n, seed.child(1))?;
    rec.start = start;
    let opts = cfg.hitting_options(seed.child(3));
    let mut walker = Walker::new(topo, start, cfg.laziness, seed.child(2))?.stays_as_loops(cfg.stays_as_loops());
    let walk: Walk;
    match (cfg.kind, cfg.length.resolve(n)) {
        (Kind::Cover, fixed) => {
            let cap = fixed.unwrap_or_else(|| adaptive_cap(n));
            let tau = walk::cover_time_streaming(topo, start, 1, cfg.laziness, seed.child(2), cap)?;
            rec.tau_c = tau;
            rec.walk_len = tau.unwrap_or(cap);
            rec.capped = tau.is_none();
            return Ok(());
        }
        (_, None) => {
            let (h, capped) = adaptive_hitting(&mut walker, cfg, &opts);
            rec.capped = capped;
            rec.inequality_violations = h.check_inequalities();
            rec.hitting = Some(h);
            walk = walker.into_walk();
        }
        (_, Some(len)) => {
            walker.extend(len);
            walk = walker.into_walk();
            if cfg.kind == Kind::Hitting || cfg.with_hitting {
                let h = walk::hitting_times(&walk, cfg.k, &opts);
                rec.inequality_violations = h.check_inequalities();
                rec.hitting = Some(h);
            }
        }
    }
    rec.walk_len = walk.len();
    rec.tau_c = walk::k_cover_time(&walk, 1);
    if cfg.kind == Kind::Simulate {
        let trace = walk::trace(&walk, walk.len(), Parity::All).simplify();
        let hopts = HamiltonOptions { seed: seed.child(4), ..HamiltonOptions::default() };
        let hamiltonian = match hamilton::hamiltonicity(&trace, &hopts) {
            Hamiltonicity::Hamiltonian(_) => Some(true),
            Hamiltonicity::NotHamiltonian => Some(false),
            Hamiltonicity::Unknown => None,
        };
        rec.verdict = Some(TraceVerdict {
            hamiltonian,
            target_connectivity: cfg.target_connectivity,
            k_connected: structure::is_k_connected(&trace, cfg.target_connectivity),
            min_simple_degree: trace.min_simple_degree(),
            covered: rec.tau_c.is_some(),
        });
    }
    if matches!(cfg.model, Model::Complete { .. }) && cover_window(n as u64, cfg.k as u64).is_ok() {
        rec.trace_audit = Some(pipeline::trace_audit(&walk, &cfg.pipeline, rec.hitting.clone())?);
    }
    Ok(())
}

/// One run, a pure function of the config and run index (apart from timing).
pub fn run_one(cfg: &ExperimentConfig, run_index: u64) -> Result<RunRecord> {
    let clock = Instant::now();
    let seed = SeedStream::new(cfg.master_seed, run_index);
    let mut rec = RunRecord {
        run_index,
        seed,
        config: cfg.echoed(),
        start: 0,
        walk_len: 0,
        capped: false,
        tau_c: None,
        hitting: None,
        inequality_violations: Vec::new(),
        verdict: None,
        pipeline: None,
        trace_audit: None,
        elapsed_ms: None,
    };
    let n = cfg.model.n();
    match (cfg.kind, cfg.model) {
        (Kind::Pipeline, _) => {
            let p = pipeline::run_pipeline(n, &cfg.pipeline, seed)?;
            rec.walk_len = p.walk_len;
            rec.tau_c = p.tau_c;
            rec.pipeline = Some(p);
        }
        (_, Model::Complete { n }) => run_walk_kind(&CompleteGraph { n }, None, cfg, seed, &mut rec)?,
        (_, model) => {
            let g = model.sample(seed.child(0))?;
            run_walk_kind(&WalkTable::new(&g), Some(&g), cfg, seed, &mut rec)?;
        }
    }
    if cfg.timing {
        rec.elapsed_ms = Some(clock.elapsed().as_millis() as u64);
    }
    Ok(rec)
}

/// Complete records already in `path`; a torn last line is cut off.
pub fn load_completed(path: &Path) -> Result<Vec<RunRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut good_bytes = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let read = reader.read_line(&mut line)?;
        if read == 0 || !line.ends_with('\n') {
            break;
        }
        match serde_json::from_str::<RunRecord>(line.trim_end()) {
            Ok(r) => records.push(r),
            Err(_) => break,
        }
        good_bytes += read as u64;
    }
    let file = OpenOptions::new().write(true).open(path)?;
    if file.metadata()?.len() > good_bytes {
        file.set_len(good_bytes)?;
    }
    Ok(records)
}

/// Runs every index not already present in `cfg.out`, in parallel, appending
/// JSONL in index order. Returns all records, old and new, sorted by index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let mut records = match &cfg.out {
        Some(p) => load_completed(p)?,
        None => Vec::new(),
    };
    let echoed = cfg.echoed();
    if let Some(r) = records.iter().find(|r| r.config != echoed) {
        return Err(Error::InvalidParameter(format!(
            "cannot resume: run {} in the output file was made with a different configuration",
            r.run_index
        )));
    }
    records.retain(|r| r.run_index < cfg.runs as u64);
    let done: BTreeSet<u64> = records.iter().map(|r| r.run_index).collect();
    let todo: Vec<u64> = (0..cfg.runs as u64).filter(|i| !done.contains(i)).collect();
    let mut sink = match &cfg.out {
        Some(p) => Some(BufWriter::new(OpenOptions::new().create(true).append(true).open(p)?)),
        None => None,
    };
    let chunk = (rayon::current_num_threads() * 2).max(1);
    for block in todo.chunks(chunk) {
        let out: Vec<Result<RunRecord>> = block.par_iter().map(|&i| run_one(cfg, i)).collect();
        for r in out {
            let r = r?;
            if let Some(w) = sink.as_mut() {
                serde_json::to_writer(&mut *w, &r)?;
                w.write_all(b"\n")?;
            }
            records.push(r);
        }
        if let Some(w) = sink.as_mut() {
            w.flush()?;
        }
    }
    records.sort_by_key(|r| r.run_index);
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?,
        );
    }
    Ok(out)
}

/// Standard Gumbel distribution function.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// `sup_x |F_n(x) - F(x)|` for a continuous `F`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max)
}

/// `sup_x |F_a(x) - F_b(x)|` between two empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let sorted = |s: &[f64]| {
        let mut v = s.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Linear-interpolation quantile of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// `(τ_C − n ln n)/n` for every record with a cover time.
pub fn normalized_cover_times(records: &[RunRecord]) -> Vec<f64> {
    records
        .iter()
        .filter_map(|r| {
            let n = r.config.model.n() as f64;
            r.tau_c.map(|t| (t as f64 - n * n.ln()) / n)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub quantity: String,
    pub count: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    fn push(&mut self, quantity: impl Into<String>, count: usize, value: f64) {
        self.rows.push(SummaryRow { quantity: quantity.into(), count, value });
    }

    fn fraction(&mut self, quantity: &str, hits: impl Iterator<Item = bool>) {
        let (mut yes, mut total) = (0usize, 0usize);
        hits.for_each(|h| {
            total += 1;
            yes += h as usize;
        });
        if total > 0 {
            self.push(quantity, total, yes as f64 / total as f64);
        }
    }

    fn describe(&mut self, name: &str, mut xs: Vec<f64>) {
        if xs.is_empty() {
            return;
        }
        xs.sort_by(f64::total_cmp);
        let c = xs.len();
        self.push(format!("mean {name}"), c, xs.iter().sum::<f64>() / c as f64);
        for q in [0.05, 0.5, 0.95] {
            self.push(format!("q{:02} {name}", (q * 100.0) as u32), c, quantile(&xs, q));
        }
    }

    pub fn get(&self, quantity: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.quantity == quantity).map(|r| r.value)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,count,value\n");
        for r in &self.rows {
            s.push_str(&format!("\"{}\",{},{}\n", r.quantity.replace('"', "\"\""), r.count, r.value));
        }
        s
    }
}

/// Fractions, means, quantiles and the Gumbel KS distance of a record set.
/// Independent of record order.
pub fn summarize(records: &[RunRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to summarize".into()));
    }
    let mut records = records.to_vec();
    records.sort_by_key(|r| r.run_index);
    let mut s = Summary::default();
    s.push("runs", records.len(), records.len() as f64);
    s.fraction("capped", records.iter().map(|r| r.capped));
    s.fraction("covered", records.iter().map(|r| r.tau_c.is_some()));
    s.describe("tau_c", records.iter().filter_map(|r| r.tau_c.map(|t| t as f64)).collect());
    let normalized = normalized_cover_times(&records);
    if !normalized.is_empty() {
        s.push("ks gumbel (tau_c - n ln n)/n", normalized.len(), ks_statistic(&normalized, gumbel_cdf));
    }
    s.fraction(
        "tau_c in (t_-, t_+)",
        records.iter().filter_map(|r| {
            let (lo, hi) = cover_window(r.config.model.n() as u64, 1).ok()?;
            r.tau_c.map(|t| (t as f64) > lo && (t as f64) < hi)
        }),
    );

    let hits: Vec<&HittingRecord> = records.iter().filter_map(|r| r.hitting.as_ref()).collect();
    if !hits.is_empty() {
        s.push(
            "runs with inequality violations",
            records.len(),
            records.iter().filter(|r| !r.inequality_violations.is_empty()).count() as f64,
        );
        let tc = |h: &HittingRecord| h.tau_c[0];
        s.fraction("tau_h = tau_c + 1", hits.iter().filter(|h| tc(h).is_some()).map(|h| h.tau_h.is_some() && h.tau_h == tc(h).map(|t| t + 1)));
        s.fraction("tau_h <= tau_c", hits.iter().filter_map(|h| Some(h.tau_h? <= tc(h)?)));
        s.fraction("tau_h certain", hits.iter().map(|h| h.tau_h_certain));
        s.fraction(
            "tau_pm = tau_c",
            hits.iter().filter(|h| h.n % 2 == 0 && tc(h).is_some()).map(|h| h.tau_pm.is_some() && h.tau_pm == tc(h)),
        );
        s.fraction("tau_pm < tau_c", hits.iter().filter_map(|h| Some(h.tau_pm? < tc(h)?)));
        let k_max = hits.iter().map(|h| h.k_max).min().unwrap_or(0);
        for k in 1..=k_max {
            let odd = 2 * k - 1;
            let even = 2 * k;
            s.fraction(
                &format!("tau_kappa({odd}) = tau_delta({odd}) = tau_c({k})"),
                hits.iter().map(|h| {
                    let c = h.tau_c[k - 1];
                    c.is_some() && h.tau_kappa[odd - 1] == c && h.tau_delta[odd - 1] == c
                }),
            );
            s.fraction(
                &format!("tau_kappa({even}) = tau_delta({even}) = tau_c({k}) + 1"),
                hits.iter().map(|h| {
                    let c = h.tau_c[k - 1].map(|t| t + 1);
                    c.is_some() && h.tau_kappa[even - 1] == c && h.tau_delta[even - 1] == c
                }),
            );
        }
        s.describe(
            "tau_h - tau_c",
            hits.iter().filter_map(|h| Some(h.tau_h? as f64 - tc(h)? as f64)).collect(),
        );
    }

    let verdicts: Vec<&TraceVerdict> = records.iter().filter_map(|r| r.verdict.as_ref()).collect();
    if !verdicts.is_empty() {
        s.fraction("trace hamiltonian", verdicts.iter().map(|v| v.hamiltonian == Some(true)));
        s.fraction("trace hamiltonicity undecided", verdicts.iter().map(|v| v.hamiltonian.is_none()));
        let target = verdicts[0].target_connectivity;
        s.fraction(&format!("trace {target}-connected"), verdicts.iter().map(|v| v.k_connected));
        s.describe("trace min degree", verdicts.iter().map(|v| v.min_simple_degree as f64).collect());
    }

    let audits: Vec<&TraceAudit> = records
        .iter()
        .filter_map(|r| r.trace_audit.as_ref().or(r.pipeline.as_ref().map(|p| &p.audit)))
        .collect();
    if !audits.is_empty() {
        s.fraction("max multiplicity <= 4", audits.iter().map(|a| a.max_multiplicity <= 4));
        s.fraction("no SMALL vertex on loop or multi-edge", audits.iter().map(|a| a.small_on_loop_or_multi == 0));
        s.fraction("min nu >= rho ln n", audits.iter().map(|a| a.nu_meets_rho));
        s.describe("|SMALL|", audits.iter().map(|a| a.small_size as f64).collect());
    }

    let pipes: Vec<&PipelineRecord> = records.iter().filter_map(|r| r.pipeline.as_ref()).collect();
    if !pipes.is_empty() {
        let mut flags: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
        for p in &pipes {
            flags.entry("gamma_0 expander").or_default().push(p.expander_pass);
            flags.entry("booster completion").or_default().push(p.completion_ok);
            flags.entry("off-pool edges <= n^0.4").or_default().push(p.budget_ok);
            flags.entry("H inside trace at tau_c + 1").or_default().push(p.h_in_trace);
            flags.entry("pipeline replicated").or_default().push(p.replicated);
        }
        for (name, v) in flags {
            s.fraction(name, v.into_iter());
        }
        s.describe("boosters added", pipes.iter().map(|p| p.boosters_added as f64).collect());
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip() {
        for s in ["gnp(100,0.5)", "gnp-alpha(50,3)", "complete(7)", "ghat(5,9)"] {
            let m: Model = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("gnp(10,1.5)".parse::<Model>().is_err());
        assert!("torus(4)".parse::<Model>().is_err());
    }

    #[test]
    fn config_text_and_overrides() {
        let cfg = ExperimentConfig::parse_text("kind = simulate\nmodel = gnp(100, 0.2) # base\nepsilon=0.5\nruns=3\n").unwrap();
        assert_eq!(cfg.kind, Kind::Simulate);
        assert_eq!(cfg.model, Model::Gnp { n: 100, p: 0.2 });
        assert_eq!(cfg.length.resolve(100), Some((1.5 * 100.0 * 100f64.ln()).ceil() as usize));
        assert!(matches!(ExperimentConfig::parse_text("bogus=1"), Err(Error::Parse { line: 1, .. })));
        let mut c = cfg.clone();
        c.runs = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_complete_run_has_hitting_times() {
        let cfg = ExperimentConfig { model: Model::Complete { n: 3 }, ..Default::default() };
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        let h = recs[0].hitting.as_ref().unwrap();
        assert!(h.tau_c[0].is_some() && h.tau_h.is_some());
    }

    #[test]
    fn ks_examples() {
        let xs = [0.3, -1.2, 2.0, 0.7];
        assert_eq!(ks_two_sample(&xs, &xs), 0.0);
        assert!((ks_statistic(&[0.0], |x| if x < 0.5 { 0.5 } else { 1.0 }) - 0.5).abs() < 1e-15);
        assert!((quantile(&[1.0, 2.0, 3.0], 0.5) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn summary_of_identical_runs() {
        let cfg = ExperimentConfig { model: Model::Complete { n: 20 }, runs: 1, ..Default::default() };
        let r = run_one(&cfg, 0).unwrap();
        let recs: Vec<RunRecord> = (0..4).map(|i| RunRecord { run_index: i, ..r.clone() }).collect();
        let s = summarize(&recs).unwrap();
        assert_eq!(s.get("covered"), Some(1.0));
        let v = s.get("tau_h = tau_c + 1").unwrap();
        assert!(v == 0.0 || v == 1.0);
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn records_round_trip() {
        for cfg in [
            ExperimentConfig { model: Model::Complete { n: 30 }, ..Default::default() },
            ExperimentConfig {
                kind: Kind::Simulate,
                model: Model::GnpAlpha { n: 40, alpha: 3.3 },
                length: LengthSpec::Epsilon { epsilon: 0.2 },
                ..Default::default()
            },
            ExperimentConfig { kind: Kind::Pipeline, model: Model::Complete { n: 60 }, ..Default::default() },
        ] {
            let r = run_one(&cfg, 2).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: RunRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
        }
    }
}
