//! Random walks, their traces, visit statistics and hitting times of monotone
//! trace properties.

use std::io::{BufRead, Write};
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::hamilton::{self, HamiltonOptions, Hamiltonicity};
use crate::models::{SeedStream, StreamRng};
use crate::structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Laziness {
    /// Simple random walk.
    None,
    /// Stays put with probability 1/2.
    Half,
    /// Stays put with probability 1/n.
    InverseN,
}

impl Laziness {
    pub fn as_str(self) -> &'static str {
        match self {
            Laziness::None => "none",
            Laziness::Half => "half",
            Laziness::InverseN => "inverse-n",
        }
    }

    /// Default stay bookkeeping: stays are loops except for the half-lazy walk.
    pub fn default_stays_as_loops(self) -> bool {
        !matches!(self, Laziness::Half)
    }
}

impl std::str::FromStr for Laziness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Laziness::None),
            "half" => Ok(Laziness::Half),
            "inverse-n" | "inverse_n" => Ok(Laziness::InverseN),
            _ => Err(Error::InvalidParameter(format!("unknown laziness '{s}'"))),
        }
    }
}

/// Something a walk can move on.
pub trait Topology: Sync {
    fn n(&self) -> usize;

    /// A neighbor of `v` drawn proportionally to edge multiplicity (a loop
    /// counts twice and returns `v`); `None` if `v` has no incident edge.
    fn step(&self, v: usize, rng: &mut StreamRng) -> Option<usize>;
}

/// `K_n` without stored adjacency.
#[derive(Debug, Clone, Copy)]
pub struct CompleteGraph {
    pub n: usize,
}

impl Topology for CompleteGraph {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn step(&self, v: usize, rng: &mut StreamRng) -> Option<usize> {
        if self.n < 2 {
            return None;
        }
        let w = rng.random_range(0..self.n - 1);
        Some(if w >= v { w + 1 } else { w })
    }
}

/// Flat table of edge ends for multiplicity-proportional steps.
#[derive(Debug, Clone)]
pub struct WalkTable {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl WalkTable {
    pub fn new(g: &MultiGraph) -> Self {
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for v in 0..n {
            for &(w, k) in g.neighbor_mults(v) {
                targets.extend(std::iter::repeat_n(w, k as usize));
            }
            targets.extend(std::iter::repeat_n(v as u32, 2 * g.loops(v) as usize));
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }
}

impl Topology for WalkTable {
    fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn step(&self, v: usize, rng: &mut StreamRng) -> Option<usize> {
        let (a, b) = (self.offsets[v], self.offsets[v + 1]);
        (a < b).then(|| self.targets[rng.random_range(a..b)] as usize)
    }
}

/// A recorded walk `X_0, ..., X_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub n: usize,
    pub laziness: Laziness,
    /// Whether a step with `X_{i-1} = X_i` enters traces as a loop.
    pub stays_as_loops: bool,
    pub seed: Option<SeedStream>,
    pub steps: Vec<u32>,
}

impl Walk {
    pub fn from_vertices(n: usize, laziness: Laziness, vertices: &[usize]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("a walk needs a start vertex".into()));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        Ok(Self {
            n,
            laziness,
            stays_as_loops: laziness.default_stays_as_loops(),
            seed: None,
            steps: vertices.iter().map(|&v| v as u32).collect(),
        })
    }

    /// Number of steps `t`.
    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.steps.len() <= 1
    }

    pub fn start(&self) -> usize {
        self.steps[0] as usize
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.steps[i] as usize
    }

    /// `e_i = (X_{i-1}, X_i)` for `1 ≤ i ≤ t`.
    #[inline]
    pub fn edge(&self, i: usize) -> (usize, usize) {
        (self.steps[i - 1] as usize, self.steps[i] as usize)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|&v| v as usize)
    }

    /// Text replay format: header `n laziness master_seed run_index`, then one
    /// 1-based vertex per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let (ms, ri) = self.seed.map_or((0, 0), |s| (s.master_seed, s.run_index));
        writeln!(w, "{} {} {} {}", self.n, self.laziness.as_str(), ms, ri)?;
        for &v in &self.steps {
            writeln!(w, "{}", v + 1)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Walk> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| {
            l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.starts_with('#'))
        });
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let header = header?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse { line: 1, msg: msg.into() };
        if parts.len() != 4 {
            return Err(bad("expected `n laziness master_seed run_index`"));
        }
        let n: usize = parts[0].parse().map_err(|_| bad("bad n"))?;
        let laziness: Laziness = parts[1].parse().map_err(|_| bad("bad laziness"))?;
        let ms: u64 = parts[2].parse().map_err(|_| bad("bad seed"))?;
        let ri: u64 = parts[3].parse().map_err(|_| bad("bad run index"))?;
        let mut vs = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let v: usize = line
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad vertex '{line}'") })?;
            if v == 0 || v > n {
                return Err(Error::Parse { line: i + 1, msg: format!("vertex {v} not in 1..={n}") });
            }
            vs.push(v - 1);
        }
        let mut w = Walk::from_vertices(n, laziness, &vs)?;
        w.seed = Some(SeedStream::new(ms, ri));
        Ok(w)
    }
}

/// Stateful walk that can be extended block by block.
pub struct Walker<'a, T: Topology + ?Sized> {
    topo: &'a T,
    rng: StreamRng,
    walk: Walk,
}

impl<'a, T: Topology + ?Sized> Walker<'a, T> {
    pub fn new(topo: &'a T, start: usize, laziness: Laziness, seed: SeedStream) -> Result<Self> {
        let n = topo.n();
        if start >= n {
            return Err(Error::VertexOutOfRange { vertex: start, n });
        }
        let mut rng = seed.rng();
        if laziness == Laziness::None && topo.step(start, &mut rng).is_none() {
            return Err(Error::IsolatedStart(start));
        }
        Ok(Self {
            topo,
            rng: seed.rng(),
            walk: Walk {
                n,
                laziness,
                stays_as_loops: laziness.default_stays_as_loops(),
                seed: Some(seed),
                steps: vec![start as u32],
            },
        })
    }

    pub fn stays_as_loops(mut self, on: bool) -> Self {
        self.walk.stays_as_loops = on;
        self
    }

    #[inline]
    pub fn step(&mut self) -> usize {
        let v = *self.walk.steps.last().unwrap() as usize;
        let n = self.walk.n;
        let stay = match self.walk.laziness {
            Laziness::None => false,
            Laziness::Half => self.rng.random_bool(0.5),
            Laziness::InverseN => self.rng.random_range(0..n) == 0,
        };
        let next = if stay { v } else { self.topo.step(v, &mut self.rng).unwrap_or(v) };
        self.walk.steps.push(next as u32);
        next
    }

    pub fn extend(&mut self, steps: usize) {
        self.walk.steps.reserve(steps);
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn into_walk(self) -> Walk {
        self.walk
    }
}

/// Runs `t` steps from `start`.
pub fn run_walk<T: Topology + ?Sized>(
    topo: &T,
    start: usize,
    t: usize,
    laziness: Laziness,
    seed: SeedStream,
) -> Result<Walk> {
    let mut w = Walker::new(topo, start, laziness, seed)?;
    w.extend(t);
    Ok(w.into_walk())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    All,
    Odd,
    Even,
}

impl Parity {
    #[inline]
    pub fn admits(self, i: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::Odd => i % 2 == 1,
            Parity::Even => i % 2 == 0,
        }
    }
}

/// Multigraph of the edges `e_i`, `i` in `range` with the requested parity.
/// An empty range (start after end) yields the edgeless graph.
pub fn trace_view(w: &Walk, range: RangeInclusive<usize>, parity: Parity) -> Result<MultiGraph> {
    let (a, b) = (*range.start(), *range.end());
    let mut g = MultiGraph::new(w.n);
    if a > b {
        return Ok(g);
    }
    if a == 0 || b > w.len() {
        return Err(Error::InvalidParameter(format!(
            "step range {a}..={b} not within 1..={}",
            w.len()
        )));
    }
    for i in (a..=b).filter(|&i| parity.admits(i)) {
        let (u, v) = w.edge(i);
        if u != v || w.stays_as_loops {
            g.add_edge(u, v);
        }
    }
    Ok(g)
}

/// `Γ_t`: the trace of the first `t` steps (clamped to the walk length).
pub fn trace(w: &Walk, t: usize, parity: Parity) -> MultiGraph {
    trace_view(w, 1..=t.min(w.len()), parity).expect("range within walk")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitStats {
    /// `μ(v)`: times `0 ≤ i ≤ horizon` with `X_i = v`.
    pub mu: Vec<u64>,
    /// `ν(v)`: times `0 ≤ i < horizon` with `X_i = v ≠ X_{i+1}`.
    pub nu: Vec<u64>,
    pub first_visit: Vec<Option<usize>>,
    /// `kth_visit[v][j]`: time of visit `j + 1`, for `j < tracked_k`.
    pub kth_visit: Vec<Vec<usize>>,
    pub tracked_k: usize,
}

impl VisitStats {
    pub fn kth_visit_time(&self, v: usize, k: usize) -> Option<usize> {
        assert!(k >= 1 && k <= self.tracked_k, "visit {k} not tracked");
        self.kth_visit[v].get(k - 1).copied()
    }
}

/// Visit counts up to `horizon`; k-th visit times are tracked for `k ≤ tracked_k`.
pub fn visit_stats(w: &Walk, horizon: usize, tracked_k: usize) -> Result<VisitStats> {
    if horizon > w.len() {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} exceeds walk length {}",
            w.len()
        )));
    }
    let n = w.n;
    let mut s = VisitStats {
        mu: vec![0; n],
        nu: vec![0; n],
        first_visit: vec![None; n],
        kth_visit: vec![Vec::new(); n],
        tracked_k,
    };
    for i in 0..=horizon {
        let v = w.at(i);
        s.mu[v] += 1;
        if s.first_visit[v].is_none() {
            s.first_visit[v] = Some(i);
        }
        if s.kth_visit[v].len() < tracked_k {
            s.kth_visit[v].push(i);
        }
        if i < horizon && w.at(i + 1) != v {
            s.nu[v] += 1;
        }
    }
    Ok(s)
}

/// Streaming k-cover tracker: `covered_at(k)` is the first time every vertex
/// has at least `k` visits (stays count as visits).
#[derive(Debug, Clone)]
pub struct CoverTracker {
    k_max: usize,
    counts: Vec<u32>,
    /// `reached[k-1]`: vertices with at least `k` visits.
    reached: Vec<usize>,
    times: Vec<Option<usize>>,
    t: usize,
}

impl CoverTracker {
    pub fn new(n: usize, k_max: usize, start: usize) -> Self {
        let mut c = Self {
            k_max,
            counts: vec![0; n],
            reached: vec![0; k_max],
            times: vec![None; k_max],
            t: 0,
        };
        c.visit(start);
        c
    }

    #[inline]
    fn visit(&mut self, v: usize) {
        let c = self.counts[v] as usize + 1;
        self.counts[v] = c as u32;
        if c <= self.k_max {
            self.reached[c - 1] += 1;
            if self.reached[c - 1] == self.counts.len() {
                self.times[c - 1] = Some(self.t);
            }
        }
    }

    #[inline]
    pub fn push(&mut self, v: usize) {
        self.t += 1;
        self.visit(v);
    }

    pub fn covered_at(&self, k: usize) -> Option<usize> {
        self.times[k - 1]
    }

    pub fn all_covered(&self) -> bool {
        self.times[self.k_max - 1].is_some()
    }

    pub fn time(&self) -> usize {
        self.t
    }
}

/// `τ_C^k` of a recorded walk, or `None` if it is not reached.
pub fn k_cover_time(w: &Walk, k: usize) -> Option<usize> {
    assert!(k >= 1);
    let mut c = CoverTracker::new(w.n, k, w.start());
    for i in 1..=w.len() {
        c.push(w.at(i));
        if c.all_covered() {
            break;
        }
    }
    c.covered_at(k)
}

/// Runs a walk until it has covered every vertex `k` times, without storing it.
pub fn cover_time_streaming<T: Topology + ?Sized>(
    topo: &T,
    start: usize,
    k: usize,
    laziness: Laziness,
    seed: SeedStream,
    cap: usize,
) -> Result<Option<usize>> {
    let n = topo.n();
    let mut w = Walker::new(topo, start, laziness, seed)?;
    let mut c = CoverTracker::new(n, k, start);
    while !c.all_covered() && c.time() < cap {
        let v = w.step();
        w.walk.steps.truncate(1);
        w.walk.steps[0] = v as u32;
        c.push(v);
    }
    Ok(c.covered_at(k))
}

/// Hitting times of the trace properties for one walk. Vectors are indexed by
/// `k - 1` (cover) and `m - 1` (degree, connectivity).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingRecord {
    pub n: usize,
    pub k_max: usize,
    pub steps: usize,
    pub tau_c: Vec<Option<usize>>,
    pub tau_delta: Vec<Option<usize>>,
    pub tau_kappa: Vec<Option<usize>>,
    pub tau_h: Option<usize>,
    /// False when some check before `tau_h` came back undecided from the
    /// heuristic (only possible above the exact cap).
    pub tau_h_certain: bool,
    pub tau_pm: Option<usize>,
    /// Largest multiplicity in the trace of the whole walk.
    pub max_multiplicity: u32,
}

impl HittingRecord {
    pub fn cover(&self, k: usize) -> Option<usize> {
        self.tau_c[k - 1]
    }

    pub fn min_degree(&self, m: usize) -> Option<usize> {
        self.tau_delta[m - 1]
    }

    pub fn connectivity(&self, m: usize) -> Option<usize> {
        self.tau_kappa[m - 1]
    }

    /// The deterministic inequalities between the hitting times; returns the
    /// violated ones. `later ≥ earlier` where `later` present and `earlier`
    /// absent also counts as a violation.
    pub fn check_inequalities(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let mut ge = |name: String, later: Option<usize>, earlier: Option<usize>, shift: usize| {
            if let Some(l) = later {
                match earlier {
                    Some(e) if l >= e + shift => {}
                    _ => bad.push(format!("{name}: {later:?} vs {earlier:?} + {shift}")),
                }
            }
        };
        for k in 1..=self.k_max {
            ge(format!("tau_delta({}) >= tau_c({k})", 2 * k - 1), self.tau_delta[2 * k - 2], self.tau_c[k - 1], 0);
            ge(format!("tau_delta({}) >= tau_c({k}) + 1", 2 * k), self.tau_delta[2 * k - 1], self.tau_c[k - 1], 1);
        }
        for m in 1..=2 * self.k_max {
            ge(format!("tau_kappa({m}) >= tau_delta({m})"), self.tau_kappa[m - 1], self.tau_delta[m - 1], 0);
        }
        if self.tau_delta.len() >= 2 {
            ge("tau_h >= tau_delta(2)".into(), self.tau_h, self.tau_delta[1], 0);
        }
        ge("tau_pm >= tau_delta(1)".into(), self.tau_pm, self.tau_delta[0], 0);
        bad
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HittingOptions {
    pub hamilton: HamiltonOptions,
    /// Number of consecutive new-edge times checked one by one after a failed
    /// candidate before switching to galloping search.
    pub linear_checks: usize,
    pub skip_hamilton: bool,
    pub skip_matching: bool,
    pub skip_connectivity: bool,
}

impl Default for HittingOptions {
    fn default() -> Self {
        Self {
            hamilton: HamiltonOptions::default(),
            linear_checks: 16,
            skip_hamilton: false,
            skip_matching: false,
            skip_connectivity: false,
        }
    }
}

/// Times at which the simple trace gains an edge, with the edge.
#[derive(Debug, Clone, Default)]
pub struct EdgeLog {
    pub n: usize,
    pub events: Vec<(usize, u32, u32)>,
}

impl EdgeLog {
    /// Simple trace at time `t`.
    pub fn graph_at(&self, t: usize) -> MultiGraph {
        let upto = self.events.partition_point(|&(s, _, _)| s <= t);
        self.graph_upto(upto)
    }

    /// Simple trace formed by the first `count` new edges.
    pub fn graph_upto(&self, count: usize) -> MultiGraph {
        MultiGraph::from_edges(
            self.n,
            self.events[..count].iter().map(|&(_, u, v)| (u as usize, v as usize)),
        )
    }
}

/// First time `>= lb` at which the monotone predicate holds on the simple
/// trace. Candidates are `lb` and then the times at which a new simple edge
/// appears, since nothing else changes the simple trace.
pub fn first_time_monotone<P: FnMut(&MultiGraph) -> bool>(
    log: &EdgeLog,
    lb: usize,
    linear_checks: usize,
    mut pred: P,
) -> Option<usize> {
    let base = log.events.partition_point(|&(s, _, _)| s <= lb);
    let mut g = log.graph_upto(base);
    if pred(&g) {
        return Some(lb);
    }
    let total = log.events.len();
    let mut idx = base;
    // one edge at a time
    while idx < total && idx < base + linear_checks {
        let (s, u, v) = log.events[idx];
        g.add_edge(u as usize, v as usize);
        idx += 1;
        if pred(&g) {
            return Some(s);
        }
    }
    // galloping, then bisection on the number of edges
    let mut lo = idx; // predicate false with `lo` edges
    let mut step = 1;
    let hi = loop {
        if lo >= total {
            return None;
        }
        let probe = (lo + step).min(total);
        if pred(&log.graph_upto(probe)) {
            break probe;
        }
        lo = probe;
        step *= 2;
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(&log.graph_upto(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(log.events[hi - 1].0)
}

/// Incremental pass over a walk: cover times, minimum-degree times and the log
/// of new simple edges.
pub struct TraceScan {
    pub cover: CoverTracker,
    pub tau_delta: Vec<Option<usize>>,
    pub log: EdgeLog,
    adj: Vec<Vec<u32>>,
    deficient: Vec<usize>,
    max_mult: u32,
    mult: std::collections::HashMap<(u32, u32), u32>,
    stays_as_loops: bool,
    prev: usize,
}

impl TraceScan {
    pub fn new(n: usize, k_max: usize, start: usize, stays_as_loops: bool) -> Self {
        let m_max = 2 * k_max;
        Self {
            cover: CoverTracker::new(n, k_max, start),
            tau_delta: vec![None; m_max],
            log: EdgeLog { n, events: Vec::new() },
            adj: vec![Vec::new(); n],
            deficient: vec![n; m_max],
            max_mult: 0,
            mult: std::collections::HashMap::new(),
            stays_as_loops,
            prev: start,
        }
    }

    pub fn push(&mut self, v: usize) {
        let u = self.prev;
        self.prev = v;
        self.cover.push(v);
        let t = self.cover.time();
        if u == v && !self.stays_as_loops {
            return;
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        let e = self.mult.entry(key).or_insert(0);
        *e += 1;
        self.max_mult = self.max_mult.max(*e);
        if u == v || *e > 1 {
            return;
        }
        self.log.events.push((t, key.0, key.1));
        for x in [u, v] {
            let y = if x == u { v } else { u };
            self.adj[x].push(y as u32);
            let d = self.adj[x].len();
            if d <= self.deficient.len() {
                self.deficient[d - 1] -= 1;
                if self.deficient[d - 1] == 0 {
                    self.tau_delta[d - 1] = Some(t);
                }
            }
        }
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.max_mult
    }

    pub fn resolved(&self) -> bool {
        self.cover.all_covered() && self.tau_delta.iter().all(Option::is_some)
    }
}

/// Exact hitting times of cover, minimum degree, connectivity, Hamiltonicity
/// and perfect matching for the prefixes of `w`.
///
/// Expensive predicates are evaluated first at a deterministic lower bound
/// (`τ_δ^m` for `m`-connectivity, `τ_δ^2` for Hamiltonicity, `τ_δ^1` for
/// perfect matching) and afterwards only at times when the simple trace
/// changes.
pub fn hitting_times(w: &Walk, k_max: usize, opts: &HittingOptions) -> HittingRecord {
    assert!(k_max >= 1);
    let n = w.n;
    let mut scan = TraceScan::new(n, k_max, w.start(), w.stays_as_loops);
    for i in 1..=w.len() {
        scan.push(w.at(i));
    }
    let tau_c: Vec<Option<usize>> = (1..=k_max).map(|k| scan.cover.covered_at(k)).collect();
    let tau_delta = scan.tau_delta.clone();
    let log = &scan.log;

    let tau_kappa: Vec<Option<usize>> = (1..=2 * k_max)
        .map(|m| {
            if opts.skip_connectivity {
                return None;
            }
            let lb = tau_delta[m - 1]?;
            first_time_monotone(log, lb, opts.linear_checks, |g| structure::is_k_connected(g, m))
        })
        .collect();

    let mut tau_h_certain = true;
    let tau_h = if opts.skip_hamilton || n < 3 {
        None
    } else {
        tau_delta[1].and_then(|lb| {
            first_time_monotone(log, lb, opts.linear_checks, |g| {
                match hamilton::hamiltonicity(g, &opts.hamilton) {
                    Hamiltonicity::Hamiltonian(_) => true,
                    Hamiltonicity::NotHamiltonian => false,
                    Hamiltonicity::Unknown => {
                        tau_h_certain = false;
                        false
                    }
                }
            })
        })
    };

    let tau_pm = if opts.skip_matching || n % 2 == 1 {
        None
    } else {
        tau_delta[0].and_then(|lb| {
            first_time_monotone(log, lb, opts.linear_checks, structure::has_perfect_matching)
        })
    };

    HittingRecord {
        n,
        k_max,
        steps: w.len(),
        tau_c,
        tau_delta,
        tau_kappa,
        tau_h,
        tau_h_certain,
        tau_pm,
        max_multiplicity: scan.max_multiplicity(),
    }
}

/// Reference implementation: rescans every prefix of the walk and evaluates
/// each property from scratch. Quadratic; meant for tests.
pub fn hitting_times_rescan(w: &Walk, k_max: usize, hamilton: &HamiltonOptions) -> HittingRecord {
    let n = w.n;
    let m_max = 2 * k_max;
    let mut rec = HittingRecord {
        n,
        k_max,
        steps: w.len(),
        tau_c: vec![None; k_max],
        tau_delta: vec![None; m_max],
        tau_kappa: vec![None; m_max],
        tau_h: None,
        tau_h_certain: true,
        tau_pm: None,
        max_multiplicity: 0,
    };
    let mut visits = vec![0usize; n];
    let mut g = MultiGraph::new(n);
    for i in 0..=w.len() {
        let v = w.at(i);
        visits[v] += 1;
        if i > 0 {
            let (a, b) = w.edge(i);
            if a != b || w.stays_as_loops {
                g.add_edge(a, b);
            }
        }
        let simple = g.simplify();
        let min_visits = *visits.iter().min().unwrap();
        for k in 1..=k_max {
            if rec.tau_c[k - 1].is_none() && min_visits >= k {
                rec.tau_c[k - 1] = Some(i);
            }
        }
        let delta = simple.min_simple_degree();
        let kappa = if rec.tau_kappa.iter().any(Option::is_none) {
            structure::vertex_connectivity(&simple)
        } else {
            0
        };
        for m in 1..=m_max {
            if rec.tau_delta[m - 1].is_none() && delta >= m {
                rec.tau_delta[m - 1] = Some(i);
            }
            if rec.tau_kappa[m - 1].is_none() && kappa >= m {
                rec.tau_kappa[m - 1] = Some(i);
            }
        }
        if rec.tau_h.is_none() && n >= 3 {
            match hamilton::hamiltonicity(&simple, hamilton) {
                Hamiltonicity::Hamiltonian(_) => rec.tau_h = Some(i),
                Hamiltonicity::Unknown => rec.tau_h_certain = false,
                Hamiltonicity::NotHamiltonian => {}
            }
        }
        if rec.tau_pm.is_none() && n % 2 == 0 && structure::has_perfect_matching(&simple) {
            rec.tau_pm = Some(i);
        }
    }
    rec.max_multiplicity = trace(w, w.len(), Parity::All).max_multiplicity();
    rec
}
