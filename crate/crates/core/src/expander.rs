//! `(R, c)`-expander certification and the pseudo-randomness, trace-expansion
//! and Hamiltonicity-criterion audits.
//!
//! Every failing check carries a witness that can be re-validated with the
//! primitives in [`crate::graph`]. Sampled checks are one-sided: a pass means
//! no violation was found.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexSet};
use crate::models::{SeedStream, StreamRng};
use crate::structure;

/// How subsets are examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every subset in range, refused when the count exceeds `budget`.
    Exact { budget: u128 },
    /// Uniform and BFS-grown subsets.
    Sampled { samples: usize },
}

impl Mode {
    pub const DEFAULT_BUDGET: u128 = 50_000_000;

    pub fn exact() -> Self {
        Mode::Exact { budget: Self::DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Vertex(usize),
    Set(Vec<usize>),
    Pair(Vec<usize>, Vec<usize>),
    /// Root `v`, radius `r` and a vertex `w` at distance `r`.
    Rooted { v: usize, r: usize, w: usize },
}

impl Witness {
    /// Every vertex the witness mentions.
    pub fn vertices(&self) -> Vec<usize> {
        match self {
            Witness::Vertex(v) => vec![*v],
            Witness::Set(s) => s.clone(),
            Witness::Pair(a, b) => a.iter().chain(b).copied().collect(),
            Witness::Rooted { v, w, .. } => vec![*v, *w],
        }
    }

    fn one_based(&self) -> Witness {
        let inc = |s: &[usize]| s.iter().map(|v| v + 1).collect::<Vec<_>>();
        match self {
            Witness::Vertex(v) => Witness::Vertex(v + 1),
            Witness::Set(s) => Witness::Set(inc(s)),
            Witness::Pair(a, b) => Witness::Pair(inc(a), inc(b)),
            Witness::Rooted { v, r, w } => Witness::Rooted { v: v + 1, r: *r, w: w + 1 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub status: Status,
    /// Number of sets (or vertices, or roots) examined.
    pub checked: u64,
    /// Extremal measured value, meaning given per property.
    pub measured: Option<f64>,
    pub note: String,
    pub witness: Option<Witness>,
}

impl PropertyResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            status: Status::Pass,
            checked: 0,
            measured: None,
            note: String::new(),
            witness: None,
        }
    }

    fn fail(&mut self, w: Witness) {
        if self.status != Status::Fail {
            self.status = Status::Fail;
            self.witness = Some(w);
        }
    }

    fn skipped(name: &str, note: &str) -> Self {
        Self { status: Status::Skipped, note: note.into(), ..Self::new(name) }
    }

    fn measure_min(&mut self, x: f64) {
        self.measured = Some(self.measured.map_or(x, |m| m.min(x)));
    }

    fn measure_max(&mut self, x: f64) {
        self.measured = Some(self.measured.map_or(x, |m| m.max(x)));
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AuditReport {
    pub properties: Vec<PropertyResult>,
}

impl AuditReport {
    /// No property failed (skipped ones do not count against).
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn merge(mut self, other: AuditReport) -> AuditReport {
        self.properties.extend(other.properties);
        self
    }

    /// Copy with witnesses relabelled to `1..=n` for output.
    pub fn one_based(&self) -> AuditReport {
        let mut r = self.clone();
        for p in &mut r.properties {
            p.witness = p.witness.as_ref().map(Witness::one_based);
        }
        r
    }
}

/// Result of an `(R, c)` certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderCert {
    pub r: usize,
    pub c: f64,
    pub mode: Mode,
    pub pass: bool,
    /// A set `U` with `|U| ≤ R` and `|N(U)| < c|U|`.
    pub witness: Option<Vec<usize>>,
    pub checked: u64,
}

impl ExpanderCert {
    /// Re-checks the witness against the graph.
    pub fn witness_valid(&self, g: &MultiGraph) -> bool {
        match &self.witness {
            None => self.pass,
            Some(u) => {
                let set = VertexSet::from_iter(g.n(), u.iter().copied());
                !u.is_empty()
                    && set.len() == u.len()
                    && u.len() <= self.r
                    && (g.external_neighborhood(&set).len() as f64) < self.c * u.len() as f64
            }
        }
    }
}

/// Incrementally maintained `|N(U)|` for a growing and shrinking set `U`.
struct Neighborhood<'a> {
    g: &'a MultiGraph,
    in_set: Vec<bool>,
    adj_count: Vec<u32>,
    size: usize,
}

impl<'a> Neighborhood<'a> {
    fn new(g: &'a MultiGraph) -> Self {
        Self {
            g,
            in_set: vec![false; g.n()],
            adj_count: vec![0; g.n()],
            size: 0,
        }
    }

    fn add(&mut self, u: usize) {
        self.in_set[u] = true;
        if self.adj_count[u] > 0 {
            self.size -= 1;
        }
        for w in self.g.neighbors(u) {
            self.adj_count[w] += 1;
            if self.adj_count[w] == 1 && !self.in_set[w] {
                self.size += 1;
            }
        }
    }

    fn remove(&mut self, u: usize) {
        for w in self.g.neighbors(u) {
            self.adj_count[w] -= 1;
            if self.adj_count[w] == 0 && !self.in_set[w] {
                self.size -= 1;
            }
        }
        self.in_set[u] = false;
        if self.adj_count[u] > 0 {
            self.size += 1;
        }
    }

    fn len(&self) -> usize {
        self.size
    }
}

/// `Σ_{lo ≤ j ≤ hi} C(n, j)`, saturating.
pub fn subset_count(n: usize, lo: usize, hi: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1; // C(n, 0)
    for j in 0..=hi.min(n) {
        if j >= lo {
            total = total.saturating_add(c);
        }
        c = c.saturating_mul((n - j) as u128) / (j as u128 + 1);
    }
    total
}

fn check_budget(n: usize, lo: usize, hi: usize, budget: u128) -> Result<()> {
    let needed = subset_count(n, lo, hi);
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Visits every subset of `0..n` with size in `lo..=hi` in lexicographic
/// order, with `|N(U)|` maintained incrementally. Stops when `f` returns false.
fn for_each_subset<F>(g: &MultiGraph, lo: usize, hi: usize, mut f: F)
where
    F: FnMut(&[usize], usize) -> bool,
{
    let n = g.n();
    let hi = hi.min(n);
    if lo > hi {
        return;
    }
    let mut nb = Neighborhood::new(g);
    let mut stack: Vec<usize> = Vec::with_capacity(hi);
    fn rec<F: FnMut(&[usize], usize) -> bool>(
        n: usize,
        lo: usize,
        hi: usize,
        next: usize,
        stack: &mut Vec<usize>,
        nb: &mut Neighborhood<'_>,
        f: &mut F,
    ) -> bool {
        if stack.len() >= lo.max(1) && !f(stack, nb.len()) {
            return false;
        }
        if stack.len() == hi {
            return true;
        }
        for v in next..n {
            stack.push(v);
            nb.add(v);
            let go = rec(n, lo, hi, v + 1, stack, nb, f);
            nb.remove(v);
            stack.pop();
            if !go {
                return false;
            }
        }
        true
    }
    rec(n, lo, hi, 0, &mut stack, &mut nb, &mut f);
}

/// Draws vertex sets of a given size: uniform, or grown breadth-first from a
/// random vertex through random frontier choices (topped up uniformly if the
/// component is too small).
pub struct SetSampler<'a> {
    g: &'a MultiGraph,
    pub rng: StreamRng,
    counter: u64,
}

impl<'a> SetSampler<'a> {
    pub fn new(g: &'a MultiGraph, seed: SeedStream) -> Self {
        Self { g, rng: seed.rng(), counter: 0 }
    }

    pub fn uniform(&mut self, size: usize) -> Vec<usize> {
        let mut s = sample(&mut self.rng, self.g.n(), size.min(self.g.n())).into_vec();
        s.sort_unstable();
        s
    }

    pub fn grown(&mut self, size: usize) -> Vec<usize> {
        let n = self.g.n();
        let size = size.min(n);
        let mut set = VertexSet::new(n);
        // each outside vertex enters the frontier at most once
        let mut queued = VertexSet::new(n);
        let mut frontier: Vec<usize> = Vec::new();
        let root = self.rng.random_range(0..n);
        set.insert(root);
        queued.insert(root);
        for w in self.g.neighbors(root) {
            if queued.insert(w) {
                frontier.push(w);
            }
        }
        while set.len() < size && !frontier.is_empty() {
            let w = frontier.swap_remove(self.rng.random_range(0..frontier.len()));
            set.insert(w);
            for x in self.g.neighbors(w) {
                if queued.insert(x) {
                    frontier.push(x);
                }
            }
        }
        while set.len() < size {
            set.insert(self.rng.random_range(0..n));
        }
        set.to_vec()
    }

    /// Alternates between the two kinds.
    pub fn next(&mut self, size: usize) -> Vec<usize> {
        self.counter += 1;
        if self.counter % 2 == 0 {
            self.uniform(size)
        } else {
            self.grown(size)
        }
    }

    /// A size in `lo..=hi`, log-uniform so that small sets are well covered.
    pub fn size_in(&mut self, lo: usize, hi: usize) -> usize {
        if lo >= hi {
            return lo;
        }
        let x = self.rng.random_range((lo as f64).ln()..=((hi as f64) + 1.0).ln());
        (x.exp().floor() as usize).clamp(lo, hi)
    }
}

/// Certifies that every `U` with `1 ≤ |U| ≤ R` has `|N(U)| ≥ c|U|`.
///
/// Exact mode is sound and complete; sampled mode checks every singleton and
/// then `samples` sets, and is sound only for failures.
pub fn is_rc_expander(g: &MultiGraph, r: usize, c: f64, mode: Mode, seed: SeedStream) -> Result<ExpanderCert> {
    let n = g.n();
    let r_eff = r.min(n);
    let mut cert = ExpanderCert { r, c, mode, pass: true, witness: None, checked: 0 };
    let violates = |u_len: usize, nb: usize| (nb as f64) < c * u_len as f64;
    match mode {
        Mode::Exact { budget } => {
            check_budget(n, 1, r_eff, budget)?;
            for_each_subset(g, 1, r_eff, |u, nb| {
                cert.checked += 1;
                if violates(u.len(), nb) {
                    cert.pass = false;
                    cert.witness = Some(u.to_vec());
                    return false;
                }
                true
            });
        }
        Mode::Sampled { samples } => {
            if r_eff == 0 {
                return Ok(cert);
            }
            for v in 0..n {
                cert.checked += 1;
                if violates(1, g.simple_degree(v)) {
                    cert.pass = false;
                    cert.witness = Some(vec![v]);
                    return Ok(cert);
                }
            }
            let mut sampler = SetSampler::new(g, seed);
            for _ in 0..samples {
                let size = sampler.size_in(1, r_eff);
                let u = sampler.next(size);
                cert.checked += 1;
                let set = VertexSet::from_iter(n, u.iter().copied());
                if violates(u.len(), g.external_neighborhood(&set).len()) {
                    cert.pass = false;
                    cert.witness = Some(u);
                    break;
                }
            }
        }
    }
    Ok(cert)
}

/// Largest `R ≤ r_max` for which `g` is an exact `(R, c)`-expander.
pub fn max_expansion_radius(g: &MultiGraph, c: f64, r_max: usize) -> Result<usize> {
    let mut best = 0;
    for r in 1..=r_max.min(g.n()) {
        if is_rc_expander(g, r, c, Mode::exact(), SeedStream::new(0, 0))?.pass {
            best = r;
        } else {
            break;
        }
    }
    Ok(best)
}

/// `c ≥ k` and `R(c + 1) ≥ (n + k)/2`.
pub fn rc_connectivity_premise(n: usize, r: usize, c: f64, k: usize) -> bool {
    c >= k as f64 && r as f64 * (c + 1.0) >= (n + k) as f64 / 2.0
}

fn ln_n(n: usize) -> f64 {
    (n as f64).ln()
}

/// `(E1)`: `|N(A)| ≥ β|A| ln n` for `|A| ≤ n / ln n`; `(E2)`: an edge between
/// any disjoint `A, B` with `|A|, |B| ≥ n (ln ln n)^{1.5} / ln n`.
///
/// `E1.measured` is the least `|N(A)| / (|A| ln n)` seen. E2 is checked by
/// taking, for each candidate `A` of the threshold size, `B` outside `N⁺(A)`
/// whenever there is room for it.
pub fn trace_expansion_audit(gamma: &MultiGraph, beta: f64, mode: Mode, seed: SeedStream) -> Result<AuditReport> {
    let n = gamma.n();
    if n < 3 {
        return Err(Error::InvalidParameter("expansion audit needs n >= 3".into()));
    }
    let l = ln_n(n);
    let e1_max = (n as f64 / l).floor() as usize;
    let e2_size = ((n as f64) * l.ln().powf(1.5) / l).ceil().max(1.0) as usize;
    let mut e1 = PropertyResult::new("E1");
    e1.note = format!("|A| <= {e1_max}, beta = {beta}");
    let e1_check = |e1: &mut PropertyResult, a: &[usize], nb: usize| {
        e1.checked += 1;
        let ratio = nb as f64 / (a.len() as f64 * l);
        e1.measure_min(ratio);
        if ratio < beta {
            e1.fail(Witness::Set(a.to_vec()));
        }
    };
    let e2 = disjoint_pair_check("E2", gamma, e2_size, mode, seed.child(2))?;
    match mode {
        Mode::Exact { budget } => {
            check_budget(n, 1, e1_max, budget)?;
            for_each_subset(gamma, 1, e1_max, |a, nb| {
                e1_check(&mut e1, a, nb);
                true
            });
        }
        Mode::Sampled { samples } => {
            if e1_max >= 1 {
                let mut sampler = SetSampler::new(gamma, seed.child(1));
                for v in 0..n {
                    e1_check(&mut e1, &[v], gamma.simple_degree(v));
                }
                for _ in 0..samples {
                    let size = sampler.size_in(1, e1_max);
                    let a = sampler.next(size);
                    let nb = gamma.external_neighborhood(&VertexSet::from_iter(n, a.iter().copied())).len();
                    e1_check(&mut e1, &a, nb);
                }
            }
        }
    }
    Ok(AuditReport { properties: vec![e1, e2] })
}

/// Looks for disjoint `A, B` of size `size` with no edge between them. Only
/// sets `A` of exactly that size need checking: `B` exists iff
/// `|V ∖ N⁺(A)| ≥ size`.
fn disjoint_pair_check(name: &str, g: &MultiGraph, size: usize, mode: Mode, seed: SeedStream) -> Result<PropertyResult> {
    let n = g.n();
    let mut res = PropertyResult::new(name);
    res.note = format!("|A|, |B| >= {size}");
    if 2 * size > n {
        res.note.push_str(" (no disjoint pair fits)");
        return Ok(res);
    }
    let check = |res: &mut PropertyResult, a: &[usize], nb: usize| {
        res.checked += 1;
        let outside = n - a.len() - nb;
        res.measure_max(outside as f64);
        if outside >= size {
            let set = VertexSet::from_iter(n, a.iter().copied());
            let closed = g.closed_neighborhood(&set);
            let b: Vec<usize> = (0..n).filter(|&v| !closed.contains(v)).take(size).collect();
            res.fail(Witness::Pair(a.to_vec(), b));
            return false;
        }
        true
    };
    match mode {
        Mode::Exact { budget } => {
            check_budget(n, size, size, budget)?;
            for_each_subset(g, size, size, |a, nb| {
                if a.len() == size {
                    check(&mut res, a, nb)
                } else {
                    true
                }
            });
        }
        Mode::Sampled { samples } => {
            let mut sampler = SetSampler::new(g, seed);
            for _ in 0..samples {
                let a = sampler.next(size);
                let nb = g.external_neighborhood(&VertexSet::from_iter(n, a.iter().copied())).len();
                if !check(&mut res, &a, nb) {
                    break;
                }
            }
        }
    }
    Ok(res)
}

/// Which values of `d` the criterion audit accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HksRange {
    /// `12 ≤ d ≤ exp(∛ln n)`, which is empty below `n ≈ 4.6·10⁶`.
    Strict,
    /// Any `d ≥ 1`.
    Relaxed,
}

/// Thresholds `(s1, s2)`: (Q1) applies to `|S| ≤ s1`, (Q2) to `|A|, |B| ≥ s2`.
pub fn hks_thresholds(n: usize, d: f64) -> Result<(usize, usize)> {
    if n < 16 {
        return Err(Error::InvalidParameter("the criterion needs n >= 16".into()));
    }
    let l1 = ln_n(n);
    let l2 = l1.ln();
    let l3 = l2.ln();
    let common = n as f64 * l2 * d.ln() / (l1 * l3);
    Ok(((common / d).floor() as usize, (common / 4130.0).ceil().max(1.0) as usize))
}

/// `(Q1)`: `|N(S)| ≥ d|S|` whenever `|S| ≤ s1`; `(Q2)`: an edge between any
/// disjoint `A, B` with `|A|, |B| ≥ s2`.
pub fn hks_audit(g: &MultiGraph, d: f64, range: HksRange, mode: Mode, seed: SeedStream) -> Result<AuditReport> {
    let n = g.n();
    if n < 16 {
        return Err(Error::InvalidParameter("the criterion needs n >= 16".into()));
    }
    let upper = ln_n(n).cbrt().exp();
    let ok = match range {
        HksRange::Strict => (12.0..=upper).contains(&d),
        HksRange::Relaxed => d >= 1.0,
    };
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "d = {d} outside the admissible range (12 <= d <= {upper:.3} for n = {n})"
        )));
    }
    let (s1, s2) = hks_thresholds(n, d)?;
    let s1 = s1.min(n);
    let mut q1 = PropertyResult::new("Q1");
    q1.note = format!("|S| <= {s1}, d = {d}");
    let q1_check = |q1: &mut PropertyResult, s: &[usize], nb: usize| {
        q1.checked += 1;
        let ratio = nb as f64 / s.len() as f64;
        q1.measure_min(ratio);
        if ratio < d {
            q1.fail(Witness::Set(s.to_vec()));
        }
    };
    match mode {
        Mode::Exact { budget } => {
            check_budget(n, 1, s1, budget)?;
            for_each_subset(g, 1, s1, |s, nb| {
                q1_check(&mut q1, s, nb);
                true
            });
        }
        Mode::Sampled { samples } => {
            if s1 >= 1 {
                for v in 0..n {
                    q1_check(&mut q1, &[v], g.simple_degree(v));
                }
                let mut sampler = SetSampler::new(g, seed.child(1));
                for _ in 0..samples {
                    let size = sampler.size_in(1, s1);
                    let s = sampler.next(size);
                    let nb = g.external_neighborhood(&VertexSet::from_iter(n, s.iter().copied())).len();
                    q1_check(&mut q1, &s, nb);
                }
            }
        }
    }
    let q2 = disjoint_pair_check("Q2", g, s2, mode, seed.child(2))?;
    Ok(AuditReport { properties: vec![q1, q2] })
}

/// Parameters of the pseudo-randomness audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoRandomParams {
    pub alpha: f64,
    pub samples: usize,
    /// The "large enough constant" of (P4).
    pub k: f64,
}

impl PseudoRandomParams {
    pub fn new(alpha: f64, samples: usize) -> Self {
        Self { alpha, samples, k: 100.0 }
    }
}

/// (P1) connectivity and (P2) degrees exactly; (P3), (P4), (P5) on sampled
/// sets; (P6) on sampled roots with full balls, skipped when `α ≥ ln² n`.
pub fn pseudorandom_audit(g: &MultiGraph, params: PseudoRandomParams, seed: SeedStream) -> Result<AuditReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::InvalidParameter("pseudo-randomness audit needs n >= 3".into()));
    }
    let alpha = params.alpha;
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    let l = ln_n(n);
    let al = alpha * l;
    let mut report = AuditReport::default();

    let mut p1 = PropertyResult::new("P1");
    p1.checked = 1;
    if !structure::is_connected(g) {
        let comp = structure::components(g);
        let part: Vec<usize> = (0..n).filter(|&v| comp[v] == comp[0]).collect();
        p1.fail(Witness::Set(part));
    }
    report.properties.push(p1);

    let mut p2 = PropertyResult::new("P2");
    let tol = 2.0 * alpha.sqrt() * l;
    p2.note = format!("|d(v) - {al:.3}| <= {tol:.3}");
    for v in 0..n {
        p2.checked += 1;
        let dev = (g.degree(v) as f64 - al).abs();
        p2.measure_max(dev);
        if dev > tol {
            p2.fail(Witness::Vertex(v));
        }
    }
    report.properties.push(p2);

    let mut sampler = SetSampler::new(g, seed.child(3));
    let mut p3 = PropertyResult::new("P3");
    let p3_max = (0.8 * n as f64).floor() as usize;
    p3.note = format!("|S| <= {p3_max}; measured = min |dS| / (|S||S^c| alpha ln n / 2n)");
    for _ in 0..params.samples {
        let size = sampler.size_in(1, p3_max.max(1));
        let s = sampler.next(size);
        let set = VertexSet::from_iter(n, s.iter().copied());
        let bound = (s.len() * (n - s.len())) as f64 * al / (2.0 * n as f64);
        let boundary = g.edge_boundary(&set) as f64;
        p3.checked += 1;
        p3.measure_min(boundary / bound);
        if boundary <= bound {
            p3.fail(Witness::Set(s));
        }
    }
    report.properties.push(p3);

    let mut sampler = SetSampler::new(g, seed.child(4));
    let mut p4 = PropertyResult::new("P4");
    let big = (n as f64 / l).floor() as usize;
    let small_cut = n as f64 / al;
    p4.note = format!("K = {}; measured = max heavy-edge count / budget", params.k);
    let mut counts = vec![0u64; n];
    if big >= 1 {
        for _ in 0..params.samples {
            let size = sampler.size_in(1, big);
            let a = sampler.next(size);
            let af = a.len() as f64;
            let (threshold, budget) = if af >= small_cut {
                (params.k * af * al / n as f64, af * al / params.k)
            } else {
                (params.k, af * al / params.k.ln())
            };
            let in_a = VertexSet::from_iter(n, a.iter().copied());
            let mut touched = Vec::new();
            for &u in &a {
                for &(w, k) in g.neighbor_mults(u) {
                    let w = w as usize;
                    if !in_a.contains(w) {
                        if counts[w] == 0 {
                            touched.push(w);
                        }
                        counts[w] += k as u64;
                    }
                }
            }
            let heavy: u64 = touched.iter().map(|&w| counts[w]).filter(|&c| c as f64 >= threshold).sum();
            touched.iter().for_each(|&w| counts[w] = 0);
            p4.checked += 1;
            p4.measure_max(heavy as f64 / budget);
            if heavy as f64 > budget {
                p4.fail(Witness::Set(a));
            }
        }
    }
    report.properties.push(p4);

    let mut sampler = SetSampler::new(g, seed.child(5));
    let mut p5 = PropertyResult::new("P5");
    let lll = l.ln().powf(1.5);
    let p5_size = ((n as f64) * lll / l).round().max(1.0) as usize;
    let p5_thr = alpha * lll / 2.0;
    p5.note = format!("|A| = {p5_size}, low means |E(v,A)| <= {p5_thr:.3}; measured = max low count / (|A|/2)");
    if p5_size <= n {
        for _ in 0..params.samples {
            let a = sampler.next(p5_size);
            let in_a = VertexSet::from_iter(n, a.iter().copied());
            counts.iter_mut().for_each(|c| *c = 0);
            for &u in &a {
                for &(w, k) in g.neighbor_mults(u) {
                    counts[w as usize] += k as u64;
                }
            }
            let low = (0..n)
                .filter(|&v| !in_a.contains(v) && counts[v] as f64 <= p5_thr)
                .count();
            p5.checked += 1;
            p5.measure_max(low as f64 / (a.len() as f64 / 2.0));
            if low as f64 > a.len() as f64 / 2.0 {
                p5.fail(Witness::Set(a));
            }
        }
    }
    report.properties.push(p5);

    if alpha >= l * l {
        report.properties.push(PropertyResult::skipped("P6", "alpha >= ln^2 n"));
    } else {
        let mut p6 = PropertyResult::new("P6");
        let r_max = (l / (15.0 * l.ln())).floor().max(0.0) as usize;
        p6.note = format!("radius <= {r_max}; measured = max |E(w, B(v,r))|");
        let mut rng = seed.child(6).rng();
        let roots: Vec<usize> = if params.samples >= n {
            (0..n).collect()
        } else {
            sample(&mut rng, n, params.samples).into_vec()
        };
        for v in roots {
            p6.checked += 1;
            let dist = g.distances_from(v);
            for r in 0..=r_max {
                let ball = VertexSet::from_iter(n, (0..n).filter(|&x| dist[x].is_some_and(|d| d <= r)));
                for w in (0..n).filter(|&x| dist[x] == Some(r)) {
                    let e = g.edges_into(w, &ball);
                    p6.measure_max(e as f64);
                    if e > 5 {
                        p6.fail(Witness::Rooted { v, r, w });
                    }
                }
            }
        }
        report.properties.push(p6);
    }
    Ok(report)
}
