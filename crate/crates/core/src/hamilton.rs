//! Hamiltonicity: the Pósa rotation-extension engine, exact solvers for small
//! graphs, boosters, and booster completion.
//!
//! Path lengths are counted in vertices throughout this module.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::models::{SeedStream, StreamRng};
use crate::structure;

const NONE: usize = usize::MAX;

/// Largest `n` for the subset dynamic programs.
pub const EXACT_PATH_CAP: usize = 18;
/// Largest `n` for which [`is_hamiltonian`] falls back to exact search.
pub const EXACT_HAMILTON_CAP: usize = 40;

/// Result of a rotation-extension search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathState {
    /// Vertex sequence of the path; when `is_cycle` the last vertex is adjacent to the first.
    pub path: Vec<usize>,
    pub is_cycle: bool,
    pub rotations: usize,
}

impl PathState {
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn is_hamilton_cycle(&self, n: usize) -> bool {
        self.is_cycle && self.path.len() == n
    }
}

struct Engine<'a> {
    g: &'a MultiGraph,
    path: Vec<usize>,
    pos: Vec<usize>,
    free_deg: Vec<usize>,
    rotations: usize,
    /// Probability of extending to a uniformly random free neighbor.
    noise: f64,
}

impl<'a> Engine<'a> {
    fn new(g: &'a MultiGraph, initial: &[usize]) -> Self {
        let n = g.n();
        let mut e = Engine {
            g,
            path: Vec::with_capacity(n),
            pos: vec![NONE; n],
            free_deg: (0..n).map(|v| g.simple_degree(v)).collect(),
            rotations: 0,
            noise: 0.0,
        };
        for &v in initial {
            e.push(v);
        }
        e
    }

    fn push(&mut self, v: usize) {
        debug_assert_eq!(self.pos[v], NONE);
        self.pos[v] = self.path.len();
        self.path.push(v);
        for w in self.g.neighbors(v) {
            self.free_deg[w] -= 1;
        }
    }

    fn reverse_from(&mut self, from: usize) {
        self.path[from..].reverse();
        for i in from..self.path.len() {
            self.pos[self.path[i]] = i;
        }
    }

    fn end(&self) -> usize {
        *self.path.last().expect("non-empty path")
    }

    /// Extends at the end (or at the start, by reversing) towards the free
    /// neighbor with the fewest free neighbors of its own.
    fn try_extend(&mut self, rng: &mut StreamRng) -> bool {
        for attempt in 0..2 {
            let end = self.end();
            let free = self.g.neighbors(end).filter(|&w| self.pos[w] == NONE);
            let next = if self.noise > 0.0 && rng.random_bool(self.noise) {
                free.collect::<Vec<_>>().choose(rng).copied()
            } else {
                free.min_by_key(|&w| self.free_deg[w])
            };
            if let Some(w) = next {
                self.push(w);
                return true;
            }
            if attempt == 0 {
                if self.path.len() > 1 && self.free_deg[self.path[0]] > 0 {
                    self.reverse_from(0);
                } else {
                    return false;
                }
            }
        }
        false
    }

    fn closes(&self) -> bool {
        let n = self.g.n();
        n >= 3 && self.path.len() == n && self.g.has_edge(self.end(), self.path[0])
    }

    /// One rotation at the end. Rotations whose new end can extend (or close a
    /// Hamilton path) are preferred.
    fn rotate(&mut self, rng: &mut StreamRng) -> bool {
        let len = self.path.len();
        if len < 3 {
            return false;
        }
        let end = self.end();
        let n = self.g.n();
        let pivots: Vec<usize> = self
            .g
            .neighbors(end)
            .filter(|&y| self.pos[y] != NONE && self.pos[y] + 2 < len)
            .collect();
        if pivots.is_empty() {
            return false;
        }
        let good: Vec<usize> = pivots
            .iter()
            .copied()
            .filter(|&y| {
                let new_end = self.path[self.pos[y] + 1];
                if len == n {
                    self.g.has_edge(new_end, self.path[0])
                } else {
                    self.free_deg[new_end] > 0
                }
            })
            .collect();
        let pool = if good.is_empty() { &pivots } else { &good };
        let y = *pool.choose(rng).expect("non-empty");
        self.reverse_from(self.pos[y] + 1);
        self.rotations += 1;
        true
    }

    /// Rotation-extension rounds until a Hamilton cycle closes, the budget
    /// runs out, no rotation is possible, or `stall` rounds pass without the
    /// path growing. Returns whether a cycle closed and the rounds used.
    fn run(&mut self, rng: &mut StreamRng, budget: usize, stall: usize) -> (bool, usize) {
        let mut used = 0;
        let mut since_growth = 0;
        loop {
            let before = self.path.len();
            while self.try_extend(rng) {}
            if self.path.len() > before {
                since_growth = 0;
            }
            if self.closes() {
                return (true, used);
            }
            if used >= budget || since_growth >= stall {
                return (false, used);
            }
            used += 1;
            since_growth += 1;
            if rng.random_ratio(1, 16) {
                self.reverse_from(0);
            }
            if !self.rotate(rng) {
                self.reverse_from(0);
                if !self.rotate(rng) {
                    return (false, used);
                }
            }
        }
    }

    fn state(&self, is_cycle: bool) -> PathState {
        PathState {
            path: self.path.clone(),
            is_cycle,
            rotations: self.rotations,
        }
    }
}

/// Default rotation budget: `20 n` rounds.
pub fn default_budget(n: usize) -> usize {
    20 * n.max(1)
}

fn min_degree_vertex(g: &MultiGraph) -> usize {
    (0..g.n()).min_by_key(|&v| g.simple_degree(v)).unwrap_or(0)
}

/// Rotation-extension with restarts sharing one budget of rotation rounds.
///
/// The first run starts at a minimum-degree vertex; whenever a run gets stuck
/// or stops growing for `2n` rounds a new one starts at a random vertex, and
/// later runs extend to a random free neighbor a quarter of the time. The
/// longest path seen is returned, or a Hamilton cycle (with `is_cycle` set) as
/// soon as one closes. Stops early once the path spans the largest component
/// of a disconnected graph.
pub fn posa_longest_path(g: &MultiGraph, seed: SeedStream, budget: usize) -> PathState {
    let n = g.n();
    if n == 0 {
        return PathState { path: vec![], is_cycle: false, rotations: 0 };
    }
    let mut sizes = vec![0usize; n];
    structure::components(g).into_iter().for_each(|c| sizes[c] += 1);
    let largest = sizes.into_iter().max().unwrap_or(0);
    let mut rng = seed.rng();
    let mut left = budget;
    let mut start = min_degree_vertex(g);
    let mut best: Option<PathState> = None;
    loop {
        let mut engine = Engine::new(g, &[start]);
        if best.is_some() {
            engine.noise = 0.25;
        }
        let (cycle, used) = engine.run(&mut rng, left, 2 * n);
        let st = engine.state(cycle);
        if cycle {
            return st;
        }
        if best.as_ref().is_none_or(|b| st.len() > b.len()) {
            best = Some(st);
        }
        left = left.saturating_sub(used.max(1));
        let done = best.as_ref().is_some_and(|b| b.len() >= largest && (largest < n || n < 3));
        if done || left == 0 {
            return best.expect("at least one run");
        }
        start = rng.random_range(0..n);
    }
}

/// Rotation-extension starting from an existing path of `g`.
pub fn posa_from(g: &MultiGraph, initial: &[usize], rng: &mut StreamRng, budget: usize) -> PathState {
    let mut engine = Engine::new(g, initial);
    let (cycle, _) = engine.run(rng, budget, usize::MAX);
    engine.state(cycle)
}

/// Best path over `restarts` runs; stops early on a Hamilton cycle. The first
/// run starts at a minimum-degree vertex, later ones at random vertices.
pub fn posa_search(g: &MultiGraph, seed: SeedStream, budget: usize, restarts: usize) -> PathState {
    let n = g.n();
    if n == 0 {
        return PathState { path: vec![], is_cycle: false, rotations: 0 };
    }
    let mut rng = seed.rng();
    let mut best: Option<PathState> = None;
    for r in 0..restarts.max(1) {
        let start = if r == 0 { min_degree_vertex(g) } else { rng.random_range(0..n) };
        let st = posa_from(g, &[start], &mut rng, budget);
        if st.is_hamilton_cycle(n) {
            return st;
        }
        if best.as_ref().is_none_or(|b| st.len() > b.len()) {
            best = Some(st);
        }
    }
    best.expect("at least one restart")
}

/// Verdict of a Hamiltonicity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hamiltonicity {
    Hamiltonian(Vec<usize>),
    NotHamiltonian,
    /// Heuristic search failed and the graph is beyond the exact cap.
    Unknown,
}

impl Hamiltonicity {
    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, Hamiltonicity::Hamiltonian(_))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HamiltonOptions {
    pub seed: SeedStream,
    pub budget: Option<usize>,
    pub restarts: usize,
    /// Exact fallback is used up to this many vertices.
    pub exact_cap: usize,
    /// Search nodes the backtracking fallback may expand before giving up.
    pub exact_nodes: u64,
}

impl Default for HamiltonOptions {
    fn default() -> Self {
        Self {
            seed: SeedStream::new(0x4a4d, 0),
            budget: None,
            restarts: 4,
            exact_cap: EXACT_HAMILTON_CAP,
            exact_nodes: 2_000_000,
        }
    }
}

/// Sound, and complete up to [`EXACT_HAMILTON_CAP`] vertices unless the
/// backtracking node budget runs out; otherwise a negative answer is
/// [`Hamiltonicity::Unknown`].
pub fn is_hamiltonian(g: &MultiGraph) -> Hamiltonicity {
    hamiltonicity(g, &HamiltonOptions::default())
}

pub fn hamiltonicity(g: &MultiGraph, opts: &HamiltonOptions) -> Hamiltonicity {
    let n = g.n();
    if n < 3 || g.min_simple_degree() < 2 || has_cut_vertex(g) {
        return Hamiltonicity::NotHamiltonian;
    }
    let budget = opts.budget.unwrap_or_else(|| default_budget(n));
    let st = posa_search(g, opts.seed, budget, opts.restarts);
    if st.is_hamilton_cycle(n) {
        return Hamiltonicity::Hamiltonian(st.path);
    }
    if n > opts.exact_cap {
        return Hamiltonicity::Unknown;
    }
    let exact = if n <= 20 {
        Some(hamilton_cycle_dp(g))
    } else {
        hamilton_cycle_backtrack_limited(g, opts.exact_nodes)
    };
    match exact {
        Some(Some(c)) => Hamiltonicity::Hamiltonian(c),
        Some(None) => Hamiltonicity::NotHamiltonian,
        None => Hamiltonicity::Unknown,
    }
}

/// Articulation point test (a disconnected graph also reports `true`).
pub fn has_cut_vertex(g: &MultiGraph) -> bool {
    let n = g.n();
    if n <= 2 {
        return false;
    }
    let mut disc = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    // iterative DFS from 0
    let mut stack: Vec<(usize, usize, usize)> = vec![(0, NONE, 0)];
    disc[0] = 0;
    low[0] = 0;
    time += 1;
    let mut root_children = 0;
    while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
        let row = g.neighbor_mults(v);
        if *idx < row.len() {
            let w = row[*idx].0 as usize;
            *idx += 1;
            if w == parent {
                continue;
            }
            if disc[w] == NONE {
                disc[w] = time;
                low[w] = time;
                time += 1;
                if v == 0 {
                    root_children += 1;
                }
                stack.push((w, v, 0));
            } else {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                if p != 0 && low[v] >= disc[p] {
                    return true;
                }
            }
        }
    }
    root_children > 1 || disc.iter().any(|&d| d == NONE)
}

/// Checks that `cycle` visits every vertex exactly once along edges of `g`,
/// closing back to its first vertex.
pub fn verify_hamilton_cycle(g: &MultiGraph, cycle: &[usize]) -> bool {
    let n = g.n();
    if n < 3 || cycle.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    (0..n).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % n]))
}

/// Checks that `path` is a path of `g` on distinct vertices.
pub fn verify_path(g: &MultiGraph, path: &[usize]) -> bool {
    let mut seen = vec![false; g.n()];
    path.iter().all(|&v| v < g.n() && !std::mem::replace(&mut seen[v], true))
        && path.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

fn neighbor_masks(g: &MultiGraph) -> Vec<u64> {
    assert!(g.n() <= 64);
    (0..g.n())
        .map(|v| g.neighbors(v).fold(0u64, |m, w| m | (1 << w)))
        .collect()
}

/// Hamilton cycle by subset dynamic programming over paths from vertex 0.
/// Intended for `n ≤ 20`.
pub fn hamilton_cycle_dp(g: &MultiGraph) -> Option<Vec<usize>> {
    let n = g.n();
    assert!(n <= 24, "subset DP is limited to small graphs");
    if n < 3 {
        return None;
    }
    let nb = neighbor_masks(g);
    let full: u64 = (1u64 << n) - 1;
    // dp[S >> 1] for S ⊆ {1..n-1} (as bits of the full mask): ends of paths
    // from 0 that visit exactly {0} ∪ S.
    let size = 1usize << (n - 1);
    let mut dp = vec![0u32; size];
    for w in 1..n {
        if nb[0] >> w & 1 == 1 {
            dp[1 << (w - 1)] |= 1 << (w - 1);
        }
    }
    for s in 1..size {
        let ends = dp[s];
        if ends == 0 {
            continue;
        }
        let smask = (s as u64) << 1;
        let mut e = ends;
        while e != 0 {
            let v = e.trailing_zeros() as usize + 1;
            e &= e - 1;
            let mut add = nb[v] & !smask & !1;
            while add != 0 {
                let w = add.trailing_zeros() as usize;
                add &= add - 1;
                let t = s | 1 << (w - 1);
                dp[t] |= 1 << (w - 1);
            }
        }
    }
    let last = size - 1;
    let closing = (1..n).find(|&v| dp[last] >> (v - 1) & 1 == 1 && nb[v] & 1 == 1)?;
    // walk back
    let mut cycle = vec![closing];
    let mut s = last;
    let mut v = closing;
    while s != 1 << (v - 1) {
        let prev_s = s & !(1 << (v - 1));
        let u = (1..n)
            .find(|&u| dp[prev_s] >> (u - 1) & 1 == 1 && nb[u] >> v & 1 == 1)
            .expect("dp predecessor");
        cycle.push(u);
        s = prev_s;
        v = u;
    }
    cycle.push(0);
    cycle.reverse();
    debug_assert_eq!(full.count_ones() as usize, cycle.len());
    Some(cycle)
}

/// Hamilton cycle by backtracking with degree and reachability pruning.
/// Intended for `n ≤ 40`; runtime is exponential in the worst case.
pub fn hamilton_cycle_backtrack(g: &MultiGraph) -> Option<Vec<usize>> {
    hamilton_cycle_backtrack_limited(g, u64::MAX).expect("unlimited search")
}

/// As [`hamilton_cycle_backtrack`], but `None` once `max_nodes` search nodes
/// have been expanded without an answer.
pub fn hamilton_cycle_backtrack_limited(g: &MultiGraph, max_nodes: u64) -> Option<Option<Vec<usize>>> {
    let n = g.n();
    assert!(n <= 64, "backtracking uses 64-bit vertex masks");
    if n < 3 || g.min_simple_degree() < 2 {
        return Some(None);
    }
    let nb = neighbor_masks(g);
    let start = min_degree_vertex(g);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut path = vec![start];
    struct Search<'a> {
        nb: &'a [u64],
        full: u64,
        start: usize,
        nodes: u64,
        max_nodes: u64,
    }
    // Some(found) or None when the node budget ran out
    fn dfs(s: &mut Search, visited: u64, path: &mut Vec<usize>) -> Option<bool> {
        let (nb, full, start) = (s.nb, s.full, s.start);
        s.nodes += 1;
        if s.nodes > s.max_nodes {
            return None;
        }
        let end = *path.last().unwrap();
        if visited == full {
            return Some(nb[end] >> start & 1 == 1);
        }
        let unvisited = full & !visited;
        let ends = (1u64 << end) | (1u64 << start);
        let mut u = unvisited;
        while u != 0 {
            let x = u.trailing_zeros() as usize;
            u &= u - 1;
            if (nb[x] & (unvisited | ends)).count_ones() < 2 {
                return Some(false);
            }
        }
        // every unvisited vertex reachable from `end` through unvisited vertices
        let mut reach = nb[end] & unvisited;
        let mut frontier = reach;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = nb[x] & unvisited & !reach;
            reach |= new;
            frontier |= new;
        }
        if reach != unvisited {
            return Some(false);
        }
        let mut cands: Vec<usize> = Vec::new();
        let mut c = nb[end] & unvisited;
        while c != 0 {
            cands.push(c.trailing_zeros() as usize);
            c &= c - 1;
        }
        cands.sort_by_key(|&w| (nb[w] & unvisited).count_ones());
        for w in cands {
            path.push(w);
            if dfs(s, visited | 1 << w, path)? {
                return Some(true);
            }
            path.pop();
        }
        Some(false)
    }
    let mut search = Search { nb: &nb, full, start, nodes: 0, max_nodes };
    let found = dfs(&mut search, 1 << start, &mut path)?;
    Some(found.then_some(path))
}

/// A longest path, by subset dynamic programming (`n ≤ 18`).
pub fn longest_path_exact(g: &MultiGraph) -> Result<Vec<usize>> {
    let n = g.n();
    if n > EXACT_PATH_CAP {
        return Err(Error::TooLarge { n, cap: EXACT_PATH_CAP });
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let nb = neighbor_masks(g);
    let size = 1usize << n;
    let mut dp = vec![0u32; size];
    for v in 0..n {
        dp[1 << v] = 1 << v;
    }
    let mut best = (1u32, 1usize << min_degree_vertex(g));
    for s in 1..size {
        let ends = dp[s];
        if ends == 0 {
            continue;
        }
        let pc = (s as u64).count_ones();
        if pc > best.0 {
            best = (pc, s);
        }
        let mut e = ends;
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut add = nb[v] & !(s as u64);
            while add != 0 {
                let w = add.trailing_zeros() as usize;
                add &= add - 1;
                dp[s | 1 << w] |= 1 << w;
            }
        }
    }
    let mut s = best.1;
    let mut v = dp[s].trailing_zeros() as usize;
    let mut path = vec![v];
    while s != 1 << v {
        let prev = s & !(1 << v);
        let u = (0..n)
            .find(|&u| dp[prev] >> u & 1 == 1 && nb[u] >> v & 1 == 1)
            .expect("dp predecessor");
        path.push(u);
        s = prev;
        v = u;
    }
    path.reverse();
    Ok(path)
}

/// Number of vertices on a longest path (`n ≤ 18`).
pub fn max_path_vertices(g: &MultiGraph) -> Result<usize> {
    longest_path_exact(g).map(|p| p.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoosterMode {
    /// Every non-edge is tested against exact maximum path lengths (`n ≤ 18`).
    Exact,
    /// `samples` random non-edges, each verified; exactly for `n ≤ 18`,
    /// otherwise against the longest path the rotation engine can find.
    Sampled { samples: usize },
}

/// Non-edges `{u, v}` (`u < v`) whose addition makes `h` Hamiltonian or
/// lengthens its longest path.
pub fn boosters(h: &MultiGraph, mode: BoosterMode, seed: SeedStream) -> Result<Vec<(usize, usize)>> {
    let h = h.simplify();
    let n = h.n();
    let non_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !h.has_edge(u, v))
        .collect();
    match mode {
        BoosterMode::Exact => {
            if n > EXACT_PATH_CAP {
                return Err(Error::TooLarge { n, cap: EXACT_PATH_CAP });
            }
            let oracle = ExactBoosterOracle::new(&h)?;
            Ok(non_edges.into_iter().filter(|&(u, v)| oracle.is_booster(u, v)).collect())
        }
        BoosterMode::Sampled { samples } => {
            let mut rng = seed.rng();
            let picked: Vec<(usize, usize)> = non_edges
                .choose_multiple(&mut rng, samples.min(non_edges.len()))
                .copied()
                .collect();
            if n <= EXACT_PATH_CAP {
                let oracle = ExactBoosterOracle::new(&h)?;
                return Ok(picked.into_iter().filter(|&(u, v)| oracle.is_booster(u, v)).collect());
            }
            let budget = default_budget(n);
            let base = posa_search(&h, seed.child(1), budget, 8);
            if base.is_hamilton_cycle(n) {
                return Ok(picked);
            }
            let mut out = Vec::new();
            for (i, (u, v)) in picked.into_iter().enumerate() {
                let g2 = h.with_edge(u, v);
                let mut r = seed.child(100 + i as u64).rng();
                let st = posa_from(&g2, &base.path, &mut r, budget);
                if st.is_hamilton_cycle(n) || st.len() > base.len() {
                    out.push((u, v));
                }
            }
            Ok(out)
        }
    }
}

/// Exact booster test for one fixed small graph.
pub struct ExactBoosterOracle<'a> {
    h: &'a MultiGraph,
    hamiltonian: bool,
    max_path: usize,
}

impl<'a> ExactBoosterOracle<'a> {
    pub fn new(h: &'a MultiGraph) -> Result<Self> {
        let max_path = max_path_vertices(h)?;
        Ok(Self {
            h,
            hamiltonian: hamilton_cycle_dp(h).is_some(),
            max_path,
        })
    }

    pub fn max_path(&self) -> usize {
        self.max_path
    }

    pub fn is_booster(&self, u: usize, v: usize) -> bool {
        if self.h.has_edge(u, v) || u == v {
            return false;
        }
        if self.hamiltonian {
            return true;
        }
        let g2 = self.h.with_edge(u, v);
        hamilton_cycle_dp(&g2).is_some()
            || max_path_vertices(&g2).expect("same size as h") > self.max_path
    }
}

/// Successful booster completion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionReport {
    /// Pool edges added, in order.
    pub added: Vec<(usize, usize)>,
    /// Known longest-path length just before each addition.
    pub path_lengths: Vec<usize>,
    /// Hamilton cycle of the final graph.
    pub cycle: Vec<usize>,
}

/// Booster completion ran out of usable pool edges.
#[derive(Debug, Clone)]
pub struct CompletionFailure {
    pub stuck: MultiGraph,
    pub added: Vec<(usize, usize)>,
    pub best_path: Vec<usize>,
}

/// Repeatedly adds pool edges that act as boosters for the current graph until
/// it becomes Hamiltonian.
///
/// Boosters are found through rotation endpoints of the longest known path: a
/// pool edge from a rotation endpoint to a vertex off the path extends it, and
/// a pool edge joining the two ends of a rotated path closes a cycle on the
/// path's vertex set. The known longest-path length strictly increases with
/// every addition, so there are at most `n` additions.
pub fn booster_completion(
    h0: &MultiGraph,
    pool: &[(usize, usize)],
    seed: SeedStream,
) -> std::result::Result<CompletionReport, CompletionFailure> {
    let n = h0.n();
    let mut h = h0.simplify();
    let mut pool_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in pool {
        if u != v {
            pool_adj[u].push(v);
            pool_adj[v].push(u);
        }
    }
    for row in &mut pool_adj {
        row.sort_unstable();
        row.dedup();
    }
    let mut rng = seed.rng();
    let budget = default_budget(n);
    let mut added = Vec::new();
    let mut lengths = Vec::new();
    let mut state = posa_search(&h, seed.child(7), budget, 4);
    loop {
        if state.is_hamilton_cycle(n) {
            return Ok(CompletionReport {
                added,
                path_lengths: lengths,
                cycle: state.path,
            });
        }
        if n < 3 {
            break;
        }
        let found = find_pool_booster(&h, &pool_adj, &state.path)
            .or_else(|| fallback_pool_booster(&h, &pool_adj, &state.path, &mut rng, budget));
        let Some((edge, new_path, closed)) = found else {
            break;
        };
        lengths.push(state.len());
        added.push((edge.0.min(edge.1), edge.0.max(edge.1)));
        h.add_edge(edge.0, edge.1);
        state = if closed {
            PathState { path: new_path, is_cycle: true, rotations: 0 }
        } else {
            posa_from(&h, &new_path, &mut rng, budget)
        };
    }
    Err(CompletionFailure {
        stuck: h,
        added,
        best_path: state.path,
    })
}

/// Rotation-closure search. Returns the booster, the improved path (or cycle)
/// it yields in `h + e`, and whether that is a Hamilton cycle.
fn find_pool_booster(
    h: &MultiGraph,
    pool_adj: &[Vec<usize>],
    path: &[usize],
) -> Option<((usize, usize), Vec<usize>, bool)> {
    let n = h.n();
    if path.len() < 2 {
        // a single vertex: any pool edge from it extends
        let v = *path.first()?;
        let w = *pool_adj[v].iter().find(|&&w| !h.has_edge(v, w))?;
        return Some(((v, w), vec![v, w], false));
    }
    let on_path = {
        let mut s = vec![false; n];
        path.iter().for_each(|&v| s[v] = true);
        s
    };
    let mut level_one: Vec<Vec<usize>> = Vec::new();
    for fixed_start in [path.to_vec(), path.iter().rev().copied().collect::<Vec<_>>()] {
        for q in rotation_closure(h, &fixed_start, n) {
            let x = *q.last().unwrap();
            for &y in &pool_adj[x] {
                if h.has_edge(x, y) {
                    continue;
                }
                if !on_path[y] {
                    let mut p = q.clone();
                    p.push(y);
                    return Some(((x, y), p, false));
                }
                if y == q[0] && q.len() >= 3 {
                    if let Some(res) = close_cycle(h, &q, (x, y)) {
                        return Some(res);
                    }
                }
            }
            level_one.push(q);
        }
    }
    // Second level: fix each rotation endpoint as the start and rotate the other end.
    for q in level_one.iter().take(n) {
        let rev: Vec<usize> = q.iter().rev().copied().collect();
        let x = rev[0];
        if pool_adj[x].is_empty() {
            continue;
        }
        for r in rotation_closure(h, &rev, n) {
            let y = *r.last().unwrap();
            if pool_adj[x].binary_search(&y).is_ok() && !h.has_edge(x, y) && r.len() >= 3 {
                if let Some(res) = close_cycle(h, &r, (x, y)) {
                    return Some(res);
                }
            }
        }
    }
    None
}

/// Paths with the same first vertex and vertex set as `path`, one per reachable
/// end vertex, explored breadth-first over rotations (at most `cap` of them).
fn rotation_closure(h: &MultiGraph, path: &[usize], cap: usize) -> Vec<Vec<usize>> {
    let n = h.n();
    let mut seen_end = vec![false; n];
    let mut out = vec![path.to_vec()];
    seen_end[*path.last().unwrap()] = true;
    let mut i = 0;
    while i < out.len() && out.len() < cap {
        let q = out[i].clone();
        i += 1;
        let mut pos = vec![NONE; n];
        for (j, &v) in q.iter().enumerate() {
            pos[v] = j;
        }
        let end = *q.last().unwrap();
        let len = q.len();
        for y in h.neighbors(end) {
            if pos[y] == NONE || pos[y] + 2 >= len {
                continue;
            }
            let new_end = q[pos[y] + 1];
            if seen_end[new_end] {
                continue;
            }
            seen_end[new_end] = true;
            let mut r = q.clone();
            r[pos[y] + 1..].reverse();
            out.push(r);
            if out.len() >= cap {
                break;
            }
        }
    }
    out
}

/// `q` plus the closing edge is a cycle on `V(q)`. Returns a Hamilton cycle if
/// `V(q)` is everything, or a path one vertex longer opened at an outside
/// neighbor; `None` if no vertex outside the cycle touches it.
fn close_cycle(
    h: &MultiGraph,
    q: &[usize],
    edge: (usize, usize),
) -> Option<((usize, usize), Vec<usize>, bool)> {
    let n = h.n();
    if q.len() == n {
        return Some((edge, q.to_vec(), true));
    }
    let mut on = vec![false; n];
    q.iter().for_each(|&v| on[v] = true);
    for (i, &c) in q.iter().enumerate() {
        if let Some(u) = h.neighbors(c).find(|&u| !on[u]) {
            let mut p = vec![u];
            p.extend(q[i..].iter().copied());
            p.extend(q[..i].iter().copied());
            return Some((edge, p, false));
        }
    }
    None
}

/// Tries each pool non-edge with a short rotation-extension run from `path`.
fn fallback_pool_booster(
    h: &MultiGraph,
    pool_adj: &[Vec<usize>],
    path: &[usize],
    rng: &mut StreamRng,
    budget: usize,
) -> Option<((usize, usize), Vec<usize>, bool)> {
    let n = h.n();
    for u in 0..n {
        for &v in &pool_adj[u] {
            if v <= u || h.has_edge(u, v) {
                continue;
            }
            let g2 = h.with_edge(u, v);
            let st = posa_from(&g2, path, rng, budget / 4 + 1);
            if st.is_hamilton_cycle(n) {
                return Some(((u, v), st.path, true));
            }
            if st.len() > path.len() {
                return Some(((u, v), st.path, false));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure;

    #[test]
    fn cycle_graph_is_found() {
        for n in [3, 5, 12, 50] {
            let g = MultiGraph::cycle(n);
            let st = posa_longest_path(&g, SeedStream::new(1, 0), default_budget(n));
            assert!(st.is_hamilton_cycle(n), "n = {n}");
            assert!(verify_hamilton_cycle(&g, &st.path));
        }
    }

    #[test]
    fn disconnected_graph_path_stays_in_component() {
        let g = MultiGraph::from_edges(7, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 3)]);
        let st = posa_longest_path(&g, SeedStream::new(1, 0), 100);
        assert!(verify_path(&g, &st.path));
        let comp = structure::components(&g);
        assert!(st.path.iter().all(|&v| comp[v] == comp[st.path[0]]));
    }

    #[test]
    fn small_examples() {
        assert!(is_hamiltonian(&MultiGraph::complete(3)).is_hamiltonian());
        assert_eq!(is_hamiltonian(&MultiGraph::path(6)), Hamiltonicity::NotHamiltonian);
        assert_eq!(is_hamiltonian(&MultiGraph::star(5)), Hamiltonicity::NotHamiltonian);
        assert_eq!(is_hamiltonian(&MultiGraph::complete(2)), Hamiltonicity::NotHamiltonian);
    }

    fn petersen() -> MultiGraph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        MultiGraph::from_edges(10, e)
    }

    #[test]
    fn petersen_is_not_hamiltonian() {
        let p = petersen();
        assert_eq!(is_hamiltonian(&p), Hamiltonicity::NotHamiltonian);
        assert!(hamilton_cycle_backtrack(&p).is_none());
        assert!(hamilton_cycle_dp(&p).is_none());
        assert_eq!(max_path_vertices(&p).unwrap(), 10);
    }

    #[test]
    fn dp_and_backtracking_find_cycles() {
        let g = MultiGraph::cycle(9);
        assert!(verify_hamilton_cycle(&g, &hamilton_cycle_dp(&g).unwrap()));
        assert!(verify_hamilton_cycle(&g, &hamilton_cycle_backtrack(&g).unwrap()));
    }

    #[test]
    fn cut_vertex_detection() {
        assert!(has_cut_vertex(&MultiGraph::path(4)));
        assert!(!has_cut_vertex(&MultiGraph::cycle(5)));
        let bowtie = MultiGraph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        assert!(has_cut_vertex(&bowtie));
        assert!(has_cut_vertex(&MultiGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])));
    }

    #[test]
    fn longest_path_examples() {
        assert_eq!(max_path_vertices(&MultiGraph::path(7)).unwrap(), 7);
        assert_eq!(max_path_vertices(&MultiGraph::star(4)).unwrap(), 3);
        assert_eq!(max_path_vertices(&MultiGraph::new(3)).unwrap(), 1);
        assert!(max_path_vertices(&MultiGraph::new(19)).is_err());
    }

    #[test]
    fn booster_examples() {
        let k4 = MultiGraph::cycle(5).with_edge(0, 2);
        // Hamiltonian: every non-edge is a booster
        assert!(hamilton_cycle_dp(&k4).is_some());
        let b = boosters(&k4, BoosterMode::Exact, SeedStream::new(0, 0)).unwrap();
        let non_edges = 10 - k4.simple_edge_count();
        assert_eq!(b.len(), non_edges);

        let p4 = MultiGraph::path(4);
        let b = boosters(&p4, BoosterMode::Exact, SeedStream::new(0, 0)).unwrap();
        assert!(b.contains(&(0, 3)));
        assert!(boosters(&MultiGraph::path(19), BoosterMode::Exact, SeedStream::new(0, 0)).is_err());
    }

    #[test]
    fn completion_trivial_cases() {
        let c = MultiGraph::cycle(6);
        let r = booster_completion(&c, &[], SeedStream::new(3, 0)).unwrap();
        assert!(r.added.is_empty());
        let p = MultiGraph::path(6);
        let r = booster_completion(&p, &[(0, 5)], SeedStream::new(3, 0)).unwrap();
        assert_eq!(r.added, vec![(0, 5)]);
        assert!(verify_hamilton_cycle(&p.with_edge(0, 5), &r.cycle));
    }

    #[test]
    fn completion_reports_failure_with_stuck_graph() {
        let p = MultiGraph::path(6);
        let err = booster_completion(&p, &[(1, 3)], SeedStream::new(3, 0)).unwrap_err();
        assert!(err.stuck.has_edge(0, 1));
        assert_eq!(err.best_path.len(), 6);
    }
}
