//! Multigraphs with edge multiplicities and loops.
//!
//! Vertices are indices `0..n` in memory. Every text format written or read by
//! this crate uses the labels `1..=n` instead.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A subset of `0..universe` stored as a bitset with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    universe: usize,
    len: usize,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        Self {
            words: vec![0; universe.div_ceil(64)],
            universe,
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for v in 0..universe {
            s.insert(v);
        }
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(universe: usize, items: I) -> Self {
        let mut s = Self::new(universe);
        for v in items {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.words[v >> 6] & (1u64 << (v & 63)) != 0
    }

    /// Inserts `v`; returns `true` if it was not already present.
    ///
    /// Panics if `v` is outside the universe.
    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        if !self.contains(v) {
            return false;
        }
        self.words[v >> 6] &= !(1u64 << (v & 63));
        self.len -= 1;
        true
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
        self.len = 0;
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut out = Self::new(self.universe);
        for v in 0..self.universe {
            if !self.contains(v) {
                out.insert(v);
            }
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for v in other.iter() {
            out.insert(v);
        }
        out
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Undirected multigraph on `0..n`.
///
/// Adjacency rows hold `(neighbor, multiplicity)` pairs sorted by neighbor and
/// never contain the row's own vertex; loops are counted separately. A loop
/// contributes 2 to the degree of its vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiGraph {
    adj: Vec<Vec<(u32, u32)>>,
    loops: Vec<u32>,
    degree: Vec<u64>,
    m_total: u64,
}

impl fmt::Debug for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiGraph")
            .field("n", &self.n())
            .field("m_total", &self.m_total)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            loops: vec![0; n],
            degree: vec![0; n],
            m_total: 0,
        }
    }

    /// Builds a graph where every item is one edge instance.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        Self::from_multi_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1)))
    }

    /// Builds a graph from `(u, v, multiplicity)` triples; repeated pairs add up.
    pub fn from_multi_edges<I: IntoIterator<Item = (usize, usize, u32)>>(n: usize, edges: I) -> Self {
        let mut g = Self::new(n);
        let mut pairs: Vec<(u32, u32, u32)> = Vec::new();
        for (u, v, k) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if k == 0 {
                continue;
            }
            if u == v {
                g.loops[u] += k;
                g.degree[u] += 2 * k as u64;
                g.m_total += k as u64;
            } else {
                pairs.push((u as u32, v as u32, k));
                pairs.push((v as u32, u as u32, k));
            }
        }
        pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
        for (a, b, k) in pairs {
            let row = &mut g.adj[a as usize];
            match row.last_mut() {
                Some(last) if last.0 == b => last.1 += k,
                _ => row.push((b, k)),
            }
            g.degree[a as usize] += k as u64;
            if a < b {
                g.m_total += k as u64;
            }
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Total edge multiplicity including loops.
    #[inline]
    pub fn m_total(&self) -> u64 {
        self.m_total
    }

    /// Number of distinct non-loop vertex pairs joined by at least one edge.
    pub fn simple_edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn check(&self, v: usize) {
        assert!(v < self.n(), "vertex {v} out of range for n = {}", self.n());
    }

    /// Adds one edge instance between `u` and `v` (a loop when `u == v`).
    /// Returns the multiplicity of the pair after the insertion.
    pub fn add_edge(&mut self, u: usize, v: usize) -> u32 {
        self.add_edge_mult(u, v, 1)
    }

    pub fn add_edge_mult(&mut self, u: usize, v: usize, k: u32) -> u32 {
        self.check(u);
        self.check(v);
        self.m_total += k as u64;
        if u == v {
            self.loops[u] += k;
            self.degree[u] += 2 * k as u64;
            return self.loops[u];
        }
        self.degree[u] += k as u64;
        self.degree[v] += k as u64;
        let m = Self::bump(&mut self.adj[u], v as u32, k);
        Self::bump(&mut self.adj[v], u as u32, k);
        m
    }

    fn bump(row: &mut Vec<(u32, u32)>, v: u32, k: u32) -> u32 {
        match row.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => {
                row[i].1 += k;
                row[i].1
            }
            Err(i) => {
                row.insert(i, (v, k));
                k
            }
        }
    }

    /// Multiplicity of the pair `{u, v}`; for `u == v` this is the loop count.
    pub fn mult(&self, u: usize, v: usize) -> u32 {
        if u == v {
            return self.loops[u];
        }
        let row = &self.adj[u];
        match row.binary_search_by_key(&(v as u32), |&(w, _)| w) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.mult(u, v) > 0
    }

    #[inline]
    pub fn loops(&self, v: usize) -> u32 {
        self.loops[v]
    }

    /// Multigraph degree; loops count twice.
    #[inline]
    pub fn degree(&self, v: usize) -> u64 {
        self.degree[v]
    }

    /// Degree in the simplified graph.
    #[inline]
    pub fn simple_degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Distinct non-loop neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(w, _)| w as usize)
    }

    /// `(neighbor, multiplicity)` pairs of `v`, loops excluded.
    pub fn neighbor_mults(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[v]
    }

    /// Every pair once as `(u, v, mult)` with `u < v`, followed by loops as `(v, v, count)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let pairs = self.adj.iter().enumerate().flat_map(|(u, row)| {
            row.iter()
                .filter(move |&&(v, _)| (v as usize) > u)
                .map(move |&(v, k)| (u, v as usize, k))
        });
        let loops = self
            .loops
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k > 0)
            .map(|(v, &k)| (v, v, k));
        pairs.chain(loops)
    }

    /// Distinct non-loop pairs `(u, v)` with `u < v`.
    pub fn simple_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges().filter(|&(u, v, _)| u != v).map(|(u, v, _)| (u, v))
    }

    pub fn is_simple(&self) -> bool {
        self.loops.iter().all(|&k| k == 0) && self.adj.iter().flatten().all(|&(_, k)| k == 1)
    }

    /// Collapses multi-edges to single edges and drops loops.
    pub fn simplify(&self) -> MultiGraph {
        let adj: Vec<Vec<(u32, u32)>> = self
            .adj
            .iter()
            .map(|row| row.iter().map(|&(v, _)| (v, 1)).collect())
            .collect();
        let degree = adj.iter().map(|r| r.len() as u64).collect();
        let m_total = adj.iter().map(Vec::len).sum::<usize>() as u64 / 2;
        MultiGraph {
            loops: vec![0; adj.len()],
            adj,
            degree,
            m_total,
        }
    }

    /// Graph with the extra edge `{u, v}` if it is not already present.
    pub fn with_edge(&self, u: usize, v: usize) -> MultiGraph {
        let mut g = self.clone();
        if !g.has_edge(u, v) {
            g.add_edge(u, v);
        }
        g
    }

    /// Induced subgraph on the vertices for which `keep` is true, relabelled
    /// in increasing order. Returns the graph and the old label of each new vertex.
    pub fn induced(&self, keep: &VertexSet) -> (MultiGraph, Vec<usize>) {
        let old: Vec<usize> = keep.iter().collect();
        let mut new_of = vec![usize::MAX; self.n()];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let edges = self
            .edges()
            .filter(|&(u, v, _)| keep.contains(u) && keep.contains(v))
            .map(|(u, v, k)| (new_of[u], new_of[v], k));
        (MultiGraph::from_multi_edges(old.len(), edges), old)
    }

    /// `N(U)`: vertices outside `U` with a neighbor in `U`.
    pub fn external_neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for u in set.iter() {
            for w in self.neighbors(u) {
                if !set.contains(w) {
                    out.insert(w);
                }
            }
        }
        out
    }

    /// `N⁺(U) = N(U) ∪ U`.
    pub fn closed_neighborhood(&self, set: &VertexSet) -> VertexSet {
        self.external_neighborhood(set).union(set)
    }

    /// `|∂S|`, counting multiplicities.
    pub fn edge_boundary(&self, set: &VertexSet) -> u64 {
        set.iter()
            .flat_map(|u| self.adj[u].iter())
            .filter(|&&(w, _)| !set.contains(w as usize))
            .map(|&(_, k)| k as u64)
            .sum()
    }

    /// `|E(v, A)|` with multiplicity; a loop at `v` counts once if `v ∈ A`.
    pub fn edges_into(&self, v: usize, set: &VertexSet) -> u64 {
        let pairs: u64 = self.adj[v]
            .iter()
            .filter(|&&(w, _)| set.contains(w as usize))
            .map(|&(_, k)| k as u64)
            .sum();
        pairs + if set.contains(v) { self.loops[v] as u64 } else { 0 }
    }

    /// Number of edges (with multiplicity) with one end in `a` and the other in `b`,
    /// for disjoint `a` and `b`.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> u64 {
        a.iter().map(|u| self.edges_into(u, b)).sum()
    }

    /// Breadth-first distances in the simplified graph; `None` when unreachable.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        self.check(v);
        let mut dist = vec![None; self.n()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distance `d(u, v)`; `None` stands for infinity.
    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        self.distances_from(u)[v]
    }

    /// `B(v, r)`: vertices at distance at most `r` from `v`.
    pub fn ball(&self, v: usize, r: usize) -> VertexSet {
        self.check(v);
        let mut ball = VertexSet::new(self.n());
        ball.insert(v);
        let mut frontier = vec![v];
        for _ in 0..r {
            let mut next = Vec::new();
            for &u in &frontier {
                for w in self.neighbors(u) {
                    if ball.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        ball
    }

    /// `N(v, r) = B(v, r) \ B(v, r - 1)`, with `N(v, 0) = {v}`.
    pub fn sphere(&self, v: usize, r: usize) -> VertexSet {
        let dist = self.distances_from(v);
        VertexSet::from_iter(
            self.n(),
            (0..self.n()).filter(|&u| dist[u] == Some(r)),
        )
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let simple: Vec<usize> = (0..self.n()).map(|v| self.simple_degree(v)).collect();
        DegreeProfile {
            min_simple: simple.iter().copied().min().unwrap_or(0),
            max_simple: simple.iter().copied().max().unwrap_or(0),
            degrees: self.degree.clone(),
            simple_degrees: simple,
        }
    }

    /// `δ(G)`: minimum simple degree.
    pub fn min_simple_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `Δ(G)`: maximum simple degree.
    pub fn max_simple_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest multiplicity over all pairs and loops.
    pub fn max_multiplicity(&self) -> u32 {
        self.edges().map(|(_, _, k)| k).max().unwrap_or(0)
    }

    /// Writes the line format: header `n m`, then `u v mult` per pair and
    /// `v v count` per loop vertex, labels `1..=n`. `m` is the number of edge lines.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let lines: Vec<_> = self.edges().collect();
        writeln!(w, "{} {}", self.n(), lines.len())?;
        for (u, v, k) in lines {
            writeln!(w, "{} {} {}", u + 1, v + 1, k)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the format written by [`MultiGraph::write_text`]. Blank lines and
    /// lines starting with `#` are ignored. Repeated pairs accumulate.
    pub fn read_text<R: BufRead>(r: R) -> Result<MultiGraph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            let parse = |s: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("{s:?}: {e}"),
                })
            };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "expected header `n m`".into(),
                        });
                    }
                    header = Some((parse(fields[0])?, parse(fields[1])?));
                }
                Some((n, _)) => {
                    if fields.len() != 3 {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "expected `u v mult`".into(),
                        });
                    }
                    let (u, v, k) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                    for x in [u, v] {
                        if x == 0 || x > n {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: format!("vertex {x} outside 1..={n}"),
                            });
                        }
                    }
                    let k = u32::try_from(k).map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("multiplicity {k} too large"),
                    })?;
                    edges.push((u - 1, v - 1, k));
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header announces {m} edge lines, found {}", edges.len()),
            });
        }
        Ok(MultiGraph::from_multi_edges(n, edges))
    }
}

/// `δ`, `Δ` on the simplified graph plus per-vertex raw and simple degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub min_simple: usize,
    pub max_simple: usize,
    pub degrees: Vec<u64>,
    pub simple_degrees: Vec<usize>,
}
