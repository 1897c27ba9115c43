//! Exact deciders: connectivity, vertex connectivity, perfect matchings.
//!
//! All functions read the simplified graph: multiplicities and loops are ignored.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Connected-component label per vertex, labels assigned in order of discovery.
pub fn components(g: &MultiGraph) -> Vec<usize> {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u) {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// True iff the simplified graph is connected. The one-vertex graph is connected.
pub fn is_connected(g: &MultiGraph) -> bool {
    components(g).iter().all(|&c| c == 0)
}

/// Unit-capacity flow network over the vertex-split graph: vertex `v` becomes
/// `in(v) = 2v -> out(v) = 2v + 1`, each edge `{u, v}` becomes `out(u) -> in(v)`
/// and `out(v) -> in(u)`.
struct SplitNetwork {
    head: Vec<usize>,
    to: Vec<u32>,
    next: Vec<usize>,
    cap0: Vec<u8>,
    cap: Vec<u8>,
}

impl SplitNetwork {
    const NIL: usize = usize::MAX;

    fn new(g: &MultiGraph) -> Self {
        let nodes = 2 * g.n();
        let mut net = SplitNetwork {
            head: vec![Self::NIL; nodes],
            to: Vec::new(),
            next: Vec::new(),
            cap0: Vec::new(),
            cap: Vec::new(),
        };
        for v in 0..g.n() {
            net.arc(2 * v, 2 * v + 1);
        }
        for (u, v) in g.simple_edges() {
            net.arc(2 * u + 1, 2 * v);
            net.arc(2 * v + 1, 2 * u);
        }
        net.cap = net.cap0.clone();
        net
    }

    /// Adds an arc with capacity 1 and its residual twin (index `i ^ 1`).
    fn arc(&mut self, a: usize, b: usize) {
        for (x, y, c) in [(a, b, 1u8), (b, a, 0u8)] {
            self.to.push(y as u32);
            self.cap0.push(c);
            self.next.push(self.head[x]);
            self.head[x] = self.to.len() - 1;
        }
    }

    /// Number of internally vertex-disjoint `s`–`t` paths, stopping at `limit`.
    fn local_connectivity(&mut self, s: usize, t: usize, limit: usize) -> usize {
        self.cap.copy_from_slice(&self.cap0);
        let (src, sink) = (2 * s + 1, 2 * t);
        let nodes = self.head.len();
        let mut pred = vec![Self::NIL; nodes];
        let mut flow = 0;
        let mut queue = VecDeque::new();
        while flow < limit {
            pred.iter_mut().for_each(|p| *p = Self::NIL);
            queue.clear();
            queue.push_back(src);
            let mut seen_sink = false;
            'bfs: while let Some(x) = queue.pop_front() {
                let mut e = self.head[x];
                while e != Self::NIL {
                    let y = self.to[e] as usize;
                    if self.cap[e] > 0 && pred[y] == Self::NIL && y != src {
                        pred[y] = e;
                        if y == sink {
                            seen_sink = true;
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                    e = self.next[e];
                }
            }
            if !seen_sink {
                break;
            }
            let mut y = sink;
            while y != src {
                let e = pred[y];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                y = self.to[e ^ 1] as usize;
            }
            flow += 1;
        }
        flow
    }
}

/// Vertex-pair queries that together determine `κ(G)`: with `v` of minimum
/// degree, every non-neighbor `u` of `v` gives the pair `(v, u)` and every
/// non-adjacent pair of neighbors of `v` gives a pair.
fn separating_pairs(g: &MultiGraph) -> Vec<(usize, usize)> {
    let n = g.n();
    let v = (0..n).min_by_key(|&v| g.simple_degree(v)).expect("non-empty graph");
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .filter(|&u| u != v && !g.has_edge(u, v))
        .map(|u| (v, u))
        .collect();
    let nb: Vec<usize> = g.neighbors(v).collect();
    for (i, &x) in nb.iter().enumerate() {
        for &y in &nb[i + 1..] {
            if !g.has_edge(x, y) {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

/// Exact vertex connectivity `κ(G)` of the simplified graph, with `κ(K_n) = n - 1`.
pub fn vertex_connectivity(g: &MultiGraph) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    if !is_connected(g) {
        return 0;
    }
    let mut kappa = g.min_simple_degree();
    let pairs = separating_pairs(g);
    if pairs.is_empty() {
        return n - 1;
    }
    let mut net = SplitNetwork::new(g);
    for (s, t) in pairs {
        kappa = kappa.min(net.local_connectivity(s, t, kappa));
        if kappa == 0 {
            break;
        }
    }
    kappa
}

/// `κ(G) ≥ k`, stopping each flow after `k` augmenting paths.
pub fn is_k_connected(g: &MultiGraph, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    let n = g.n();
    if n <= k || g.min_simple_degree() < k {
        return false;
    }
    if k == 1 {
        return is_connected(g);
    }
    let mut net = SplitNetwork::new(g);
    separating_pairs(g)
        .into_iter()
        .all(|(s, t)| net.local_connectivity(s, t, k) >= k)
}

/// Internally vertex-disjoint paths between non-adjacent `s` and `t`, up to `limit`.
pub fn local_connectivity(g: &MultiGraph, s: usize, t: usize, limit: usize) -> Result<usize> {
    if s == t || g.has_edge(s, t) {
        return Err(Error::InvalidParameter(format!(
            "local connectivity needs distinct non-adjacent vertices, got {s} and {t}"
        )));
    }
    Ok(SplitNetwork::new(g).local_connectivity(s, t, limit))
}

/// Maximum matching by Edmonds' blossom contraction, as a mate array.
pub fn maximum_matching(g: &MultiGraph) -> Vec<Option<usize>> {
    maximum_matching_from(g, greedy_matching(g))
}

fn greedy_matching(g: &MultiGraph) -> Vec<Option<usize>> {
    let n = g.n();
    let mut mate = vec![None; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| g.simple_degree(v));
    for v in order {
        if mate[v].is_some() {
            continue;
        }
        if let Some(w) = g
            .neighbors(v)
            .filter(|&w| mate[w].is_none())
            .min_by_key(|&w| g.simple_degree(w))
        {
            mate[v] = Some(w);
            mate[w] = Some(v);
        }
    }
    mate
}

/// Grows `initial` (which must be a valid matching of `g`) to a maximum matching.
pub fn maximum_matching_from(g: &MultiGraph, initial: Vec<Option<usize>>) -> Vec<Option<usize>> {
    let n = g.n();
    assert_eq!(initial.len(), n);
    let mut b = Blossom {
        g,
        mate: initial,
        parent: vec![None; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    for root in 0..n {
        if b.mate[root].is_none() {
            if let Some(end) = b.find_augmenting_path(root) {
                b.augment(end);
            }
        }
    }
    b.mate
}

struct Blossom<'a> {
    g: &'a MultiGraph,
    mate: Vec<Option<usize>>,
    parent: Vec<Option<usize>>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.g.n()];
        loop {
            a = self.base[a];
            seen[a] = true;
            match self.mate[a] {
                Some(m) => a = self.parent[m].expect("matched vertex on tree path has parent"),
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            let m = self.mate[b].expect("path from b reaches the root");
            b = self.parent[m].expect("tree parent");
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = self.mate[v].expect("odd vertex inside blossom is matched");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("tree parent");
        }
    }

    fn find_augmenting_path(&mut self, root: usize) -> Option<usize> {
        let n = self.g.n();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = None);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for to in self.g.neighbors(v) {
                if self.base[v] == self.base[to] || self.mate[v] == Some(to) {
                    continue;
                }
                let to_is_even = to == root
                    || self.mate[to].is_some_and(|m| self.parent[m].is_some());
                if to_is_even {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.parent[to] = Some(v);
                    match self.mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.used[m] = true;
                            self.queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        loop {
            let pv = self.parent[v].expect("augmenting path parent");
            let ppv = self.mate[pv];
            self.mate[v] = Some(pv);
            self.mate[pv] = Some(v);
            match ppv {
                Some(next) => v = next,
                None => break,
            }
        }
    }
}

/// Matched pairs `(u, v)` with `u < v` from a mate array.
pub fn matching_pairs(mate: &[Option<usize>]) -> Vec<(usize, usize)> {
    mate.iter()
        .enumerate()
        .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
        .collect()
}

/// A perfect matching of the simplified graph, if one exists.
pub fn perfect_matching(g: &MultiGraph) -> Option<Vec<(usize, usize)>> {
    if g.n() % 2 == 1 {
        return None;
    }
    let mate = maximum_matching(g);
    mate.iter().all(Option::is_some).then(|| matching_pairs(&mate))
}

pub fn has_perfect_matching(g: &MultiGraph) -> bool {
    perfect_matching(g).is_some()
}

/// Checks that `pairs` are edges of `g`, pairwise disjoint, and cover every vertex.
pub fn verify_perfect_matching(g: &MultiGraph, pairs: &[(usize, usize)]) -> bool {
    let mut covered = vec![false; g.n()];
    for &(u, v) in pairs {
        if u >= g.n() || v >= g.n() || !g.has_edge(u, v) || covered[u] || covered[v] {
            return false;
        }
        covered[u] = true;
        covered[v] = true;
    }
    covered.into_iter().all(|c| c)
}

/// Every second edge of a Hamilton path, starting from the last edge.
pub fn matching_from_hamilton_path(g: &MultiGraph, path: &[usize]) -> Result<Vec<(usize, usize)>> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n = {n} is odd")));
    }
    if path.len() != n {
        return Err(Error::NotHamiltonPath(format!(
            "path has {} vertices, graph has {n}",
            path.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in path {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::NotHamiltonPath(format!("vertex {v} repeated or out of range")));
        }
    }
    if let Some(w) = path.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
        return Err(Error::NotHamiltonPath(format!("{} and {} are not adjacent", w[0], w[1])));
    }
    Ok((0..n / 2)
        .map(|i| {
            let j = n - 2 - 2 * i;
            (path[j], path[j + 1])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&MultiGraph::new(1)));
        assert!(!is_connected(&MultiGraph::from_edges(4, [(0, 1), (2, 3)])));
        assert!(is_connected(&MultiGraph::path(6)));
    }

    #[test]
    fn kappa_examples() {
        for n in 2..8 {
            assert_eq!(vertex_connectivity(&MultiGraph::complete(n)), n - 1);
            assert_eq!(vertex_connectivity(&MultiGraph::path(n)), 1);
        }
        for n in 4..9 {
            assert_eq!(vertex_connectivity(&MultiGraph::cycle(n)), 2);
        }
        assert_eq!(vertex_connectivity(&MultiGraph::new(3)), 0);
        assert_eq!(vertex_connectivity(&MultiGraph::star(4)), 1);
    }

    #[test]
    fn k_connected_matches_kappa_on_small_graphs() {
        let k33 = MultiGraph::from_edges(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b))));
        assert_eq!(vertex_connectivity(&k33), 3);
        assert!(is_k_connected(&k33, 3));
        assert!(!is_k_connected(&k33, 4));
        assert!(is_k_connected(&MultiGraph::complete(5), 4));
        assert!(!is_k_connected(&MultiGraph::complete(5), 5));
    }

    #[test]
    fn local_connectivity_rejects_adjacent() {
        let g = MultiGraph::cycle(5);
        assert!(local_connectivity(&g, 0, 1, 5).is_err());
        assert_eq!(local_connectivity(&g, 0, 2, 5).unwrap(), 2);
    }

    #[test]
    fn matching_examples() {
        assert!(has_perfect_matching(&MultiGraph::cycle(6)));
        assert!(!has_perfect_matching(&MultiGraph::cycle(5)));
        assert!(!has_perfect_matching(&MultiGraph::star(3)));
        // two triangles joined by an edge: needs a blossom
        let g = MultiGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]);
        let m = perfect_matching(&g).unwrap();
        assert!(verify_perfect_matching(&g, &m));
    }

    #[test]
    fn warm_start_reaches_same_size() {
        let g = MultiGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let mut init = vec![None; 6];
        init[1] = Some(2);
        init[2] = Some(1);
        init[3] = Some(4);
        init[4] = Some(3);
        let mate = maximum_matching_from(&g, init);
        assert_eq!(matching_pairs(&mate).len(), 3);
    }

    #[test]
    fn matching_from_path_examples() {
        let p4 = MultiGraph::path(4);
        assert_eq!(
            matching_from_hamilton_path(&p4, &[0, 1, 2, 3]).unwrap(),
            vec![(2, 3), (0, 1)]
        );
        let p2 = MultiGraph::path(2);
        assert_eq!(matching_from_hamilton_path(&p2, &[0, 1]).unwrap(), vec![(0, 1)]);
        assert!(matching_from_hamilton_path(&MultiGraph::path(3), &[0, 1, 2]).is_err());
        assert!(matching_from_hamilton_path(&p4, &[0, 2, 1, 3]).is_err());
        assert!(matching_from_hamilton_path(&p4, &[0, 1, 1, 3]).is_err());
    }
}
