//! Brute-force oracles and graph corpora shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use walktrace_core::expander::max_expansion_radius;
use walktrace_core::hamilton;
use walktrace_core::mixing::Distribution;
use walktrace_core::models::StreamRng;
use walktrace_core::{structure, MultiGraph, SeedStream};

pub fn rng(master: u64, run: u64) -> StreamRng {
    SeedStream::new(master, run).rng()
}

/// Simple `G(n, p)` drawn pair by pair, independent of the library sampler.
pub fn random_graph(n: usize, p: f64, rng: &mut StreamRng) -> MultiGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    MultiGraph::from_edges(n, edges)
}

/// Random multigraph with loops and parallel edges.
pub fn random_multigraph(n: usize, m: usize, rng: &mut StreamRng) -> MultiGraph {
    MultiGraph::from_edges(n, (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))))
}

pub fn masks(g: &MultiGraph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).filter(|&w| w != v).fold(0u64, |m, w| m | 1 << w))
        .collect()
}

/// Connectivity of the subgraph induced on `alive`.
pub fn connected_within(adj: &[u64], alive: u64) -> bool {
    if alive == 0 {
        return true;
    }
    let start = alive.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & alive & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == alive
}

/// Vertex connectivity by deleting every vertex subset in order of size.
pub fn brute_kappa(g: &MultiGraph) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    let adj = masks(g);
    let full = (1u64 << n) - 1;
    for s in 0..n - 1 {
        for del in 0..=full {
            if del.count_ones() as usize == s && !connected_within(&adj, full & !del) {
                return s;
            }
        }
    }
    n - 1
}

pub fn brute_perfect_matching(g: &MultiGraph) -> bool {
    fn go(adj: &[u64], free: u64) -> bool {
        if free == 0 {
            return true;
        }
        let v = free.trailing_zeros() as usize;
        let mut cand = adj[v] & free & !(1 << v);
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if go(adj, free & !(1 << v) & !(1 << w)) {
                return true;
            }
        }
        false
    }
    let n = g.n();
    n % 2 == 0 && go(&masks(g), (1u64 << n) - 1)
}

/// `reach[mask]` = ends of paths with vertex set `mask`.
fn path_ends(g: &MultiGraph) -> Vec<u64> {
    let n = g.n();
    let adj = masks(g);
    let mut reach = vec![0u64; 1 << n];
    for v in 0..n {
        reach[1 << v] = 1 << v;
    }
    for mask in 1usize..1 << n {
        let mut ends = reach[mask];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut nxt = adj[v] & !(mask as u64);
            while nxt != 0 {
                let w = nxt.trailing_zeros() as usize;
                nxt &= nxt - 1;
                reach[mask | 1 << w] |= 1 << w;
            }
        }
    }
    reach
}

/// Vertex count of a longest path.
pub fn brute_max_path(g: &MultiGraph) -> usize {
    if g.n() == 0 {
        return 0;
    }
    path_ends(g)
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(m, _)| m.count_ones() as usize)
        .max()
        .unwrap()
}

pub fn brute_hamiltonian(g: &MultiGraph) -> bool {
    let n = g.n();
    if n < 3 {
        return false;
    }
    let adj = masks(g);
    // paths starting at vertex 0
    let mut reach = vec![0u64; 1 << n];
    reach[1] = 1;
    for mask in (1usize..1 << n).filter(|m| m & 1 == 1) {
        let mut ends = reach[mask];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut nxt = adj[v] & !(mask as u64);
            while nxt != 0 {
                let w = nxt.trailing_zeros() as usize;
                nxt &= nxt - 1;
                reach[mask | 1 << w] |= 1 << w;
            }
        }
    }
    reach[(1 << n) - 1] & adj[0] != 0
}

/// `sup_S |mu(S) - nu(S)|` over all vertex subsets.
pub fn brute_tv(mu: &Distribution, nu: &Distribution) -> f64 {
    let n = mu.n();
    (0u32..1 << n)
        .map(|s| {
            (0..n)
                .filter(|&v| s >> v & 1 == 1)
                .map(|v| mu.get(v) - nu.get(v))
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

/// Every `U` with `1 ≤ |U| ≤ r` has `|N(U)| ≥ c|U|`.
pub fn brute_rc_expander(g: &MultiGraph, r: usize, c: f64) -> bool {
    let n = g.n();
    let adj = masks(g);
    (1u64..1 << n).all(|u| {
        let size = u.count_ones() as usize;
        if size > r {
            return true;
        }
        let mut nb = 0u64;
        let mut rest = u;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            nb |= adj[v];
        }
        (nb & !u).count_ones() as f64 >= c * size as f64
    })
}

/// Connected non-Hamiltonian graphs on at most 12 vertices with an exact
/// `(R, 2)` certificate, `R ≥ 1`. Mixes random graphs with unbalanced
/// complete bipartite graphs plus chords on the small side.
pub fn booster_corpus(count: usize, master: u64) -> Vec<(MultiGraph, usize)> {
    let mut out = Vec::new();
    let mut r = rng(master, 0);
    while out.len() < count {
        let g = if r.random_bool(0.5) {
            let n = r.random_range(6..=12);
            random_graph(n, r.random_range(0.25..0.6), &mut r)
        } else {
            let a = r.random_range(2..=5);
            let b = r.random_range(a + 1..=(12 - a).max(a + 1));
            let n = a + b;
            let mut edges = Vec::new();
            for u in 0..a {
                for v in a..n {
                    if r.random_bool(0.85) {
                        edges.push((u, v));
                    }
                }
                for v in u + 1..a {
                    if r.random_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
            MultiGraph::from_edges(n, edges)
        };
        if g.min_simple_degree() < 2 || !structure::is_connected(&g) {
            continue;
        }
        if hamilton::hamilton_cycle_dp(&g).is_some() {
            continue;
        }
        let radius = max_expansion_radius(&g, 2.0, g.n()).unwrap();
        if radius >= 1 {
            out.push((g, radius));
        }
    }
    out
}

/// Graphs on at most 16 vertices with an exact `(R, c)` certificate whose
/// parameters satisfy the connectivity premise for some `k ≥ 1`.
pub fn rc_corpus(count: usize, master: u64) -> Vec<(MultiGraph, usize, f64, usize)> {
    use walktrace_core::expander::rc_connectivity_premise;
    let mut out = Vec::new();
    let mut r = rng(master, 1);
    while out.len() < count {
        let n = r.random_range(4..=16);
        let g = random_graph(n, r.random_range(0.35..0.9), &mut r);
        let k = r.random_range(1..=3);
        let c = k as f64 + [0.0, 0.0, 0.5, 1.0][r.random_range(0..4)];
        let r_needed = ((n + k) as f64 / (2.0 * (c + 1.0))).ceil() as usize;
        let radius = max_expansion_radius(&g, c, r_needed).unwrap();
        if radius >= 1 && rc_connectivity_premise(n, radius, c, k) {
            out.push((g, radius, c, k));
        }
    }
    out
}
