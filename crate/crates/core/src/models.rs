//! Random graph models and reproducible seed streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Generator used throughout the crate.
pub type StreamRng = ChaCha12Rng;

/// A `(master_seed, run_index)` pair. The generator it yields is a pure function
/// of the pair; distinct run indices select distinct ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    pub master_seed: u64,
    pub run_index: u64,
}

impl SeedStream {
    pub fn new(master_seed: u64, run_index: u64) -> Self {
        Self { master_seed, run_index }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.run_index);
        rng
    }

    /// Independent sub-stream for one component of a run (walk, sampler, ...).
    pub fn child(&self, label: u64) -> SeedStream {
        SeedStream {
            master_seed: splitmix64(self.master_seed ^ splitmix64(label.wrapping_add(0x5eed))),
            run_index: self.run_index,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Below this edge probability `G(n, p)` uses geometric skipping.
const SKIP_THRESHOLD: f64 = 0.1;

/// Samples `G(n, p)` as a simple graph.
pub fn sample_gnp(n: usize, p: f64, seed: SeedStream) -> Result<MultiGraph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    if p == 0.0 {
    } else if p == 1.0 {
        return Ok(MultiGraph::complete(n));
    } else if p < SKIP_THRESHOLD {
        // Pairs (w, v) with w < v in order of v; jump over a Geometric(p)
        // number of absent pairs each time.
        let ln_q = (-p).ln_1p();
        let total_pairs = (n as u64) * (n as u64 - 1) / 2;
        let mut v = 1usize;
        let mut w: u64 = 0;
        let mut first = true;
        while v < n {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / ln_q).floor();
            if !skip.is_finite() || skip >= total_pairs as f64 {
                break;
            }
            w += skip as u64 + if first { 0 } else { 1 };
            first = false;
            while v < n && w >= v as u64 {
                w -= v as u64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    } else {
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
    }
    Ok(MultiGraph::from_edges(n, edges))
}

/// Samples `Ĝ(n, m)`: `m` independent uniform draws from the `n²` directed
/// pairs (loops included), orientation forgotten.
pub fn sample_ghat(n: usize, m: u64, seed: SeedStream) -> Result<MultiGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let edges: Vec<(usize, usize)> = (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    Ok(MultiGraph::from_edges(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        let s = SeedStream::new(7, 0);
        assert_eq!(sample_gnp(10, 0.0, s).unwrap(), MultiGraph::new(10));
        assert_eq!(sample_gnp(10, 1.0, s).unwrap(), MultiGraph::complete(10));
        assert!(sample_gnp(10, 1.5, s).is_err());
        assert!(sample_gnp(10, -0.1, s).is_err());
        assert!(sample_gnp(10, f64::NAN, s).is_err());
    }

    #[test]
    fn gnp_is_deterministic_per_stream() {
        for p in [0.02, 0.3] {
            let a = sample_gnp(200, p, SeedStream::new(1, 4)).unwrap();
            let b = sample_gnp(200, p, SeedStream::new(1, 4)).unwrap();
            let c = sample_gnp(200, p, SeedStream::new(1, 5)).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert!(a.is_simple());
        }
    }

    #[test]
    fn gnp_edge_count_within_five_sigma() {
        let n = 1000usize;
        let p = 0.1;
        let pairs = (n * (n - 1) / 2) as f64;
        let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
        let ok = (0..100)
            .filter(|&i| {
                let g = sample_gnp(n, p, SeedStream::new(11, i)).unwrap();
                (g.m_total() as f64 - mean).abs() <= 5.0 * sd
            })
            .count();
        assert!(ok >= 99, "{ok} of 100 within 5 sd");
    }

    #[test]
    fn sparse_gnp_edge_count_matches_binomial() {
        // geometric-skip branch
        let n = 2000usize;
        let p = 0.01;
        let pairs = (n * (n - 1) / 2) as f64;
        let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
        let total: f64 = (0..40)
            .map(|i| sample_gnp(n, p, SeedStream::new(3, i)).unwrap().m_total() as f64)
            .sum();
        let z = (total / 40.0 - mean) / (sd / 40f64.sqrt());
        assert!(z.abs() < 4.0, "z = {z}");
    }

    #[test]
    fn skipping_covers_last_pair() {
        // p just below the threshold on a tiny graph: every pair must be reachable.
        let mut seen = vec![false; 6];
        for i in 0..2000 {
            let g = sample_gnp(4, 0.09, SeedStream::new(5, i)).unwrap();
            for (u, v) in g.simple_edges() {
                let idx = match (u, v) {
                    (0, 1) => 0,
                    (0, 2) => 1,
                    (0, 3) => 2,
                    (1, 2) => 3,
                    (1, 3) => 4,
                    _ => 5,
                };
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn ghat_examples() {
        let s = SeedStream::new(2, 0);
        assert_eq!(sample_ghat(5, 0, s).unwrap(), MultiGraph::new(5));
        let g = sample_ghat(1, 9, s).unwrap();
        assert_eq!(g.loops(0), 9);
        let g = sample_ghat(50, 1234, s).unwrap();
        assert_eq!(g.m_total(), 1234);
    }

    #[test]
    fn ghat_pair_frequency_is_two_over_n_squared() {
        let n = 100usize;
        let m = 100_000u64;
        let g = sample_ghat(n, m, SeedStream::new(9, 0)).unwrap();
        let q = 2.0 / (n * n) as f64;
        let hits = g.mult(3, 17) as f64;
        let se = (m as f64 * q * (1.0 - q)).sqrt();
        assert!((hits - m as f64 * q).abs() <= 3.0 * se, "hits {hits}");
        // Pooled over all pairs for a sharper check.
        let pooled: f64 = g.simple_edges().map(|(u, v)| g.mult(u, v) as f64).sum();
        let pairs = (n * (n - 1) / 2) as f64;
        let expected = m as f64 * q * pairs;
        assert!((pooled - expected).abs() <= 4.0 * expected.sqrt());
    }

    #[test]
    fn child_streams_differ() {
        let s = SeedStream::new(1, 0);
        let a: u64 = s.child(1).rng().random();
        let b: u64 = s.child(2).rng().random();
        let c: u64 = s.child(1).rng().random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
