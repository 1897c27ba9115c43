//! The half-lazy walk as a Markov chain: stationary distribution, exact
//! evolution, total variation distance, conductance and mixing times.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexSet};
use crate::models::SeedStream;
use crate::tail::Neumaier;

/// A probability distribution on `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validates non-negativity and normalisation to `1e-9`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("negative or non-finite weight".into()));
        }
        let s = compensated_sum(weights.iter().copied());
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("weights sum to {s}")));
        }
        Ok(Self { weights })
    }

    pub fn point(n: usize, v: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[v] = 1.0;
        Self { weights }
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, v: usize) -> f64 {
        self.weights[v]
    }

    /// `π_S`.
    pub fn mass(&self, set: &VertexSet) -> f64 {
        compensated_sum(set.iter().map(|v| self.weights[v]))
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn compensated_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    it.for_each(|x| acc.add(x));
    acc.sum()
}

/// `π_v = d(v) / 2|E|` with multigraph degrees.
pub fn stationary_distribution(g: &MultiGraph) -> Result<Distribution> {
    if g.m_total() == 0 {
        return Err(Error::Edgeless);
    }
    let two_m = 2.0 * g.m_total() as f64;
    Ok(Distribution {
        weights: (0..g.n()).map(|v| g.degree(v) as f64 / two_m).collect(),
    })
}

/// Transition operator `p_uv = ½·1[u=v] + ½·mult(u,v)/d(u)`, stored in pull
/// form. A loop counts twice towards staying; an isolated vertex always stays.
#[derive(Debug, Clone)]
pub struct LazyOperator {
    stay: Vec<f64>,
    offsets: Vec<usize>,
    sources: Vec<u32>,
    probs: Vec<f64>,
}

impl LazyOperator {
    pub fn new(g: &MultiGraph) -> Self {
        let n = g.n();
        let stay = (0..n)
            .map(|v| {
                let d = g.degree(v);
                if d == 0 {
                    1.0
                } else {
                    0.5 + 0.5 * (2 * g.loops(v) as u64) as f64 / d as f64
                }
            })
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut sources = Vec::new();
        let mut probs = Vec::new();
        offsets.push(0);
        for v in 0..n {
            for &(u, k) in g.neighbor_mults(v) {
                sources.push(u);
                probs.push(0.5 * k as f64 / g.degree(u as usize) as f64);
            }
            offsets.push(sources.len());
        }
        Self { stay, offsets, sources, probs }
    }

    pub fn n(&self) -> usize {
        self.stay.len()
    }

    /// One step: `out = mu · P`.
    pub fn apply(&self, mu: &[f64], out: &mut [f64]) {
        for v in 0..self.n() {
            let mut acc = Neumaier::default();
            acc.add(self.stay[v] * mu[v]);
            for i in self.offsets[v]..self.offsets[v + 1] {
                acc.add(self.probs[i] * mu[self.sources[i] as usize]);
            }
            out[v] = acc.sum();
        }
    }
}

/// Distribution of the half-lazy walk after `t` steps from `mu0`.
pub fn evolve(g: &MultiGraph, mu0: &Distribution, t: usize) -> Distribution {
    let op = LazyOperator::new(g);
    let mut cur = mu0.weights.clone();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..t {
        op.apply(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Distribution { weights: cur }
}

/// `½ Σ_v |mu_v − nu_v|`.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> f64 {
    tv_slices(&mu.weights, &nu.weights)
}

fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "distributions on different vertex sets");
    0.5 * compensated_sum(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
}

/// `φ(S) = |∂S| / (2 min(vol S, vol S^c))`.
pub fn conductance(g: &MultiGraph, set: &VertexSet) -> Result<f64> {
    let n = g.n();
    if set.is_empty() || set.len() == n {
        return Err(Error::InvalidParameter("conductance needs a proper nonempty subset".into()));
    }
    let vol_s: u64 = set.iter().map(|v| g.degree(v)).sum();
    let vol_total: u64 = (0..n).map(|v| g.degree(v)).sum();
    let denom = vol_s.min(vol_total - vol_s);
    if denom == 0 {
        return Err(Error::InvalidParameter("one side of the cut has zero volume".into()));
    }
    Ok(g.edge_boundary(set) as f64 / (2.0 * denom as f64))
}

/// Minimum of `φ(S)` over sampled cuts (uniform subsets of random size and
/// BFS balls around random vertices). This is an upper bound on `Φ`.
pub fn sampled_phi(g: &MultiGraph, samples: usize, seed: SeedStream) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    let mut rng = seed.rng();
    let mut best = f64::INFINITY;
    for i in 0..samples {
        let set = if i % 2 == 0 {
            let size = rng.random_range(1..n);
            VertexSet::from_iter(n, sample(&mut rng, n, size).into_iter())
        } else {
            let mut s = g.ball(rng.random_range(0..n), rng.random_range(0..4));
            if s.len() == n {
                continue;
            }
            if s.is_empty() {
                s.insert(0);
            }
            s
        };
        if let Ok(phi) = conductance(g, &set) {
            best = best.min(phi);
        }
    }
    Ok(best)
}

/// `(2/Φ²)(ln(1/π_min) + ln(1/ξ))`.
pub fn js_bound(phi: f64, pi_min: f64, xi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::InvalidParameter(format!("conductance {phi} not in (0, 1]")));
    }
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(Error::InvalidParameter(format!("pi_min {pi_min} not in (0, 1]")));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter(format!("xi {xi} not in (0, 1)")));
    }
    Ok(2.0 / (phi * phi) * ((1.0 / pi_min).ln() + (1.0 / xi).ln()))
}

/// `1800 ln(2n/ξ)`.
pub fn reference_mixing_bound(n: usize, xi: f64) -> f64 {
    1800.0 * (2.0 * n as f64 / xi).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartRegime {
    /// Every vertex was used as a start.
    Exact,
    /// A uniform sample of this many starts.
    Sampled(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingReport {
    pub n: usize,
    pub xi: f64,
    /// `max` over starts of the first `t` with `d_TV(P^t(s,·), π) < ξ`;
    /// `None` if some start did not get there within `max_steps`.
    pub tau: Option<usize>,
    pub worst_start: usize,
    pub regime: StartRegime,
    pub pi_min: f64,
    /// `d_TV` never increased by more than `1e-12` along any trajectory.
    pub tv_nonincreasing: bool,
    /// Trajectory of the worst start, `d_TV` at `t = 0, 1, ...`.
    pub worst_trajectory: Vec<f64>,
}

/// Largest `n` for which every start is evolved.
pub const EXACT_START_CAP: usize = 500;
const SAMPLED_STARTS: usize = 32;

/// Worst-start mixing time of the half-lazy walk, by exact evolution.
pub fn empirical_mixing_time(g: &MultiGraph, xi: f64, max_steps: usize, seed: SeedStream) -> Result<MixingReport> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter(format!("xi {xi} not in (0, 1)")));
    }
    let n = g.n();
    let pi = stationary_distribution(g)?;
    let op = LazyOperator::new(g);
    let (starts, regime) = if n <= EXACT_START_CAP {
        ((0..n).collect::<Vec<_>>(), StartRegime::Exact)
    } else {
        let mut rng = seed.rng();
        let mut s = sample(&mut rng, n, SAMPLED_STARTS).into_vec();
        s.sort_unstable();
        (s, StartRegime::Sampled(SAMPLED_STARTS))
    };
    let runs: Vec<(usize, Option<usize>, bool, Vec<f64>)> = starts
        .par_iter()
        .map(|&s| {
            let mut cur = Distribution::point(n, s).weights;
            let mut next = vec![0.0; n];
            let mut traj = vec![tv_slices(&cur, &pi.weights)];
            let mut mono = true;
            let mut hit = None;
            for t in 0..=max_steps {
                let d = traj[t];
                if d < xi {
                    hit = Some(t);
                    break;
                }
                if t == max_steps {
                    break;
                }
                op.apply(&cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
                let d_next = tv_slices(&cur, &pi.weights);
                mono &= d_next <= d + 1e-12;
                traj.push(d_next);
            }
            (s, hit, mono, traj)
        })
        .collect();
    let tv_nonincreasing = runs.iter().all(|r| r.2);
    let worst = runs
        .iter()
        .max_by_key(|r| (r.1.map_or(usize::MAX, |t| t), std::cmp::Reverse(r.0)))
        .expect("at least one start");
    let tau = if runs.iter().all(|r| r.1.is_some()) { worst.1 } else { None };
    Ok(MixingReport {
        n,
        xi,
        tau,
        worst_start: worst.0,
        regime,
        pi_min: pi.min(),
        tv_nonincreasing,
        worst_trajectory: worst.3.clone(),
    })
}
