//! The construction chain for the lazy walk on `K_n`: the low-degree set
//! SMALL, the extended trace `Γ_*`, its random sparsification `Γ_0`, the trace
//! audits, and booster completion of `Γ_0` from the odd trace.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expander::{self, Mode};
use crate::graph::{MultiGraph, VertexSet};
use crate::hamilton;
use crate::models::SeedStream;
use crate::tail::cover_window;
use crate::walk::{self, CompleteGraph, HittingRecord, Laziness, Parity, Walk, Walker};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub k: usize,
    pub delta0: f64,
    pub rho: f64,
    /// Sampled sets for the expander audit of `Γ_0`.
    pub expander_samples: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self { k: 1, delta0: 0.25, rho: 0.2, expander_samples: 2000 }
    }
}

impl PipelineParams {
    /// `d_0 = ⌊δ_0 ln n⌋`.
    pub fn d0(&self, n: usize) -> usize {
        (self.delta0 * (n as f64).ln()).floor().max(0.0) as usize
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.delta0 > 0.0) {
            return Err(Error::InvalidParameter(format!("delta0 = {} must be positive", self.delta0)));
        }
        if self.d0(n) == 0 {
            return Err(Error::InvalidParameter(format!(
                "d0 = floor({} ln {n}) = 0 makes SMALL empty",
                self.delta0
            )));
        }
        Ok(())
    }
}

/// Integer horizons `(t_-, t_+)`, rounded down.
pub fn time_marks(n: usize, k: usize) -> Result<(usize, usize)> {
    let (a, b) = cover_window(n as u64, k as u64)?;
    Ok((a.floor() as usize, b.floor() as usize))
}

/// `{v : d(v) < d0}` with multigraph degrees.
pub fn small_set(trace_odd_minus: &MultiGraph, d0: usize) -> VertexSet {
    let n = trace_odd_minus.n();
    VertexSet::from_iter(n, (0..n).filter(|&v| (trace_odd_minus.degree(v) as usize) < d0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// `e_i` with `i` odd and `i ≤ t_-`.
    Odd,
    /// `e_i` with `i ≤ τ_C^k + 1` meeting SMALL, not already odd.
    Added,
}

/// `Γ_*` as a list of step-indexed edges with origin tags.
#[derive(Debug, Clone)]
pub struct ExtendedTrace {
    pub n: usize,
    /// `(i, X_{i-1}, X_i, origin)` for every step in `Γ_*`.
    pub edges: Vec<(usize, usize, usize, Origin)>,
    pub tau_c: usize,
}

impl ExtendedTrace {
    pub fn graph(&self) -> MultiGraph {
        MultiGraph::from_edges(self.n, self.edges.iter().map(|&(_, u, v, _)| (u, v)))
    }

    pub fn odd_graph(&self) -> MultiGraph {
        MultiGraph::from_edges(
            self.n,
            self.edges.iter().filter(|e| e.3 == Origin::Odd).map(|&(_, u, v, _)| (u, v)),
        )
    }

    /// Edge instances tagged [`Origin::Added`].
    pub fn added_instances(&self) -> usize {
        self.edges.iter().filter(|e| e.3 == Origin::Added).count()
    }

    /// `|E(Γ_*) ∖ E(Γ_-^o)|` counted as distinct vertex pairs (loops included).
    pub fn added_pairs(&self) -> usize {
        let key = |u: usize, v: usize| (u.min(v), u.max(v));
        let odd: HashSet<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.3 == Origin::Odd)
            .map(|&(_, u, v, _)| key(u, v))
            .collect();
        let added: HashSet<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.3 == Origin::Added)
            .map(|&(_, u, v, _)| key(u, v))
            .filter(|p| !odd.contains(p))
            .collect();
        added.len()
    }
}

/// `Γ_* = Γ_-^o + {e_i : 1 ≤ i ≤ τ_C^k + 1, e_i ∩ SMALL ≠ ∅}`, where `Γ_-^o`
/// holds the odd steps up to `t_minus`. `None` when the walk does not reach
/// step `τ_C^k + 1`.
pub fn extend_trace(w: &Walk, small: &VertexSet, k: usize, t_minus: usize) -> Option<ExtendedTrace> {
    let tau = walk::k_cover_time(w, k)?;
    if tau + 1 > w.len() {
        return None;
    }
    let mut edges = Vec::new();
    for i in 1..=w.len().min(t_minus.max(tau + 1)) {
        let (u, v) = w.edge(i);
        if u == v && !w.stays_as_loops {
            continue;
        }
        if i % 2 == 1 && i <= t_minus {
            edges.push((i, u, v, Origin::Odd));
        } else if i <= tau + 1 && (small.contains(u) || small.contains(v)) {
            edges.push((i, u, v, Origin::Added));
        }
    }
    Some(ExtendedTrace { n: w.n, edges, tau_c: tau })
}

/// `Γ_0`: every SMALL vertex keeps all incident edges, every other vertex a
/// uniform `d0`-subset of its incident edges; the union is returned as a
/// simple graph. At most `d0 · n` edges.
pub fn sparsify(gamma_star: &MultiGraph, small: &VertexSet, d0: usize, seed: SeedStream) -> Result<MultiGraph> {
    let n = gamma_star.n();
    for v in 0..n {
        if !small.contains(v) && (gamma_star.degree(v) as usize) < d0 {
            return Err(Error::DegreeBelowThreshold {
                vertex: v,
                degree: gamma_star.degree(v) as usize,
                d0,
            });
        }
    }
    // one entry per edge instance; incident lists hold instance ids
    let instances: Vec<(usize, usize)> = gamma_star
        .edges()
        .flat_map(|(u, v, k)| std::iter::repeat_n((u, v), k as usize))
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, &(u, v)) in instances.iter().enumerate() {
        incident[u].push(id);
        if u != v {
            incident[v].push(id);
        }
    }
    let mut rng = seed.rng();
    let mut keep = vec![false; instances.len()];
    for v in 0..n {
        let inc = &incident[v];
        if small.contains(v) || inc.len() <= d0 {
            inc.iter().for_each(|&id| keep[id] = true);
        } else {
            for j in sample(&mut rng, inc.len(), d0) {
                keep[inc[j]] = true;
            }
        }
    }
    let chosen = instances.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
    Ok(MultiGraph::from_edges(n, chosen).simplify())
}

/// Trace statistics at `t_+`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceAudit {
    pub t_plus: usize,
    /// Largest multiplicity (pairs and loops) in `Γ_+`.
    pub max_multiplicity: u32,
    /// SMALL vertices on a loop or on a multi-edge of `Γ_+`.
    pub small_on_loop_or_multi: usize,
    pub small_size: usize,
    /// `min_v ν(v) / ln n` over the first `t_+` steps.
    pub min_nu_over_ln_n: f64,
    pub rho: f64,
    pub nu_meets_rho: bool,
    pub hitting: Option<HittingRecord>,
    pub inequality_violations: Vec<String>,
}

/// Multiplicity, SMALL-incidence and visit audits of a walk on `K_n`.
/// The hitting-time inequalities are included when `hitting` is given.
pub fn trace_audit(w: &Walk, params: &PipelineParams, hitting: Option<HittingRecord>) -> Result<TraceAudit> {
    let n = w.n;
    let (t_minus, t_plus) = time_marks(n, params.k)?;
    let t_plus = t_plus.min(w.len());
    let gamma_plus = walk::trace(w, t_plus, Parity::All);
    let odd_minus = walk::trace(w, t_minus, Parity::Odd);
    let small = small_set(&odd_minus, params.d0(n));
    let small_bad = small
        .iter()
        .filter(|&v| gamma_plus.loops(v) > 0 || gamma_plus.neighbor_mults(v).iter().any(|&(_, k)| k > 1))
        .count();
    let stats = walk::visit_stats(w, t_plus, 1)?;
    let ln_n = (n as f64).ln();
    let min_nu = stats.nu.iter().copied().min().unwrap_or(0) as f64 / ln_n;
    let violations = hitting.as_ref().map(HittingRecord::check_inequalities).unwrap_or_default();
    Ok(TraceAudit {
        t_plus,
        max_multiplicity: gamma_plus.max_multiplicity(),
        small_on_loop_or_multi: small_bad,
        small_size: small.len(),
        min_nu_over_ln_n: min_nu,
        rho: params.rho,
        nu_meets_rho: min_nu >= params.rho,
        hitting,
        inequality_violations: violations,
    })
}

/// Walk of the `1/n`-lazy chain on `K_n` from a uniform start, long enough
/// for `t_+` and for step `τ_C^k + 1`, capped at `10 n ln n`.
pub fn kn_lazy_walk(n: usize, k: usize, seed: SeedStream) -> Result<Walk> {
    let (_, t_plus) = time_marks(n, k)?;
    let kn = CompleteGraph { n };
    let start = seed.child(1).rng().random_range(0..n);
    let mut walker = Walker::new(&kn, start, Laziness::InverseN, seed.child(2))?;
    walker.extend(t_plus);
    let cap = (10.0 * n as f64 * (n as f64).ln()).ceil() as usize;
    while walker.walk().len() < cap {
        match walk::k_cover_time(walker.walk(), k) {
            Some(t) if t < walker.walk().len() => break,
            _ => walker.extend(n),
        }
    }
    Ok(walker.into_walk())
}

/// One run of the whole chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRecord {
    pub n: usize,
    pub k: usize,
    pub d0: usize,
    pub t_minus: usize,
    pub t_plus: usize,
    pub walk_len: usize,
    pub tau_c: Option<usize>,
    pub small_size: usize,
    pub gamma_star_min_degree: usize,
    pub added_instances: usize,
    pub added_pairs: usize,
    pub gamma0_edges: usize,
    pub gamma0_edge_bound_ok: bool,
    pub expander_pass: bool,
    pub expander_witness: Option<Vec<usize>>,
    pub completion_ok: bool,
    pub boosters_added: usize,
    /// `|E(H_i) ∖ E(Γ_-^o)|`, the same for every `i` since boosters come from
    /// `Γ_-^o`.
    pub off_pool_edges: usize,
    pub budget: f64,
    pub budget_ok: bool,
    /// Final `H` is a subgraph of `Γ_{τ_C + 1}`.
    pub h_in_trace: bool,
    pub audit: TraceAudit,
    /// Expander audit, completion, budget and containment all hold.
    pub replicated: bool,
}

pub fn run_pipeline(n: usize, params: &PipelineParams, seed: SeedStream) -> Result<PipelineRecord> {
    params.validate(n)?;
    let k = params.k;
    let d0 = params.d0(n);
    let (t_minus, t_plus) = time_marks(n, k)?;
    let w = kn_lazy_walk(n, k, seed)?;
    let odd_minus = walk::trace(&w, t_minus, Parity::Odd);
    let small = small_set(&odd_minus, d0);
    let audit = trace_audit(&w, params, None)?;
    let mut rec = PipelineRecord {
        n,
        k,
        d0,
        t_minus,
        t_plus,
        walk_len: w.len(),
        tau_c: walk::k_cover_time(&w, k),
        small_size: small.len(),
        gamma_star_min_degree: 0,
        added_instances: 0,
        added_pairs: 0,
        gamma0_edges: 0,
        gamma0_edge_bound_ok: false,
        expander_pass: false,
        expander_witness: None,
        completion_ok: false,
        boosters_added: 0,
        off_pool_edges: 0,
        budget: (n as f64).powf(0.4),
        budget_ok: false,
        h_in_trace: false,
        audit,
        replicated: false,
    };
    let Some(ext) = extend_trace(&w, &small, k, t_minus) else {
        return Ok(rec);
    };
    let gamma_star = ext.graph();
    rec.gamma_star_min_degree = gamma_star.min_simple_degree();
    rec.added_instances = ext.added_instances();
    rec.added_pairs = ext.added_pairs();
    let gamma0 = sparsify(&gamma_star, &small, d0, seed.child(3))?;
    rec.gamma0_edges = gamma0.simple_edge_count();
    rec.gamma0_edge_bound_ok = rec.gamma0_edges <= d0 * n;
    let cert = expander::is_rc_expander(
        &gamma0,
        n / (2 * k + 2),
        (2 * k) as f64,
        Mode::Sampled { samples: params.expander_samples },
        seed.child(4),
    )?;
    rec.expander_pass = cert.pass;
    rec.expander_witness = cert.witness;

    let pool: Vec<(usize, usize)> = odd_minus.simple_edges().collect();
    rec.off_pool_edges = gamma0.simple_edges().filter(|&(u, v)| !odd_minus.has_edge(u, v)).count();
    rec.budget_ok = rec.off_pool_edges as f64 <= rec.budget;
    let tau = ext.tau_c;
    let target = walk::trace(&w, tau + 1, Parity::All);
    let h = match hamilton::booster_completion(&gamma0, &pool, seed.child(5)) {
        Ok(report) => {
            rec.completion_ok = true;
            rec.boosters_added = report.added.len();
            let mut h = gamma0.clone();
            report.added.iter().for_each(|&(u, v)| {
                h.add_edge(u, v);
            });
            h
        }
        Err(failure) => {
            rec.boosters_added = failure.added.len();
            failure.stuck
        }
    };
    rec.h_in_trace = h.simple_edges().all(|(u, v)| target.has_edge(u, v));
    rec.replicated = rec.expander_pass && rec.completion_ok && rec.budget_ok && rec.h_in_trace;
    Ok(rec)
}
