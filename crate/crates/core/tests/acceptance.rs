//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::Rng;
use walktrace_core::experiment::{run_experiment, summarize, ExperimentConfig, Summary};
use walktrace_core::hamilton::{self, BoosterMode, ExactBoosterOracle};
use walktrace_core::mixing::{empirical_mixing_time, tv_distance, Distribution};
use walktrace_core::models::sample_gnp;
use walktrace_core::tail::{self, Variant};
use walktrace_core::{structure, SeedStream};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn experiment(settings: &[(&str, &str)]) -> Summary {
    let mut cfg = ExperimentConfig::default();
    for (k, v) in settings {
        cfg.set(k, v).unwrap_or_else(|e| panic!("{k} = {v}: {e}"));
    }
    let records = run_experiment(&cfg).expect("experiment runs");
    summarize(&records).expect("records summarize")
}

fn value(s: &Summary, quantity: &str) -> f64 {
    s.get(quantity).unwrap_or(f64::NAN)
}

fn at_least(s: &Summary, quantity: &str, threshold: f64) -> (bool, String) {
    let v = value(s, quantity);
    (v >= threshold, format!("{quantity} {v:.3} (need >= {threshold})"))
}

fn never(s: &Summary, quantity: &str) -> (bool, String) {
    let v = s.get(quantity).unwrap_or(0.0);
    (v == 0.0, format!("{quantity} {v:.3} (need 0)"))
}

fn combine(parts: &[(bool, String)]) -> Outcome {
    let pass = parts.iter().all(|p| p.0);
    let detail = parts.iter().map(|p| p.1.as_str()).collect::<Vec<_>>().join("; ");
    outcome(pass, detail)
}

fn hamilton_identity() -> Outcome {
    let s = experiment(&[("kind", "hitting"), ("model", "complete(1000)"), ("runs", "200"), ("seed", "1")]);
    combine(&[
        at_least(&s, "tau_h = tau_c + 1", 0.95),
        never(&s, "tau_h <= tau_c"),
        never(&s, "runs with inequality violations"),
    ])
}

fn matching_identity() -> Outcome {
    let s = experiment(&[
        ("kind", "hitting"),
        ("model", "complete(1000)"),
        ("runs", "200"),
        ("seed", "2"),
        ("skip_hamilton", "true"),
    ]);
    combine(&[at_least(&s, "tau_pm = tau_c", 0.95), never(&s, "tau_pm < tau_c")])
}

fn connectivity_identities() -> Outcome {
    let s = experiment(&[
        ("kind", "hitting"),
        ("model", "complete(500)"),
        ("k", "2"),
        ("runs", "100"),
        ("seed", "3"),
        ("skip_hamilton", "true"),
        ("skip_matching", "true"),
    ]);
    let mut parts = Vec::new();
    for k in 1..=2 {
        let (odd, even) = (2 * k - 1, 2 * k);
        parts.push(at_least(&s, &format!("tau_kappa({odd}) = tau_delta({odd}) = tau_c({k})"), 0.9));
        parts.push(at_least(&s, &format!("tau_kappa({even}) = tau_delta({even}) = tau_c({k}) + 1"), 0.9));
    }
    parts.push(never(&s, "runs with inequality violations"));
    combine(&parts)
}

fn cover_time_law() -> Outcome {
    let s = experiment(&[("kind", "cover"), ("model", "complete(10000)"), ("runs", "200"), ("seed", "4")]);
    let ks = value(&s, "ks gumbel (tau_c - n ln n)/n");
    let mut parts = vec![(ks <= 0.15, format!("KS {ks:.3} (need <= 0.15)"))];
    let window: Vec<f64> = [1000, 10_000, 100_000]
        .iter()
        .map(|n| {
            let model = format!("complete({n})");
            let s = experiment(&[("kind", "cover"), ("model", &model), ("runs", "2000"), ("seed", "44")]);
            value(&s, "tau_c in (t_-, t_+)")
        })
        .collect();
    parts.push((
        window[0] < window[1] && window[1] < window[2],
        format!("window fractions {:.4} < {:.4} < {:.4}", window[0], window[1], window[2]),
    ));
    combine(&parts)
}

fn gnp_trace() -> Outcome {
    let s = experiment(&[
        ("kind", "simulate"),
        ("model", "gnp(1000,0.15)"),
        ("epsilon", "0.2"),
        ("target_connectivity", "5"),
        ("runs", "30"),
        ("seed", "5"),
    ]);
    let mut parts = vec![at_least(&s, "trace hamiltonian", 0.9), at_least(&s, "trace 5-connected", 0.9)];
    for q in ["covered", "trace hamiltonicity undecided", "q50 trace min degree"] {
        parts.push((true, format!("{q} {:.3}", value(&s, q))));
    }
    combine(&parts)
}

fn booster_bound() -> Outcome {
    let corpus = booster_corpus(200, 6);
    let mut violations = 0;
    let mut unverified = 0;
    for (g, radius) in &corpus {
        let oracle = ExactBoosterOracle::new(g).unwrap();
        let found = hamilton::boosters(g, BoosterMode::Exact, SeedStream::new(6, 0)).unwrap();
        if (found.len() as f64) < (*radius as f64 + 1.0).powi(2) / 2.0 {
            violations += 1;
        }
        let base = oracle.max_path();
        for &(u, v) in &found {
            let g2 = g.with_edge(u, v);
            if !(brute_hamiltonian(&g2) || brute_max_path(&g2) > base) {
                unverified += 1;
            }
        }
    }
    outcome(
        violations == 0 && unverified == 0,
        format!("{} graphs, {violations} count violations, {unverified} unverified boosters", corpus.len()),
    )
}

fn expander_connectivity() -> Outcome {
    let corpus = rc_corpus(500, 7);
    let violations = corpus.iter().filter(|(g, _, _, k)| structure::vertex_connectivity(g) < *k).count();
    outcome(violations == 0, format!("{} certified graphs, {violations} violations", corpus.len()))
}

fn pipeline_replication() -> Outcome {
    let s = experiment(&[
        ("kind", "pipeline"),
        ("model", "complete(300)"),
        ("k", "1"),
        ("delta0", "0.25"),
        ("runs", "50"),
        ("seed", "8"),
    ]);
    let mut parts = vec![at_least(&s, "pipeline replicated", 0.9)];
    for q in ["gamma_0 expander", "booster completion", "off-pool edges <= n^0.4"] {
        parts.push((true, format!("{q} {:.3}", value(&s, q))));
    }
    combine(&parts)
}

fn multiplicity_audits() -> Outcome {
    let s = experiment(&[
        ("kind", "hitting"),
        ("model", "complete(10000)"),
        ("laziness", "inverse-n"),
        ("runs", "50"),
        ("seed", "9"),
        ("skip_hamilton", "true"),
        ("skip_matching", "true"),
        ("skip_connectivity", "true"),
    ]);
    combine(&[
        at_least(&s, "max multiplicity <= 4", 0.95),
        at_least(&s, "no SMALL vertex on loop or multi-edge", 0.9),
    ])
}

fn mixing() -> Outcome {
    let g = sample_gnp(2000, 0.05, SeedStream::new(10, 0)).unwrap();
    let n = g.n() as f64;
    let bound = 3601.0 * n.ln();
    let rep = empirical_mixing_time(&g, 1.0 / n, bound.ceil() as usize, SeedStream::new(10, 1)).unwrap();
    match rep.tau {
        Some(tau) => outcome(
            tau as f64 <= bound && rep.tv_nonincreasing,
            format!(
                "tau(1/n) = {tau}, bound {bound:.0}, margin {:.0}; d_TV non-increasing {}",
                bound - tau as f64,
                rep.tv_nonincreasing
            ),
        ),
        None => outcome(false, format!("not mixed within {bound:.0} steps")),
    }
}

fn tail_soundness() -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in 1..=30u64 {
        for p in [0.1, 0.3, 0.5] {
            let pmf = tail::binomial_pmf(n as usize, p).unwrap();
            let (le, ge) = tail::exact_tails(&pmf);
            for k in 0..=n {
                let mut variants = vec![
                    Variant::ChernoffLower,
                    Variant::GaussianLower,
                    Variant::ChernoffUpper,
                    Variant::GaussianUpper,
                    Variant::TrivialChoose,
                    Variant::TrivialPower,
                ];
                for c in [0.5, 1.0, 2.0, 3.0] {
                    variants.push(Variant::MgfLower { c });
                    variants.push(Variant::MgfUpper { c });
                }
                for var in variants {
                    if let Some(b) = tail::binomial_tail_bound(n, p, k, var).unwrap() {
                        checked += 1;
                        let exact = if var.is_lower() { le[k as usize] } else { ge[k as usize] };
                        if b < exact * (1.0 - 1e-9) {
                            violations.push(format!("{var:?} n={n} p={p} k={k}"));
                        }
                    }
                }
            }
        }
    }
    let first = violations.first().map(|v| format!(", first {v}")).unwrap_or_default();
    outcome(violations.is_empty(), format!("{checked} bounds checked, {} violations{first}", violations.len()))
}

fn oracle_equivalences() -> Outcome {
    let mut r = rng(12, 0);
    let mut ham_disagree = 0;
    for _ in 0..300 {
        let n = r.random_range(3..=14);
        let g = random_graph(n, r.random_range(0.2..0.8), &mut r);
        let verdict = hamilton::is_hamiltonian(&g);
        let witnessed = match &verdict {
            hamilton::Hamiltonicity::Hamiltonian(c) => hamilton::verify_hamilton_cycle(&g, c),
            _ => true,
        };
        let truth = hamilton::hamilton_cycle_backtrack(&g).is_some();
        ham_disagree += (verdict.is_hamiltonian() != truth || truth != brute_hamiltonian(&g) || !witnessed) as usize;
    }
    let mut worst_tv: f64 = 0.0;
    for _ in 0..300 {
        let n = r.random_range(1..=12);
        let mut draw = || {
            let w: Vec<f64> = (0..n).map(|_| if r.random_bool(0.2) { 0.0 } else { r.random::<f64>() }).collect();
            let s: f64 = w.iter().sum();
            if s == 0.0 {
                Distribution::point(n, 0)
            } else {
                Distribution::new(w.iter().map(|x| x / s).collect()).unwrap()
            }
        };
        let (mu, nu) = (draw(), draw());
        worst_tv = worst_tv.max((tv_distance(&mu, &nu) - brute_tv(&mu, &nu)).abs());
    }
    let mut kappa_disagree = 0;
    for _ in 0..300 {
        let n = r.random_range(1..=12);
        let g = random_graph(n, r.random_range(0.2..0.95), &mut r);
        kappa_disagree += (structure::vertex_connectivity(&g) != brute_kappa(&g)) as usize;
    }
    outcome(
        ham_disagree == 0 && worst_tv <= 1e-12 && kappa_disagree == 0,
        format!(
            "hamiltonicity disagreements {ham_disagree}/300, max |tv - subset sup| {worst_tv:.1e}, connectivity disagreements {kappa_disagree}/300"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("hitting-time identity on complete(1000)", hamilton_identity),
        ("matching identity on complete(1000)", matching_identity),
        ("connectivity identities on complete(500), k = 1, 2", connectivity_identities),
        ("cover-time Gumbel law and window trend", cover_time_law),
        ("trace on gnp(1000, 0.15)", gnp_trace),
        ("booster count bound", booster_bound),
        ("expander premise implies connectivity", expander_connectivity),
        ("pipeline replication on complete(300)", pipeline_replication),
        ("multiplicity and loop audits on complete(10^4)", multiplicity_audits),
        ("mixing on gnp(2000, 0.05)", mixing),
        ("tail-bound soundness", tail_soundness),
        ("oracle equivalences", oracle_equivalences),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let clock = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        failed += !out.pass as usize;
        println!("{status} {id:>2} {name} [{:.1} s]: {}", clock.elapsed().as_secs_f64(), out.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
