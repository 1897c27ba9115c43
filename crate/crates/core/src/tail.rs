//! Large-deviation bounds for binomial and hypergeometric variables, exact
//! tails for comparison, and the cover-time window `t_±`.
//!
//! Bounds are evaluated in log space (`ln_*`); the plain versions exponentiate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `φ(x) = (1+x) ln(1+x) − x` for `x ≥ −1` (value 1 at `x = −1`), `∞` below.
pub fn phi(x: f64) -> f64 {
    if x < -1.0 || x.is_nan() {
        f64::INFINITY
    } else if x == -1.0 {
        1.0
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

fn check_mu_a(mu: f64, a: f64) -> Result<()> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("mean {mu} must be positive")));
    }
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("deviation {a} must be non-negative")));
    }
    Ok(())
}

/// `ln` of the bound `P[X ≤ μ − a] ≤ exp(−μ φ(−a/μ))`.
pub fn ln_chernoff_lower(mu: f64, a: f64) -> Result<f64> {
    check_mu_a(mu, a)?;
    Ok(-mu * phi(-a / mu))
}

/// `ln` of the bound `P[X ≥ μ + a] ≤ exp(−μ φ(a/μ))`.
pub fn ln_chernoff_upper(mu: f64, a: f64) -> Result<f64> {
    check_mu_a(mu, a)?;
    Ok(-mu * phi(a / mu))
}

/// `ln` of `P[X ≤ μ − a] ≤ exp(−a²/(2μ))`.
pub fn ln_gaussian_lower(mu: f64, a: f64) -> Result<f64> {
    check_mu_a(mu, a)?;
    Ok(-a * a / (2.0 * mu))
}

/// `ln` of `P[X ≥ μ + a] ≤ exp(−a²/(2(μ + a/3)))`.
pub fn ln_gaussian_upper(mu: f64, a: f64) -> Result<f64> {
    check_mu_a(mu, a)?;
    Ok(-a * a / (2.0 * (mu + a / 3.0)))
}

/// `ln` of `P[X ≤ αμ] ≤ exp(−μ(1 − e^{−c} − αc))`, `0 < α < 1`, `c > 0`.
pub fn ln_mgf_lower(mu: f64, alpha: f64, c: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} not in (0, 1)")));
    }
    mgf_exponent(mu, alpha, c)
}

/// `ln` of `P[X ≥ βμ] ≤ exp(−μ(1 − e^{−c} − βc))`, `β > 1`, `c > 0`.
/// For `c > 0` the exponent is positive, so this bound never drops below 1.
pub fn ln_mgf_upper(mu: f64, beta: f64, c: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!("beta {beta} must exceed 1")));
    }
    mgf_exponent(mu, beta, c)
}

fn mgf_exponent(mu: f64, coef: f64, c: f64) -> Result<f64> {
    check_mu_a(mu, 0.0)?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    Ok(-mu * (1.0 - (-c).exp() - coef * c))
}

/// `ln C(n, k)`, exact summation for the small side.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// `ln` of `P[X ≥ k] ≤ C(n,k) p^k`.
pub fn ln_trivial_choose(n: u64, p: f64, k: u64) -> Result<f64> {
    check_p(p)?;
    if k == 0 {
        return Ok(0.0);
    }
    Ok(ln_choose(n, k) + k as f64 * p.ln())
}

/// `ln` of `P[X ≥ k] ≤ (enp/k)^k`.
pub fn ln_trivial_power(n: u64, p: f64, k: u64) -> Result<f64> {
    check_p(p)?;
    if k == 0 {
        return Ok(0.0);
    }
    let k = k as f64;
    Ok(k * (std::f64::consts::E * n as f64 * p / k).ln())
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("probability {p} not in [0, 1]")))
    }
}

/// Mean `nK/N` of `Hypergeometric(N, K, n)`, the value the binomial bounds
/// are applied with.
pub fn hypergeometric_mean(big_n: u64, big_k: u64, n: u64) -> Result<f64> {
    if big_k > big_n || n > big_n || big_n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= K, n <= N and N > 0, got N = {big_n}, K = {big_k}, n = {n}"
        )));
    }
    Ok(n as f64 * big_k as f64 / big_n as f64)
}

/// Which bound to evaluate; `Mgf*` carry their `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    ChernoffLower,
    GaussianLower,
    ChernoffUpper,
    GaussianUpper,
    MgfLower { c: f64 },
    MgfUpper { c: f64 },
    TrivialChoose,
    TrivialPower,
}

impl Variant {
    /// True for bounds on `P[X ≤ k]`.
    pub fn is_lower(self) -> bool {
        matches!(
            self,
            Variant::ChernoffLower | Variant::GaussianLower | Variant::MgfLower { .. }
        )
    }
}

/// Bound on `P[X ≤ k]` (lower variants) or `P[X ≥ k]` (upper variants) for
/// `X ~ Bin(n, p)`. `Ok(None)` when `k` lies on the wrong side of the mean
/// for the variant (or `p = 0` leaves no mean to deviate from).
pub fn binomial_tail_bound(n: u64, p: f64, k: u64, variant: Variant) -> Result<Option<f64>> {
    check_p(p)?;
    let mu = n as f64 * p;
    tail_bound_at_mean(mu, n, p, k, variant)
}

/// The same variants for `Hypergeometric(N, K, n)`, evaluated at its mean.
/// The trivial variants are binomial-only and return `Ok(None)`.
pub fn hypergeometric_tail_bound(big_n: u64, big_k: u64, n: u64, k: u64, variant: Variant) -> Result<Option<f64>> {
    let mu = hypergeometric_mean(big_n, big_k, n)?;
    if matches!(variant, Variant::TrivialChoose | Variant::TrivialPower) {
        return Ok(None);
    }
    tail_bound_at_mean(mu, n, 0.0, k, variant)
}

fn tail_bound_at_mean(mu: f64, n: u64, p: f64, k: u64, variant: Variant) -> Result<Option<f64>> {
    let kf = k as f64;
    let ln = match variant {
        Variant::TrivialChoose => Some(ln_trivial_choose(n, p, k)?),
        Variant::TrivialPower => Some(ln_trivial_power(n, p, k)?),
        _ if mu <= 0.0 => None,
        Variant::ChernoffLower if kf <= mu => Some(ln_chernoff_lower(mu, mu - kf)?),
        Variant::GaussianLower if kf <= mu => Some(ln_gaussian_lower(mu, mu - kf)?),
        Variant::ChernoffUpper if kf >= mu => Some(ln_chernoff_upper(mu, kf - mu)?),
        Variant::GaussianUpper if kf >= mu => Some(ln_gaussian_upper(mu, kf - mu)?),
        Variant::MgfLower { c } if kf > 0.0 && kf < mu => Some(ln_mgf_lower(mu, kf / mu, c)?),
        Variant::MgfUpper { c } if kf > mu => Some(ln_mgf_upper(mu, kf / mu, c)?),
        _ => None,
    };
    Ok(ln.map(f64::exp))
}

/// Table of `ln j!` for `j ≤ max`.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut acc = 0.0f64;
        for j in 1..=max {
            acc += (j as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.table[j]
    }

    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        if k > n {
            f64::NEG_INFINITY
        } else {
            self.table[n] - self.table[k] - self.table[n - k]
        }
    }
}

/// Probability mass function of `Bin(n, p)`.
pub fn binomial_pmf(n: usize, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    if p == 0.0 || p == 1.0 {
        let mut v = vec![0.0; n + 1];
        v[if p == 0.0 { 0 } else { n }] = 1.0;
        return Ok(v);
    }
    let odds = p / (1.0 - p);
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n);
    Ok(from_mode(0, n, mode, |j| (n - j) as f64 / (j + 1) as f64 * odds))
}

/// Probability mass function of `Hypergeometric(N, K, n)` on `0..=n`.
pub fn hypergeometric_pmf(big_n: usize, big_k: usize, n: usize) -> Result<Vec<f64>> {
    hypergeometric_mean(big_n as u64, big_k as u64, n as u64)?;
    let lo = n.saturating_sub(big_n - big_k);
    let hi = n.min(big_k);
    let mode = ((((n + 1) * (big_k + 1)) as f64 / (big_n + 2) as f64).floor() as usize).clamp(lo, hi);
    let ratio = |j: usize| {
        ((big_k - j) * (n - j)) as f64 / ((j + 1) * (big_n - big_k + j + 1 - n)) as f64
    };
    let support = from_mode(lo, hi, mode, ratio);
    let mut pmf = vec![0.0; n + 1];
    pmf[lo..=hi].copy_from_slice(&support);
    Ok(pmf)
}

/// Masses on `lo..=hi` from the successive ratios `P(j+1)/P(j)`, grown in both
/// directions from the mode and normalised with a compensated sum.
fn from_mode(lo: usize, hi: usize, mode: usize, ratio: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = vec![0.0; hi - lo + 1];
    w[mode - lo] = 1.0;
    for j in mode..hi {
        w[j + 1 - lo] = w[j - lo] * ratio(j);
    }
    for j in (lo..mode).rev() {
        w[j - lo] = w[j + 1 - lo] / ratio(j);
    }
    let mut acc = Neumaier::default();
    w.iter().for_each(|&x| acc.add(x));
    let total = acc.sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Exact `(P[X ≤ k], P[X ≥ k])` for every `k`, summed from the smaller side
/// with compensated summation.
pub fn exact_tails(pmf: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut le = Vec::with_capacity(pmf.len());
    let mut acc = Neumaier::default();
    for &q in pmf {
        acc.add(q);
        le.push(acc.sum().min(1.0));
    }
    let mut ge = vec![0.0; pmf.len()];
    let mut acc = Neumaier::default();
    for j in (0..pmf.len()).rev() {
        acc.add(pmf[j]);
        ge[j] = acc.sum().min(1.0);
    }
    (le, ge)
}

/// Exact `P[X ≥ k]` for `X ~ Bin(n, p)`.
pub fn exact_tail(n: usize, p: f64, k: usize) -> Result<f64> {
    let pmf = binomial_pmf(n, p)?;
    Ok(if k > n { 0.0 } else { exact_tails(&pmf).1[k] })
}

/// Kahan–Babuška–Neumaier running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `(t_-, t_+)` with `t_± = n(ln n + (k−1) ln ln n ± ln ln ln n)`; needs `n ≥ 16`.
pub fn cover_window(n: u64, k: u64) -> Result<(f64, f64)> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("cover window needs n >= 16, got {n}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let nf = n as f64;
    let l1 = nf.ln();
    let l2 = l1.ln();
    let l3 = l2.ln();
    let centre = l1 + (k - 1) as f64 * l2;
    Ok((nf * (centre - l3), nf * (centre + l3)))
}
