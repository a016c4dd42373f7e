//! Method of types: multinomial probabilities of histograms, the Stirling
//! estimate of multinomial coefficients, KL-based bounds on type
//! probabilities, and the distinct-symbol count `‖N‖₀`.
//!
//! Every enumeration here is exact and refuses to run past its guard.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::kappa;
use crate::dist::{enumerate_histograms, DiscreteDistribution, Histogram, TailModel};
use crate::numeric::{hurwitz_zeta, log_factorial, Certified, LN_2PI};

/// Oracle guards: support size and sample size for exhaustive enumeration.
pub const MAX_ORACLE_SUPPORT: usize = 5;
pub const MAX_ORACLE_N: u64 = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TypesError {
    #[error("count at position {index} is zero; only positive parts are allowed")]
    ZeroCount { index: usize },
    #[error("no counts given")]
    EmptyComposition,
    #[error("exact enumeration with support {support} and n = {n} exceeds the oracle limit")]
    OracleScaleExceeded { support: usize, n: u64 },
    #[error("operation needs a finite support")]
    InfiniteSupport,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `ln (n choose n₀, n₁, …)` over the positive counts.
pub fn log_multinomial_coefficient(hist: &Histogram) -> f64 {
    log_factorial(hist.total()) - hist.iter().map(|(_, c)| log_factorial(c)).sum::<f64>()
}

/// `ln Mult_{(Q,n)}(hist)`; `−∞` if the histogram uses a zero-mass symbol.
pub fn multinomial_log_pmf(q: &DiscreteDistribution, hist: &Histogram) -> f64 {
    let mut lp = log_multinomial_coefficient(hist);
    for (j, c) in hist.iter() {
        let m = q.mass(j);
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        lp += c as f64 * m.ln();
    }
    lp
}

/// `H₁(N/n)`
pub fn type_entropy(hist: &Histogram) -> f64 {
    let n = hist.total() as f64;
    hist.iter().map(|(_, c)| {
        let p = c as f64 / n;
        -p * p.ln()
    }).sum::<f64>().max(0.0)
}

/// `D_KL(N/n ‖ Q)` with `0·ln(0/q) = 0` and `+∞` when `q_j = 0 < n_j`.
pub fn type_kl(q: &DiscreteDistribution, hist: &Histogram) -> f64 {
    let n = hist.total() as f64;
    let mut d = 0.0;
    for (j, c) in hist.iter() {
        let m = q.mass(j);
        if m == 0.0 {
            return f64::INFINITY;
        }
        let p = c as f64 / n;
        d += p * (p / m).ln();
    }
    d.max(0.0)
}

/// Stirling estimate of a multinomial coefficient over positive parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultinomialEstimate {
    pub exact: f64,
    /// `n·H₁(n/n) + ½(ln n − Σ ln nⱼ) − ½(k−1)·ln 2π`, the value Stirling's
    /// formula produces.
    pub estimate: f64,
    /// The same with `+½(k−1)·ln 2π`.
    pub estimate_plus_sign: f64,
    /// `exact − estimate`
    pub residual: f64,
    /// `exact − estimate_plus_sign`
    pub residual_plus_sign: f64,
    /// `k/(12n)`
    pub theta_bound: f64,
    /// `1/(12n+1) − Σ 1/(12nⱼ)`: the residual lies strictly above this.
    pub robbins_lower: f64,
    /// `1/(12n) − Σ 1/(12nⱼ+1)`: the residual lies strictly below this.
    pub robbins_upper: f64,
}

impl MultinomialEstimate {
    /// `|residual| ≤ k/(12n)`
    pub fn within_theta_bound(&self) -> bool {
        self.residual.abs() <= self.theta_bound
    }

    pub fn within_robbins_interval(&self) -> bool {
        self.robbins_lower < self.residual && self.residual < self.robbins_upper
    }
}

/// `ln` of the multinomial coefficient for the positive composition `counts`
/// against its Stirling estimate.
pub fn multinomial_coefficient_estimate(counts: &[u64]) -> Result<MultinomialEstimate, TypesError> {
    if counts.is_empty() {
        return Err(TypesError::EmptyComposition);
    }
    if let Some(index) = counts.iter().position(|&c| c == 0) {
        return Err(TypesError::ZeroCount { index });
    }
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let k = counts.len() as f64;
    let exact = log_factorial(n) - counts.iter().map(|&c| log_factorial(c)).sum::<f64>();
    let shannon: f64 = counts.iter().map(|&c| {
        let p = c as f64 / nf;
        -p * p.ln()
    }).sum();
    let sum_ln: f64 = counts.iter().map(|&c| (c as f64).ln()).sum();
    let common = nf * shannon + 0.5 * (nf.ln() - sum_ln);
    let estimate = common - 0.5 * (k - 1.0) * LN_2PI;
    let estimate_plus_sign = common + 0.5 * (k - 1.0) * LN_2PI;
    Ok(MultinomialEstimate {
        exact,
        estimate,
        estimate_plus_sign,
        residual: exact - estimate,
        residual_plus_sign: exact - estimate_plus_sign,
        theta_bound: k / (12.0 * nf),
        robbins_lower: 1.0 / (12.0 * nf + 1.0) - counts.iter().map(|&c| 1.0 / (12.0 * c as f64)).sum::<f64>(),
        robbins_upper: 1.0 / (12.0 * nf) - counts.iter().map(|&c| 1.0 / (12.0 * c as f64 + 1.0)).sum::<f64>(),
    })
}

/// Per-histogram quantities of the method of types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeStats {
    pub histogram: Histogram,
    /// `ln Mult_{(Q,n)}(N)`
    pub log_pmf: f64,
    /// `(1/n)·I_{(Q,n)}(N) = −log_pmf/n`
    pub self_entropy_rate: f64,
    pub kl: f64,
    pub shannon_of_type: f64,
    /// `−(1/n)·ln Qⁿ(z)` for any sequence `z` of this type.
    pub sequence_rate: f64,
}

pub fn type_stats(q: &DiscreteDistribution, hist: &Histogram) -> TypeStats {
    let n = hist.total() as f64;
    let log_pmf = multinomial_log_pmf(q, hist);
    let log_seq: f64 = hist.iter().map(|(j, c)| c as f64 * q.mass(j).ln()).sum();
    TypeStats {
        histogram: hist.clone(),
        log_pmf,
        self_entropy_rate: -log_pmf / n,
        kl: type_kl(q, hist),
        shannon_of_type: type_entropy(hist),
        sequence_rate: -log_seq / n,
    }
}

/// Both sides of the self-entropy inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEntropyBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl SelfEntropyBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// `(1/n)·I_{(Q,n)}(N)` against `KL + ((‖N‖₀−1)/(2n))·ln n + (‖N‖₀/(2n))·ln 2π`.
pub fn self_entropy_upper_bound(q: &DiscreteDistribution, hist: &Histogram) -> SelfEntropyBound {
    let n = hist.total() as f64;
    let k = hist.distinct() as f64;
    let lhs = -multinomial_log_pmf(q, hist) / n;
    let rhs = type_kl(q, hist) + (k - 1.0) / (2.0 * n) * n.ln() + k / (2.0 * n) * LN_2PI;
    SelfEntropyBound { lhs, rhs }
}

/// Histograms over the support of `q` (re-indexed to the original symbols)
/// with their log-probabilities.
pub fn enumerate_types(q: &DiscreteDistribution, n: u64) -> Result<Vec<(Histogram, f64)>, TypesError> {
    let support = finite_support(q)?;
    if support.len() > MAX_ORACLE_SUPPORT || n > MAX_ORACLE_N {
        return Err(TypesError::OracleScaleExceeded { support: support.len(), n });
    }
    let hists = enumerate_histograms(support.len(), n)
        .map_err(|_| TypesError::OracleScaleExceeded { support: support.len(), n })?;
    Ok(hists
        .into_iter()
        .map(|h| {
            let mut dense = vec![0u64; q.masses().len()];
            for (i, c) in h.iter() {
                dense[support[i]] = c;
            }
            let h = Histogram::from_dense(&dense);
            let lp = multinomial_log_pmf(q, &h);
            (h, lp)
        })
        .collect())
}

fn finite_support(q: &DiscreteDistribution) -> Result<Vec<usize>, TypesError> {
    if !q.has_finite_support() {
        return Err(TypesError::InfiniteSupport);
    }
    Ok(q.masses().iter().enumerate().filter(|(_, &m)| m > 0.0).map(|(j, _)| j).collect())
}

/// Probability that the type is more than `ε` away in KL while using exactly
/// `k` symbols, with three candidate upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlTailBound {
    pub exact_prob: f64,
    /// `(n+1)^{k−1}·e^{−nε}`
    pub bound: f64,
    /// `(n−1)^{k−1}·e^{−nε}`
    pub bound_n_minus_one: f64,
    /// `C(m,k)·C(n−1,k−1)·e^{−nε}` with `m = |supp Q|`: the number of types
    /// with exactly `k` symbols times the per-type bound.
    pub bound_type_count: f64,
}

impl KlTailBound {
    pub fn holds(&self) -> bool {
        self.exact_prob <= self.bound * (1.0 + 1e-12)
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (log_factorial(n) - log_factorial(k) - log_factorial(n - k)).exp().round()
}

pub fn kl_tail_bound(q: &DiscreteDistribution, n: u64, k: usize, epsilon: f64) -> Result<KlTailBound, TypesError> {
    if n == 0 || k == 0 {
        return Err(TypesError::InvalidArgument("need n ≥ 1 and k ≥ 1".into()));
    }
    let types = enumerate_types(q, n)?;
    let m = finite_support(q)?.len() as u64;
    let mut exact_prob = 0.0;
    for (h, lp) in &types {
        if h.distinct() == k && type_kl(q, h) > epsilon {
            exact_prob += lp.exp();
        }
    }
    let decay = (-(n as f64) * epsilon).exp();
    let km1 = (k - 1) as i32;
    Ok(KlTailBound {
        exact_prob,
        bound: (n as f64 + 1.0).powi(km1) * decay,
        bound_n_minus_one: (n as f64 - 1.0).powi(km1) * decay,
        bound_type_count: binomial(m, k as u64) * binomial(n - 1, k as u64 - 1) * decay,
    })
}

/// The KL level exceeded with probability at most `δ`, as a function of the
/// number of distinct symbols `k`: `((k−1)·ln(n−1) + ln(1/δ))/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlThreshold {
    pub n: u64,
    pub delta: f64,
}

impl KlThreshold {
    pub fn at(&self, k: usize) -> f64 {
        let n = self.n as f64;
        ((k as f64 - 1.0) * (n - 1.0).ln() - self.delta.ln()) / n
    }
}

pub fn kl_high_prob_bound(n: u64, delta: f64) -> Result<KlThreshold, TypesError> {
    if n < 2 {
        return Err(TypesError::InvalidArgument("the KL threshold needs n ≥ 2".into()));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(TypesError::InvalidArgument(format!("δ = {delta} must lie in (0,1]")));
    }
    Ok(KlThreshold { n, delta })
}

/// Exact probability that the type's KL exceeds the threshold for its `‖N‖₀`.
pub fn kl_threshold_violation_probability(q: &DiscreteDistribution, t: &KlThreshold) -> Result<f64, TypesError> {
    let types = enumerate_types(q, t.n)?;
    Ok(types
        .iter()
        .filter(|(h, _)| type_kl(q, h) > t.at(h.distinct()))
        .map(|(_, lp)| lp.exp())
        .sum())
}

const DISTINCT_TAIL_SWITCH: f64 = 1e-4;
const DISTINCT_MAX_TERMS: usize = 10_000_000;

/// `E‖N‖₀ = Σ_j (1 − (1−q_j)^n)`, with a certified remainder for saturated tails.
pub fn expected_distinct(q: &DiscreteDistribution, n: u64) -> Certified {
    let nf = n as f64;
    let term = |m: f64| if m > 0.0 { -(nf * (-m).ln_1p()).exp_m1() } else { 0.0 };
    let mut value: f64 = q.masses().iter().map(|&m| term(m)).sum();
    let mut error = 4.0 * f64::EPSILON * (q.masses().len() as f64 + 1.0) * value.max(1.0);
    let Some((start, tail)) = q.tail_continuation() else {
        return Certified { value, error };
    };
    let mut j = start;
    while nf * tail.envelope(j) > DISTINCT_TAIL_SWITCH && j - start < DISTINCT_MAX_TERMS {
        value += term(tail.envelope(j));
        j += 1;
    }
    // For n·q ≤ 1e-4: n·q − C(n,2)·q² ≤ 1 − (1−q)^n ≤ n·q.
    let (s1, s2) = match tail {
        TailModel::None => (0.0, 0.0),
        TailModel::Geometric { scale, r } => {
            let rj = r.powf(j as f64);
            (scale * rj / (1.0 - r), scale * scale * rj * rj / (1.0 - r * r))
        }
        TailModel::PowerLaw { scale, gamma } => {
            let a = j as f64 + 1.0;
            let z1 = hurwitz_zeta(gamma, a);
            let z2 = hurwitz_zeta(2.0 * gamma, a);
            error += nf * scale * z1.error;
            (scale * z1.value, scale * scale * z2.value)
        }
    };
    let spread = nf * (nf - 1.0) / 2.0 * s2;
    value += nf * s1 - spread / 2.0;
    error += spread / 2.0 + 4.0 * f64::EPSILON * (j as f64) * value;
    Certified { value, error }
}

/// `n^α·Σ q_j^α`
pub fn expected_distinct_bound(q: &DiscreteDistribution, n: u64, alpha: f64) -> f64 {
    kappa(q, alpha, n)
}

/// `√((n/2)·ln(2/δ))`
pub fn distinct_concentration_radius(n: u64, delta: f64) -> Result<f64, TypesError> {
    if n == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(TypesError::InvalidArgument(format!("need n ≥ 1 and δ ∈ (0,1], got n = {n}, δ = {delta}")));
    }
    Ok((n as f64 / 2.0 * (2.0 / delta).ln()).sqrt())
}

/// `DI·√(ln(1/δ)/(2n))`
pub fn single_hypothesis_radius(n: u64, delta: f64, di: f64) -> Result<f64, TypesError> {
    if n == 0 || !(delta > 0.0 && delta <= 1.0) || !(di >= 0.0) {
        return Err(TypesError::InvalidArgument(format!("need n ≥ 1, δ ∈ (0,1], DI ≥ 0; got {n}, {delta}, {di}")));
    }
    let r = (-delta.ln() / (2.0 * n as f64)).sqrt();
    Ok(if r == 0.0 || di == 0.0 { 0.0 } else { di * r })
}

/// Robbins' sandwich `1/(12n+1) < θ_n < 1/(12n)` for
/// `θ_n = ln n! − [(n+½)·ln n − n + ½·ln 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingBounds {
    pub n: u64,
    pub log_factorial_exact: f64,
    pub residual: f64,
    pub theta_lower: f64,
    pub theta_upper: f64,
    /// Certified lower bounds on `θ_n − 1/(12n+1)` and `1/(12n) − θ_n`.
    pub lower_margin: f64,
    pub upper_margin: f64,
}

impl StirlingBounds {
    pub fn strictly_inside(&self) -> bool {
        self.lower_margin > 0.0 && self.upper_margin > 0.0
    }
}

/// Up to this `n`, `θ_n` is computed from the exact integer factorial.
pub const STIRLING_DIRECT_MAX: u64 = 20;

/// `1/(12n) − θ_n` as an alternating series, returned as (value, bound on the
/// omitted part).
fn stirling_gap(n: f64) -> (f64, f64) {
    // θ_n = 1/(12n) − 1/(360n³) + 1/(1260n⁵) − 1/(1680n⁷) + 1/(1188n⁹) − 691/(360360n¹¹) + …
    let n2 = n * n;
    let n3 = n2 * n;
    let gap = 1.0 / (360.0 * n3) - 1.0 / (1260.0 * n3 * n2) + 1.0 / (1680.0 * n3 * n2 * n2)
        - 1.0 / (1188.0 * n3 * n3 * n3);
    (gap, 691.0 / (360_360.0 * n3 * n3 * n3 * n2))
}

/// The residual `θ_n` by the asymptotic series.
pub fn stirling_residual_series(n: u64) -> Certified {
    let nf = n as f64;
    let (gap, err) = stirling_gap(nf);
    Certified { value: 1.0 / (12.0 * nf) - gap, error: err + 2.0 * f64::EPSILON / (12.0 * nf) }
}

/// The residual `θ_n` from `ln n!` via log-gamma.
pub fn stirling_residual_lgamma(n: u64) -> f64 {
    let nf = n as f64;
    log_factorial(n) - ((nf + 0.5) * nf.ln() - nf + 0.5 * LN_2PI)
}

pub fn stirling_check(n: u64) -> Result<StirlingBounds, TypesError> {
    if n == 0 {
        return Err(TypesError::InvalidArgument("n must be ≥ 1".into()));
    }
    let nf = n as f64;
    let theta_lower = 1.0 / (12.0 * nf + 1.0);
    let theta_upper = 1.0 / (12.0 * nf);
    let lf = log_factorial(n);
    let (residual, lower_margin, upper_margin) = if n <= STIRLING_DIRECT_MAX {
        let r = stirling_residual_lgamma(n);
        let slack = 8.0 * f64::EPSILON * lf.max(1.0);
        (r, r - theta_lower - slack, theta_upper - r - slack)
    } else {
        let (gap, err) = stirling_gap(nf);
        let r = theta_upper - gap;
        // θ_n − 1/(12n+1) = 1/(12n(12n+1)) − gap
        let lower = 1.0 / (12.0 * nf * (12.0 * nf + 1.0)) - gap - err;
        let rel = 8.0 * f64::EPSILON;
        (r, lower - rel * gap.abs(), gap - err - rel * gap.abs())
    };
    Ok(StirlingBounds { n, log_factorial_exact: lf, residual, theta_lower, theta_upper, lower_margin, upper_margin })
}

/// A sub-probability weight on hypotheses, keyed by any ordered hypothesis
/// representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorWeights<H: Ord> {
    weights: BTreeMap<H, f64>,
}

impl<H: Ord + Clone> PriorWeights<H> {
    /// `w(h) = P(A′(Hist_Z) = h)` under `Z ∼ Qⁿ`, by enumeration of every type.
    pub fn from_map<F: Fn(&Histogram) -> H>(q: &DiscreteDistribution, n: u64, map: F) -> Result<Self, TypesError> {
        let mut weights = BTreeMap::new();
        for (h, lp) in enumerate_types(q, n)? {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            *weights.entry(map(&h)).or_insert(0.0) += lp.exp();
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, h: &H) -> f64 {
        self.weights.get(h).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
