use serde::{Deserialize, Serialize};

use super::{kappa_star, BoundsError, KappaStar, GRID_STEPS};
use crate::dist::DiscreteDistribution;
use crate::entropy::{renyi_entropy, RenyiOrder};

/// Failure probability and normalized gap target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyQuery {
    pub delta: f64,
    pub epsilon: f64,
}

impl SufficiencyQuery {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self, BoundsError> {
        if !(delta > 0.0 && delta < 1.0) || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(BoundsError::InvalidQuery(format!(
                "δ = {delta} and ε = {epsilon} must both lie in (0,1)"
            )));
        }
        Ok(Self { delta, epsilon })
    }
}

fn entropy_below_one(q: &DiscreteDistribution, alpha: f64) -> Result<Option<f64>, BoundsError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(BoundsError::AlphaOutOfRange(alpha));
    }
    let h = renyi_entropy(q, RenyiOrder::new(alpha).expect("α ≥ 0"));
    Ok((!h.diverges).then_some(h.value))
}

/// `ln ν(α, ε)`; `−∞` when the entropy is zero.
pub fn ln_nu(q: &DiscreteDistribution, alpha: f64, epsilon: f64) -> Result<f64, BoundsError> {
    let Some(h) = entropy_below_one(q, alpha)? else {
        return Ok(f64::INFINITY);
    };
    Ok(ln_nu_from_entropy(h, alpha, epsilon))
}

fn ln_nu_from_entropy(h: f64, alpha: f64, epsilon: f64) -> f64 {
    if h == 0.0 {
        return f64::NEG_INFINITY;
    }
    let e2 = epsilon * epsilon;
    let inner = (12.0 / (e2 * (1.0 - alpha))).ln();
    (24f64.ln() + h.ln() + inner.ln() - e2.ln()) / (1.0 - alpha) + h
}

/// `ν(α, ε) = (24·H_α·ln(12/(ε²(1−α)))/ε²)^{1/(1−α)}·exp(H_α)`.
pub fn nu(q: &DiscreteDistribution, alpha: f64, epsilon: f64) -> Result<f64, BoundsError> {
    ln_nu(q, alpha, epsilon).map(f64::exp)
}

/// `ln ν̃(α, δ, ε)`.
pub fn ln_nu_tilde(q: &DiscreteDistribution, alpha: f64, delta: f64, epsilon: f64) -> Result<f64, BoundsError> {
    let Some(h) = entropy_below_one(q, alpha)? else {
        return Ok(f64::INFINITY);
    };
    Ok(ln_nu_tilde_from_entropy(h, alpha, delta, epsilon))
}

fn ln_nu_tilde_from_entropy(h: f64, alpha: f64, delta: f64, epsilon: f64) -> f64 {
    let base = 36f64.ln() + (6.0 * std::f64::consts::PI / delta).ln().ln() - 2.0 * epsilon.ln();
    base / (1.0 - alpha) + h
}

/// `ν̃(α, δ, ε) = (36·ln(6π/δ)/ε²)^{1/(1−α)}·exp(H_α)`.
pub fn nu_tilde(q: &DiscreteDistribution, alpha: f64, delta: f64, epsilon: f64) -> Result<f64, BoundsError> {
    ln_nu_tilde(q, alpha, delta, epsilon).map(f64::exp)
}

/// `ω(δ, ε)`: the entropy-free part of the sufficient sample size.
pub fn omega(delta: f64, epsilon: f64) -> f64 {
    let l = (3.0 / delta).ln();
    let e2 = epsilon * epsilon;
    let first = 324.0 * l / (e2 * e2) * (9.0 * (2.0 * l).sqrt() / e2).ln().powi(2);
    let second = 1.5 / e2 * l;
    first.max(second)
}

/// A sample size that makes the gap bound at most `DI·ε` with probability `1−δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientN {
    /// Smallest integer above the threshold plus one; `+∞` if every order diverges.
    pub n: f64,
    pub alpha: f64,
    pub nu: f64,
    pub nu_tilde: f64,
    pub omega: f64,
}

/// Minimizes `max{ν, ν̃, ω}` over the orders `i/1024`, `i < 1024`.
pub fn sufficient_n(q: &DiscreteDistribution, s: &SufficiencyQuery) -> SufficientN {
    let w = omega(s.delta, s.epsilon);
    let ln_w = w.ln();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for i in 0..GRID_STEPS {
        let alpha = i as f64 / GRID_STEPS as f64;
        let h = renyi_entropy(q, RenyiOrder::new(alpha).expect("α ≥ 0"));
        if h.diverges {
            continue;
        }
        let a = ln_nu_from_entropy(h.value, alpha, s.epsilon);
        let b = ln_nu_tilde_from_entropy(h.value, alpha, s.delta, s.epsilon);
        let m = a.max(b).max(ln_w);
        if best.is_none_or(|(bm, ..)| m < bm) {
            best = Some((m, alpha, a, b));
        }
    }
    match best {
        None => SufficientN { n: f64::INFINITY, alpha: f64::NAN, nu: f64::INFINITY, nu_tilde: f64::INFINITY, omega: w },
        Some((m, alpha, a, b)) => SufficientN { n: m.exp().ceil() + 1.0, alpha, nu: a.exp(), nu_tilde: b.exp(), omega: w },
    }
}

/// `ν` and `ν̃` for `Q′` against `e^C` times those of `Q` at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuComparison {
    pub alpha: f64,
    /// `ln max{ν′, ν̃′}`
    pub ln_lhs: f64,
    /// `C + ln max{ν, ν̃}`
    pub ln_rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeteriorationReport {
    pub kappa_star_prime: KappaStar,
    pub kappa_star: KappaStar,
    /// `exp((1 − α′*)·C)`
    pub factor: f64,
    pub kappa_inequality_holds: bool,
    pub nu_comparisons: Vec<NuComparison>,
    pub nu_inequality_holds: bool,
}

const HYPOTHESIS_GRID: usize = 100;
const HYPOTHESIS_TOL: f64 = 1e-9;
const KAPPA_REL_TOL: f64 = 1e-6;

/// Checks that raising every `H_α`, `α ∈ [0,1]`, by at least `c` raises `κ*` by
/// the factor `exp((1−α′*)c)` and both `ν`, `ν̃` by `e^c`.
pub fn deterioration_check(
    q: &DiscreteDistribution,
    q_prime: &DiscreteDistribution,
    c: f64,
    n: u64,
    s: &SufficiencyQuery,
) -> Result<DeteriorationReport, BoundsError> {
    if !(c >= 0.0) {
        return Err(BoundsError::InvalidQuery(format!("entropy offset {c} must be ≥ 0")));
    }
    if n == 0 {
        return Err(BoundsError::InvalidQuery("n must be at least 1".into()));
    }
    for i in 0..=HYPOTHESIS_GRID {
        let alpha = i as f64 / HYPOTHESIS_GRID as f64;
        let order = RenyiOrder::new(alpha).expect("α ≥ 0");
        let hp = renyi_entropy(q_prime, order);
        let h = renyi_entropy(q, order);
        if hp.diverges {
            continue;
        }
        let rhs = h.value + c;
        if h.diverges || hp.value < rhs - HYPOTHESIS_TOL * rhs.abs().max(1.0) {
            return Err(BoundsError::HypothesisViolated { alpha, lhs: hp.value, rhs });
        }
    }

    let ksp = kappa_star(q_prime, n);
    let ks = kappa_star(q, n);
    let factor = ((1.0 - ksp.alpha) * c).exp();
    let kappa_inequality_holds = ksp.value >= factor * ks.value * (1.0 - KAPPA_REL_TOL);

    let mut nu_comparisons = Vec::new();
    for i in 0..20 {
        let alpha = i as f64 / 20.0;
        let lhs = ln_nu(q_prime, alpha, s.epsilon)?.max(ln_nu_tilde(q_prime, alpha, s.delta, s.epsilon)?);
        let rhs = c + ln_nu(q, alpha, s.epsilon)?.max(ln_nu_tilde(q, alpha, s.delta, s.epsilon)?);
        let holds = lhs == f64::INFINITY || lhs >= rhs - HYPOTHESIS_TOL * rhs.abs().max(1.0);
        nu_comparisons.push(NuComparison { alpha, ln_lhs: lhs, ln_rhs: rhs, holds });
    }
    let nu_inequality_holds = nu_comparisons.iter().all(|c| c.holds);
    Ok(DeteriorationReport {
        kappa_star_prime: ksp,
        kappa_star: ks,
        factor,
        kappa_inequality_holds,
        nu_comparisons,
        nu_inequality_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{gap_bound, BoundQuery};
    use crate::dist::TailModel;

    #[test]
    fn nu_examples() {
        let pm = DiscreteDistribution::point_mass();
        assert_eq!(nu(&pm, 0.3, 0.5).unwrap(), 0.0);
        let u16 = DiscreteDistribution::uniform(16);
        let v = nu(&u16, 0.0, 0.25).unwrap();
        let oracle = 16.0 * 24.0 * 16f64.ln() * (12.0f64 / 0.0625).ln() / 0.0625;
        assert!((v - oracle).abs() < 1e-9 * oracle);
        assert!((v - 8.956e4).abs() < 5.0);
        let half = nu(&u16, 0.5, 0.25).unwrap();
        let h = 16f64.ln();
        let oracle = (24.0 * h * (12.0f64 / (0.0625 * 0.5)).ln() / 0.0625).powi(2) * 16.0;
        assert!((half - oracle).abs() < 1e-9 * oracle);
        assert_eq!(nu(&u16, 1.0, 0.25), Err(BoundsError::AlphaOutOfRange(1.0)));
    }

    #[test]
    fn nu_tilde_examples() {
        let pm = DiscreteDistribution::point_mass();
        let v = nu_tilde(&pm, 0.0, 0.5, 0.5).unwrap();
        assert!((v - 144.0 * (12.0 * std::f64::consts::PI).ln()).abs() < 1e-9);
        assert!((v - 522.6).abs() < 0.1);
        let u = DiscreteDistribution::uniform(7);
        let v = nu_tilde(&u, 0.0, 0.1, 0.3).unwrap();
        assert!((v - 7.0 * 36.0 * (60.0 * std::f64::consts::PI).ln() / 0.09).abs() < 1e-9 * v);
        let mut prev = 0.0;
        for a in [0.5, 0.9, 0.99, 0.999] {
            let v = ln_nu_tilde(&u, a, 0.1, 0.3).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(prev > 1e3);
    }

    #[test]
    fn omega_examples() {
        assert!((omega(0.3, 0.5) - 2.256e5).abs() < 100.0);
        let l3 = 3f64.ln();
        let expect = (324.0 * l3 * (9.0 * (2.0 * l3).sqrt()).ln().powi(2)).max(1.5 * l3);
        assert!((omega(1.0, 1.0) - expect).abs() < 1e-9);
        for (d, e) in [(0.3, 0.5), (0.01, 0.1), (0.9, 0.9)] {
            assert!(omega(d / 2.0, e) >= omega(d, e));
        }
    }

    #[test]
    fn point_mass_sufficient_n_is_omega() {
        let s = SufficiencyQuery::new(0.1, 0.1).unwrap();
        let r = sufficient_n(&DiscreteDistribution::point_mass(), &s);
        assert_eq!(r.n, omega(0.1, 0.1).ceil() + 1.0);
        assert_eq!(r.nu, 0.0);
        assert_eq!(r.alpha, 0.0);
    }

    #[test]
    fn sufficient_n_meets_target_and_is_monotone() {
        let q = DiscreteDistribution::uniform(16);
        let s = SufficiencyQuery::new(0.1, 0.25).unwrap();
        let r = sufficient_n(&q, &s);
        let query = BoundQuery::uniform(r.n as u64, 0.1 / 3.0, 1.0).unwrap();
        assert!(gap_bound(&q, &query).unwrap().bound <= 0.25);
        let tighter = sufficient_n(&q, &SufficiencyQuery::new(0.1, 0.2).unwrap());
        assert!(tighter.n >= r.n);
    }

    #[test]
    fn label_randomization_deteriorates() {
        let q = DiscreteDistribution::new(vec![0.5, 0.3, 0.2], TailModel::None).unwrap();
        let s = SufficiencyQuery::new(0.1, 0.25).unwrap();
        for m in [2usize, 10, 100] {
            let qp = q.product_uniform(m).unwrap();
            for n in [100u64, 10_000] {
                let r = deterioration_check(&q, &qp, (m as f64).ln(), n, &s).unwrap();
                assert!(r.kappa_inequality_holds && r.nu_inequality_holds, "m={m} n={n}: {r:?}");
            }
        }
    }

    #[test]
    fn point_mass_to_uniform() {
        let pm = DiscreteDistribution::point_mass();
        let m = 20;
        let s = SufficiencyQuery::new(0.1, 0.25).unwrap();
        for n in [5u64, 20, 1000] {
            let r = deterioration_check(&pm, &DiscreteDistribution::uniform(m), (m as f64).ln(), n, &s).unwrap();
            assert!((r.kappa_star_prime.value - (n as f64).min(m as f64)).abs() < 1e-9 * m as f64);
            assert!(r.kappa_inequality_holds);
        }
    }

    #[test]
    fn zero_offset_is_trivial_and_violations_are_reported() {
        let q = DiscreteDistribution::new(vec![0.6, 0.4], TailModel::None).unwrap();
        let s = SufficiencyQuery::new(0.1, 0.25).unwrap();
        let r = deterioration_check(&q, &q, 0.0, 50, &s).unwrap();
        assert_eq!(r.factor, 1.0);
        assert!(r.kappa_inequality_holds && r.nu_inequality_holds);
        let err = deterioration_check(&q, &q, 0.5, 50, &s).unwrap_err();
        assert!(matches!(err, BoundsError::HypothesisViolated { .. }));
    }
}
