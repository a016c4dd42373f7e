//! Rényi entropy of every order `α ∈ [0, ∞]`.
//!
//! Saturated tails (where `q_j` equals its geometric or power-law envelope for
//! all `j` past the materialized prefix) are summed in closed form: geometric
//! series directly, power laws through the Hurwitz zeta function. The reported
//! `truncation_error` covers the zeta remainder and floating-point rounding of
//! the head sum, and is zero for finite supports.

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, JointDistribution, Labeling, TailModel};
use crate::numeric::{hurwitz_zeta, hurwitz_zeta_log_moment, log_sum_exp};

/// An order `α ∈ [0, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const ZERO: RenyiOrder = RenyiOrder(0.0);
    pub const SHANNON: RenyiOrder = RenyiOrder(1.0);
    pub const INFINITY: RenyiOrder = RenyiOrder(f64::INFINITY);

    pub fn new(alpha: f64) -> Option<Self> {
        (alpha >= 0.0).then_some(RenyiOrder(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RenyiOrder {
    type Error = String;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        RenyiOrder::new(alpha).ok_or_else(|| format!("Rényi order {alpha} must be ≥ 0"))
    }
}

impl From<RenyiOrder> for f64 {
    fn from(a: RenyiOrder) -> f64 {
        a.0
    }
}

/// Entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub truncation_error: f64,
    pub diverges: bool,
}

impl EntropyValue {
    fn finite(value: f64, truncation_error: f64) -> Self {
        Self { value, truncation_error, diverges: false }
    }

    fn divergent() -> Self {
        Self { value: f64::INFINITY, truncation_error: 0.0, diverges: true }
    }

    fn shifted(self, offset: f64) -> Self {
        if self.diverges {
            self
        } else {
            Self { value: self.value + offset, ..self }
        }
    }
}

/// `ln Σ_j q_j^α` with an absolute error bound, or `None` when the sum diverges.
/// Zero masses are skipped, so `α = 0` counts the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPowerSum {
    pub value: f64,
    pub error: f64,
}

/// `ln Σ_j q_j^α` for finite `α ≥ 0`.
pub fn log_power_sum(q: &DiscreteDistribution, alpha: f64) -> Option<LogPowerSum> {
    log_power_sum_with_prefix(q, alpha, 0)
}

/// As [`log_power_sum`], summing at least `prefix` masses explicitly before the
/// closed-form tail.
pub fn log_power_sum_with_prefix(q: &DiscreteDistribution, alpha: f64, prefix: usize) -> Option<LogPowerSum> {
    assert!(alpha.is_finite() && alpha >= 0.0);
    let head = q.prefix_masses(prefix);
    let terms = head.iter().filter(|&&m| m > 0.0).map(|&m| alpha * m.ln());
    let head_log = log_sum_exp(terms.clone());
    let count = head.len() as f64;
    let rounding = 2.0 * (count + 4.0) * f64::EPSILON;

    let Some((start, tail)) = q.tail_continuation() else {
        return Some(LogPowerSum { value: head_log, error: rounding });
    };
    let start = start.max(head.len());
    let (tail_log, tail_rel_err) = match tail {
        TailModel::None => (f64::NEG_INFINITY, 0.0),
        TailModel::Geometric { scale, r } => {
            if alpha == 0.0 {
                return None;
            }
            // C^α r^{αJ} / (1 − r^α)
            let ln_r = r.ln();
            let v = alpha * scale.ln() + alpha * start as f64 * ln_r - (-(alpha * ln_r).exp_m1()).ln();
            (v, 4.0 * f64::EPSILON)
        }
        TailModel::PowerLaw { scale, gamma } => {
            let s = alpha * gamma;
            if s <= 1.0 {
                return None;
            }
            let z = hurwitz_zeta(s, start as f64 + 1.0);
            (alpha * scale.ln() + z.value.ln(), z.error / z.value)
        }
    };
    let total = crate::numeric::log_add_exp(head_log, tail_log);
    let tail_share = (tail_log - total).exp();
    Some(LogPowerSum { value: total, error: rounding + tail_share * tail_rel_err })
}

/// Rényi entropy `H_α(Q)` in nats.
pub fn renyi_entropy(q: &DiscreteDistribution, alpha: RenyiOrder) -> EntropyValue {
    renyi_entropy_with_prefix(q, alpha, 0)
}

/// Rényi entropy evaluated with at least `prefix` masses summed explicitly.
pub fn renyi_entropy_with_prefix(q: &DiscreteDistribution, alpha: RenyiOrder, prefix: usize) -> EntropyValue {
    let a = alpha.value();
    if a == 1.0 {
        return shannon(q, prefix);
    }
    if a == f64::INFINITY {
        return EntropyValue::finite(-q.max_mass().ln(), 0.0).clamped();
    }
    if a == 0.0 {
        return match q.support_size() {
            Some(k) => EntropyValue::finite((k as f64).ln(), 0.0),
            None => EntropyValue::divergent(),
        };
    }
    match log_power_sum_with_prefix(q, a, prefix) {
        None => EntropyValue::divergent(),
        Some(s) => {
            let err = if q.has_finite_support() { 0.0 } else { s.error * (1.0 + s.value.abs()) / (1.0 - a).abs() };
            EntropyValue::finite(s.value / (1.0 - a), err).clamped()
        }
    }
}

impl EntropyValue {
    // Rounding can push an entropy of a point mass to -1e-17.
    fn clamped(self) -> Self {
        Self { value: self.value.max(0.0), ..self }
    }
}

fn shannon(q: &DiscreteDistribution, prefix: usize) -> EntropyValue {
    let head = q.prefix_masses(prefix);
    let mut h = 0.0;
    for &m in &head {
        if m > 0.0 {
            h -= m * m.ln();
        }
    }
    let Some((start, tail)) = q.tail_continuation() else {
        return EntropyValue::finite(h.max(0.0), 0.0);
    };
    let start = start.max(head.len());
    let rounding = 2.0 * (head.len() as f64 + 4.0) * f64::EPSILON * (h.abs() + 1.0);
    let (tail_h, tail_err) = match tail {
        TailModel::None => (0.0, 0.0),
        TailModel::Geometric { scale, r } => {
            // Σ_{j≥J} C r^j (−ln C − j ln r)
            let j = start as f64;
            let rj = r.powf(j);
            let mass = scale * rj / (1.0 - r);
            let first_moment = scale * rj * (j * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r));
            (-scale.ln() * mass - r.ln() * first_moment, 0.0)
        }
        TailModel::PowerLaw { scale, gamma } => {
            // Σ_{m>J} C m^{-γ} (γ ln m − ln C)
            let a = start as f64 + 1.0;
            let z = hurwitz_zeta(gamma, a);
            let lm = hurwitz_zeta_log_moment(gamma, a);
            let v = scale * (gamma * lm.value - scale.ln() * z.value);
            (v, scale * (gamma * lm.error + scale.ln().abs() * z.error))
        }
    };
    EntropyValue::finite((h + tail_h).max(0.0), rounding + tail_err)
}

/// Entropy of the pair `(X, Y)`: `H_α(X)` for a deterministic labeling and
/// `H_α(X) + ln L` for labels drawn uniformly and independently.
pub fn joint_entropy(joint: &JointDistribution, alpha: RenyiOrder) -> EntropyValue {
    let hx = renyi_entropy(joint.inputs(), alpha);
    match joint.labeling() {
        Labeling::Deterministic { .. } => hx,
        Labeling::UniformIndependent { num_labels } => hx.shifted((*num_labels as f64).ln()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(q: &DiscreteDistribution, a: f64) -> EntropyValue {
        renyi_entropy(q, RenyiOrder::new(a).unwrap())
    }

    fn random_dist(weights: &[f64]) -> DiscreteDistribution {
        let total: f64 = weights.iter().sum();
        DiscreteDistribution::new(weights.iter().map(|w| w / total).collect(), TailModel::None).unwrap()
    }

    #[test]
    fn uniform_four_is_ln_four_for_all_orders() {
        let q = DiscreteDistribution::uniform(4);
        for a in [0.0, 0.3, 1.0, 2.0, 7.5, f64::INFINITY] {
            let v = h(&q, a);
            assert!((v.value - 4f64.ln()).abs() < 1e-12, "α={a}: {}", v.value);
            assert_eq!(v.truncation_error, 0.0);
        }
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let q = DiscreteDistribution::point_mass();
        for a in [0.0, 0.5, 1.0, 3.0, f64::INFINITY] {
            assert_eq!(h(&q, a).value, 0.0);
        }
    }

    #[test]
    fn collision_entropy_example() {
        let q = DiscreteDistribution::new(vec![0.5, 0.25, 0.25], TailModel::None).unwrap();
        // Σq² = 0.375
        assert!((h(&q, 2.0).value - 0.980_829_253_011_726_2).abs() < 1e-14);
    }

    #[test]
    fn zero_masses_do_not_count_toward_support() {
        let q = DiscreteDistribution::new(vec![0.5, 0.0, 0.5], TailModel::None).unwrap();
        assert!((h(&q, 0.0).value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn joint_entropy_follows_label_model() {
        let x = DiscreteDistribution::new(vec![0.5, 0.3, 0.2], TailModel::None).unwrap();
        let det = JointDistribution::deterministic(x.clone(), vec![0, 1, 1], 2).unwrap();
        let a = RenyiOrder::new(0.5).unwrap();
        assert_eq!(joint_entropy(&det, a), renyi_entropy(&x, a));
        assert!((renyi_entropy(&det.to_distribution().unwrap(), a).value - renyi_entropy(&x, a).value).abs() < 1e-14);

        let uni = JointDistribution::uniform_labels(x.clone(), 10).unwrap();
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            let a = RenyiOrder::new(a).unwrap();
            let direct = renyi_entropy(&uni.to_distribution().unwrap(), a).value;
            let via = joint_entropy(&uni, a).value;
            assert!((via - renyi_entropy(&x, a).value - 10f64.ln()).abs() < 1e-14);
            assert!((via - direct).abs() < 1e-12);
        }
        let pm = JointDistribution::uniform_labels(DiscreteDistribution::point_mass(), 2).unwrap();
        assert!((joint_entropy(&pm, RenyiOrder::new(0.7).unwrap()).value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn geometric_tail_closed_form() {
        // q_j = (1−r) r^j: H_α = ln((1−r)^α/(1−r^α))/(1−α); Shannon = −ln(1−r) − r ln r/(1−r)
        let r: f64 = 0.5;
        let q = DiscreteDistribution::geometric(r).unwrap();
        let a = 0.5;
        let exact = ((1.0 - r).powf(a) / (1.0 - r.powf(a))).ln() / (1.0 - a);
        let v = h(&q, a);
        assert!((v.value - exact).abs() < 1e-14);
        assert!(v.truncation_error < 1e-9);
        let shannon_exact = -(1.0 - r).ln() - r * r.ln() / (1.0 - r);
        assert!((h(&q, 1.0).value - shannon_exact).abs() < 1e-14);
        assert!(h(&q, 0.0).diverges);
        assert!((h(&q, f64::INFINITY).value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn power_law_divergence_flag() {
        let q = DiscreteDistribution::zipf(1.5).unwrap();
        for a in [0.1, 0.5, 2.0 / 3.0] {
            let v = h(&q, a);
            assert!(v.diverges && v.value == f64::INFINITY);
        }
        let v = h(&q, 0.8);
        assert!(!v.diverges && v.value.is_finite());
        assert!(v.truncation_error < 1e-9);
    }

    #[test]
    fn power_law_shannon_matches_direct_sum() {
        let gamma = 3.0;
        let q = DiscreteDistribution::zipf(gamma).unwrap();
        let c = q.mass(0);
        let mut direct = 0.0;
        for m in (1..=2_000_000u64).rev() {
            let p = c * (m as f64).powf(-gamma);
            direct -= p * p.ln();
        }
        assert!((h(&q, 1.0).value - direct).abs() < 1e-9);
    }

    #[test]
    fn truncation_certificate_covers_prefix_doubling() {
        let cases = [
            DiscreteDistribution::zipf(2.0).unwrap(),
            DiscreteDistribution::geometric(0.8).unwrap(),
            DiscreteDistribution::zipf(1.8).unwrap(),
            DiscreteDistribution::new(vec![0.4], TailModel::Geometric { scale: 0.6, r: 0.5 }).unwrap(),
        ];
        for q in &cases {
            for a in [0.6, 0.9, 1.0, 1.5, 3.0] {
                let order = RenyiOrder::new(a).unwrap();
                let j = 50;
                let short = renyi_entropy_with_prefix(q, order, j);
                let long = renyi_entropy_with_prefix(q, order, 2 * j);
                if short.diverges {
                    assert!(long.diverges);
                    continue;
                }
                let tol = short.truncation_error.max(long.truncation_error);
                assert!((short.value - long.value).abs() <= tol, "α={a}: {} vs {} tol {tol}", short.value, long.value);
                assert!(tol < 1e-9);
            }
        }
    }

    #[test]
    fn continuity_at_one() {
        let q = random_dist(&[0.4, 0.1, 0.3, 0.05, 0.15]);
        let h1 = h(&q, 1.0).value;
        assert!((h(&q, 1.0 + 1e-6).value - h1).abs() <= 1e-4);
        assert!((h(&q, 1.0 - 1e-6).value - h1).abs() <= 1e-4);
    }

    #[test]
    fn order_serde() {
        let a: RenyiOrder = serde_json::from_str("0.5").unwrap();
        assert_eq!(a.value(), 0.5);
        assert!(serde_json::from_str::<RenyiOrder>("-1.0").is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(weights in prop::collection::vec(0.0f64..1.0, 1..12)) {
            prop_assume!(weights.iter().any(|&w| w > 1e-3));
            let q = random_dist(&weights);
            let h0 = h(&q, 0.0).value;
            let mut prev = f64::INFINITY;
            for i in 0..=60 {
                let a = i as f64 / 10.0;
                let v = h(&q, a).value;
                prop_assert!(v <= prev + 1e-12);
                prop_assert!(v >= 0.0 && v <= h0 + 1e-12);
                prev = v;
            }
            prop_assert!(h(&q, f64::INFINITY).value <= prev + 1e-12);
        }
    }
}
