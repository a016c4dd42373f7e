//! Discrete distributions on countable spaces, sampling, histograms and the
//! exhaustive histogram enumeration used as an oracle by the other modules.
//!
//! Symbols are indices `j ∈ {0, 1, 2, …}`. A distribution is an explicit
//! prefix of masses plus an optional tail envelope (`scale·r^j` or
//! `scale·(j+1)^(-γ)`). Mass missing from the prefix is placed along the
//! envelope starting right after the prefix:
//!
//! * if the missing mass equals the whole envelope tail (within 1e-12) the tail
//!   *is* the envelope and the support is infinite;
//! * if it is smaller, it is placed greedily, each index taking
//!   `min(envelope(j), remaining)`, which ends after finitely many indices;
//! * if it is larger the envelope cannot hold it and construction fails.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::hurwitz_zeta;
use crate::rng;

const NORMALIZATION_TOL: f64 = 1e-12;
const ENVELOPE_REL_TOL: f64 = 1e-12;
const MAX_TAIL_FILL: usize = 10_000_000;

/// Enumeration guard for [`enumerate_histograms`].
pub const MAX_ENUM_ALPHABET: usize = 6;
pub const MAX_ENUM_COUNT: u64 = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("mass at index {index} is negative ({mass})")]
    NegativeMass { index: usize, mass: f64 },
    #[error("mass at index {index} is not finite")]
    NonFiniteMass { index: usize },
    #[error("explicit masses sum to {sum}, which exceeds 1")]
    MassExceedsOne { sum: f64 },
    #[error("masses sum to {sum} with no tail to hold the remainder")]
    NotNormalized { sum: f64 },
    #[error("tail inconsistent with masses: {0}")]
    TailInconsistent(String),
    #[error("invalid tail parameters: {0}")]
    InvalidTail(String),
    #[error("enumeration over alphabet {k} with total {n} exceeds the oracle limit")]
    OracleScaleExceeded { k: usize, n: u64 },
    #[error("operation needs a finite support")]
    InfiniteSupport,
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
}

/// Parametric envelope for masses beyond the explicit prefix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// Finite support: the explicit masses are everything.
    #[default]
    None,
    /// `q_j ≤ C·r^j`
    Geometric {
        #[serde(rename = "C")]
        scale: f64,
        r: f64,
    },
    /// `q_j ≤ C·(j+1)^(-γ)`
    PowerLaw {
        #[serde(rename = "C")]
        scale: f64,
        gamma: f64,
    },
}

impl TailModel {
    fn validate(&self) -> Result<(), DistError> {
        match *self {
            TailModel::None => Ok(()),
            TailModel::Geometric { scale, r } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(DistError::InvalidTail(format!("geometric scale {scale} must be > 0")));
                }
                if !(r > 0.0 && r < 1.0) {
                    return Err(DistError::InvalidTail(format!("geometric ratio {r} must lie in (0,1)")));
                }
                Ok(())
            }
            TailModel::PowerLaw { scale, gamma } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(DistError::InvalidTail(format!("power-law scale {scale} must be > 0")));
                }
                if !(gamma > 1.0 && gamma.is_finite()) {
                    return Err(DistError::InvalidTail(format!("power-law exponent {gamma} must be > 1")));
                }
                Ok(())
            }
        }
    }

    /// Envelope value at index `j` (0 for a finite support).
    pub fn envelope(&self, j: usize) -> f64 {
        match *self {
            TailModel::None => 0.0,
            TailModel::Geometric { scale, r } => scale * r.powf(j as f64),
            TailModel::PowerLaw { scale, gamma } => scale * (j as f64 + 1.0).powf(-gamma),
        }
    }

    /// Σ_{j ≥ start} envelope(j).
    pub fn envelope_sum_from(&self, start: usize) -> f64 {
        match *self {
            TailModel::None => 0.0,
            TailModel::Geometric { scale, r } => scale * r.powf(start as f64) / (1.0 - r),
            TailModel::PowerLaw { scale, gamma } => scale * hurwitz_zeta(gamma, start as f64 + 1.0).value,
        }
    }
}

/// JSON literal form: `{"masses": [...], "tail": {"kind": "geometric", "C": .., "r": ..}}`.
/// Tail kinds are `none`, `geometric` (`C`, `r`) and `power_law` (`C`, `gamma`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionLiteral {
    pub masses: Vec<f64>,
    #[serde(default)]
    pub tail: TailModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    /// Explicit prefix followed by any greedily placed tail mass.
    masses: Vec<f64>,
    explicit_len: usize,
    tail: TailModel,
    /// When set, `q_j = envelope(j)` for every `j ≥ masses.len()`.
    saturated: bool,
}

impl DiscreteDistribution {
    pub fn new(masses: Vec<f64>, tail: TailModel) -> Result<Self, DistError> {
        tail.validate()?;
        for (index, &mass) in masses.iter().enumerate() {
            if !mass.is_finite() {
                return Err(DistError::NonFiniteMass { index });
            }
            if mass < 0.0 {
                return Err(DistError::NegativeMass { index, mass });
            }
        }
        let sum: f64 = masses.iter().sum();
        if sum > 1.0 + NORMALIZATION_TOL {
            return Err(DistError::MassExceedsOne { sum });
        }
        let explicit_len = masses.len();

        if tail == TailModel::None {
            if sum < 1.0 - NORMALIZATION_TOL {
                return Err(DistError::NotNormalized { sum });
            }
            return Ok(Self { masses, explicit_len, tail, saturated: false });
        }

        // The envelope must hold in the best numbering, i.e. with the prefix
        // sorted in descending order.
        let mut sorted = masses.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (j, &m) in sorted.iter().enumerate() {
            let env = tail.envelope(j);
            if m > env * (1.0 + ENVELOPE_REL_TOL) {
                return Err(DistError::TailInconsistent(format!(
                    "mass {m} at rank {j} exceeds envelope {env}"
                )));
            }
        }

        let remaining = 1.0 - sum;
        let mut dist = Self { masses, explicit_len, tail, saturated: false };
        if remaining <= NORMALIZATION_TOL {
            return Ok(dist);
        }
        let capacity = tail.envelope_sum_from(explicit_len);
        if (remaining - capacity).abs() <= NORMALIZATION_TOL {
            dist.saturated = true;
            return Ok(dist);
        }
        if remaining > capacity {
            return Err(DistError::TailInconsistent(format!(
                "missing mass {remaining} exceeds envelope tail capacity {capacity}"
            )));
        }
        let mut left = remaining;
        let mut j = explicit_len;
        while left > 0.0 {
            if dist.masses.len() - explicit_len >= MAX_TAIL_FILL {
                return Err(DistError::TailInconsistent(
                    "tail mass too spread out to materialize".into(),
                ));
            }
            let take = tail.envelope(j).min(left);
            dist.masses.push(take);
            left -= take;
            j += 1;
        }
        Ok(dist)
    }

    pub fn from_literal(lit: &DistributionLiteral) -> Result<Self, DistError> {
        Self::new(lit.masses.clone(), lit.tail)
    }

    pub fn to_literal(&self) -> DistributionLiteral {
        DistributionLiteral { masses: self.masses[..self.explicit_len].to_vec(), tail: self.tail }
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1, "uniform distribution needs k ≥ 1");
        Self::new(vec![1.0 / k as f64; k], TailModel::None).expect("uniform masses are valid")
    }

    pub fn point_mass() -> Self {
        Self::new(vec![1.0], TailModel::None).expect("point mass is valid")
    }

    /// Zipf law over `support` symbols: `q_j ∝ (j+1)^(-exponent)`.
    pub fn zipf_truncated(exponent: f64, support: usize) -> Self {
        assert!(support >= 1);
        let weights: Vec<f64> = (0..support).map(|j| (j as f64 + 1.0).powf(-exponent)).collect();
        let total: f64 = weights.iter().sum();
        Self::new(weights.into_iter().map(|w| w / total).collect(), TailModel::None)
            .expect("normalized weights are valid")
    }

    /// Infinite Zipf law `q_j = (j+1)^(-γ)/ζ(γ)`, γ > 1.
    pub fn zipf(exponent: f64) -> Result<Self, DistError> {
        if !(exponent > 1.0) {
            return Err(DistError::InvalidTail(format!("Zipf exponent {exponent} must be > 1")));
        }
        let scale = 1.0 / hurwitz_zeta(exponent, 1.0).value;
        Self::new(Vec::new(), TailModel::PowerLaw { scale, gamma: exponent })
    }

    /// Geometric law `q_j = (1-r)·r^j`.
    pub fn geometric(r: f64) -> Result<Self, DistError> {
        Self::new(Vec::new(), TailModel::Geometric { scale: 1.0 - r, r })
    }

    /// Product with an independent uniform law on `m` values; index `j·m + y`.
    pub fn product_uniform(&self, m: usize) -> Result<Self, DistError> {
        assert!(m >= 1);
        if self.saturated {
            return Err(DistError::InfiniteSupport);
        }
        let masses = self
            .masses
            .iter()
            .flat_map(|&q| std::iter::repeat_n(q / m as f64, m))
            .collect();
        Self::new(masses, TailModel::None)
    }

    /// Mass of symbol `j`.
    pub fn mass(&self, j: usize) -> f64 {
        match self.masses.get(j) {
            Some(&m) => m,
            None if self.saturated => self.tail.envelope(j),
            None => 0.0,
        }
    }

    /// Materialized masses: the explicit prefix plus any greedily placed tail.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn explicit_len(&self) -> usize {
        self.explicit_len
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    /// `Some((start, envelope))` when `q_j = envelope(j)` for all `j ≥ start`.
    pub fn tail_continuation(&self) -> Option<(usize, TailModel)> {
        self.saturated.then_some((self.masses.len(), self.tail))
    }

    pub fn has_finite_support(&self) -> bool {
        !self.saturated
    }

    /// |supp(Q)|, or `None` when infinite.
    pub fn support_size(&self) -> Option<usize> {
        (!self.saturated).then(|| self.masses.iter().filter(|&&m| m > 0.0).count())
    }

    pub fn max_mass(&self) -> f64 {
        let head = self.masses.iter().copied().fold(0.0, f64::max);
        match self.tail_continuation() {
            Some((start, tail)) => head.max(tail.envelope(start)),
            None => head,
        }
    }

    /// Materialized prefix of length at least `len`, extending a saturated
    /// tail with its envelope values.
    pub fn prefix_masses(&self, len: usize) -> Vec<f64> {
        let mut out = self.masses.clone();
        if self.saturated {
            for j in self.masses.len()..len {
                out.push(self.tail.envelope(j));
            }
        }
        out
    }

    /// Mass not covered by the first `len` materialized indices.
    pub fn mass_beyond(&self, len: usize) -> f64 {
        if len <= self.masses.len() {
            let head: f64 = self.masses[len..].iter().sum();
            head + if self.saturated { self.tail.envelope_sum_from(self.masses.len()) } else { 0.0 }
        } else if self.saturated {
            self.tail.envelope_sum_from(len)
        } else {
            0.0
        }
    }

    /// `n` i.i.d. draws, deterministic in `(seed, n)`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut rng = rng::stream(seed, 0);
        Sampler::new(self).sample_n(n, &mut rng)
    }
}

/// Inverse-CDF sampler over the materialized masses with exact generators for
/// saturated geometric and power-law tails.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
    tail: Option<(usize, TailModel)>,
}

impl Sampler {
    pub fn new(q: &DiscreteDistribution) -> Self {
        let mut acc = 0.0;
        let cumulative = q
            .masses
            .iter()
            .map(|&m| {
                acc += m;
                acc
            })
            .collect();
        Self { cumulative, tail: q.tail_continuation() }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let head_total = self.cumulative.last().copied().unwrap_or(0.0);
        if let Some((start, tail)) = self.tail {
            if u >= head_total {
                return start + draw_tail_offset(tail, start, rng);
            }
        } else if u >= head_total {
            // rounding gap at the top of a finite support
            return self.last_positive();
        }
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    fn last_positive(&self) -> usize {
        let mut prev = 0.0;
        let mut last = 0;
        for (i, &c) in self.cumulative.iter().enumerate() {
            if c > prev {
                last = i;
            }
            prev = c;
        }
        last
    }
}

fn draw_tail_offset<R: Rng + ?Sized>(tail: TailModel, start: usize, rng: &mut R) -> usize {
    match tail {
        TailModel::None => 0,
        TailModel::Geometric { r, .. } => {
            let u = 1.0 - rng.random::<f64>();
            clamp_index(u.ln() / r.ln())
        }
        TailModel::PowerLaw { gamma, .. } => {
            // Rejection from the continuous Pareto law on [a, ∞), a = start + 1,
            // whose integer part over-weights m by at most (1 + 1/a)^γ.
            let a = start as f64 + 1.0;
            let bound = (1.0 + 1.0 / a).powf(gamma);
            loop {
                let u = 1.0 - rng.random::<f64>();
                let y = a * u.powf(-1.0 / (gamma - 1.0));
                let m = y.floor();
                if !m.is_finite() || m > 9.0e15 {
                    continue;
                }
                let cell = -(m.powf(1.0 - gamma)) * ((1.0 - gamma) * (1.0 / m).ln_1p()).exp_m1() / (gamma - 1.0);
                let accept = m.powf(-gamma) / (bound * cell);
                if rng.random::<f64>() < accept {
                    return (m - a) as usize;
                }
            }
        }
    }
}

fn clamp_index(x: f64) -> usize {
    if x.is_finite() && x < 9.0e15 {
        x.floor() as usize
    } else {
        9_000_000_000_000_000
    }
}

/// Occurrence counts of symbols in a sample: the *type* of the sequence.
/// Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Histogram {
    counts: BTreeMap<usize, u64>,
    total: u64,
}

impl Histogram {
    pub fn from_sample(sample: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for &z in sample {
            *counts.entry(z).or_insert(0) += 1;
        }
        Self { counts, total: sample.len() as u64 }
    }

    /// From a dense count vector over `{0, …, k-1}`.
    pub fn from_dense(counts: &[u64]) -> Self {
        let map: BTreeMap<usize, u64> =
            counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(j, &c)| (j, c)).collect();
        let total = map.values().sum();
        Self { counts: map, total }
    }

    /// ‖N‖₁
    pub fn total(&self) -> u64 {
        self.total
    }

    /// ‖N‖₀
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, j: usize) -> u64 {
        self.counts.get(&j).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&j, &c)| (j, c))
    }

    pub fn positive_counts(&self) -> Vec<u64> {
        self.counts.values().copied().collect()
    }

    pub fn to_dense(&self, k: usize) -> Vec<u64> {
        let mut out = vec![0; k];
        for (j, c) in self.iter() {
            if j < k {
                out[j] = c;
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Every histogram over `{0, …, k-1}` with total `n`, in lexicographically
/// descending order of the dense count vector.
pub fn enumerate_histograms(k: usize, n: u64) -> Result<Vec<Histogram>, DistError> {
    if k > MAX_ENUM_ALPHABET || n > MAX_ENUM_COUNT {
        return Err(DistError::OracleScaleExceeded { k, n });
    }
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Histogram::default());
        }
        return Ok(out);
    }
    let mut current = vec![0u64; k];
    compositions(&mut current, 0, n, &mut out);
    Ok(out)
}

fn compositions(current: &mut Vec<u64>, pos: usize, left: u64, out: &mut Vec<Histogram>) {
    if pos == current.len() - 1 {
        current[pos] = left;
        out.push(Histogram::from_dense(current));
        return;
    }
    for c in (0..=left).rev() {
        current[pos] = c;
        compositions(current, pos + 1, left - c, out);
    }
}

/// How labels attach to inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Labeling {
    /// `Y = f(X)`. Inputs beyond the map get label 0.
    Deterministic { labels: Vec<usize>, num_labels: usize },
    /// `Y` uniform on `num_labels` values, independent of `X`.
    UniformIndependent { num_labels: usize },
}

impl Labeling {
    pub fn num_labels(&self) -> usize {
        match self {
            Labeling::Deterministic { num_labels, .. } | Labeling::UniformIndependent { num_labels } => {
                *num_labels
            }
        }
    }
}

/// Law of `(X, Y)` on `𝒳 × 𝒴`, with pair `(x, y)` numbered `x·L + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    inputs: DiscreteDistribution,
    labeling: Labeling,
}

impl JointDistribution {
    pub fn new(inputs: DiscreteDistribution, labeling: Labeling) -> Result<Self, DistError> {
        let l = labeling.num_labels();
        if l == 0 {
            return Err(DistError::InvalidLabeling("label set must be non-empty".into()));
        }
        if let Labeling::Deterministic { labels, .. } = &labeling {
            if labels.len() < inputs.explicit_len() {
                return Err(DistError::InvalidLabeling(format!(
                    "labels cover {} inputs but the distribution has {} explicit symbols",
                    labels.len(),
                    inputs.explicit_len()
                )));
            }
            if let Some(bad) = labels.iter().find(|&&y| y >= l) {
                return Err(DistError::InvalidLabeling(format!("label {bad} outside 0..{l}")));
            }
        }
        Ok(Self { inputs, labeling })
    }

    pub fn deterministic(inputs: DiscreteDistribution, labels: Vec<usize>, num_labels: usize) -> Result<Self, DistError> {
        Self::new(inputs, Labeling::Deterministic { labels, num_labels })
    }

    pub fn uniform_labels(inputs: DiscreteDistribution, num_labels: usize) -> Result<Self, DistError> {
        Self::new(inputs, Labeling::UniformIndependent { num_labels })
    }

    pub fn inputs(&self) -> &DiscreteDistribution {
        &self.inputs
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn num_labels(&self) -> usize {
        self.labeling.num_labels()
    }

    /// Number of inputs with an explicit mass.
    pub fn num_inputs(&self) -> usize {
        self.inputs.masses().len()
    }

    /// The label `f(x)` for deterministic labelings.
    pub fn label_of(&self, x: usize) -> Option<usize> {
        match &self.labeling {
            Labeling::Deterministic { labels, .. } => Some(labels.get(x).copied().unwrap_or(0)),
            Labeling::UniformIndependent { .. } => None,
        }
    }

    pub fn encode(&self, x: usize, y: usize) -> usize {
        x * self.num_labels() + y
    }

    pub fn decode(&self, z: usize) -> (usize, usize) {
        let l = self.num_labels();
        (z / l, z % l)
    }

    /// The joint law as a distribution over encoded pairs (finite inputs only).
    pub fn to_distribution(&self) -> Result<DiscreteDistribution, DistError> {
        if !self.inputs.has_finite_support() {
            return Err(DistError::InfiniteSupport);
        }
        let l = self.num_labels();
        let xs = self.inputs.masses();
        let mut masses = vec![0.0; xs.len() * l];
        for (x, &q) in xs.iter().enumerate() {
            match &self.labeling {
                Labeling::Deterministic { .. } => {
                    let y = self.label_of(x).unwrap_or(0);
                    masses[x * l + y] = q;
                }
                Labeling::UniformIndependent { .. } => {
                    for y in 0..l {
                        masses[x * l + y] = q / l as f64;
                    }
                }
            }
        }
        DiscreteDistribution::new(masses, TailModel::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_four() {
        let q = DiscreteDistribution::new(vec![0.25; 4], TailModel::None).unwrap();
        assert_eq!(q.support_size(), Some(4));
        assert_eq!(q.mass(2), 0.25);
        assert_eq!(q.mass(9), 0.0);
    }

    #[test]
    fn geometric_envelope_with_capped_tail_fill() {
        let q = DiscreteDistribution::new(vec![0.6, 0.3], TailModel::Geometric { scale: 0.6, r: 0.5 }).unwrap();
        // the 0.1 left over fits under the envelope value 0.15 at j = 2
        assert_eq!(q.masses().len(), 3);
        assert!((q.mass(2) - 0.1).abs() < 1e-15);
        assert!(q.has_finite_support());
        // direct envelope scan
        for j in 0..3 {
            assert!(q.mass(j) <= 0.6 * 0.5f64.powi(j as i32) + 1e-15);
        }
    }

    #[test]
    fn mass_exceeding_one_is_rejected() {
        let err = DiscreteDistribution::new(vec![0.5, 0.6], TailModel::None).unwrap_err();
        assert!(matches!(err, DistError::MassExceedsOne { .. }));
    }

    #[test]
    fn negative_and_unnormalized_masses_are_rejected() {
        assert!(matches!(
            DiscreteDistribution::new(vec![1.2, -0.2], TailModel::None),
            Err(DistError::NegativeMass { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteDistribution::new(vec![0.5, 0.3], TailModel::None),
            Err(DistError::NotNormalized { .. })
        ));
    }

    #[test]
    fn envelope_violation_is_tail_inconsistent() {
        let err = DiscreteDistribution::new(vec![0.5, 0.4], TailModel::Geometric { scale: 0.5, r: 0.5 }).unwrap_err();
        assert!(matches!(err, DistError::TailInconsistent(_)));
        // capacity too small for the missing mass
        let err = DiscreteDistribution::new(vec![0.5], TailModel::Geometric { scale: 0.5, r: 0.1 }).unwrap_err();
        assert!(matches!(err, DistError::TailInconsistent(_)));
    }

    #[test]
    fn envelope_checked_in_sorted_order() {
        // user order violates q_1 ≤ 0.3 but the descending numbering does not
        let q = DiscreteDistribution::new(vec![0.1, 0.6], TailModel::Geometric { scale: 0.6, r: 0.5 }).unwrap();
        assert_eq!(q.mass(1), 0.6);
    }

    #[test]
    fn saturated_tails_have_infinite_support() {
        let g = DiscreteDistribution::geometric(0.5).unwrap();
        assert!(!g.has_finite_support());
        assert!((g.mass(3) - 0.5f64.powi(4)).abs() < 1e-16);
        let z = DiscreteDistribution::zipf(2.0).unwrap();
        assert_eq!(z.support_size(), None);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((z.mass(0) - 1.0 / zeta2).abs() < 1e-14);
        assert!((z.mass_beyond(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn literal_json_round_trip() {
        let json = r#"{"masses":[0.6,0.3],"tail":{"kind":"geometric","C":0.6,"r":0.5}}"#;
        let lit: DistributionLiteral = serde_json::from_str(json).unwrap();
        assert_eq!(lit.tail, TailModel::Geometric { scale: 0.6, r: 0.5 });
        let q = DiscreteDistribution::from_literal(&lit).unwrap();
        assert_eq!(q.to_literal(), lit);
        let pl: DistributionLiteral =
            serde_json::from_str(r#"{"masses":[],"tail":{"kind":"power_law","C":0.6079271018540267,"gamma":2.0}}"#).unwrap();
        assert!(DiscreteDistribution::from_literal(&pl).unwrap().tail_continuation().is_some());
        let bare: DistributionLiteral = serde_json::from_str(r#"{"masses":[1.0]}"#).unwrap();
        assert_eq!(bare.tail, TailModel::None);
        assert!(serde_json::from_str::<DistributionLiteral>(r#"{"masses":[1.0],"extra":1}"#).is_err());
    }

    #[test]
    fn point_mass_samples_zero() {
        assert_eq!(DiscreteDistribution::point_mass().sample(5, 123), vec![0; 5]);
        assert!(DiscreteDistribution::uniform(3).sample(0, 1).is_empty());
    }

    #[test]
    fn coin_frequency_concentrates() {
        let s = DiscreteDistribution::uniform(2).sample(100_000, 99);
        let zeros = s.iter().filter(|&&z| z == 0).count() as f64 / 1e5;
        assert!((zeros - 0.5).abs() < 0.01, "{zeros}");
    }

    #[test]
    fn sampling_is_deterministic_in_seed() {
        let q = DiscreteDistribution::zipf_truncated(1.3, 20);
        assert_eq!(q.sample(500, 5), q.sample(500, 5));
        assert_ne!(q.sample(500, 5), q.sample(500, 6));
    }

    #[test]
    fn geometric_tail_sampler_matches_masses() {
        let q = DiscreteDistribution::new(vec![0.4], TailModel::Geometric { scale: 0.6, r: 0.5 }).unwrap();
        assert!(q.tail_continuation().is_some());
        let s = q.sample(200_000, 11);
        for j in 0..5 {
            let f = s.iter().filter(|&&z| z == j).count() as f64 / 2e5;
            let p = q.mass(j);
            let sigma = (p * (1.0 - p) / 2e5).sqrt();
            assert!((f - p).abs() < 5.0 * sigma, "j={j} f={f} p={p}");
        }
    }

    #[test]
    fn power_law_tail_sampler_matches_masses() {
        let q = DiscreteDistribution::zipf(2.5).unwrap();
        let s = q.sample(200_000, 3);
        for j in [0usize, 1, 2, 5, 10] {
            let f = s.iter().filter(|&&z| z == j).count() as f64 / 2e5;
            let p = q.mass(j);
            let sigma = (p * (1.0 - p) / 2e5).sqrt();
            assert!((f - p).abs() < 5.0 * sigma, "j={j} f={f} p={p}");
        }
    }

    #[test]
    fn histogram_counts() {
        let h = Histogram::from_sample(&[1, 3, 3, 7]);
        assert_eq!(h.total(), 4);
        assert_eq!(h.distinct(), 3);
        assert_eq!(h.count(3), 2);
        assert_eq!(h, Histogram::from_sample(&[7, 3, 1, 3]));
        let e = Histogram::from_sample(&[]);
        assert_eq!((e.total(), e.distinct()), (0, 0));
    }

    #[test]
    fn enumeration_counts_match_stars_and_bars() {
        let two = enumerate_histograms(2, 2).unwrap();
        let dense: Vec<Vec<u64>> = two.iter().map(|h| h.to_dense(2)).collect();
        assert_eq!(dense, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(enumerate_histograms(3, 4).unwrap().len(), 15);
        assert_eq!(enumerate_histograms(5, 12).unwrap().len(), 1820);
        assert!(matches!(enumerate_histograms(7, 20), Err(DistError::OracleScaleExceeded { .. })));
    }

    #[test]
    fn joint_encoding() {
        let x = DiscreteDistribution::uniform(3);
        let j = JointDistribution::deterministic(x.clone(), vec![1, 0, 1], 2).unwrap();
        let q = j.to_distribution().unwrap();
        assert_eq!(q.mass(j.encode(0, 1)), 1.0 / 3.0);
        assert_eq!(q.mass(j.encode(0, 0)), 0.0);
        assert_eq!(j.decode(5), (2, 1));
        let u = JointDistribution::uniform_labels(x, 4).unwrap();
        assert!((u.to_distribution().unwrap().mass(7) - 1.0 / 12.0).abs() < 1e-16);
        assert!(JointDistribution::deterministic(DiscreteDistribution::uniform(2), vec![0, 5], 2).is_err());
        assert!(JointDistribution::uniform_labels(DiscreteDistribution::uniform(2), 0).is_err());
    }
}
