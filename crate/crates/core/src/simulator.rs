//! Monte-Carlo checks of the gap bounds on synthetic classification tasks.
//!
//! Inputs and labels are finite; a training example `(x, y)` is the single
//! symbol `z = x·L + y`. Expected risks are summed exactly over the known
//! input law, so the only randomness in a trial is the training sample.
//! Trial `t` draws from RNG stream `t` of the master seed and results are
//! collected in trial order, so reports do not depend on the thread count.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    deterioration_check, gap_bound, sufficient_n, BoundBreakdown, BoundQuery, BoundsError, DeteriorationReport,
    SufficiencyQuery,
};
use crate::dist::{DiscreteDistribution, DistError, Histogram, JointDistribution, Labeling, Sampler};
use crate::entropy::{renyi_entropy, RenyiOrder};
use crate::rng::stream;
use crate::types::{
    distinct_concentration_radius, expected_distinct, kl_high_prob_bound, kl_threshold_violation_probability,
    multinomial_log_pmf, type_kl, PriorWeights, TypesError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Types(#[from] TypesError),
    #[error("training size {n} exceeds the budget n₀ = {n0}")]
    BudgetExceeded { n: u64, n0: u64 },
    #[error("invalid experiment: {0}")]
    Invalid(String),
}

/// A symmetric learner: its output depends on the training sample only
/// through the sample's histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Learner {
    /// Per-input majority label, ties to the smallest label.
    HistogramErm { default_label: usize },
    /// Smallest label ever seen with the input.
    Memorizer { default_label: usize },
}

impl Learner {
    pub fn default_label(&self) -> usize {
        match *self {
            Learner::HistogramErm { default_label } | Learner::Memorizer { default_label } => default_label,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Learner::HistogramErm { .. } => "histogram-erm",
            Learner::Memorizer { .. } => "memorizer",
        }
    }
}

/// A map from inputs to labels; inputs past `labels` get `default_label`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hypothesis {
    pub labels: Vec<usize>,
    pub default_label: usize,
}

impl Hypothesis {
    pub fn predict(&self, x: usize) -> usize {
        self.labels.get(x).copied().unwrap_or(self.default_label)
    }
}

/// Classification task with 0-1 loss over a finite input set.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    joint: JointDistribution,
    z: DiscreteDistribution,
}

impl Task {
    pub fn new(joint: JointDistribution) -> Result<Self, SimError> {
        let z = joint.to_distribution()?;
        Ok(Self { joint, z })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    /// Law of the encoded examples.
    pub fn examples(&self) -> &DiscreteDistribution {
        &self.z
    }

    pub fn num_labels(&self) -> usize {
        self.joint.num_labels()
    }

    /// Diameter of the 0-1 loss.
    pub fn loss_diameter(&self) -> f64 {
        1.0
    }
}

/// Trains on encoded examples `z = x·L + y`.
pub fn train(learner: &Learner, sample: &[usize], num_labels: usize) -> Hypothesis {
    train_on_histogram(learner, &Histogram::from_sample(sample), num_labels)
}

pub fn train_on_histogram(learner: &Learner, hist: &Histogram, num_labels: usize) -> Hypothesis {
    let default_label = learner.default_label();
    let mut per_input: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for (z, c) in hist.iter() {
        let (x, y) = (z / num_labels, z % num_labels);
        per_input.entry(x).or_insert_with(|| vec![0; num_labels])[y] += c;
    }
    let len = per_input.keys().next_back().map_or(0, |&x| x + 1);
    let mut labels = vec![default_label; len];
    for (x, counts) in per_input {
        labels[x] = match learner {
            Learner::HistogramErm { .. } => {
                let best = *counts.iter().max().expect("non-empty");
                counts.iter().position(|&c| c == best).expect("max present")
            }
            Learner::Memorizer { .. } => counts.iter().position(|&c| c > 0).expect("seen"),
        };
    }
    Hypothesis { labels, default_label }
}

/// `P_{(X,Y)∼Q}(Y ≠ h(X))`, summed over the explicit inputs.
pub fn exact_risk(task: &Task, h: &Hypothesis) -> f64 {
    let joint = task.joint();
    match joint.labeling() {
        Labeling::Deterministic { .. } => joint
            .inputs()
            .masses()
            .iter()
            .enumerate()
            .filter(|&(x, _)| h.predict(x) != joint.label_of(x).unwrap_or(0))
            .map(|(_, &q)| q)
            .sum::<f64>()
            .clamp(0.0, 1.0),
        Labeling::UniformIndependent { num_labels } => 1.0 - 1.0 / *num_labels as f64,
    }
}

pub fn empirical_risk(h: &Hypothesis, sample: &[usize], num_labels: usize) -> f64 {
    let wrong = sample.iter().filter(|&&z| h.predict(z / num_labels) != z % num_labels).count();
    wrong as f64 / sample.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub empirical_risk: f64,
    pub expected_risk: f64,
    pub gap: f64,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: u64,
    pub learner: Learner,
    pub bound: BoundBreakdown,
    pub delta_sum: f64,
    pub trials: Vec<TrialResult>,
    pub violation_rate: f64,
    pub mean_gap: f64,
    pub max_gap: f64,
}

fn trial_samples(q: &DiscreteDistribution, n: u64, trials: u64, seed: u64) -> impl ParallelIterator<Item = (u64, Vec<usize>)> + '_ {
    let sampler = Sampler::new(q);
    (0..trials).into_par_iter().map(move |t| {
        let mut rng = stream(seed, t);
        (t, sampler.sample_n(n as usize, &mut rng))
    })
}

pub fn run_gap_experiment(
    task: &Task,
    learner: &Learner,
    n: u64,
    query: &BoundQuery,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, SimError> {
    if trials == 0 {
        return Err(SimError::Invalid("trials must be at least 1".into()));
    }
    if query.n != n {
        return Err(SimError::Invalid(format!("query is for n = {} but the experiment uses n = {n}", query.n)));
    }
    let query = BoundQuery { di: task.loss_diameter(), ..*query };
    let bound = gap_bound(task.examples(), &query)?;
    let l = task.num_labels();
    let results: Vec<TrialResult> = trial_samples(task.examples(), n, trials, seed)
        .map(|(_, sample)| {
            let h = train(learner, &sample, l);
            let empirical = empirical_risk(&h, &sample, l);
            let expected = exact_risk(task, &h);
            let gap = expected - empirical;
            TrialResult { empirical_risk: empirical, expected_risk: expected, gap, bound: bound.bound, violated: gap > bound.bound }
        })
        .collect();
    let violations = results.iter().filter(|r| r.violated).count();
    let mean_gap = results.iter().map(|r| r.gap).sum::<f64>() / trials as f64 + 0.0;
    let max_gap = results.iter().map(|r| r.gap).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExperimentReport {
        n,
        learner: *learner,
        bound,
        delta_sum: query.delta_sum(),
        violation_rate: violations as f64 / trials as f64,
        mean_gap,
        max_gap,
        trials: results,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRandomizationReport {
    pub deterministic: ExperimentReport,
    pub randomized: ExperimentReport,
    /// `(α, H_α(Q′) − H_α(Q))` on the order grid.
    pub entropy_offsets: Vec<(f64, f64)>,
    pub ln_num_labels: f64,
    pub bound_ratio: f64,
    pub sufficient_n_deterministic: f64,
    pub sufficient_n_randomized: f64,
    /// Whole sufficient sizes can tie when the `ω` term dominates both.
    pub sufficient_n_ratio: f64,
    /// `min_α max(ν′, ν̃′) / max(ν, ν̃)` over the comparison grid.
    pub min_nu_part_ratio: f64,
    pub deterioration: DeteriorationReport,
}

/// Orders at which label-randomization offsets are reported: 19 points in
/// `[0, 3]` plus `∞`.
pub fn offset_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..19).map(|i| i as f64 / 6.0).collect();
    g.push(f64::INFINITY);
    g
}

/// Same inputs with labels `f(x)` versus labels drawn uniformly from `L`.
#[allow(clippy::too_many_arguments)]
pub fn run_label_randomization(
    inputs: &DiscreteDistribution,
    f: &[usize],
    num_labels: usize,
    learner: &Learner,
    query: &BoundQuery,
    sufficiency: &SufficiencyQuery,
    trials: u64,
    seed: u64,
) -> Result<LabelRandomizationReport, SimError> {
    let det = Task::new(JointDistribution::deterministic(inputs.clone(), f.to_vec(), num_labels)?)?;
    let rnd = Task::new(JointDistribution::uniform_labels(inputs.clone(), num_labels)?)?;
    let deterministic = run_gap_experiment(&det, learner, query.n, query, trials, seed)?;
    let randomized = run_gap_experiment(&rnd, learner, query.n, query, trials, seed)?;
    let entropy_offsets = offset_grid()
        .into_iter()
        .map(|a| {
            let o = RenyiOrder::new(a).expect("grid is non-negative");
            (a, renyi_entropy(rnd.examples(), o).value - renyi_entropy(det.examples(), o).value)
        })
        .collect();
    let ln_l = (num_labels as f64).ln();
    let sd = sufficient_n(det.examples(), sufficiency).n;
    let sr = sufficient_n(rnd.examples(), sufficiency).n;
    let deterioration = deterioration_check(det.examples(), rnd.examples(), ln_l, query.n, sufficiency)?;
    Ok(LabelRandomizationReport {
        bound_ratio: randomized.bound.bound / deterministic.bound.bound,
        deterministic,
        randomized,
        entropy_offsets,
        ln_num_labels: ln_l,
        sufficient_n_deterministic: sd,
        sufficient_n_randomized: sr,
        sufficient_n_ratio: sr / sd,
        min_nu_part_ratio: deterioration
            .nu_comparisons
            .iter()
            .map(|c| (c.ln_lhs - (c.ln_rhs - ln_l)).exp())
            .fold(f64::INFINITY, f64::min),
        deterioration,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChbTrial {
    pub gap: f64,
    /// `ln(1/w)` with `w = Mult_{(Q,n)}(Hist_Z)`.
    pub log_inverse_weight: f64,
    pub radius: f64,
    pub violated: bool,
    /// Radius using the total weight of every histogram mapped to the same
    /// hypothesis.
    pub pooled_radius: f64,
    pub pooled_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChbReport {
    pub n: u64,
    pub delta: f64,
    pub trials: Vec<ChbTrial>,
    pub violation_rate: f64,
    pub pooled_violation_rate: f64,
    /// `Σ_h w(h)` over reachable hypotheses.
    pub prior_total: f64,
    pub num_hypotheses: usize,
}

/// The countable-hypothesis bound with the histogram prior, checked per trial.
pub fn check_countable_hypothesis_bound(
    task: &Task,
    learner: &Learner,
    n: u64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<ChbReport, SimError> {
    if trials == 0 || n == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(SimError::Invalid(format!("need trials ≥ 1, n ≥ 1, δ ∈ (0,1); got {trials}, {n}, {delta}")));
    }
    let q = task.examples();
    let l = task.num_labels();
    let prior = PriorWeights::from_map(q, n, |h| train_on_histogram(learner, h, l))?;
    let di = task.loss_diameter();
    let nf = n as f64;
    let radius = |ln_inv_w: f64| di * ((ln_inv_w - delta.ln()) / (2.0 * nf)).sqrt();
    let results: Vec<ChbTrial> = trial_samples(q, n, trials, seed)
        .map(|(_, sample)| {
            let hist = Histogram::from_sample(&sample);
            let h = train_on_histogram(learner, &hist, l);
            let gap = exact_risk(task, &h) - empirical_risk(&h, &sample, l);
            let liw = -multinomial_log_pmf(q, &hist);
            let r = radius(liw);
            let pr = radius(-prior.weight(&h).ln());
            ChbTrial { gap, log_inverse_weight: liw, radius: r, violated: gap > r, pooled_radius: pr, pooled_violated: gap > pr }
        })
        .collect();
    let t = trials as f64;
    Ok(ChbReport {
        n,
        delta,
        violation_rate: results.iter().filter(|r| r.violated).count() as f64 / t,
        pooled_violation_rate: results.iter().filter(|r| r.pooled_violated).count() as f64 / t,
        prior_total: prior.total(),
        num_hypotheses: prior.len(),
        trials: results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NflParams {
    /// Sample budget `n₀`; the input set has `2n₀` points.
    pub n0: u64,
    /// Training size; defaults to `n₀`.
    #[serde(default)]
    pub n: Option<u64>,
    /// Number of labels the ground truth may use.
    pub p: usize,
    pub epsilon: f64,
    /// Number of `(f₀, sample)` draws.
    pub trials: u64,
}

impl NflParams {
    /// `(p−1)/(2p)`
    pub fn mu_err(&self) -> f64 {
        (self.p as f64 - 1.0) / (2.0 * self.p as f64)
    }

    /// `(μ_err − ε)/(1 − ε)`
    pub fn delta(&self) -> f64 {
        (self.mu_err() - self.epsilon) / (1.0 - self.epsilon)
    }

    pub fn training_size(&self) -> u64 {
        self.n.unwrap_or(self.n0)
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.n0 == 0 || self.p == 0 || self.trials == 0 {
            return Err(SimError::Invalid("n₀, p and trials must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(SimError::Invalid(format!("ε = {} must lie in (0,1)", self.epsilon)));
        }
        let n = self.training_size();
        if n > self.n0 {
            return Err(SimError::BudgetExceeded { n, n0: self.n0 });
        }
        if n == 0 {
            return Err(SimError::Invalid("training size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NflReport {
    pub params: NflParams,
    pub learner: Learner,
    pub mu_err: f64,
    pub delta: f64,
    /// `ln(2n₀)`: the Rényi entropy of the uniform input law at every order.
    pub input_entropy: f64,
    /// Risks of the individual draws, in draw order.
    pub risks: Vec<f64>,
    /// Average over random ground truths; exceeding `μ_err` certifies that
    /// some fixed ground truth does too.
    pub mean_risk: f64,
    pub std_error: f64,
    /// Fraction of draws with risk at least `ε`.
    pub prob_risk_at_least_epsilon: f64,
    pub mean_at_least_mu_err: bool,
}

/// Uniform inputs on `2n₀` points with a ground truth drawn uniformly from
/// `{0, …, p−1}^{2n₀}` per draw.
pub fn run_nfl(params: &NflParams, learner: &Learner, seed: u64) -> Result<NflReport, SimError> {
    params.validate()?;
    let m = 2 * params.n0 as usize;
    let p = params.p;
    let n = params.training_size() as usize;
    let l = p.max(learner.default_label() + 1);
    let risks: Vec<f64> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let f0: Vec<usize> = (0..m).map(|_| rng.random_range(0..p)).collect();
            let sample: Vec<usize> = (0..n)
                .map(|_| {
                    let x = rng.random_range(0..m);
                    x * l + f0[x]
                })
                .collect();
            let h = train(learner, &sample, l);
            (0..m).filter(|&x| h.predict(x) != f0[x]).count() as f64 / m as f64
        })
        .collect();
    let t = params.trials as f64;
    let mean = risks.iter().sum::<f64>() / t;
    let var = if params.trials > 1 { risks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (t - 1.0) } else { 0.0 };
    let std_error = (var / t).sqrt();
    let mu = params.mu_err();
    Ok(NflReport {
        params: *params,
        learner: *learner,
        mu_err: mu,
        delta: params.delta(),
        input_entropy: (m as f64).ln(),
        prob_risk_at_least_epsilon: risks.iter().filter(|&&r| r >= params.epsilon).count() as f64 / t,
        mean_at_least_mu_err: mean >= mu - 3.0 * std_error,
        mean_risk: mean,
        std_error,
        risks,
    })
}

/// Empirical frequency of an event against its nominal level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trials: u64,
    pub delta: f64,
    pub exceed_rate: f64,
    /// `√(δ(1−δ)/trials)`
    pub sigma: f64,
    /// The exact event probability, when enumeration is possible.
    pub exact_probability: Option<f64>,
}

impl CoverageReport {
    fn new(trials: u64, delta: f64, exceed: usize, exact_probability: Option<f64>) -> Self {
        let t = trials as f64;
        Self { trials, delta, exceed_rate: exceed as f64 / t, sigma: (delta * (1.0 - delta) / t).sqrt(), exact_probability }
    }

    /// Rate at most `δ + 3σ`.
    pub fn within_three_sigma(&self) -> bool {
        self.exceed_rate <= self.delta + 3.0 * self.sigma
    }
}

/// How often `|‖N‖₀ − E‖N‖₀|` exceeds `√((n/2)·ln(2/δ))`.
pub fn distinct_count_coverage(q: &DiscreteDistribution, n: u64, delta: f64, trials: u64, seed: u64) -> Result<CoverageReport, SimError> {
    let radius = distinct_concentration_radius(n, delta)?;
    let mean = expected_distinct(q, n).value;
    let exceed = trial_samples(q, n, trials, seed)
        .filter(|(_, s)| (Histogram::from_sample(s).distinct() as f64 - mean).abs() > radius)
        .count();
    Ok(CoverageReport::new(trials, delta, exceed, None))
}

/// How often the type's KL from `q` exceeds `((‖N‖₀−1)·ln(n−1) + ln(1/δ))/n`.
pub fn kl_threshold_coverage(q: &DiscreteDistribution, n: u64, delta: f64, trials: u64, seed: u64) -> Result<CoverageReport, SimError> {
    let t = kl_high_prob_bound(n, delta)?;
    let exceed = trial_samples(q, n, trials, seed)
        .filter(|(_, s)| {
            let h = Histogram::from_sample(s);
            type_kl(q, &h) > t.at(h.distinct())
        })
        .count();
    let exact = kl_threshold_violation_probability(q, &t).ok();
    Ok(CoverageReport::new(trials, delta, exceed, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn det_task(inputs: DiscreteDistribution, labels: Vec<usize>, l: usize) -> Task {
        Task::new(JointDistribution::deterministic(inputs, labels, l).unwrap()).unwrap()
    }

    const ERM: Learner = Learner::HistogramErm { default_label: 0 };
    const MEMO: Learner = Learner::Memorizer { default_label: 0 };

    #[test]
    fn train_examples() {
        // L = 2: (x, y) ↦ 2x + y
        let h = train(&ERM, &[1, 1, 0], 2);
        assert_eq!(h.predict(0), 1);
        let h = train(&ERM, &[1, 0], 2);
        assert_eq!(h.predict(0), 0);
        assert_eq!(h.predict(5), 0);
        let h = train(&Learner::HistogramErm { default_label: 1 }, &[0], 2);
        assert_eq!((h.predict(0), h.predict(1)), (0, 1));
        let h = train(&MEMO, &[1, 1, 0, 3], 2);
        assert_eq!((h.predict(0), h.predict(1)), (0, 1));
    }

    #[test]
    fn exact_risk_examples() {
        let task = det_task(DiscreteDistribution::new(vec![0.3, 0.7], crate::dist::TailModel::None).unwrap(), vec![1, 0], 2);
        assert_eq!(exact_risk(&task, &Hypothesis { labels: vec![1, 0], default_label: 0 }), 0.0);
        assert!((exact_risk(&task, &Hypothesis { labels: vec![0, 0], default_label: 0 }) - 0.3).abs() < 1e-15);
        let unif = Task::new(JointDistribution::uniform_labels(DiscreteDistribution::uniform(3), 4).unwrap()).unwrap();
        assert_eq!(exact_risk(&unif, &Hypothesis { labels: vec![2], default_label: 1 }), 0.75);
    }

    #[test]
    fn exact_risk_matches_monte_carlo() {
        let inputs = DiscreteDistribution::new(vec![0.1, 0.2, 0.3, 0.4], crate::dist::TailModel::None).unwrap();
        let task = det_task(inputs, vec![0, 1, 2, 1], 3);
        let h = Hypothesis { labels: vec![0, 0, 2], default_label: 2 };
        let exact = exact_risk(&task, &h);
        let sampler = Sampler::new(task.examples());
        let mut rng = stream(11, 0);
        let draws = 200_000;
        let sample = sampler.sample_n(draws, &mut rng);
        let mc = empirical_risk(&h, &sample, 3);
        let sigma = (exact * (1.0 - exact) / draws as f64).sqrt();
        assert!((mc - exact).abs() < 4.0 * sigma, "{mc} vs {exact}");
    }

    #[test]
    fn learners_are_symmetric() {
        let mut rng = stream(5, 0);
        for case in 0..100 {
            let l = 2 + case % 3;
            let len = 1 + rng.random_range(0..40);
            let mut sample: Vec<usize> = (0..len).map(|_| rng.random_range(0..6 * l)).collect();
            for learner in [ERM, MEMO] {
                let h = train(&learner, &sample, l);
                sample.shuffle(&mut rng);
                assert_eq!(train(&learner, &sample, l), h);
            }
        }
    }

    #[test]
    fn point_mass_task_has_zero_gap() {
        let task = det_task(DiscreteDistribution::point_mass(), vec![1], 2);
        let q = BoundQuery::uniform(50, 0.01, 1.0).unwrap();
        let r = run_gap_experiment(&task, &ERM, 50, &q, 20, 1).unwrap();
        assert!(r.trials.iter().all(|t| t.gap == 0.0));
        assert_eq!(r.violation_rate, 0.0);
    }

    #[test]
    fn reports_are_reproducible_across_thread_counts() {
        let task = det_task(DiscreteDistribution::uniform(6), vec![0, 1, 0, 1, 1, 0], 2);
        let q = BoundQuery::uniform(30, 0.05, 1.0).unwrap();
        let a = run_gap_experiment(&task, &MEMO, 30, &q, 64, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_gap_experiment(&task, &MEMO, 30, &q, 64, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn label_randomization_offsets() {
        let inputs = DiscreteDistribution::new(vec![0.5, 0.25, 0.125, 0.125], crate::dist::TailModel::None).unwrap();
        let q = BoundQuery::uniform(200, 0.01, 1.0).unwrap();
        let s = SufficiencyQuery::new(0.05, 0.2).unwrap();
        let r = run_label_randomization(&inputs, &[0, 1, 2, 0], 3, &ERM, &q, &s, 50, 3).unwrap();
        for (a, off) in &r.entropy_offsets {
            assert!((off - 3f64.ln()).abs() < 1e-10, "α={a}: {off}");
        }
        assert!(r.deterioration.nu_inequality_holds && r.deterioration.kappa_inequality_holds);
        assert!(r.min_nu_part_ratio >= 3.0 * (1.0 - 1e-9));
        assert!(r.sufficient_n_ratio >= 1.0);
        assert!(r.randomized.mean_gap > r.deterministic.mean_gap);
    }

    #[test]
    fn chb_point_mass_and_prior() {
        let task = det_task(DiscreteDistribution::point_mass(), vec![0], 2);
        let r = check_countable_hypothesis_bound(&task, &ERM, 8, 0.2, 50, 1).unwrap();
        assert!(r.trials.iter().all(|t| t.gap == 0.0 && !t.violated));
        assert!((r.prior_total - 1.0).abs() < 1e-12);
        let task = det_task(DiscreteDistribution::uniform(6), vec![0; 6], 2);
        assert!(matches!(check_countable_hypothesis_bound(&task, &ERM, 8, 0.2, 5, 1), Err(SimError::Types(TypesError::OracleScaleExceeded { .. }))));
    }

    #[test]
    fn chb_coverage_on_two_inputs() {
        let task = Task::new(JointDistribution::uniform_labels(DiscreteDistribution::uniform(2), 2).unwrap()).unwrap();
        let r = check_countable_hypothesis_bound(&task, &ERM, 8, 0.2, 2000, 4).unwrap();
        assert!(r.violation_rate <= 0.2);
        assert!(r.prior_total <= 1.0 + 1e-10);
    }

    #[test]
    fn nfl_constants_and_budget() {
        let p = NflParams { n0: 32, n: None, p: 2, epsilon: 0.125, trials: 10 };
        assert_eq!(p.mu_err(), 0.25);
        assert!((p.delta() - 1.0 / 7.0).abs() < 1e-15);
        let over = NflParams { n: Some(33), ..p };
        assert_eq!(run_nfl(&over, &ERM, 0), Err(SimError::BudgetExceeded { n: 33, n0: 32 }));
    }

    #[test]
    fn nfl_mean_risk_close_to_analytic() {
        let p = NflParams { n0: 32, n: None, p: 2, epsilon: 0.125, trials: 2000 };
        let r = run_nfl(&p, &ERM, 17).unwrap();
        // half of the unseen inputs are wrong on average
        let analytic = 0.5 * (1.0 - 1.0 / 64.0f64).powi(32);
        assert!((r.mean_risk - analytic).abs() < 4.0 * r.std_error + 1e-3, "{} vs {analytic}", r.mean_risk);
        assert!(r.mean_at_least_mu_err);
    }

    #[test]
    fn coverage_helpers() {
        let q = DiscreteDistribution::uniform(5);
        let kl = kl_threshold_coverage(&q, 10, 0.05, 2000, 8).unwrap();
        assert!(kl.within_three_sigma());
        assert!(kl.exact_probability.unwrap() <= 0.05);
        let d = distinct_count_coverage(&DiscreteDistribution::zipf_truncated(2.0, 50), 100, 0.1, 2000, 8).unwrap();
        assert!(d.within_three_sigma());
    }
}
