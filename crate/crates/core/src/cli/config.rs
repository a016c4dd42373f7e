//! JSON experiment configuration. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, DistributionLiteral, JointDistribution};
use crate::entropy::RenyiOrder;
use crate::simulator::{Learner, Task};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Entropy,
    Bound,
    SufficientN,
    GapSim,
    LabelRand,
    ChbCheck,
    Nfl,
    Table1,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Entropy => "entropy",
            ExperimentKind::Bound => "bound",
            ExperimentKind::SufficientN => "sufficient-n",
            ExperimentKind::GapSim => "gap-sim",
            ExperimentKind::LabelRand => "label-rand",
            ExperimentKind::ChbCheck => "chb-check",
            ExperimentKind::Nfl => "nfl",
            ExperimentKind::Table1 => "table1",
        }
    }
}

/// How to build a distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Explicit masses with an optional tail envelope.
    Literal(DistributionLiteral),
    Uniform { k: usize },
    /// `∝ (j+1)^{−γ}`, truncated to `support` symbols when given.
    Zipf {
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<usize>,
    },
    /// `(1−r)·r^j`
    Geometric { r: f64 },
    PointMass,
    /// A JSON file holding a literal; relative paths resolve against the
    /// config file's directory.
    File { path: PathBuf },
}

impl DistributionSpec {
    pub fn build(&self, base: &Path) -> Result<DiscreteDistribution, CliError> {
        let bad = |e: crate::dist::DistError| CliError::Config(format!("distribution: {e}"));
        match self {
            DistributionSpec::Literal(lit) => DiscreteDistribution::from_literal(lit).map_err(bad),
            DistributionSpec::Uniform { k } => {
                if *k == 0 {
                    return Err(CliError::Config("uniform distribution needs k ≥ 1".into()));
                }
                Ok(DiscreteDistribution::uniform(*k))
            }
            DistributionSpec::Zipf { gamma, support } => match support {
                Some(s) if *s >= 1 && *gamma >= 0.0 => Ok(DiscreteDistribution::zipf_truncated(*gamma, *s)),
                Some(_) => Err(CliError::Config("truncated Zipf needs support ≥ 1 and γ ≥ 0".into())),
                None => DiscreteDistribution::zipf(*gamma).map_err(bad),
            },
            DistributionSpec::Geometric { r } => DiscreteDistribution::geometric(*r).map_err(bad),
            DistributionSpec::PointMass => Ok(DiscreteDistribution::point_mass()),
            DistributionSpec::File { path } => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", full.display())))?;
                let lit: DistributionLiteral = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", full.display())))?;
                DiscreteDistribution::from_literal(&lit).map_err(bad)
            }
        }
    }
}

/// A Rényi order written as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Value(f64),
    Named(NamedOrder),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedOrder {
    #[serde(rename = "inf")]
    Infinity,
}

impl OrderSpec {
    pub fn order(self) -> Result<RenyiOrder, CliError> {
        match self {
            OrderSpec::Value(a) => RenyiOrder::new(a).ok_or_else(|| CliError::Config(format!("Rényi order {a} must be ≥ 0"))),
            OrderSpec::Named(NamedOrder::Infinity) => Ok(RenyiOrder::INFINITY),
        }
    }
}

/// Labels for classification experiments; inputs come from `distribution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub num_labels: usize,
    /// Ground truth `f(x)`; defaults to `x mod num_labels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
    /// Draw labels uniformly, independently of the input.
    #[serde(default)]
    pub uniform_labels: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NflSpec {
    pub n0: u64,
    pub p: usize,
    /// Training size; defaults to `n0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Spec {
    /// Finite family: support size.
    pub k: usize,
    /// Exponential family: `q_j ≤ C·r^j`.
    pub exp_c: f64,
    pub exp_r: f64,
    /// Power-law family: `q_j ≤ C·(j+1)^{−γ}`.
    pub pl_c: f64,
    pub pl_gamma: f64,
}

/// Checks applied to the finished report; a failure exits with code 4.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_violation_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_mean_risk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_nu_part_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<u64>,
    /// Each of δ₁, δ₂, δ₃ for bounds; the total δ for sufficient sizes and
    /// coverage checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Explicit (δ₁, δ₂, δ₃), overriding `delta` for bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Loss diameter; 1 (0-1 loss) by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub di: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<OrderSpec>>,
    /// Evaluate the bound at this order instead of minimizing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<Learner>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nfl: Option<NflSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table1: Option<Table1Spec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertions: Option<Assertions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn distribution(&self, base: &Path) -> Result<DiscreteDistribution, CliError> {
        self.distribution
            .as_ref()
            .ok_or_else(|| CliError::Config("`distribution` is required".into()))?
            .build(base)
    }

    pub fn require_delta(&self) -> Result<f64, CliError> {
        let d = self.delta.ok_or_else(|| CliError::Config("`delta` is required".into()))?;
        if !(d > 0.0 && d < 1.0) {
            return Err(CliError::Config(format!("delta = {d} must lie in (0,1)")));
        }
        Ok(d)
    }

    pub fn require_epsilon(&self) -> Result<f64, CliError> {
        let e = self.epsilon.ok_or_else(|| CliError::Config("`epsilon` is required".into()))?;
        if !(e > 0.0 && e < 1.0) {
            return Err(CliError::Config(format!("epsilon = {e} must lie in (0,1)")));
        }
        Ok(e)
    }

    /// (δ₁, δ₂, δ₃)
    pub fn bound_deltas(&self) -> Result<[f64; 3], CliError> {
        match self.deltas {
            Some(d) => Ok(d),
            None => Ok([self.require_delta()?; 3]),
        }
    }

    pub fn n_grid(&self, default: &[u64]) -> Vec<u64> {
        if self.n.is_empty() {
            default.to_vec()
        } else {
            self.n.clone()
        }
    }

    pub fn learner(&self) -> Learner {
        self.learner.unwrap_or(Learner::HistogramErm { default_label: 0 })
    }

    /// The classification task over the configured input distribution.
    pub fn task(&self, base: &Path) -> Result<Task, CliError> {
        let spec = self.task.as_ref().ok_or_else(|| CliError::Config("`task` is required".into()))?;
        let inputs = self.distribution(base)?;
        if !inputs.has_finite_support() {
            return Err(CliError::Config("classification tasks need a finite input support".into()));
        }
        let l = spec.num_labels;
        let joint = if spec.uniform_labels {
            JointDistribution::uniform_labels(inputs, l)
        } else {
            let labels = spec.labels.clone().unwrap_or_else(|| (0..inputs.masses().len()).map(|x| x % l.max(1)).collect());
            JointDistribution::deterministic(inputs, labels, l)
        }
        .map_err(|e| CliError::Config(format!("task: {e}")))?;
        Task::new(joint).map_err(|e| CliError::Config(format!("task: {e}")))
    }
}
