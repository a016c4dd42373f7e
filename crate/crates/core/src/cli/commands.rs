//! One function per experiment kind, each producing a table and summary.

use std::path::Path;

use crate::bounds::{
    bound_exponential, bound_finite, bound_powerlaw, exponential_main_term, finite_main_term, gap_bound,
    gap_bound_at_order, powerlaw_main_term, rates, sufficient_exponential, sufficient_finite, sufficient_n,
    sufficient_powerlaw, BoundQuery, BoundsError, SufficiencyQuery,
};
use crate::entropy::{renyi_entropy, RenyiOrder};
use crate::simulator::{
    check_countable_hypothesis_bound, run_gap_experiment, run_label_randomization, run_nfl, Learner, NflParams,
    SimError, Task,
};
use crate::types::TypesError;

use super::config::{ExperimentConfig, ExperimentKind, OrderSpec};
use super::report::Table;
use super::CliError;

/// Inputs shared by every command.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub base: &'a Path,
    pub seed: u64,
    pub trials: Option<u64>,
}

/// A finished run before metadata is attached.
pub struct Outcome {
    pub table: Table,
    pub summary: Vec<(String, String)>,
    /// Failed embedded assertions.
    pub failures: Vec<String>,
    /// Columns for the optional plot: (x, y, log-scaled x).
    pub plot: Option<(&'static str, &'static str, bool)>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Self { table, summary: Vec::new(), failures: Vec::new(), plot: None }
    }

    fn say(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }
}

fn bounds_err(e: BoundsError) -> CliError {
    match e {
        BoundsError::InvalidQuery(_) | BoundsError::AlphaOutOfRange(_) | BoundsError::GammaOutOfRange(_) => {
            CliError::Config(e.to_string())
        }
        BoundsError::HypothesisViolated { .. } => CliError::Numeric(e.to_string()),
    }
}

fn sim_err(e: SimError) -> CliError {
    match e {
        SimError::Bounds(b) => bounds_err(b),
        SimError::Invalid(_) | SimError::BudgetExceeded { .. } | SimError::Dist(_) => CliError::Config(e.to_string()),
        SimError::Types(TypesError::InvalidArgument(_)) => CliError::Config(e.to_string()),
        SimError::Types(_) => CliError::Numeric(e.to_string()),
    }
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

pub fn run(kind: ExperimentKind, ctx: &Context) -> Result<Outcome, CliError> {
    match kind {
        ExperimentKind::Entropy => entropy(ctx),
        ExperimentKind::Bound => bound(ctx),
        ExperimentKind::SufficientN => sufficient(ctx),
        ExperimentKind::GapSim => simulate(ctx),
        ExperimentKind::LabelRand => label_rand(ctx),
        ExperimentKind::ChbCheck => chb(ctx),
        ExperimentKind::Nfl => nfl(ctx),
        ExperimentKind::Table1 => table1(ctx),
    }
}

pub const DEFAULT_ORDERS: [f64; 11] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, f64::INFINITY];

fn entropy(ctx: &Context) -> Result<Outcome, CliError> {
    let q = ctx.config.distribution(ctx.base)?;
    let orders: Vec<RenyiOrder> = match &ctx.config.alpha_grid {
        Some(g) => g.iter().map(|o| o.order()).collect::<Result<_, _>>()?,
        None => DEFAULT_ORDERS.iter().map(|&a| OrderSpec::Value(a).order()).collect::<Result<_, _>>()?,
    };
    let mut t = Table::new(&["alpha", "entropy", "truncation_error", "diverges"]);
    let mut diverging = 0;
    for o in orders {
        let h = renyi_entropy(&q, o);
        diverging += h.diverges as usize;
        t.push(vec![o.value().into(), h.value.into(), h.truncation_error.into(), h.diverges.into()]);
    }
    let mut out = Outcome::new(t);
    out.say("orders", out.table.rows.len());
    out.say("diverging_orders", diverging);
    out.plot = Some(("alpha", "entropy", false));
    Ok(out)
}

fn query(ctx: &Context, n: u64) -> Result<BoundQuery, CliError> {
    let [d1, d2, d3] = ctx.config.bound_deltas()?;
    BoundQuery::new(n, d1, d2, d3, ctx.config.di.unwrap_or(1.0)).map_err(bounds_err)
}

fn check_max_bound(ctx: &Context, out: &mut Outcome) {
    if let Some(max) = ctx.config.assertions.and_then(|a| a.max_bound) {
        for b in out.table.column("bound").unwrap_or_default().iter().filter_map(|c| c.as_f64()) {
            if !(b <= max) {
                out.failures.push(format!("bound {b} exceeds max_bound {max}"));
            }
        }
    }
}

fn bound(ctx: &Context) -> Result<Outcome, CliError> {
    let q = ctx.config.distribution(ctx.base)?;
    let mut t = Table::new(&["n", "kappa_star", "alpha_star", "deviation_term", "log_term", "radicand", "bound", "vacuous"]);
    for n in ctx.config.n_grid(&[100, 1000, 10_000]) {
        let query = query(ctx, n)?;
        let b = match ctx.config.alpha_override {
            Some(a) => gap_bound_at_order(&q, a, &query),
            None => gap_bound(&q, &query),
        }
        .map_err(bounds_err)?;
        if b.bound.is_nan() {
            return Err(CliError::Numeric(format!("bound is NaN at n = {n}")));
        }
        t.push(vec![
            n.into(),
            b.kappa_star.into(),
            b.alpha_star.into(),
            b.deviation_term.into(),
            b.log_term.into(),
            b.radicand.into(),
            b.bound.into(),
            b.vacuous.into(),
        ]);
    }
    let mut out = Outcome::new(t);
    if let Some(last) = out.table.rows.last() {
        let (n, b) = (last[0].csv(), last[6].csv());
        out.say("n", n);
        out.say("bound", b);
    }
    check_max_bound(ctx, &mut out);
    out.plot = Some(("n", "bound", true));
    Ok(out)
}

fn total_delta(ctx: &Context) -> Result<f64, CliError> {
    match (ctx.config.delta, ctx.config.deltas) {
        (None, Some(d)) => Ok(d.iter().sum()),
        _ => ctx.config.require_delta(),
    }
}

fn sufficient(ctx: &Context) -> Result<Outcome, CliError> {
    let q = ctx.config.distribution(ctx.base)?;
    let s = SufficiencyQuery::new(total_delta(ctx)?, ctx.config.require_epsilon()?).map_err(bounds_err)?;
    let r = sufficient_n(&q, &s);
    let mut t = Table::new(&["delta", "epsilon", "n_sufficient", "alpha", "nu", "nu_tilde", "omega"]);
    t.push(vec![s.delta.into(), s.epsilon.into(), r.n.into(), r.alpha.into(), r.nu.into(), r.nu_tilde.into(), r.omega.into()]);
    let mut out = Outcome::new(t);
    out.say("n_sufficient", r.n);
    out.say("alpha", r.alpha);
    Ok(out)
}

fn trials(ctx: &Context, default: u64) -> Result<u64, CliError> {
    let t = ctx.trials.or(ctx.config.trials).unwrap_or(default);
    if t == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    Ok(t)
}

fn checked_learner(learner: Learner, task: &Task) -> Result<Learner, CliError> {
    if learner.default_label() >= task.num_labels() {
        return Err(CliError::Config(format!(
            "default label {} is outside the {} labels",
            learner.default_label(),
            task.num_labels()
        )));
    }
    Ok(learner)
}

fn check_violation_rate(ctx: &Context, out: &mut Outcome) {
    if let Some(max) = ctx.config.assertions.and_then(|a| a.max_violation_rate) {
        for v in out.table.column("violation_rate").unwrap_or_default().iter().filter_map(|c| c.as_f64()) {
            if v > max {
                out.failures.push(format!("violation rate {v} exceeds {max}"));
            }
        }
    }
}

fn simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let task = ctx.config.task(ctx.base)?;
    let learner = checked_learner(ctx.config.learner(), &task)?;
    let trials = trials(ctx, 100)?;
    let mut t = Table::new(&[
        "n",
        "trials",
        "kappa_star",
        "alpha_star",
        "bound",
        "vacuous",
        "delta_sum",
        "violation_rate",
        "mean_gap",
        "max_gap",
        "mean_empirical_risk",
        "mean_expected_risk",
    ]);
    let mut last = None;
    for n in ctx.config.n_grid(&[1000]) {
        let q = query(ctx, n)?;
        let r = run_gap_experiment(&task, &learner, n, &q, trials, ctx.seed).map_err(sim_err)?;
        let tf = trials as f64;
        t.push(vec![
            n.into(),
            trials.into(),
            r.bound.kappa_star.into(),
            r.bound.alpha_star.into(),
            r.bound.bound.into(),
            r.bound.vacuous.into(),
            r.delta_sum.into(),
            r.violation_rate.into(),
            r.mean_gap.into(),
            r.max_gap.into(),
            (r.trials.iter().map(|x| x.empirical_risk).sum::<f64>() / tf).into(),
            (r.trials.iter().map(|x| x.expected_risk).sum::<f64>() / tf).into(),
        ]);
        last = Some(r);
    }
    let mut out = Outcome::new(t);
    if let Some(r) = last {
        out.say("violation_rate", f6(r.violation_rate));
        out.say("mean_gap", f6(r.mean_gap));
        out.say("bound", f6(r.bound.bound));
    }
    check_violation_rate(ctx, &mut out);
    out.plot = Some(("n", "mean_gap", true));
    Ok(out)
}

fn label_rand(ctx: &Context) -> Result<Outcome, CliError> {
    let det = ctx.config.task(ctx.base)?;
    let spec = ctx.config.task.as_ref().expect("task() checked");
    if spec.uniform_labels {
        return Err(CliError::Config("label-rand takes the deterministic task; set uniform_labels = false".into()));
    }
    let learner = checked_learner(ctx.config.learner(), &det)?;
    let inputs = det.joint().inputs().clone();
    let f: Vec<usize> = (0..inputs.masses().len()).map(|x| det.joint().label_of(x).unwrap_or(0)).collect();
    let n = *ctx.config.n_grid(&[1000]).first().expect("non-empty");
    let q = query(ctx, n)?;
    let s = SufficiencyQuery::new(total_delta(ctx)?, ctx.config.require_epsilon()?).map_err(bounds_err)?;
    let r = run_label_randomization(&inputs, &f, det.num_labels(), &learner, &q, &s, trials(ctx, 100)?, ctx.seed)
        .map_err(sim_err)?;
    let mut t = Table::new(&["labeling", "n", "kappa_star", "bound", "violation_rate", "mean_gap", "sufficient_n"]);
    for (name, e, sn) in [
        ("deterministic", &r.deterministic, r.sufficient_n_deterministic),
        ("uniform", &r.randomized, r.sufficient_n_randomized),
    ] {
        t.push(vec![
            name.into(),
            n.into(),
            e.bound.kappa_star.into(),
            e.bound.bound.into(),
            e.violation_rate.into(),
            e.mean_gap.into(),
            sn.into(),
        ]);
    }
    let offset_err = r.entropy_offsets.iter().map(|(_, o)| (o - r.ln_num_labels).abs()).fold(0.0, f64::max);
    let mut out = Outcome::new(t);
    out.say("ln_num_labels", f6(r.ln_num_labels));
    out.say("max_offset_error", format!("{offset_err:.3e}"));
    out.say("bound_ratio", f6(r.bound_ratio));
    out.say("sufficient_n_ratio", f6(r.sufficient_n_ratio));
    out.say("min_nu_part_ratio", f6(r.min_nu_part_ratio));
    out.say("kappa_inequality", r.deterioration.kappa_inequality_holds);
    out.say("nu_inequality", r.deterioration.nu_inequality_holds);
    if let Some(min) = ctx.config.assertions.and_then(|a| a.min_nu_part_ratio) {
        if r.min_nu_part_ratio < min {
            out.failures.push(format!("ν-part ratio {} is below {min}", r.min_nu_part_ratio));
        }
    }
    Ok(out)
}

fn chb(ctx: &Context) -> Result<Outcome, CliError> {
    let task = ctx.config.task(ctx.base)?;
    let learner = checked_learner(ctx.config.learner(), &task)?;
    let delta = ctx.config.require_delta()?;
    let trials = trials(ctx, 1000)?;
    let mut t = Table::new(&[
        "n",
        "delta",
        "trials",
        "violation_rate",
        "pooled_violation_rate",
        "prior_total",
        "num_hypotheses",
        "mean_gap",
        "mean_radius",
    ]);
    for n in ctx.config.n_grid(&[8]) {
        let r = check_countable_hypothesis_bound(&task, &learner, n, delta, trials, ctx.seed).map_err(sim_err)?;
        let tf = trials as f64;
        t.push(vec![
            n.into(),
            delta.into(),
            trials.into(),
            r.violation_rate.into(),
            r.pooled_violation_rate.into(),
            r.prior_total.into(),
            r.num_hypotheses.into(),
            (r.trials.iter().map(|x| x.gap).sum::<f64>() / tf).into(),
            (r.trials.iter().map(|x| x.radius).sum::<f64>() / tf).into(),
        ]);
    }
    let mut out = Outcome::new(t);
    if let Some(row) = out.table.rows.last() {
        let (v, p) = (row[3].as_f64().unwrap_or(f64::NAN), row[5].as_f64().unwrap_or(f64::NAN));
        out.say("violation_rate", f6(v));
        out.say("prior_total", f6(p));
    }
    check_violation_rate(ctx, &mut out);
    Ok(out)
}

fn nfl(ctx: &Context) -> Result<Outcome, CliError> {
    let spec = ctx.config.nfl.ok_or_else(|| CliError::Config("`nfl` is required".into()))?;
    let params = NflParams { n0: spec.n0, n: spec.n, p: spec.p, epsilon: ctx.config.require_epsilon()?, trials: trials(ctx, 1000)? };
    let learners = match ctx.config.learner {
        Some(l) => vec![l],
        None => vec![Learner::HistogramErm { default_label: 0 }, Learner::Memorizer { default_label: 0 }],
    };
    let mut t = Table::new(&[
        "learner",
        "n0",
        "n",
        "p",
        "epsilon",
        "mu_err",
        "delta",
        "mean_risk",
        "std_error",
        "prob_risk_at_least_epsilon",
        "input_entropy",
    ]);
    let mut out_summary = Vec::new();
    let mut failures = Vec::new();
    for l in &learners {
        let r = run_nfl(&params, l, ctx.seed).map_err(sim_err)?;
        t.push(vec![
            l.name().into(),
            params.n0.into(),
            params.training_size().into(),
            params.p.into(),
            params.epsilon.into(),
            r.mu_err.into(),
            r.delta.into(),
            r.mean_risk.into(),
            r.std_error.into(),
            r.prob_risk_at_least_epsilon.into(),
            r.input_entropy.into(),
        ]);
        out_summary.push((format!("mean_risk[{}]", l.name()), f6(r.mean_risk)));
        if let Some(min) = ctx.config.assertions.and_then(|a| a.min_mean_risk) {
            if r.mean_risk < min {
                failures.push(format!("{} mean risk {} is below {min}", l.name(), r.mean_risk));
            }
        }
    }
    let mut out = Outcome::new(t);
    out.say("mu_err", f6(params.mu_err()));
    out.say("delta", f6(params.delta()));
    out.summary.extend(out_summary);
    out.say("existence", "averaged over uniformly random ground truths");
    out.failures = failures;
    Ok(out)
}

fn table1(ctx: &Context) -> Result<Outcome, CliError> {
    let spec = ctx.config.table1.ok_or_else(|| CliError::Config("`table1` is required".into()))?;
    let eps = ctx.config.require_epsilon()?;
    let delta = total_delta(ctx)?;
    let n = *ctx.config.n_grid(&[10_000]).first().expect("non-empty");
    let q = query(ctx, n)?;
    let mut t = Table::new(&["family", "gap_rate", "bound", "length_rate", "main_term", "sufficient_n"]);
    t.push(vec![
        "finite".into(),
        rates::finite_gap(spec.k, n).into(),
        bound_finite(spec.k, &q).map_err(bounds_err)?.bound.into(),
        rates::finite_length(spec.k, eps).into(),
        finite_main_term(spec.k, eps).into(),
        sufficient_finite(spec.k, delta, eps).map_err(bounds_err)?.into(),
    ]);
    t.push(vec![
        "exponential".into(),
        rates::exponential_gap(spec.exp_c, spec.exp_r, n).into(),
        bound_exponential(spec.exp_c, spec.exp_r, &q).map_err(bounds_err)?.bound.into(),
        rates::exponential_length(spec.exp_r, eps).into(),
        exponential_main_term(spec.exp_c, spec.exp_r, eps).into(),
        sufficient_exponential(spec.exp_c, spec.exp_r, delta, eps).map_err(bounds_err)?.into(),
    ]);
    t.push(vec![
        "power_law".into(),
        rates::powerlaw_gap(spec.pl_gamma, n).into(),
        bound_powerlaw(spec.pl_c, spec.pl_gamma, &q).map_err(bounds_err)?.bound.into(),
        rates::powerlaw_length(spec.pl_gamma, eps).into(),
        powerlaw_main_term(spec.pl_c, spec.pl_gamma, eps).into(),
        sufficient_powerlaw(spec.pl_c, spec.pl_gamma, delta, eps).map_err(bounds_err)?.into(),
    ]);
    let mut out = Outcome::new(t);
    out.say("n", n);
    out.say("epsilon", eps);
    Ok(out)
}
