//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid invocation or config, 3 numerical or
//! runtime failure, 4 failed embedded assertion.

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use thiserror::Error;

use config::{ExperimentConfig, ExperimentKind};
use report::{ExperimentReport, Metadata};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "renyigap", version, about = "Rényi-entropy generalization-gap bounds and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rényi entropies over a grid of orders.
    Entropy(CommonArgs),
    /// Gap bound over a grid of sample sizes.
    Bound(CommonArgs),
    /// Sufficient sample size for accuracy ε at confidence 1−δ.
    SufficientN(CommonArgs),
    /// Monte-Carlo gaps against the bound.
    Simulate(CommonArgs),
    /// Deterministic versus uniformly random labels.
    LabelRand(CommonArgs),
    /// Countable-hypothesis bound with the histogram prior.
    Chb(CommonArgs),
    /// No-free-lunch construction.
    Nfl(CommonArgs),
    /// Finite, exponential and power-law families side by side.
    Table1(CommonArgs),
}

impl Command {
    fn parts(&self) -> (ExperimentKind, &CommonArgs) {
        match self {
            Command::Entropy(a) => (ExperimentKind::Entropy, a),
            Command::Bound(a) => (ExperimentKind::Bound, a),
            Command::SufficientN(a) => (ExperimentKind::SufficientN, a),
            Command::Simulate(a) => (ExperimentKind::GapSim, a),
            Command::LabelRand(a) => (ExperimentKind::LabelRand, a),
            Command::Chb(a) => (ExperimentKind::ChbCheck, a),
            Command::Nfl(a) => (ExperimentKind::Nfl, a),
            Command::Table1(a) => (ExperimentKind::Table1, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file for the table; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trial count, overriding the config.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let (kind, args) = cli.command.parts();
    let bytes = std::fs::read(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", args.config.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Config("config is not UTF-8".into()))?;
    let config = ExperimentConfig::parse(&text)?;
    if let Some(k) = config.kind {
        if k != kind {
            return Err(CliError::Config(format!("config is for `{}` but the command runs `{}`", k.name(), kind.name())));
        }
    }
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let ctx = commands::Context { config: &config, base: &base, seed, trials: args.trials };
    let outcome = commands::run(kind, &ctx)?;

    let hash: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let report = ExperimentReport {
        table: outcome.table,
        summary: outcome.summary,
        metadata: Metadata {
            kind: kind.name(),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: hash,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
    };
    let body = match args.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.to_json(),
    };
    let out_path = args.out.clone().or_else(|| config.output.as_ref().and_then(|o| o.table.clone()).map(|p| base.join(p)));
    match &out_path {
        Some(p) => {
            write_file(p, &body)?;
            print!("{}", report.summary_text());
        }
        None => {
            print!("{body}");
            eprint!("{}", report.summary_text());
        }
    }
    let _ = std::io::stdout().flush();
    if let (Some(svg_path), Some((x, y, log_x))) = (config.output.as_ref().and_then(|o| o.svg.clone()), outcome.plot) {
        if let Some(svg) = svg::line_plot(&report.table, x, y, log_x) {
            write_file(&base.join(svg_path), &svg)?;
        }
    }
    if !outcome.failures.is_empty() {
        return Err(CliError::Assertion(outcome.failures.join("; ")));
    }
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::config::*;
    use super::*;
    use crate::dist::{DistributionLiteral, TailModel};
    use crate::simulator::Learner;
    use proptest::prelude::*;

    #[test]
    fn distribution_specs_parse() {
        let c = ExperimentConfig::parse(r#"{"distribution": {"type": "literal", "masses": [0.4], "tail": {"kind": "geometric", "C": 0.6, "r": 0.5}}}"#).unwrap();
        assert_eq!(
            c.distribution,
            Some(DistributionSpec::Literal(DistributionLiteral { masses: vec![0.4], tail: TailModel::Geometric { scale: 0.6, r: 0.5 } }))
        );
        let c = ExperimentConfig::parse(r#"{"distribution": {"type": "zipf", "gamma": 2.0, "support": 50}, "alpha_grid": [0, 1, "inf"]}"#).unwrap();
        assert_eq!(c.alpha_grid.unwrap()[2], OrderSpec::Named(NamedOrder::Infinity));
        assert!(ExperimentConfig::parse(r#"{"distribution": {"type": "uniform", "k": 3, "extra": 1}}"#).is_err());
        assert!(ExperimentConfig::parse(r#"{"bogus": 1}"#).is_err());
        let e = ExperimentConfig::parse(r#"{"distribution": {"type": "zipf", "gamma": 1.0}}"#).unwrap();
        assert!(matches!(e.distribution(Path::new(".")), Err(CliError::Config(_))));
    }

    fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
        let dist = prop_oneof![
            (1usize..100).prop_map(|k| DistributionSpec::Uniform { k }),
            (1.01f64..4.0, prop::option::of(1usize..500)).prop_map(|(gamma, support)| DistributionSpec::Zipf { gamma, support }),
            (0.01f64..0.99).prop_map(|r| DistributionSpec::Geometric { r }),
            Just(DistributionSpec::PointMass),
            prop::collection::vec(0.0f64..1.0, 1..6).prop_map(|masses| DistributionSpec::Literal(DistributionLiteral { masses, tail: TailModel::None })),
            "[a-z]{1,8}\\.json".prop_map(|p| DistributionSpec::File { path: p.into() }),
        ];
        let kind = prop_oneof![
            Just(ExperimentKind::Entropy),
            Just(ExperimentKind::Bound),
            Just(ExperimentKind::SufficientN),
            Just(ExperimentKind::GapSim),
            Just(ExperimentKind::LabelRand),
            Just(ExperimentKind::ChbCheck),
            Just(ExperimentKind::Nfl),
            Just(ExperimentKind::Table1),
        ];
        let order = prop_oneof![(0.0f64..10.0).prop_map(OrderSpec::Value), Just(OrderSpec::Named(NamedOrder::Infinity))];
        let learner = prop_oneof![
            (0usize..3).prop_map(|d| Learner::HistogramErm { default_label: d }),
            (0usize..3).prop_map(|d| Learner::Memorizer { default_label: d }),
        ];
        let task = (1usize..5, prop::option::of(prop::collection::vec(0usize..5, 0..6)), any::<bool>())
            .prop_map(|(num_labels, labels, uniform_labels)| TaskSpec { num_labels, labels, uniform_labels });
        (
            (prop::option::of(kind), prop::option::of(dist), prop::option::of(task), prop::collection::vec(1u64..100_000, 0..4)),
            (prop::option::of(1e-4f64..0.3), prop::option::of([1e-4f64..0.3, 1e-4f64..0.3, 1e-4f64..0.3]), prop::option::of(0.01f64..0.99), prop::option::of(0.0f64..3.0)),
            (prop::option::of(prop::collection::vec(order, 0..5)), prop::option::of(0.0f64..1.0), prop::option::of(1u64..10_000), prop::option::of(any::<u64>()), prop::option::of(learner)),
            (
                prop::option::of((1u64..100, 1usize..5, prop::option::of(1u64..100)).prop_map(|(n0, p, n)| NflSpec { n0, p, n })),
                prop::option::of((2usize..100, 0.1f64..5.0, 0.01f64..0.99, 0.1f64..5.0, 1.01f64..4.0).prop_map(|(k, exp_c, exp_r, pl_c, pl_gamma)| Table1Spec { k, exp_c, exp_r, pl_c, pl_gamma })),
                prop::option::of((prop::option::of(0.0f64..1.0), prop::option::of(0.0f64..1.0)).prop_map(|(a, b)| Assertions { max_violation_rate: a, min_mean_risk: b, max_bound: None, min_nu_part_ratio: b })),
                prop::option::of(("[a-z]{1,6}\\.csv", prop::option::of("[a-z]{1,6}\\.svg")).prop_map(|(t, s)| OutputSpec { table: Some(t.into()), svg: s.map(Into::into) })),
            ),
        )
            .prop_map(|((kind, distribution, task, n), (delta, deltas, epsilon, di), (alpha_grid, alpha_override, trials, seed, learner), (nfl, table1, assertions, output))| ExperimentConfig {
                kind,
                distribution,
                task,
                n,
                delta,
                deltas,
                epsilon,
                di,
                alpha_grid,
                alpha_override,
                trials,
                seed,
                learner,
                nfl,
                table1,
                assertions,
                output,
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn config_round_trips(c in arb_config()) {
            let back = ExperimentConfig::parse(&c.to_json()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
