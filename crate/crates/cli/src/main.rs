//! replicheck — command-line statistics for binary forced-choice
//! experiments.
//!
//! Five subcommands, one output convention: a JSON envelope on stdout
//! (`--format markdown` for a human-readable table) carrying the command
//! name, the resolved inputs, and the results. Exit codes: 0 success,
//! 1 runtime/IO failure, 2 usage error.

mod render;

use clap::{ArgGroup, Args, Parser, Subcommand};
use render::{Envelope, OutputFormat};
use replicheck_core::inference::{
    self, classify_significance, confidence_interval, confidence_interval_for_multiplier,
    BernoulliModel, IntervalPosition, IntervalResult, TailSpec,
};
use replicheck_core::simulate::{run_ensemble, write_histogram_csv, Sampler, SeedSpec};
use replicheck_core::{experiment, family, Probability, ZMultiplier};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "replicheck",
    version,
    about = "Statistics for binary forced-choice experiments: confidence intervals, \
             exact and Gaussian p-values, family-wise significance, and seeded \
             Monte Carlo replication ensembles"
)]
struct Cli {
    /// Output format for the result envelope
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Confidence interval around the null mean
    Ci(CiArgs),
    /// P-value for an observed hit count or rate
    #[command(name = "pvalue")]
    PValue(PValueArgs),
    /// Seeded Monte Carlo replication ensemble
    Simulate(SimulateArgs),
    /// Probability that k of K independent experiments reach significance
    Family(FamilyArgs),
    /// The full reference analysis (N=1560, observed rate 0.531) in one shot
    Report,
}

/// Sample size comes from --n or from a design file, never both.
#[derive(Args)]
#[command(group(ArgGroup::new("size").required(true).args(["n", "design"])))]
struct SizeArgs {
    /// Total number of trials
    #[arg(long)]
    n: Option<u64>,

    /// Path to a design document (JSON with session_groups)
    #[arg(long)]
    design: Option<PathBuf>,

    /// Null success probability (only with --n; a design file carries its own)
    #[arg(long, default_value_t = 0.5, conflicts_with = "design")]
    null_mean: f64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("width").required(true).args(["level", "multiplier"])))]
struct CiArgs {
    #[command(flatten)]
    size: SizeArgs,

    /// Confidence level in [0, 1)
    #[arg(long)]
    level: Option<f64>,

    /// Z-multiplier (number of standard errors), as an alternative to --level
    #[arg(long)]
    multiplier: Option<f64>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("observation").required(true).args(["hits", "rate"])))]
struct PValueArgs {
    #[command(flatten)]
    size: SizeArgs,

    /// Observed hit count
    #[arg(long)]
    hits: Option<u64>,

    /// Observed hit rate; resolved to the smallest count whose rate reaches it
    #[arg(long)]
    rate: Option<f64>,

    /// Which sampling model(s) to evaluate
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,

    /// Which tail to report
    #[arg(long, value_enum, default_value = "upper")]
    tail: TailArg,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    size: SizeArgs,

    /// True per-trial success probability used to generate data
    #[arg(long, default_value_t = 0.5)]
    true_p: f64,

    /// Number of simulated experiments (M)
    #[arg(long)]
    experiments: u64,

    /// Confidence level the sample means are classified against
    #[arg(long)]
    level: f64,

    /// Master seed; falls back to REPLICHECK_SEED, then to entropy
    #[arg(long, env = "REPLICHECK_SEED")]
    seed: Option<u64>,

    /// Write the hit-count histogram as CSV to this path
    #[arg(long)]
    histogram: Option<PathBuf>,

    /// Simulate every Bernoulli trial instead of drawing binomial totals
    #[arg(long)]
    per_trial: bool,
}

#[derive(Args)]
struct FamilyArgs {
    /// Number of independent experiments (K)
    #[arg(long)]
    total: u64,

    /// Threshold count of significant experiments (k)
    #[arg(long)]
    significant: u64,

    /// Per-experiment significance probability
    #[arg(long)]
    alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Exact,
    Gaussian,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum TailArg {
    Upper,
    Lower,
    Two,
}

impl From<TailArg> for TailSpec {
    fn from(tail: TailArg) -> Self {
        match tail {
            TailArg::Upper => TailSpec::Upper,
            TailArg::Lower => TailSpec::Lower,
            TailArg::Two => TailSpec::TwoSided,
        }
    }
}

enum CliError {
    /// Bad flag values or combinations: exit 2, message names the flag.
    Usage(String),
    /// IO or data failures at runtime: exit 1.
    Runtime(String),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self::Usage(message.into())
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self::Runtime(message.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Ci(args) => cmd_ci(args, format),
        Command::PValue(args) => cmd_pvalue(args, format),
        Command::Simulate(args) => cmd_simulate(args, format),
        Command::Family(args) => cmd_family(args, format),
        Command::Report => cmd_report(format),
    }
}

/// The resolved sample: the design (parsed, or synthesized from --n),
/// its totals, and where it came from.
struct ResolvedSize {
    design: experiment::ExperimentDesign,
    n_trials: u64,
    null_mean: Probability,
    design_path: Option<String>,
}

fn resolve_size(args: &SizeArgs) -> Result<ResolvedSize, CliError> {
    if let Some(path) = &args.design {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
        let design = experiment::parse_design(&text)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        return Ok(ResolvedSize {
            n_trials: design.total_trials(),
            null_mean: design.null_mean,
            design_path: Some(path.display().to_string()),
            design,
        });
    }
    let n_trials = args.n.expect("clap enforces --n xor --design");
    if n_trials == 0 {
        return Err(CliError::usage("--n must be >= 1"));
    }
    let null_mean = Probability::new(args.null_mean).map_err(|_| {
        CliError::usage(format!("--null-mean must be in [0, 1], got {}", args.null_mean))
    })?;
    let design = experiment::ExperimentDesign::single_group(n_trials, null_mean)
        .expect("n_trials >= 1 was just checked");
    Ok(ResolvedSize { design, n_trials, null_mean, design_path: None })
}

fn parse_probability(value: f64, flag: &str) -> Result<Probability, CliError> {
    Probability::new(value)
        .map_err(|_| CliError::usage(format!("{flag} must be in [0, 1], got {value}")))
}

// ---------------------------------------------------------------------------
// ci
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CiInputs {
    n_trials: u64,
    null_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplier: Option<f64>,
}

fn cmd_ci(args: CiArgs, format: OutputFormat) -> Result<String, CliError> {
    let size = resolve_size(&args.size)?;
    let model = BernoulliModel::new(size.null_mean);

    let interval = match (args.level, args.multiplier) {
        (Some(level), None) => {
            let level = parse_probability(level, "--level")?;
            confidence_interval(&model, size.n_trials, level)
                .map_err(|e| CliError::usage(format!("--level: {e}")))?
        }
        (None, Some(multiplier)) => {
            let multiplier = ZMultiplier::new(multiplier).map_err(|_| {
                CliError::usage(format!(
                    "--multiplier must be finite and >= 0, got {multiplier}"
                ))
            })?;
            confidence_interval_for_multiplier(&model, size.n_trials, multiplier)
                .map_err(|e| CliError::usage(format!("--multiplier: {e}")))?
        }
        _ => unreachable!("clap enforces --level xor --multiplier"),
    };

    let envelope = Envelope::pure(
        "ci",
        CiInputs {
            n_trials: size.n_trials,
            null_mean: size.null_mean.value(),
            design: size.design_path,
            level: args.level,
            multiplier: args.multiplier,
        },
        interval,
    );
    Ok(envelope.render(format))
}

// ---------------------------------------------------------------------------
// pvalue
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PValueInputs {
    n_trials: u64,
    null_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<String>,
    /// The hit count actually tested (resolved from --rate if given).
    hits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    method: String,
    tail: String,
}

#[derive(Serialize)]
struct PValueResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
    /// gaussian minus exact, present with --method both.
    #[serde(skip_serializing_if = "Option::is_none")]
    difference: Option<f64>,
}

fn cmd_pvalue(args: PValueArgs, format: OutputFormat) -> Result<String, CliError> {
    let size = resolve_size(&args.size)?;
    let model = BernoulliModel::new(size.null_mean);
    let tail: TailSpec = args.tail.into();

    let hits = match (args.hits, args.rate) {
        (Some(hits), None) => {
            if hits > size.n_trials {
                return Err(CliError::usage(format!(
                    "--hits must be <= the number of trials ({}), got {hits}",
                    size.n_trials
                )));
            }
            hits
        }
        (None, Some(rate)) => {
            let rate = parse_probability(rate, "--rate")?;
            inference::hits_for_rate(rate, size.n_trials)
        }
        _ => unreachable!("clap enforces --hits xor --rate"),
    };

    let gaussian = match args.method {
        MethodArg::Gaussian | MethodArg::Both => Some(
            inference::p_value_gaussian(hits, size.n_trials, &model, tail)
                .map_err(|e| CliError::usage(e.to_string()))?
                .value
                .value(),
        ),
        MethodArg::Exact => None,
    };
    let exact = match args.method {
        MethodArg::Exact | MethodArg::Both => Some(
            inference::p_value_exact(hits, size.n_trials, &model, tail)
                .map_err(|e| CliError::usage(e.to_string()))?
                .value
                .value(),
        ),
        MethodArg::Gaussian => None,
    };
    let difference = match (gaussian, exact) {
        (Some(g), Some(e)) => Some(g - e),
        _ => None,
    };

    let envelope = Envelope::pure(
        "pvalue",
        PValueInputs {
            n_trials: size.n_trials,
            null_mean: size.null_mean.value(),
            design: size.design_path,
            hits,
            rate: args.rate,
            method: format!("{:?}", args.method).to_lowercase(),
            tail: format!("{:?}", args.tail).to_lowercase(),
        },
        PValueResults { gaussian, exact, difference },
    );
    Ok(envelope.render(format))
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SimulateInputs {
    n_trials: u64,
    null_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<String>,
    true_p: f64,
    experiments: u64,
    level: f64,
    sampler: Sampler,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<String>,
}

/// Seed of last resort when neither --seed nor REPLICHECK_SEED is set.
fn entropy_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    nanos ^ u64::from(std::process::id()).rotate_left(32)
}

fn cmd_simulate(args: SimulateArgs, format: OutputFormat) -> Result<String, CliError> {
    let size = resolve_size(&args.size)?;
    let true_p = parse_probability(args.true_p, "--true-p")?;
    let level = parse_probability(args.level, "--level")?;
    if level.value() >= 1.0 {
        return Err(CliError::usage("--level must be below 1"));
    }
    if args.experiments == 0 {
        return Err(CliError::usage("--experiments must be >= 1"));
    }
    let seed = SeedSpec::new(args.seed.unwrap_or_else(entropy_seed));
    let sampler = if args.per_trial { Sampler::PerTrial } else { Sampler::Fast };

    let summary = run_ensemble(&size.design, true_p, args.experiments, level, seed, sampler)
        .map_err(|e| CliError::usage(e.to_string()))?;

    if let Some(path) = &args.histogram {
        let mut file = fs::File::create(path)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        write_histogram_csv(&summary, &mut file)
            .and_then(|()| file.flush())
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    }

    let envelope = Envelope::stochastic(
        "simulate",
        SimulateInputs {
            n_trials: size.n_trials,
            null_mean: size.null_mean.value(),
            design: size.design_path,
            true_p: true_p.value(),
            experiments: args.experiments,
            level: level.value(),
            sampler,
            histogram: args.histogram.as_ref().map(|p| p.display().to_string()),
        },
        summary,
        seed.master_seed,
    );
    Ok(envelope.render(format))
}

// ---------------------------------------------------------------------------
// family
// ---------------------------------------------------------------------------

fn cmd_family(args: FamilyArgs, format: OutputFormat) -> Result<String, CliError> {
    let alpha = parse_probability(args.alpha, "--alpha")?;
    let query = family::FamilyQuery::new(args.total, args.significant, alpha)
        .map_err(|e| CliError::usage(format!("--total/--significant/--alpha: {e}")))?;
    let result = family::family_probability(&query);
    let envelope = Envelope::pure("family", query, result);
    Ok(envelope.render(format))
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// The reference forced-choice experiment: 40 sessions of 12 trials plus
/// 60 sessions of 18 (N = 1560), reported hit rate 53.1%, one of a
/// family of 9 experiments judged at alpha = 0.05.
const REFERENCE_N: u64 = 1560;
const REFERENCE_RATE: f64 = 0.531;

#[derive(Serialize)]
struct ReportInputs {
    n_trials: u64,
    observed_rate: f64,
    family_total: u64,
    family_significant: u64,
    family_alpha: f64,
}

#[derive(Serialize)]
struct ReportResults {
    sem: f64,
    ci_95: IntervalResult,
    ci_multiplier_2_5: IntervalResult,
    observed_vs_95: IntervalPosition,
    observed_vs_2_5: IntervalPosition,
    hits_for_observed_rate: u64,
    p_gaussian_upper: f64,
    p_exact_upper: f64,
    p_difference: f64,
    family_8_of_9: family::FamilyResult,
}

fn cmd_report(format: OutputFormat) -> Result<String, CliError> {
    let model = BernoulliModel::fair();
    let level_95 = Probability::new(0.95).expect("constant");
    let rate = Probability::new(REFERENCE_RATE).expect("constant");
    let alpha = Probability::new(0.05).expect("constant");

    let fail = |e: replicheck_core::Error| CliError::runtime(e.to_string());

    let sem = inference::sem(&model, REFERENCE_N).map_err(fail)?;
    let ci_95 = confidence_interval(&model, REFERENCE_N, level_95).map_err(fail)?;
    let ci_25 = confidence_interval_for_multiplier(
        &model,
        REFERENCE_N,
        ZMultiplier::new(2.5).expect("constant"),
    )
    .map_err(fail)?;

    let hits = inference::hits_for_rate(rate, REFERENCE_N);
    let gaussian = inference::p_value_gaussian(hits, REFERENCE_N, &model, TailSpec::Upper)
        .map_err(fail)?
        .value
        .value();
    let exact = inference::p_value_exact(hits, REFERENCE_N, &model, TailSpec::Upper)
        .map_err(fail)?
        .value
        .value();

    let family_query = family::FamilyQuery::new(9, 8, alpha).map_err(fail)?;
    let family_result = family::family_probability(&family_query);

    let envelope = Envelope::pure(
        "report",
        ReportInputs {
            n_trials: REFERENCE_N,
            observed_rate: REFERENCE_RATE,
            family_total: 9,
            family_significant: 8,
            family_alpha: 0.05,
        },
        ReportResults {
            sem,
            observed_vs_95: classify_significance(REFERENCE_RATE, &ci_95),
            observed_vs_2_5: classify_significance(REFERENCE_RATE, &ci_25),
            ci_95,
            ci_multiplier_2_5: ci_25,
            hits_for_observed_rate: hits,
            p_gaussian_upper: gaussian,
            p_exact_upper: exact,
            p_difference: gaussian - exact,
            family_8_of_9: family_result,
        },
    );
    Ok(envelope.render(format))
}
