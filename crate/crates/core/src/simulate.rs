//! Seeded Monte Carlo replication of an experiment design.
//!
//! The engine answers the repeated-experiment question directly: run the
//! same design `M` times under a chosen true success probability, and
//! count how often the sample mean escapes a confidence interval built
//! around the null mean.
//!
//! # Reproducibility contract
//!
//! Results are a pure function of `(design, true_p, M, level, seed)`,
//! independent of thread count or scheduling. The generator is ChaCha8
//! (`rand_chacha`), fixed here by name: deterministic across platforms,
//! period 2^128. Experiment `i` never shares a stream with experiment
//! `j`; its generator is keyed by the SplitMix64 finalizer
//!
//! ```text
//! stream_seed(master, i) = mix64(master + (i + 1) * 0x9E3779B97F4A7C15)
//! ```
//!
//! which is injective in `i` for a fixed master seed. Aggregation uses
//! only integer counters, so reductions are exact and order-independent.

use crate::experiment::ExperimentDesign;
use crate::inference::{confidence_interval, BernoulliModel};
use crate::numeric::Probability;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::{self, Write};

/// Master seed for an ensemble run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }
}

/// Which sampling path generates a single experiment's hit count.
///
/// `Fast` draws the binomial total directly; `PerTrial` simulates every
/// Bernoulli trial. The two are statistically equivalent (a
/// goodness-of-fit test in this crate's test suite holds them to it);
/// per-trial exists as the fidelity reference and costs N draws per
/// experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    #[default]
    Fast,
    PerTrial,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The dedicated generator for experiment `index` under `seed`.
pub fn experiment_stream(seed: SeedSpec, index: u64) -> ChaCha8Rng {
    let stream_seed = mix64(
        seed.master_seed
            .wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
    );
    ChaCha8Rng::seed_from_u64(stream_seed)
}

/// Simulate one experiment trial by trial; returns the hit count.
///
/// This is the definitional path: `total_trials` independent Bernoulli
/// draws at `true_p`.
pub fn simulate_experiment(
    design: &ExperimentDesign,
    true_p: Probability,
    rng: &mut ChaCha8Rng,
) -> u64 {
    let n = design.total_trials();
    let p = true_p.value();
    let mut hits = 0u64;
    for _ in 0..n {
        if rng.random::<f64>() < p {
            hits += 1;
        }
    }
    hits
}

/// Draw a Binomial(n, p) hit count in O(1)-ish time via `rand_distr`.
pub fn sample_binomial_fast(n: u64, p: Probability, rng: &mut ChaCha8Rng) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p.value())
        .expect("Probability guarantees a valid p")
        .sample(rng)
}

/// Aggregate of an ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub ensemble_size: u64,
    pub level: Probability,
    pub fraction_above: f64,
    pub fraction_below: f64,
    pub fraction_outside: f64,
    pub mean_of_means: f64,
    /// Occupied hit-count bins, ascending, with their frequencies.
    pub histogram: Vec<(u64, u64)>,
    pub master_seed: u64,
}

#[derive(Default)]
struct Tally {
    above: u64,
    below: u64,
    hits_sum: u128,
    histogram: BTreeMap<u64, u64>,
}

impl Tally {
    fn record(mut self, hits: u64, above: bool, below: bool) -> Self {
        self.above += above as u64;
        self.below += below as u64;
        self.hits_sum += hits as u128;
        *self.histogram.entry(hits).or_insert(0) += 1;
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.above += other.above;
        self.below += other.below;
        self.hits_sum += other.hits_sum;
        for (hits, count) in other.histogram {
            *self.histogram.entry(hits).or_insert(0) += count;
        }
        self
    }
}

fn draw_hits(design: &ExperimentDesign, true_p: Probability, sampler: Sampler, rng: &mut ChaCha8Rng) -> u64 {
    match sampler {
        Sampler::Fast => sample_binomial_fast(design.total_trials(), true_p, rng),
        Sampler::PerTrial => simulate_experiment(design, true_p, rng),
    }
}

/// Run `ensemble_size` independent experiments and classify each sample
/// mean against the confidence interval at `level` around the design's
/// null mean.
///
/// Classification uses the same strict-exceedance rule as
/// [`classify_significance`](crate::inference::classify_significance):
/// a mean exactly on a bound is inside. Experiments may execute on any
/// number of threads; the summary is bit-identical either way.
pub fn run_ensemble(
    design: &ExperimentDesign,
    true_p: Probability,
    ensemble_size: u64,
    level: Probability,
    seed: SeedSpec,
    sampler: Sampler,
) -> Result<SimulationSummary> {
    if ensemble_size == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let n = design.total_trials();
    let model = BernoulliModel::new(design.null_mean);
    let interval = confidence_interval(&model, n, level)?;

    let tally = (0..ensemble_size)
        .into_par_iter()
        .fold(Tally::default, |tally, index| {
            let mut rng = experiment_stream(seed, index);
            let hits = draw_hits(design, true_p, sampler, &mut rng);
            let mean = hits as f64 / n as f64;
            tally.record(hits, mean > interval.upper, mean < interval.lower)
        })
        .reduce(Tally::default, Tally::merge);

    let m = ensemble_size as f64;
    let fraction_above = tally.above as f64 / m;
    let fraction_below = tally.below as f64 / m;
    Ok(SimulationSummary {
        ensemble_size,
        level,
        fraction_above,
        fraction_below,
        fraction_outside: fraction_above + fraction_below,
        mean_of_means: tally.hits_sum as f64 / (m * n as f64),
        histogram: tally.histogram.into_iter().collect(),
        master_seed: seed.master_seed,
    })
}

/// Monte Carlo estimate of `P(sample mean >= observed_rate)` under
/// `true_p`, using the fast sampling path.
///
/// A mean meets the bar exactly when its hit count reaches
/// `hits_for_rate(observed_rate, N)`, the same ceiling convention used
/// everywhere else, so this converges to the exact binomial upper tail
/// at that threshold.
pub fn replication_exceedance(
    design: &ExperimentDesign,
    true_p: Probability,
    observed_rate: Probability,
    ensemble_size: u64,
    seed: SeedSpec,
) -> Result<Probability> {
    if ensemble_size == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let n = design.total_trials();
    let threshold = crate::inference::hits_for_rate(observed_rate, n);

    let exceeding: u64 = (0..ensemble_size)
        .into_par_iter()
        .map(|index| {
            let mut rng = experiment_stream(seed, index);
            let hits = sample_binomial_fast(n, true_p, &mut rng);
            (hits >= threshold) as u64
        })
        .sum();

    Probability::new(exceeding as f64 / ensemble_size as f64)
}

/// Write a summary's histogram as CSV: header `hits,count`, one row per
/// occupied bin, ascending.
pub fn write_histogram_csv<W: Write>(summary: &SimulationSummary, out: &mut W) -> io::Result<()> {
    writeln!(out, "hits,count")?;
    for (hits, count) in &summary.histogram {
        writeln!(out, "{hits},{count}")?;
    }
    Ok(())
}
