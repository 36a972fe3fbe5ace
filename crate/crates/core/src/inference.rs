//! Sample-mean inference for Bernoulli experiments: standard errors,
//! confidence intervals around the null mean, and p-values under the
//! Gaussian (CLT) model and the exact binomial distribution.
//!
//! Two modeling choices are deliberate and fixed:
//!
//! - the per-trial standard deviation is taken under the null
//!   (`sqrt(p0*(1-p0))`), not from the observed rate;
//! - the Gaussian p-value applies no continuity correction, treating the
//!   sample mean as a genuinely continuous variable. The exact binomial
//!   p-value sits alongside it to quantify the gap that choice leaves.

use crate::numeric::{
    self, binomial_lower_tail, binomial_upper_tail, confidence_level_for_multiplier,
    multiplier_for_confidence_level, Probability, ZMultiplier,
};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// The null model for one trial: success probability and its standard
/// deviation `sigma_b = sqrt(p0*(1-p0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliModel {
    pub p0: Probability,
    pub sigma_b: f64,
}

impl BernoulliModel {
    pub fn new(p0: Probability) -> Self {
        let p = p0.value();
        Self {
            p0,
            sigma_b: (p * (1.0 - p)).sqrt(),
        }
    }

    /// The fair-coin null, `p0 = 0.5` with `sigma_b = 0.5` exactly.
    pub fn fair() -> Self {
        Self::new(Probability::HALF)
    }
}

/// A Bernoulli model aggregated over `n_trials` trials: the sample mean
/// has standard deviation `sem = sigma_b / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMeanModel {
    pub model: BernoulliModel,
    pub n_trials: u64,
    pub sem: f64,
}

impl SampleMeanModel {
    pub fn new(model: BernoulliModel, n_trials: u64) -> Result<Self> {
        Ok(Self {
            model,
            n_trials,
            sem: sem(&model, n_trials)?,
        })
    }
}

/// Standard error of the sample mean, `sigma_b / sqrt(n_trials)`.
pub fn sem(model: &BernoulliModel, n_trials: u64) -> Result<f64> {
    if n_trials == 0 {
        return Err(Error::ZeroTrials);
    }
    Ok(model.sigma_b / (n_trials as f64).sqrt())
}

/// A confidence interval `p0 +/- multiplier * sem` together with the
/// level and multiplier that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalResult {
    pub level: Probability,
    pub multiplier: ZMultiplier,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
}

fn build_interval(
    model: &BernoulliModel,
    n_trials: u64,
    level: Probability,
    multiplier: ZMultiplier,
) -> Result<IntervalResult> {
    let half_width = multiplier.value() * sem(model, n_trials)?;
    Ok(IntervalResult {
        level,
        multiplier,
        half_width,
        lower: model.p0.value() - half_width,
        upper: model.p0.value() + half_width,
    })
}

/// Interval around the null mean at a given confidence level; the
/// multiplier is recovered by inverting `erf(n/sqrt(2)) = level`.
pub fn confidence_interval(
    model: &BernoulliModel,
    n_trials: u64,
    level: Probability,
) -> Result<IntervalResult> {
    let multiplier = multiplier_for_confidence_level(level)?;
    build_interval(model, n_trials, level, multiplier)
}

/// Interval around the null mean for a directly supplied z-multiplier;
/// the level is derived from it.
pub fn confidence_interval_for_multiplier(
    model: &BernoulliModel,
    n_trials: u64,
    multiplier: ZMultiplier,
) -> Result<IntervalResult> {
    let level = confidence_level_for_multiplier(multiplier);
    build_interval(model, n_trials, level, multiplier)
}

/// Which tail of the sampling distribution a p-value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailSpec {
    Upper,
    Lower,
    TwoSided,
}

/// Which sampling model a p-value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMethod {
    Gaussian,
    ExactBinomial,
}

/// A p-value plus the method and tail convention that define it.
///
/// Two-sided values are `min(1, 2 * smaller tail)`, so they are always
/// at least as large as the one-sided value in the observed direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PValueResult {
    pub method: PValueMethod,
    pub tail: TailSpec,
    pub value: Probability,
}

fn select_tail(tail: TailSpec, upper: f64, lower: f64) -> f64 {
    match tail {
        TailSpec::Upper => upper,
        TailSpec::Lower => lower,
        TailSpec::TwoSided => (2.0 * upper.min(lower)).min(1.0),
    }
}

/// Gaussian-model p-value at a hit count: `z = (hits/N - p0) / sem`,
/// upper tail `(1 - erf(z/sqrt(2))) / 2`, no continuity correction.
pub fn p_value_gaussian(
    hits: u64,
    n_trials: u64,
    model: &BernoulliModel,
    tail: TailSpec,
) -> Result<PValueResult> {
    if hits > n_trials {
        return Err(Error::HitsExceedTrials { hits, n_trials });
    }
    let rate = hits as f64 / n_trials as f64;
    gaussian_at_rate(rate, n_trials, model, tail)
}

/// Gaussian-model p-value at a continuous observed rate. The Gaussian
/// model never discretizes, so rates that correspond to no integer hit
/// count are meaningful here.
pub fn p_value_gaussian_at_rate(
    rate: Probability,
    n_trials: u64,
    model: &BernoulliModel,
    tail: TailSpec,
) -> Result<PValueResult> {
    gaussian_at_rate(rate.value(), n_trials, model, tail)
}

fn gaussian_at_rate(
    rate: f64,
    n_trials: u64,
    model: &BernoulliModel,
    tail: TailSpec,
) -> Result<PValueResult> {
    let sem = sem(model, n_trials)?;
    if sem == 0.0 {
        return Err(Error::DegenerateNull(model.p0.value()));
    }
    let z = (rate - model.p0.value()) / sem;
    // 0.5*erfc(x) == (1 - erf(x))/2 without right-tail cancellation
    let upper = 0.5 * numeric::erfc(z * FRAC_1_SQRT_2)?;
    let lower = 0.5 * numeric::erfc(-z * FRAC_1_SQRT_2)?;
    Ok(PValueResult {
        method: PValueMethod::Gaussian,
        tail,
        value: Probability::new(select_tail(tail, upper, lower).clamp(0.0, 1.0))?,
    })
}

/// Exact binomial p-value: upper tail `P(X >= hits)`, lower tail
/// `P(X <= hits)`, both inclusive.
pub fn p_value_exact(
    hits: u64,
    n_trials: u64,
    model: &BernoulliModel,
    tail: TailSpec,
) -> Result<PValueResult> {
    if hits > n_trials {
        return Err(Error::HitsExceedTrials { hits, n_trials });
    }
    if n_trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let upper = binomial_upper_tail(n_trials, hits, model.p0)?.value();
    let lower = binomial_lower_tail(n_trials, hits, model.p0)?.value();
    Ok(PValueResult {
        method: PValueMethod::ExactBinomial,
        tail,
        value: Probability::new(select_tail(tail, upper, lower).min(1.0))?,
    })
}

/// Where an observed rate falls relative to a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalPosition {
    Inside,
    Above,
    Below,
}

/// Strict comparison against the interval bounds; a rate exactly on a
/// bound counts as inside.
pub fn classify_significance(observed_rate: f64, interval: &IntervalResult) -> IntervalPosition {
    if observed_rate > interval.upper {
        IntervalPosition::Above
    } else if observed_rate < interval.lower {
        IntervalPosition::Below
    } else {
        IntervalPosition::Inside
    }
}

/// The smallest hit count whose rate meets or exceeds `rate` — the fixed
/// convention for turning a reported percentage into a count.
pub fn hits_for_rate(rate: Probability, n_trials: u64) -> u64 {
    let n = n_trials as f64;
    let mut k = (rate.value() * n).ceil() as u64;
    k = k.min(n_trials);
    // guard the float rounding on both sides
    while k > 0 && (k - 1) as f64 / n >= rate.value() {
        k -= 1;
    }
    while k < n_trials && (k as f64 / n) < rate.value() {
        k += 1;
    }
    k
}
