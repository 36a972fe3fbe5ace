//! Statistics for binary forced-choice experiments.
//!
//! Everything here models the same situation: a subject makes `N` yes/no
//! guesses, each guess is a Bernoulli trial with null success probability
//! `p0` (usually 0.5), and we ask how surprising an observed hit rate
//! actually is. The crate provides:
//!
//! - [`numeric`] — the error function, its inverse, and exact binomial
//!   tail probabilities computed in log space.
//! - [`inference`] — standard error of the sample mean, confidence
//!   intervals around the null mean, and p-values under both the Gaussian
//!   (CLT) model and the exact binomial distribution.
//! - [`experiment`] — experiment designs as session groups
//!   (sessions × trials-per-session) with a JSON schema.
//! - [`simulate`] — a seeded, reproducible Monte Carlo engine that
//!   replays an experiment many times under a chosen true success
//!   probability and reports how often the sample mean escapes a
//!   confidence interval.
//! - [`family`] — the probability that at least k of K independent
//!   experiments reach per-experiment significance under a global null.

pub mod experiment;
pub mod family;
pub mod inference;
pub mod numeric;
pub mod simulate;

mod error;

pub use error::Error;
pub use experiment::{ExperimentDesign, SessionGroup};
pub use family::{FamilyQuery, FamilyResult};
pub use inference::{
    BernoulliModel, IntervalPosition, IntervalResult, PValueMethod, PValueResult,
    SampleMeanModel, TailSpec,
};
pub use numeric::{Probability, ZMultiplier};
pub use simulate::{Sampler, SeedSpec, SimulationSummary};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
