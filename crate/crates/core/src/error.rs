use thiserror::Error;

/// Errors produced by domain-type construction and the statistical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A probability must be a finite value in [0, 1].
    #[error("probability must be in [0, 1], got {0}")]
    InvalidProbability(f64),

    /// A z-multiplier must be finite and non-negative.
    #[error("z-multiplier must be finite and >= 0, got {0}")]
    InvalidMultiplier(f64),

    /// erf and friends reject NaN and infinities.
    #[error("input must be finite, got {0}")]
    NonFiniteInput(f64),

    /// Inverting the confidence-level equation requires level < 1.
    #[error("confidence level must be < 1 to invert, got {0}")]
    LevelNotInvertible(f64),

    /// Binomial quantities need k <= n.
    #[error("k must be <= n, got k={k}, n={n}")]
    KExceedsN { k: u64, n: u64 },

    /// Hit counts cannot exceed the number of trials.
    #[error("hits must be <= n_trials, got hits={hits}, n_trials={n_trials}")]
    HitsExceedTrials { hits: u64, n_trials: u64 },

    /// Sample-mean quantities need at least one trial.
    #[error("n_trials must be >= 1")]
    ZeroTrials,

    /// The Gaussian model needs a non-degenerate null (0 < p0 < 1).
    #[error("gaussian model is undefined for a degenerate null, p0 = {0}")]
    DegenerateNull(f64),

    /// An ensemble needs at least one experiment.
    #[error("ensemble size must be >= 1")]
    EmptyEnsemble,

    /// A design document failed schema validation; the path names the
    /// offending field.
    #[error("invalid design at {path}: {reason}")]
    DesignValidation { path: String, reason: String },

    /// A design document could not be parsed at all.
    #[error("failed to parse design: {0}")]
    DesignParse(String),

    /// Family queries need 0 <= k <= K and 0 < alpha < 1.
    #[error("invalid family query: {0}")]
    InvalidFamilyQuery(String),
}
