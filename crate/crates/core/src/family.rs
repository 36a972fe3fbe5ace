//! Family-wise significance under a global null: if K independent
//! experiments each reach per-experiment significance with probability
//! alpha, how likely is it that at least k of them do?
//!
//! Experiments are modeled as independent with one shared alpha — the
//! simplest family model, and a documented limitation: nothing here
//! captures dependence between experiments or per-experiment alphas.

use crate::numeric::{binomial_upper_tail, log_binomial_coefficient, Probability};
use crate::{Error, Result};
use serde::Serialize;

/// How many of `total_experiments` reached significance `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyQuery {
    pub total_experiments: u64,
    pub significant_count: u64,
    pub alpha: Probability,
}

impl FamilyQuery {
    /// Validates `K >= 1`, `k <= K`, `0 < alpha < 1`.
    pub fn new(total_experiments: u64, significant_count: u64, alpha: Probability) -> Result<Self> {
        if total_experiments == 0 {
            return Err(Error::InvalidFamilyQuery(
                "total_experiments must be >= 1".to_string(),
            ));
        }
        if significant_count > total_experiments {
            return Err(Error::InvalidFamilyQuery(format!(
                "significant_count {significant_count} exceeds total_experiments {total_experiments}"
            )));
        }
        if alpha.value() == 0.0 || alpha.value() == 1.0 {
            return Err(Error::InvalidFamilyQuery(format!(
                "alpha must be strictly between 0 and 1, got {}",
                alpha.value()
            )));
        }
        Ok(Self {
            total_experiments,
            significant_count,
            alpha,
        })
    }
}

/// Probabilities of exactly / at least `k` significant results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyResult {
    pub prob_exactly_k: Probability,
    pub prob_at_least_k: Probability,
}

/// Under the global null, the number of significant experiments is
/// Binomial(K, alpha):
///
/// ```text
/// P(exactly k)  = C(K, k) alpha^k (1-alpha)^(K-k)
/// P(at least k) = sum of the same for j = k..K
/// ```
///
/// Both are computed through the log-space binomial machinery, so tiny
/// values (the interesting ones) keep full relative precision.
pub fn family_probability(query: &FamilyQuery) -> FamilyResult {
    let k = query.total_experiments;
    let j = query.significant_count;
    let alpha = query.alpha;

    let exactly = if j == 0 {
        crate::numeric::pow_prob(1.0 - alpha.value(), k)
    } else if j == k {
        crate::numeric::pow_prob(alpha.value(), k)
    } else {
        let log_exact = log_binomial_coefficient(k, j).expect("k <= K by construction")
            + j as f64 * alpha.value().ln()
            + (k - j) as f64 * (1.0 - alpha.value()).ln();
        if log_exact < -745.0 {
            0.0
        } else {
            log_exact.exp()
        }
    };

    let at_least = binomial_upper_tail(k, j, alpha)
        .expect("k <= K by construction")
        .value();

    FamilyResult {
        prob_exactly_k: Probability::new(exactly.min(1.0)).expect("pmf is a probability"),
        prob_at_least_k: Probability::new(at_least).expect("tail is a probability"),
    }
}
