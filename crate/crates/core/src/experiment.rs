//! Experiment designs: ordered session groups, each `sessions` runs of
//! `trials_per_session` binary trials, pooled into one i.i.d. sample of
//! size `N = sum(sessions * trials_per_session)`.
//!
//! The JSON schema is strict — unknown fields are rejected so a typo'd
//! key fails loudly instead of silently falling back to a default:
//!
//! ```json
//! {
//!   "null_mean": 0.5,
//!   "session_groups": [
//!     { "sessions": 40, "trials_per_session": 12 },
//!     { "sessions": 60, "trials_per_session": 18 }
//!   ]
//! }
//! ```
//!
//! `null_mean` may be omitted and defaults to 0.5 (two-alternative
//! forced choice).

use crate::numeric::Probability;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A block of identically sized sessions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionGroup {
    pub sessions: u64,
    pub trials_per_session: u64,
}

/// A validated experiment design. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDesign {
    #[serde(default = "default_null_mean")]
    pub null_mean: Probability,
    #[serde(rename = "session_groups")]
    pub groups: Vec<SessionGroup>,
}

fn default_null_mean() -> Probability {
    Probability::HALF
}

impl ExperimentDesign {
    /// Build a design from session groups, enforcing the invariants the
    /// JSON path enforces.
    pub fn new(groups: Vec<SessionGroup>, null_mean: Probability) -> Result<Self> {
        let design = Self { null_mean, groups };
        design.validate()?;
        Ok(design)
    }

    /// A single group of `1 x n_trials`, for callers that only know a
    /// total sample size.
    pub fn single_group(n_trials: u64, null_mean: Probability) -> Result<Self> {
        Self::new(
            vec![SessionGroup {
                sessions: 1,
                trials_per_session: n_trials,
            }],
            null_mean,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::DesignValidation {
                path: "session_groups".to_string(),
                reason: "at least one session group is required".to_string(),
            });
        }
        for (i, group) in self.groups.iter().enumerate() {
            if group.sessions == 0 {
                return Err(Error::DesignValidation {
                    path: format!("session_groups[{i}].sessions"),
                    reason: "must be >= 1".to_string(),
                });
            }
            if group.trials_per_session == 0 {
                return Err(Error::DesignValidation {
                    path: format!("session_groups[{i}].trials_per_session"),
                    reason: "must be >= 1".to_string(),
                });
            }
        }
        Ok(())
    }

    /// Total sample size `N`.
    pub fn total_trials(&self) -> u64 {
        self.groups
            .iter()
            .map(|g| g.sessions * g.trials_per_session)
            .sum()
    }
}

/// Parse and validate a design document (JSON).
pub fn parse_design(document: &str) -> Result<ExperimentDesign> {
    let design: ExperimentDesign =
        serde_json::from_str(document).map_err(|e| Error::DesignParse(e.to_string()))?;
    design.validate()?;
    Ok(design)
}

/// Serialize a design back to its document form.
pub fn serialize_design(design: &ExperimentDesign) -> String {
    serde_json::to_string_pretty(design).expect("design serialization is infallible")
}
