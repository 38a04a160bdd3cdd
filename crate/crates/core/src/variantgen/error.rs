use serde::{Deserialize, Serialize};

/// Why a mechanism cannot be applied to a given domain. Suite generation
/// turns these into explicit `skipped` entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "kind")]
pub enum MechanismError {
    #[error("RatioUndefined: action `{action}` has no precondition literals")]
    RatioUndefined { action: String },
    #[error("NoGoalAchievingEffect: no action adds a goal predicate")]
    NoGoalAchievingEffect,
    #[error("TooFewActions: need at least {needed} action(s), domain has {found}")]
    TooFewActions { needed: usize, found: usize },
    #[error("MissingReferenceProblem: no problem supplies goal symbols")]
    MissingReferenceProblem,
}

impl MechanismError {
    /// Short reason tag, e.g. `RatioUndefined`.
    pub fn kind(&self) -> &'static str {
        match self {
            MechanismError::RatioUndefined { .. } => "RatioUndefined",
            MechanismError::NoGoalAchievingEffect => "NoGoalAchievingEffect",
            MechanismError::TooFewActions { .. } => "TooFewActions",
            MechanismError::MissingReferenceProblem => "MissingReferenceProblem",
        }
    }
}
