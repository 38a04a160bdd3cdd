//! Exhaustive grounding and breadth-first search for desk-scale tasks,
//! used to certify how each variant relates to its original.

mod check;
mod compare;
mod ground;
mod search;
mod state;

pub use check::{
    check_manifest, check_suite, check_variant, expectation_met, CheckRecord, CheckStatus,
};
pub use compare::{compare_tasks, Comparison, ComparisonVerdict, Projection, Side, Witness};
pub use ground::{ground, ground_action_counts, static_predicates, GroundAction, GroundTask};
pub use search::{
    enumerate_plans, explore, plan_set_hash, solve_bfs, validate_plan, OracleReport, StateSpace,
};
pub use state::State;

pub const DEFAULT_CAP: usize = 1_000_000;
/// Plan sets are compared up to shortest length plus this many steps.
pub const DEFAULT_EXTRA_DEPTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub ground_cap: usize,
    pub state_cap: usize,
    pub plan_cap: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            ground_cap: DEFAULT_CAP,
            state_cap: DEFAULT_CAP,
            plan_cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("GroundingCapExceeded: more than {limit} action instantiations")]
    GroundingCapExceeded { limit: usize },
    #[error("StateCapExceeded: more than {limit} reachable states")]
    StateCapExceeded { limit: usize },
    #[error("PlanCapExceeded: more than {limit} plans within the bound")]
    PlanCapExceeded { limit: usize },
    #[error("unknown ground action `{0}`")]
    UnknownAction(String),
}

impl OracleError {
    pub fn kind(&self) -> &'static str {
        match self {
            OracleError::GroundingCapExceeded { .. } => "GroundingCapExceeded",
            OracleError::StateCapExceeded { .. } => "StateCapExceeded",
            OracleError::PlanCapExceeded { .. } => "PlanCapExceeded",
            OracleError::UnknownAction(_) => "UnknownAction",
        }
    }
}
