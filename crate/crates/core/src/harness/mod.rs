//! Sequential benchmark campaigns over external planners, with wall-clock
//! duration and package energy per run.

mod campaign;
mod energy;
mod planner;
mod run;

pub use campaign::{read_results, run_campaign, CampaignError, CampaignOptions, CampaignSummary};
pub use energy::{
    energy_delta, energy_delta_uj, write_synthetic_zone, EnergySample, Measurement, MeterError,
    RaplMeter, DEFAULT_SAMPLE_INTERVAL, POWERCAP_ROOT, RAPL_ROOT_ENV,
};
pub use planner::{load_planners, parse_planners, PlannerConfigError, PlannerSpec};
pub use run::{
    classify, first_allowed_core, parse_memory, run_planner_once, HarnessLimits, LimitsError,
    Outcome, RunError, RunRecord, RunTarget, GIB,
};
