//! Controlled PDDL domain-model variants, an exhaustive STRIPS oracle that
//! certifies them, and a sequential energy/runtime benchmark harness for
//! external planners.

pub mod harness;
pub mod oracle;
pub mod par;
pub mod pddl;
pub mod stats;
pub mod variantgen;

pub use par::Execution;
