//! Deterministic AST-to-AST mechanisms and the 32-entry variant suite.

mod config;
mod error;
mod manifest;
mod mechanism;
pub mod mrc;
pub mod ssc;
mod suite;
pub mod tdc;

pub use config::{ConfigError, GeneratorConfig, Namer, DEFAULT_PREFIX, DEFAULT_RATIO};
pub use error::MechanismError;
pub use manifest::{
    load_entry, load_manifest, manifest_root, sha256_hex, write_suite, EntryStatus, ManifestEntry,
    ManifestError, ProblemFile, SuiteManifest, MANIFEST_FILE, ORIGINAL,
};
pub use mechanism::{Category, MechanismId, UnknownMechanism};
pub use suite::{
    apply_mechanism, generate_suite, writes_problems, SuiteEntry, Variant, VariantSuite,
};
