use std::collections::BTreeSet;

use crate::pddl::{Domain, Problem};

pub const DEFAULT_RATIO: f64 = 0.10;
pub const DEFAULT_PREFIX: &str = "dmc-dummy";

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Fraction used by the ratio-driven redundancy mechanisms.
    pub redundancy_ratio: f64,
    /// Prefix for every introduced identifier. Resolved to a fresh prefix
    /// before use.
    pub dummy_prefix: String,
    /// Supplies goal symbols for task-design mechanisms. When absent the
    /// first problem handed to the generator is used.
    pub reference_problem: Option<Problem>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            redundancy_ratio: DEFAULT_RATIO,
            dummy_prefix: DEFAULT_PREFIX.to_string(),
            reference_problem: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("redundancy ratio must lie in (0, 1], got {0}")]
    Ratio(f64),
    #[error("dummy prefix `{0}` is not a valid identifier")]
    Prefix(String),
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.redundancy_ratio > 0.0 && self.redundancy_ratio <= 1.0) {
            return Err(ConfigError::Ratio(self.redundancy_ratio));
        }
        let p = &self.dummy_prefix;
        let valid = p.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && p.chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_');
        if !valid {
            return Err(ConfigError::Prefix(p.clone()));
        }
        Ok(())
    }

    /// Number of dummies for a list of `len` elements: ceil(ratio * len).
    pub fn dummy_count(&self, len: usize) -> usize {
        let exact = self.redundancy_ratio * len as f64;
        // 0.1 * 30 is 3.0000000000000004 in binary floating point.
        (exact - 1e-9).ceil().max(0.0) as usize
    }
}

/// Identifiers introduced by mechanisms, all derived from one prefix that
/// no input identifier starts with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namer {
    prefix: String,
}

impl Namer {
    /// Picks `base`, or `base2`, `base3`, ... until no identifier in
    /// `taken` starts with it.
    pub fn resolve(base: &str, taken: &BTreeSet<String>) -> Namer {
        let collides = |cand: &str| {
            taken
                .iter()
                .any(|id| id.trim_start_matches('?').starts_with(cand))
        };
        let mut candidate = base.to_string();
        let mut n = 2;
        while collides(&candidate) {
            candidate = format!("{base}{n}");
            n += 1;
        }
        Namer { prefix: candidate }
    }

    pub fn for_inputs<'a>(
        base: &str,
        domain: &Domain,
        problems: impl IntoIterator<Item = &'a Problem>,
    ) -> Namer {
        let mut taken = domain.identifiers();
        for p in problems {
            taken.extend(p.identifiers());
        }
        Namer::resolve(base, &taken)
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn name(&self, suffix: &str) -> String {
        format!("{}-{}", self.prefix, suffix)
    }

    pub fn var(&self, suffix: &str) -> String {
        format!("?{}-{}", self.prefix, suffix)
    }
}

/// `base` if no action uses it, else `base2`, `base3`, ...
pub(crate) fn fresh_action_name(domain: &Domain, base: &str) -> String {
    let mut candidate = base.to_string();
    let mut n = 2;
    while domain.action(&candidate).is_some() || domain.predicate(&candidate).is_some() {
        candidate = format!("{base}{n}");
        n += 1;
    }
    candidate
}
