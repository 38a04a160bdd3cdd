//! Suite-wide certification: every variant against the original, per
//! instance, with the per-category expectation applied.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use super::compare::{compare_tasks, Comparison, ComparisonVerdict, Projection};
use super::ground::ground;
use super::{OracleError, OracleLimits};
use crate::par::{self, Execution};
use crate::pddl::{Domain, Problem};
use crate::variantgen::{
    load_entry, load_manifest, manifest_root, Category, EntryStatus, ManifestError, MechanismId,
    VariantSuite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// One line of `oracle-check` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckRecord {
    pub mechanism: String,
    pub instance: String,
    /// `equivalent`, `solvability-preserving`, `deviating`, or
    /// `inconclusive(<reason>)`.
    pub verdict: String,
    pub status: CheckStatus,
    pub degenerate: bool,
    pub evidence: Option<Comparison>,
    pub state_count: Option<usize>,
    pub plan_length: Option<usize>,
}

/// SSC must be equivalent and MRC at least solvability-preserving. A TDC
/// variant must differ observably from the original (any verdict below
/// equivalent) unless it is degenerate.
pub fn expectation_met(category: Category, verdict: ComparisonVerdict, degenerate: bool) -> bool {
    match category {
        Category::Ssc => verdict == ComparisonVerdict::Equivalent,
        Category::Mrc => verdict >= ComparisonVerdict::SolvabilityPreserving,
        Category::Tdc => verdict < ComparisonVerdict::Equivalent || degenerate,
    }
}

fn inconclusive(mechanism: MechanismId, instance: &str, e: &OracleError) -> CheckRecord {
    CheckRecord {
        mechanism: mechanism.id(),
        instance: instance.to_string(),
        verdict: format!("inconclusive({})", e.kind()),
        status: CheckStatus::Inconclusive,
        degenerate: false,
        evidence: None,
        state_count: None,
        plan_length: None,
    }
}

/// Compares one variant task with its original task.
///
/// A task-design variant that proves equivalent counts as degenerate when
/// none of the actions it introduced is ever applicable, or when the suite
/// already flagged it.
#[allow(clippy::too_many_arguments)]
pub fn check_variant(
    mechanism: MechanismId,
    instance: &str,
    original: (&Domain, &Problem),
    variant: (&Domain, &Problem),
    dummy_prefix: &str,
    flagged_degenerate: bool,
    extra_depth: usize,
    limits: &OracleLimits,
) -> CheckRecord {
    let run = || -> Result<Comparison, OracleError> {
        let a = ground(original.0, original.1, limits)?;
        let b = ground(variant.0, variant.1, limits)?;
        compare_tasks(&a, &b, &Projection::new(dummy_prefix), extra_depth, limits)
    };
    let cmp = match run() {
        Ok(c) => c,
        Err(e) => return inconclusive(mechanism, instance, &e),
    };

    let introduced: BTreeSet<&str> = variant
        .0
        .actions
        .iter()
        .map(|a| a.name.as_str())
        .filter(|n| original.0.action(n).is_none())
        .collect();
    let inert = mechanism.category() == Category::Tdc
        && cmp.verdict == ComparisonVerdict::Equivalent
        && !introduced.is_empty()
        && introduced
            .iter()
            .all(|n| !cmp.variant_applied_schemas.contains(*n));
    let degenerate = flagged_degenerate || inert;
    let status = if expectation_met(mechanism.category(), cmp.verdict, degenerate) {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    CheckRecord {
        mechanism: mechanism.id(),
        instance: instance.to_string(),
        verdict: cmp.verdict.as_str().to_string(),
        status,
        degenerate,
        state_count: Some(cmp.variant.reachable_state_count),
        plan_length: cmp.variant.shortest_plan_length,
        evidence: Some(cmp),
    }
}

struct Job<'a> {
    mechanism: MechanismId,
    instance: &'a str,
    original: (&'a Domain, &'a Problem),
    variant: (&'a Domain, &'a Problem),
    degenerate: bool,
}

fn run_jobs(
    jobs: &[Job<'_>],
    prefix: &str,
    extra: usize,
    limits: &OracleLimits,
    exec: Execution,
) -> Vec<CheckRecord> {
    par::map(jobs, exec, |j| {
        check_variant(
            j.mechanism,
            j.instance,
            j.original,
            j.variant,
            prefix,
            j.degenerate,
            extra,
            limits,
        )
    })
}

/// Checks every applied entry of an in-memory suite on every instance.
pub fn check_suite(
    suite: &VariantSuite,
    extra_depth: usize,
    limits: &OracleLimits,
    exec: Execution,
) -> Vec<CheckRecord> {
    let mut jobs = Vec::new();
    for e in &suite.entries {
        let Ok(v) = &e.result else { continue };
        for (i, instance) in suite.instances.iter().enumerate() {
            jobs.push(Job {
                mechanism: e.mechanism,
                instance,
                original: (&suite.original.domain, &suite.original.problems[i]),
                variant: (&v.domain, &v.problems[i]),
                degenerate: e.degenerate,
            });
        }
    }
    run_jobs(&jobs, &suite.dummy_prefix, extra_depth, limits, exec)
}

/// Checks a suite as written to disk, re-parsing every file. Only the
/// instances selected by `keep` are checked.
pub fn check_manifest(
    manifest_path: &Path,
    keep: impl Fn(&str) -> bool,
    extra_depth: usize,
    limits: &OracleLimits,
    exec: Execution,
) -> Result<Vec<CheckRecord>, ManifestError> {
    let manifest = load_manifest(manifest_path)?;
    let root = manifest_root(manifest_path);
    let original_entry = manifest
        .entries
        .iter()
        .find(|e| e.is_original())
        .ok_or_else(|| ManifestError::Skipped {
            path: manifest_path.to_path_buf(),
            mechanism: "original".into(),
        })?;
    let (od, oprobs) = load_entry(&root, original_entry)?;

    let mut loaded = Vec::new();
    for e in &manifest.entries {
        if e.status != EntryStatus::Ok {
            continue;
        }
        let Some(m) = e.mechanism_id() else { continue };
        let (vd, vprobs) = load_entry(&root, e)?;
        loaded.push((m, e.degenerate, vd, vprobs));
    }

    let mut jobs = Vec::new();
    for (m, degenerate, vd, vprobs) in &loaded {
        for (instance, vp) in vprobs {
            if !keep(instance) {
                continue;
            }
            let Some((_, op)) = oprobs.iter().find(|(i, _)| i == instance) else {
                continue;
            };
            jobs.push(Job {
                mechanism: *m,
                instance,
                original: (&od, op),
                variant: (vd, vp),
                degenerate: *degenerate,
            });
        }
    }
    Ok(run_jobs(
        &jobs,
        &manifest.dummy_prefix,
        extra_depth,
        limits,
        exec,
    ))
}
