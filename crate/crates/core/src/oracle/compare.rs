//! Semantic comparison of an original task with a variant under dummy
//! projection.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ground::{GroundAction, GroundTask};
use super::search::{enumerate_plans, explore, report, OracleReport, StateSpace};
use super::{OracleError, OracleLimits};
use crate::pddl::Atom;

/// Hides everything a mechanism introduced: atoms over predicates that
/// start with the prefix vanish, arguments that start with it are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    prefix: String,
}

impl Projection {
    pub fn new(prefix: impl Into<String>) -> Self {
        Projection {
            prefix: prefix.into(),
        }
    }

    fn hidden(&self, id: &str) -> bool {
        !self.prefix.is_empty() && id.starts_with(&self.prefix)
    }

    pub fn atom(&self, a: &Atom) -> Option<String> {
        if self.hidden(&a.predicate) {
            return None;
        }
        let args: Vec<String> = a
            .arguments
            .iter()
            .filter(|x| !self.hidden(x))
            .cloned()
            .collect();
        Some(Atom::new(a.predicate.clone(), args).to_string())
    }

    pub fn action(&self, a: &GroundAction) -> String {
        let args: Vec<String> = a.args.iter().filter(|x| !self.hidden(x)).cloned().collect();
        Atom::new(a.schema.clone(), args).to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonVerdict {
    /// Weakest: the variant differs in solvability or shortest plan length.
    Deviating,
    /// Same solvability and shortest plan length after projection.
    SolvabilityPreserving,
    /// Same reachable states, applicable actions and bounded plan set.
    Equivalent,
}

impl ComparisonVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ComparisonVerdict::Equivalent => "equivalent",
            ComparisonVerdict::SolvabilityPreserving => "solvability-preserving",
            ComparisonVerdict::Deviating => "deviating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Original,
    Variant,
}

/// Concrete evidence of a difference, in projected form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A reachable variant state with no path to the goal that has no
    /// dead-end counterpart in the original.
    DeadEnd {
        state: Vec<String>,
    },
    Solvability {
        original: bool,
        variant: bool,
    },
    PlanLength {
        original: usize,
        variant: usize,
    },
    State {
        only_in: Side,
        state: Vec<String>,
    },
    Plan {
        only_in: Side,
        plan: Vec<String>,
    },
    Applicable {
        only_in: Side,
        state: Vec<String>,
        action: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Comparison {
    pub verdict: ComparisonVerdict,
    pub witness: Option<Witness>,
    pub original: OracleReport,
    pub variant: OracleReport,
    /// Plan length bound used for plan-set equality.
    pub bound: usize,
    /// Schemas of the variant with an instance applicable in some
    /// reachable state.
    #[serde(skip)]
    pub variant_applied_schemas: BTreeSet<String>,
}

struct Projected {
    states: Vec<Vec<String>>,
    state_set: BTreeSet<Vec<String>>,
    dead: BTreeSet<Vec<String>>,
    applicable: BTreeMap<Vec<String>, BTreeSet<String>>,
    plans: BTreeSet<Vec<String>>,
    report: OracleReport,
    applied_schemas: BTreeSet<String>,
}

fn project(
    t: &GroundTask,
    space: &StateSpace,
    proj: &Projection,
    bound: usize,
    limits: &OracleLimits,
) -> Result<Projected, OracleError> {
    let atom_names: Vec<Option<String>> = t.atoms.iter().map(|a| proj.atom(a)).collect();
    let action_names: Vec<String> = t.actions.iter().map(|a| proj.action(a)).collect();

    let states: Vec<Vec<String>> = space
        .states
        .iter()
        .map(|s| {
            let set: BTreeSet<String> = s.atoms().filter_map(|i| atom_names[i].clone()).collect();
            set.into_iter().collect()
        })
        .collect();
    let mut applicable: BTreeMap<Vec<String>, BTreeSet<String>> = BTreeMap::new();
    let mut applied_schemas = BTreeSet::new();
    for (i, out) in space.edges.iter().enumerate() {
        let entry = applicable.entry(states[i].clone()).or_default();
        for &(ai, _) in out {
            entry.insert(action_names[ai].clone());
            applied_schemas.insert(t.actions[ai].schema.clone());
        }
    }
    let dead = space.dead_ends().map(|i| states[i].clone()).collect();
    let plans = enumerate_plans(t, space, bound, limits, |i| action_names[i].clone())?;
    let report = report(t, space, &plans, bound);
    Ok(Projected {
        state_set: states.iter().cloned().collect(),
        states,
        dead,
        applicable,
        plans,
        report,
        applied_schemas,
    })
}

fn first_difference<T: Ord + Clone>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Option<(Side, T)> {
    a.difference(b)
        .next()
        .map(|x| (Side::Original, x.clone()))
        .or_else(|| b.difference(a).next().map(|x| (Side::Variant, x.clone())))
}

/// Compares `variant` against `original`.
///
/// The plan-set bound is the original's shortest plan length (or the
/// variant's, if the original is unsolvable) plus `extra_depth`.
pub fn compare_tasks(
    original: &GroundTask,
    variant: &GroundTask,
    projection: &Projection,
    extra_depth: usize,
    limits: &OracleLimits,
) -> Result<Comparison, OracleError> {
    let sa = explore(original, limits)?;
    let sb = explore(variant, limits)?;
    let base = sa
        .shortest_plan_length()
        .or(sb.shortest_plan_length())
        .unwrap_or(0);
    let bound = base + extra_depth;
    let a = project(original, &sa, projection, bound, limits)?;
    let b = project(variant, &sb, projection, bound, limits)?;

    let same_states = a.state_set == b.state_set;
    let same_plans = a.plans == b.plans;
    let same_applicable = a.applicable == b.applicable;
    let same_solvability = a.report.solvable == b.report.solvable
        && a.report.shortest_plan_length == b.report.shortest_plan_length;

    let verdict = if same_states && same_plans && same_applicable {
        ComparisonVerdict::Equivalent
    } else if same_solvability {
        ComparisonVerdict::SolvabilityPreserving
    } else {
        ComparisonVerdict::Deviating
    };

    let witness = if verdict == ComparisonVerdict::Equivalent {
        None
    } else {
        let new_dead = sb
            .dead_ends()
            .map(|i| &b.states[i])
            .find(|s| !a.dead.contains(*s));
        if let (ComparisonVerdict::Deviating, Some(state)) = (verdict, new_dead) {
            Some(Witness::DeadEnd {
                state: state.clone(),
            })
        } else if a.report.solvable != b.report.solvable {
            Some(Witness::Solvability {
                original: a.report.solvable,
                variant: b.report.solvable,
            })
        } else if let (Some(x), Some(y), false) = (
            a.report.shortest_plan_length,
            b.report.shortest_plan_length,
            same_solvability,
        ) {
            Some(Witness::PlanLength {
                original: x,
                variant: y,
            })
        } else if let Some((only_in, state)) = first_difference(&a.state_set, &b.state_set) {
            Some(Witness::State { only_in, state })
        } else if let Some((only_in, plan)) = first_difference(&a.plans, &b.plans) {
            Some(Witness::Plan { only_in, plan })
        } else {
            a.applicable.iter().find_map(|(state, acts)| {
                let other = b.applicable.get(state).cloned().unwrap_or_default();
                first_difference(acts, &other).map(|(only_in, action)| Witness::Applicable {
                    only_in,
                    state: state.clone(),
                    action,
                })
            })
        }
    };

    Ok(Comparison {
        verdict,
        witness,
        original: a.report,
        variant: b.report,
        bound,
        variant_applied_schemas: b.applied_schemas,
    })
}
