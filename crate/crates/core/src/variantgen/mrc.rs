//! Redundancy mechanisms: additions that leave solvability intact.

use super::config::{fresh_action_name, GeneratorConfig, Namer};
use super::error::MechanismError;
use crate::pddl::{
    Domain, Literal, Precondition, PredicateDecl, Problem, DISJUNCTIVE_PRECONDITIONS,
    NEGATIVE_PRECONDITIONS,
};

fn namer_for(d: &Domain, problems: &[Problem], cfg: &GeneratorConfig) -> Namer {
    Namer::for_inputs(
        &cfg.dummy_prefix,
        d,
        problems.iter().chain(cfg.reference_problem.as_ref()),
    )
}

/// Appends ceil(ratio * |objects|) unused objects.
pub fn add_dummy_objects(p: &Problem, cfg: &GeneratorConfig) -> Problem {
    let namer = Namer::resolve(&cfg.dummy_prefix, &p.identifiers());
    let mut out = p.clone();
    for i in 1..=cfg.dummy_count(p.objects.len()) {
        out.objects.push(namer.name(&format!("obj{i}")));
    }
    out
}

/// Appends ceil(ratio * |predicates|) zero-arity predicates nothing uses.
pub fn add_dummy_predicates(d: &Domain, cfg: &GeneratorConfig) -> Domain {
    let namer = namer_for(d, &[], cfg);
    let mut out = d.clone();
    for i in 1..=cfg.dummy_count(d.predicates.len()) {
        out.predicates.push(PredicateDecl::new(
            namer.name(&format!("pred{i}")),
            Vec::new(),
        ));
    }
    out
}

/// Gives every predicate one trailing dummy argument.
///
/// Inside actions the argument is one fresh parameter per action (added only
/// to actions that mention a predicate). In problems every atom gets the same
/// dummy object, appended to the object list when any atom exists.
pub fn inflate_predicate_arity(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> (Domain, Vec<Problem>) {
    let namer = namer_for(d, problems, cfg);
    let var = namer.var("v");
    let constant = namer.name("c");

    let mut out = d.clone();
    for p in &mut out.predicates {
        p.parameters.push(var.clone());
    }
    for a in &mut out.actions {
        let mut touched = false;
        for l in a.precondition.literals_mut().chain(a.effects.iter_mut()) {
            l.arguments.push(var.clone());
            touched = true;
        }
        if touched {
            a.parameters.push(var.clone());
        }
    }

    let problems = problems
        .iter()
        .map(|p| {
            let mut q = p.clone();
            let mut touched = false;
            for atom in q.init.iter_mut().chain(q.goal.iter_mut()) {
                atom.arguments.push(constant.clone());
                touched = true;
            }
            if touched {
                q.objects.push(constant.clone());
            }
            q
        })
        .collect();
    (out, problems)
}

/// Appends a copy of the first action whose precondition also requires
/// `(q)` and `(not (q))`.
pub fn add_inapplicable_duplicate(
    d: &Domain,
    cfg: &GeneratorConfig,
) -> Result<Domain, MechanismError> {
    let first = d.actions.first().ok_or(MechanismError::TooFewActions {
        needed: 1,
        found: 0,
    })?;
    let namer = namer_for(d, &[], cfg);
    let q = namer.name("q");

    let mut out = d.clone();
    out.predicates
        .push(PredicateDecl::new(q.clone(), Vec::new()));
    out.require(NEGATIVE_PRECONDITIONS);
    let mut copy = first.clone();
    copy.name = fresh_action_name(d, &format!("{}-dmc-copy", first.name));
    copy.precondition.conjoin(&[
        Literal::positive(q.clone(), Vec::new()),
        Literal::negative(q, Vec::new()),
    ]);
    out.actions.push(copy);
    Ok(out)
}

/// Every action gains one trailing parameter its body never mentions.
pub fn add_dummy_action_parameters(d: &Domain, cfg: &GeneratorConfig) -> Domain {
    let namer = namer_for(d, &[], cfg);
    let var = namer.var("p");
    let mut out = d.clone();
    for a in &mut out.actions {
        a.parameters.push(var.clone());
    }
    out
}

/// Every precondition P becomes `(or P (q))`; `(q)` is never made true.
pub fn add_disjunctive_dummy_precondition(d: &Domain, cfg: &GeneratorConfig) -> Domain {
    let namer = namer_for(d, &[], cfg);
    let q = Literal::positive(namer.name("q"), Vec::new());
    let mut out = d.clone();
    out.predicates
        .push(PredicateDecl::new(q.predicate.clone(), Vec::new()));
    out.require(DISJUNCTIVE_PRECONDITIONS);
    for a in &mut out.actions {
        let disjuncts = match std::mem::take(&mut a.precondition) {
            Precondition::And(lits) => vec![lits, vec![q.clone()]],
            Precondition::Or(mut ds) => {
                ds.push(vec![q.clone()]);
                ds
            }
        };
        a.precondition = Precondition::Or(disjuncts);
    }
    out
}

/// Even-indexed actions add `(q)`, odd-indexed actions delete it.
pub fn add_dummy_effect(d: &Domain, cfg: &GeneratorConfig) -> Domain {
    let namer = namer_for(d, &[], cfg);
    let q = namer.name("q");
    let mut out = d.clone();
    out.predicates
        .push(PredicateDecl::new(q.clone(), Vec::new()));
    for (i, a) in out.actions.iter_mut().enumerate() {
        let lit = if i % 2 == 0 {
            Literal::positive(q.clone(), Vec::new())
        } else {
            Literal::negative(q.clone(), Vec::new())
        };
        a.effects.push(lit);
    }
    out
}
