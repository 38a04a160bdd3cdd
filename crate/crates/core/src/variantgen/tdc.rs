//! Task-design mechanisms: edits that change what is reachable or solvable.
//!
//! Goal relevance is judged by predicate symbol: an effect is goal-achieving
//! when it is positive and its predicate occurs in the reference goal.

use std::collections::BTreeSet;

use super::config::{fresh_action_name, GeneratorConfig, Namer};
use super::error::MechanismError;
use crate::pddl::{
    Action, Domain, Literal, Precondition, PredicateDecl, Problem, NEGATIVE_PRECONDITIONS,
};

fn reference<'a>(
    problems: &'a [Problem],
    cfg: &'a GeneratorConfig,
) -> Result<&'a Problem, MechanismError> {
    cfg.reference_problem
        .as_ref()
        .or_else(|| problems.first())
        .ok_or(MechanismError::MissingReferenceProblem)
}

pub fn goal_symbols(problem: &Problem) -> BTreeSet<String> {
    problem.goal.iter().map(|a| a.predicate.clone()).collect()
}

/// Index of the first action with a goal-achieving effect, and the index of
/// that effect within the action.
pub fn first_goal_achiever(d: &Domain, goals: &BTreeSet<String>) -> Option<(usize, usize)> {
    d.actions.iter().enumerate().find_map(|(ai, a)| {
        a.effects
            .iter()
            .position(|l| l.is_positive() && goals.contains(&l.predicate))
            .map(|ei| (ai, ei))
    })
}

fn stripped_duplicate(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> Result<Action, MechanismError> {
    let goals = goal_symbols(reference(problems, cfg)?);
    let (ai, ei) = first_goal_achiever(d, &goals).ok_or(MechanismError::NoGoalAchievingEffect)?;
    let mut dup = d.actions[ai].clone();
    dup.effects.remove(ei);
    Ok(dup)
}

fn namer_for(d: &Domain, problems: &[Problem], cfg: &GeneratorConfig) -> Namer {
    Namer::for_inputs(
        &cfg.dummy_prefix,
        d,
        problems.iter().chain(cfg.reference_problem.as_ref()),
    )
}

/// Appends `<name>-dmc-def`: the first goal-achieving action minus its
/// first goal-achieving effect.
pub fn make_def_variant(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> Result<Domain, MechanismError> {
    let mut dup = stripped_duplicate(d, problems, cfg)?;
    dup.name = fresh_action_name(d, &format!("{}-dmc-def", dup.name));
    let mut out = d.clone();
    out.actions.push(dup);
    Ok(out)
}

/// Result of the dead-end mechanism. `degenerate` is set when the domain has
/// a single action, so nothing can be blocked.
#[derive(Debug, Clone, PartialEq)]
pub struct DeadEndVariant {
    pub domain: Domain,
    pub problems: Vec<Problem>,
    pub degenerate: bool,
}

/// The first action sets `(dead)`; every other action requires
/// `(not (dead))`. Problems are unchanged (`(dead)` is initially false).
pub fn make_rpd_deadend_variant(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> Result<DeadEndVariant, MechanismError> {
    if d.actions.is_empty() {
        return Err(MechanismError::TooFewActions {
            needed: 1,
            found: 0,
        });
    }
    let namer = namer_for(d, problems, cfg);
    let dead = namer.name("dead");
    let mut out = d.clone();
    out.predicates
        .push(PredicateDecl::new(dead.clone(), Vec::new()));
    out.require(NEGATIVE_PRECONDITIONS);
    out.actions[0]
        .effects
        .push(Literal::positive(dead.clone(), Vec::new()));
    let block = [Literal::negative(dead, Vec::new())];
    for a in out.actions.iter_mut().skip(1) {
        a.precondition.conjoin(&block);
    }
    Ok(DeadEndVariant {
        degenerate: d.actions.len() == 1,
        domain: out,
        problems: problems.to_vec(),
    })
}

/// Two goal-effect-free copies of the first goal-achieving action: `apd1`
/// adds `(ph-a)` and deletes `(ph-b)`, `apd2` the reverse.
pub fn make_apd_variant(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> Result<Domain, MechanismError> {
    let base = stripped_duplicate(d, problems, cfg)?;
    let namer = namer_for(d, problems, cfg);
    let (ph_a, ph_b) = (namer.name("ph-a"), namer.name("ph-b"));

    let mut out = d.clone();
    out.predicates
        .push(PredicateDecl::new(ph_a.clone(), Vec::new()));
    out.predicates
        .push(PredicateDecl::new(ph_b.clone(), Vec::new()));

    let mut first = base.clone();
    first.name = fresh_action_name(&out, &format!("{}-dmc-apd1", base.name));
    first
        .effects
        .push(Literal::positive(ph_a.clone(), Vec::new()));
    first
        .effects
        .push(Literal::negative(ph_b.clone(), Vec::new()));
    out.actions.push(first);

    let mut second = base.clone();
    second.name = fresh_action_name(&out, &format!("{}-dmc-apd2", base.name));
    second.effects.push(Literal::positive(ph_b, Vec::new()));
    second.effects.push(Literal::negative(ph_a, Vec::new()));
    out.actions.push(second);
    Ok(out)
}

/// Effects of running `first` then `second`: the surviving effects of
/// `first` (those whose atom `second` does not touch) followed by all of
/// `second`'s effects.
pub fn sequential_effects(first: &[Literal], second: &[Literal]) -> Vec<Literal> {
    let touched: BTreeSet<String> = second.iter().map(Literal::atom_text).collect();
    let mut out: Vec<Literal> = first
        .iter()
        .filter(|l| !touched.contains(&l.atom_text()))
        .cloned()
        .collect();
    for l in second {
        if !out.contains(l) {
            out.push(l.clone());
        }
    }
    out
}

fn conjoin_preconditions(a: &Precondition, b: &Precondition) -> Precondition {
    let merge = |x: &[Literal], y: &[Literal]| {
        let mut lits = x.to_vec();
        for l in y {
            if !lits.contains(l) {
                lits.push(l.clone());
            }
        }
        lits
    };
    match (a, b) {
        (Precondition::And(x), Precondition::And(y)) => Precondition::And(merge(x, y)),
        _ => {
            let mut disjuncts = Vec::new();
            for x in a.disjuncts() {
                for y in b.disjuncts() {
                    disjuncts.push(merge(x, y));
                }
            }
            Precondition::Or(disjuncts)
        }
    }
}

/// Appends `<A>-<B>-dmc-cop`, the composition "A then B" where A is the
/// first goal-achieving action and B the action declared just before it
/// (or just after, when A is first). Parameters are merged by name; every
/// positive effect on a goal predicate is dropped.
pub fn make_cop_variant(
    d: &Domain,
    problems: &[Problem],
    cfg: &GeneratorConfig,
) -> Result<Domain, MechanismError> {
    if d.actions.len() < 2 {
        return Err(MechanismError::TooFewActions {
            needed: 2,
            found: d.actions.len(),
        });
    }
    let goals = goal_symbols(reference(problems, cfg)?);
    let (ai, _) = first_goal_achiever(d, &goals).ok_or(MechanismError::NoGoalAchievingEffect)?;
    let bi = if ai == 0 { 1 } else { ai - 1 };
    let (a, b) = (&d.actions[ai], &d.actions[bi]);

    let mut parameters = a.parameters.clone();
    for p in &b.parameters {
        if !parameters.contains(p) {
            parameters.push(p.clone());
        }
    }
    let effects = sequential_effects(&a.effects, &b.effects)
        .into_iter()
        .filter(|l| !(l.is_positive() && goals.contains(&l.predicate)))
        .collect();
    let composed = Action {
        name: fresh_action_name(d, &format!("{}-{}-dmc-cop", a.name, b.name)),
        parameters,
        precondition: conjoin_preconditions(&a.precondition, &b.precondition),
        effects,
    };
    let mut out = d.clone();
    out.actions.push(composed);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem_for, print_domain};

    fn gripper() -> (Domain, Vec<Problem>) {
        let d = parse_domain(include_str!("../../fixtures/gripper.pddl")).unwrap();
        let p = parse_problem_for(include_str!("../../fixtures/gripper-p1.pddl"), &d).unwrap();
        (d, vec![p])
    }

    fn strings(lits: &[Literal]) -> Vec<String> {
        lits.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn def_duplicates_drop() {
        let (d, ps) = gripper();
        let v = make_def_variant(&d, &ps, &GeneratorConfig::default()).unwrap();
        assert_eq!(&v.actions[..3], &d.actions[..]);
        let dup = &v.actions[3];
        assert_eq!(dup.name, "drop-dmc-def");
        assert_eq!(
            strings(&dup.effects),
            ["(free ?gripper)", "(not (carry ?obj ?gripper))"]
        );
        assert_eq!(dup.precondition, d.actions[2].precondition);
        assert_eq!(parse_domain(&print_domain(&v)).unwrap(), v);
    }

    #[test]
    fn def_without_goal_achiever() {
        let (d, mut ps) = gripper();
        ps[0].goal[0].predicate = "ball".into();
        assert_eq!(
            make_def_variant(&d, &ps, &GeneratorConfig::default()),
            Err(MechanismError::NoGoalAchievingEffect)
        );
        assert_eq!(
            make_def_variant(&d, &[], &GeneratorConfig::default()),
            Err(MechanismError::MissingReferenceProblem)
        );
    }

    #[test]
    fn rpd_blocks_other_actions() {
        let (d, ps) = gripper();
        let v = make_rpd_deadend_variant(&d, &ps, &GeneratorConfig::default()).unwrap();
        assert!(!v.degenerate);
        assert_eq!(v.problems, ps);
        assert!(!v.problems[0]
            .init
            .iter()
            .any(|a| a.predicate == "dmc-dummy-dead"));
        let dom = &v.domain;
        assert_eq!(
            strings(&dom.actions[0].effects).last().unwrap(),
            "(dmc-dummy-dead)"
        );
        assert_eq!(dom.actions[0].precondition, d.actions[0].precondition);
        for a in &dom.actions[1..] {
            assert_eq!(
                a.precondition.literals().last().unwrap().to_string(),
                "(not (dmc-dummy-dead))"
            );
        }
        assert!(dom.has_requirement(NEGATIVE_PRECONDITIONS));
    }

    #[test]
    fn rpd_single_action_is_degenerate() {
        let d = parse_domain(
            "(define (domain d) (:predicates (p)) (:action a :parameters () :effect (p)))",
        )
        .unwrap();
        let v = make_rpd_deadend_variant(&d, &[], &GeneratorConfig::default()).unwrap();
        assert!(v.degenerate);
    }

    #[test]
    fn apd_pair_toggles_markers() {
        let (d, ps) = gripper();
        let v = make_apd_variant(&d, &ps, &GeneratorConfig::default()).unwrap();
        assert_eq!(v.actions.len(), 5);
        let (a1, a2) = (&v.actions[3], &v.actions[4]);
        assert_eq!(a1.name, "drop-dmc-apd1");
        assert_eq!(a2.name, "drop-dmc-apd2");
        for a in [a1, a2] {
            assert!(!a
                .effects
                .iter()
                .any(|l| l.is_positive() && l.predicate == "at"));
        }
        assert_eq!(
            strings(&a1.effects[2..]),
            ["(dmc-dummy-ph-a)", "(not (dmc-dummy-ph-b))"]
        );
        assert_eq!(
            strings(&a2.effects[2..]),
            ["(dmc-dummy-ph-b)", "(not (dmc-dummy-ph-a))"]
        );
        assert_eq!(&v.actions[..3], &d.actions[..]);
    }

    #[test]
    fn cop_composes_drop_then_pick() {
        let (d, ps) = gripper();
        let v = make_cop_variant(&d, &ps, &GeneratorConfig::default()).unwrap();
        assert_eq!(&v.actions[..3], &d.actions[..]);
        let c = &v.actions[3];
        assert_eq!(c.name, "drop-pick-dmc-cop");
        assert_eq!(c.parameters, ["?obj", "?room", "?gripper"]);
        assert_eq!(
            strings(&c.effects),
            [
                "(carry ?obj ?gripper)",
                "(not (at ?obj ?room))",
                "(not (free ?gripper))"
            ]
        );
        assert!(!c
            .effects
            .iter()
            .any(|l| l.is_positive() && l.predicate == "at"));
        assert_eq!(parse_domain(&print_domain(&v)).unwrap(), v);
    }

    #[test]
    fn cop_needs_two_actions() {
        let d = parse_domain(
            "(define (domain d) (:predicates (p)) (:action a :parameters () :effect (p)))",
        )
        .unwrap();
        let p = Problem {
            name: "p".into(),
            domain_name: "d".into(),
            requirements: vec![],
            objects: vec![],
            init: vec![],
            goal: vec![crate::pddl::Atom::new("p", vec![])],
        };
        assert_eq!(
            make_cop_variant(&d, &[p], &GeneratorConfig::default()),
            Err(MechanismError::TooFewActions {
                needed: 2,
                found: 1
            })
        );
    }

    #[test]
    fn sequential_override() {
        let p = |n: &str| Literal::positive(n, vec![]);
        let n = |n: &str| Literal::negative(n, vec![]);
        assert_eq!(
            sequential_effects(&[p("a"), n("b"), p("c")], &[p("b"), n("c")]),
            vec![p("a"), p("b"), n("c")]
        );
    }
}
