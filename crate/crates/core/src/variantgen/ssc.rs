//! Reordering mechanisms. Every sort is stable, so ties keep their
//! original relative order in both directions.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::error::MechanismError;
use crate::pddl::{Action, Domain, Literal, Polarity, Precondition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKey {
    /// Occurrences across all action preconditions and effects.
    UsageFrequency,
    Alphabetical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKey {
    EffectCount,
    NegativeEffectCount,
    PreconditionCount,
    ParameterCount,
    EffectPreconditionRatio,
    Name,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyPart {
    Preconditions,
    Effects,
}

fn sort_stable<T, K: Ord>(items: &mut [T], key: impl Fn(&T) -> K, direction: Direction) {
    match direction {
        Direction::Ascending => items.sort_by_key(key),
        Direction::Descending => items.sort_by_key(|x| std::cmp::Reverse(key(x))),
    }
}

/// Occurrence count of every predicate symbol across action bodies.
pub fn usage_frequency(d: &Domain) -> HashMap<&str, usize> {
    let mut counts: HashMap<&str, usize> =
        d.predicates.iter().map(|p| (p.name.as_str(), 0)).collect();
    for a in &d.actions {
        for l in a.precondition.literals().chain(&a.effects) {
            *counts.entry(l.predicate.as_str()).or_default() += 1;
        }
    }
    counts
}

pub fn reorder_predicates(d: &Domain, key: PredicateKey, direction: Direction) -> Domain {
    let mut out = d.clone();
    match key {
        PredicateKey::UsageFrequency => {
            let counts = usage_frequency(d);
            sort_stable(
                &mut out.predicates,
                |p| counts.get(p.name.as_str()).copied().unwrap_or(0),
                direction,
            );
        }
        PredicateKey::Alphabetical => {
            sort_stable(&mut out.predicates, |p| p.name.clone(), direction)
        }
    }
    out
}

/// effects / preconditions, compared exactly by cross-multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: u64,
    den: u64,
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den))
            .cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn negative_effects(a: &Action) -> usize {
    a.effects.iter().filter(|l| l.is_negative()).count()
}

pub fn reorder_actions(
    d: &Domain,
    key: ActionKey,
    direction: Direction,
) -> Result<Domain, MechanismError> {
    let mut out = d.clone();
    let actions = &mut out.actions;
    match key {
        ActionKey::EffectCount => sort_stable(actions, |a| a.effects.len(), direction),
        ActionKey::NegativeEffectCount => sort_stable(actions, negative_effects, direction),
        ActionKey::PreconditionCount => {
            sort_stable(actions, |a| a.precondition.literal_count(), direction)
        }
        ActionKey::ParameterCount => sort_stable(actions, |a| a.parameters.len(), direction),
        ActionKey::EffectPreconditionRatio => {
            if let Some(a) = actions.iter().find(|a| a.precondition.literal_count() == 0) {
                return Err(MechanismError::RatioUndefined {
                    action: a.name.clone(),
                });
            }
            sort_stable(
                actions,
                |a| Ratio {
                    num: a.effects.len() as u64,
                    den: a.precondition.literal_count() as u64,
                },
                direction,
            );
        }
        ActionKey::Name => sort_stable(actions, |a| a.name.clone(), direction),
    }
    Ok(out)
}

/// Sort key of a literal: the atom (predicate, then arguments), with
/// negation as the final tie-breaker.
fn literal_key(l: &Literal) -> (&str, &[String], bool) {
    (&l.predicate, &l.arguments, l.polarity == Polarity::Negative)
}

pub fn reorder_action_body(d: &Domain, part: BodyPart, direction: Direction) -> Domain {
    let mut out = d.clone();
    for a in &mut out.actions {
        match part {
            BodyPart::Effects => sort_literals(&mut a.effects, direction),
            BodyPart::Preconditions => match &mut a.precondition {
                Precondition::And(lits) => sort_literals(lits, direction),
                Precondition::Or(disjuncts) => {
                    for lits in disjuncts {
                        sort_literals(lits, direction);
                    }
                }
            },
        }
    }
    out
}

fn sort_literals(lits: &mut [Literal], direction: Direction) {
    match direction {
        Direction::Ascending => lits.sort_by(|a, b| literal_key(a).cmp(&literal_key(b))),
        Direction::Descending => lits.sort_by(|a, b| literal_key(b).cmp(&literal_key(a))),
    }
}
