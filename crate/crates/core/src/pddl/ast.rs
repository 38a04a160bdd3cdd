//! Order-preserving STRIPS AST.
//!
//! Every list here keeps source order. Element order is the variable the
//! variant generator manipulates, so nothing in this module sorts or
//! deduplicates.

use std::collections::BTreeSet;
use std::fmt;

pub const NEGATIVE_PRECONDITIONS: &str = ":negative-preconditions";
pub const DISJUNCTIVE_PRECONDITIONS: &str = ":disjunctive-preconditions";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    pub name: String,
    /// Requirement flags including the leading colon, e.g. `:strips`.
    pub requirements: Vec<String>,
    /// Domain-level constants. Untyped only.
    pub constants: Vec<String>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateDecl {
    pub name: String,
    /// Variable names including the leading `?`.
    pub parameters: Vec<String>,
}

impl PredicateDecl {
    pub fn new(name: impl Into<String>, parameters: Vec<String>) -> Self {
        PredicateDecl {
            name: name.into(),
            parameters,
        }
    }

    pub fn arity(&self) -> usize {
        self.parameters.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub name: String,
    pub parameters: Vec<String>,
    pub precondition: Precondition,
    pub effects: Vec<Literal>,
}

/// An action precondition.
///
/// Baseline domains only ever produce `And`. `Or` holds a disjunction of
/// conjunctions; a one-literal disjunct prints bare.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Precondition {
    And(Vec<Literal>),
    Or(Vec<Vec<Literal>>),
}

impl Default for Precondition {
    fn default() -> Self {
        Precondition::And(Vec::new())
    }
}

impl Precondition {
    /// All literals, disjuncts flattened in order.
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        let slices: Vec<&[Literal]> = match self {
            Precondition::And(lits) => vec![lits.as_slice()],
            Precondition::Or(disjuncts) => disjuncts.iter().map(Vec::as_slice).collect(),
        };
        slices.into_iter().flatten()
    }

    pub fn literals_mut(&mut self) -> Box<dyn Iterator<Item = &mut Literal> + '_> {
        match self {
            Precondition::And(lits) => Box::new(lits.iter_mut()),
            Precondition::Or(disjuncts) => Box::new(disjuncts.iter_mut().flatten()),
        }
    }

    pub fn literal_count(&self) -> usize {
        self.literals().count()
    }

    /// The conjunctions making up this precondition (one for `And`).
    pub fn disjuncts(&self) -> Vec<&[Literal]> {
        match self {
            Precondition::And(lits) => vec![lits.as_slice()],
            Precondition::Or(disjuncts) => disjuncts.iter().map(Vec::as_slice).collect(),
        }
    }

    /// Conjoins `extra` to every disjunct.
    pub fn conjoin(&mut self, extra: &[Literal]) {
        match self {
            Precondition::And(lits) => lits.extend_from_slice(extra),
            Precondition::Or(disjuncts) => {
                for d in disjuncts {
                    d.extend_from_slice(extra);
                }
            }
        }
    }

    pub fn is_disjunctive(&self) -> bool {
        matches!(self, Precondition::Or(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub polarity: Polarity,
    pub predicate: String,
    /// Variables (`?x`) or constants.
    pub arguments: Vec<String>,
}

impl Literal {
    pub fn positive(predicate: impl Into<String>, arguments: Vec<String>) -> Self {
        Literal {
            polarity: Polarity::Positive,
            predicate: predicate.into(),
            arguments,
        }
    }

    pub fn negative(predicate: impl Into<String>, arguments: Vec<String>) -> Self {
        Literal {
            polarity: Polarity::Negative,
            predicate: predicate.into(),
            arguments,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.polarity == Polarity::Negative
    }

    pub fn negated(&self) -> Literal {
        Literal {
            polarity: match self.polarity {
                Polarity::Positive => Polarity::Negative,
                Polarity::Negative => Polarity::Positive,
            },
            ..self.clone()
        }
    }

    /// The underlying atom rendered without polarity, e.g. `at ?b ?r`.
    pub fn atom_text(&self) -> String {
        let mut s = self.predicate.clone();
        for a in &self.arguments {
            s.push(' ');
            s.push_str(a);
        }
        s
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "({})", self.atom_text()),
            Polarity::Negative => write!(f, "(not ({}))", self.atom_text()),
        }
    }
}

/// A ground positive atom in a problem file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub arguments: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, arguments: Vec<String>) -> Self {
        Atom {
            predicate: predicate.into(),
            arguments,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.arguments {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    /// Problem files may repeat requirement flags; kept for round-trip.
    pub requirements: Vec<String>,
    pub objects: Vec<String>,
    pub init: Vec<Atom>,
    pub goal: Vec<Atom>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn has_requirement(&self, flag: &str) -> bool {
        self.requirements.iter().any(|r| r == flag)
    }

    /// Appends `flag` unless already present.
    pub fn require(&mut self, flag: &str) {
        if !self.has_requirement(flag) {
            self.requirements.push(flag.to_string());
        }
    }

    /// Every identifier the domain mentions: names, variables, constants.
    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        ids.insert(self.name.clone());
        ids.extend(self.constants.iter().cloned());
        for p in &self.predicates {
            ids.insert(p.name.clone());
            ids.extend(p.parameters.iter().cloned());
        }
        for a in &self.actions {
            ids.insert(a.name.clone());
            ids.extend(a.parameters.iter().cloned());
            for l in a.precondition.literals().chain(a.effects.iter()) {
                ids.insert(l.predicate.clone());
                ids.extend(l.arguments.iter().cloned());
            }
        }
        ids
    }
}

impl Problem {
    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        ids.insert(self.name.clone());
        ids.insert(self.domain_name.clone());
        ids.extend(self.objects.iter().cloned());
        for a in self.init.iter().chain(self.goal.iter()) {
            ids.insert(a.predicate.clone());
            ids.extend(a.arguments.iter().cloned());
        }
        ids
    }
}

/// Structural equality including element order.
pub fn structural_equal(a: &Domain, b: &Domain) -> bool {
    a == b
}
