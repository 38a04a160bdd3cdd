//! STRIPS-level PDDL: parse, represent, print.
//!
//! Accepted subset: PDDL 1.2 STRIPS, untyped, plus `:negative-preconditions`
//! and `:disjunctive-preconditions` (both introduced by variant mechanisms).
//! A `:types` section or typed name lists are rejected.

mod ast;
mod error;
mod parse;
mod print;
mod sexpr;

pub use ast::{
    structural_equal, Action, Atom, Domain, Literal, Polarity, Precondition, PredicateDecl,
    Problem, DISJUNCTIVE_PRECONDITIONS, NEGATIVE_PRECONDITIONS,
};
pub use error::{PddlError, Pos};
pub use parse::{parse_domain, parse_problem, parse_problem_for};
pub use print::{print_domain, print_problem};
