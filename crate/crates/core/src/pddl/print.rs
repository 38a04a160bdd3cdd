use std::fmt::Write;

use super::ast::{Domain, Literal, Precondition, Problem};

const INDENT: &str = "  ";

/// Prints a domain in the canonical layout: one predicate per line, one
/// block per action, two-space indentation, LF line endings.
pub fn print_domain(d: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", d.name);
    if !d.requirements.is_empty() {
        let _ = writeln!(out, "{INDENT}(:requirements {})", d.requirements.join(" "));
    }
    if !d.constants.is_empty() {
        let _ = writeln!(out, "{INDENT}(:constants {})", d.constants.join(" "));
    }
    if d.predicates.is_empty() {
        let _ = writeln!(out, "{INDENT}(:predicates)");
    } else {
        let _ = writeln!(out, "{INDENT}(:predicates");
        for p in &d.predicates {
            let _ = write!(out, "{INDENT}{INDENT}({}", p.name);
            for v in &p.parameters {
                let _ = write!(out, " {v}");
            }
            out.push_str(")\n");
        }
        let _ = writeln!(out, "{INDENT})");
    }
    for a in &d.actions {
        out.push('\n');
        let _ = writeln!(out, "{INDENT}(:action {}", a.name);
        let _ = writeln!(
            out,
            "{INDENT}{INDENT}:parameters ({})",
            a.parameters.join(" ")
        );
        if a.precondition.literal_count() > 0 || a.precondition.is_disjunctive() {
            let _ = writeln!(
                out,
                "{INDENT}{INDENT}:precondition {}",
                precondition_text(&a.precondition)
            );
        }
        if !a.effects.is_empty() {
            let _ = writeln!(
                out,
                "{INDENT}{INDENT}:effect {}",
                conjunction_text(&a.effects)
            );
        }
        let _ = writeln!(out, "{INDENT})");
    }
    out.push_str(")\n");
    out
}

pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "{INDENT}(:domain {})", p.domain_name);
    if !p.requirements.is_empty() {
        let _ = writeln!(out, "{INDENT}(:requirements {})", p.requirements.join(" "));
    }
    if p.objects.is_empty() {
        let _ = writeln!(out, "{INDENT}(:objects)");
    } else {
        let _ = writeln!(out, "{INDENT}(:objects {})", p.objects.join(" "));
    }
    if p.init.is_empty() {
        let _ = writeln!(out, "{INDENT}(:init)");
    } else {
        let _ = writeln!(out, "{INDENT}(:init");
        for a in &p.init {
            let _ = writeln!(out, "{INDENT}{INDENT}{a}");
        }
        let _ = writeln!(out, "{INDENT})");
    }
    let goal: Vec<String> = p.goal.iter().map(ToString::to_string).collect();
    let _ = writeln!(
        out,
        "{INDENT}(:goal (and{}{}))",
        if goal.is_empty() { "" } else { " " },
        goal.join(" ")
    );
    out.push_str(")\n");
    out
}

fn conjunction_text(lits: &[Literal]) -> String {
    let parts: Vec<String> = lits.iter().map(ToString::to_string).collect();
    if parts.is_empty() {
        "(and)".to_string()
    } else {
        format!("(and {})", parts.join(" "))
    }
}

fn precondition_text(pre: &Precondition) -> String {
    match pre {
        Precondition::And(lits) => conjunction_text(lits),
        Precondition::Or(disjuncts) => {
            let parts: Vec<String> = disjuncts
                .iter()
                .map(|d| match d.as_slice() {
                    [single] => single.to_string(),
                    _ => conjunction_text(d),
                })
                .collect();
            format!("(or {})", parts.join(" "))
        }
    }
}
