use std::collections::{HashMap, HashSet};

use super::ast::{
    Action, Atom, Domain, Literal, Precondition, PredicateDecl, Problem, DISJUNCTIVE_PRECONDITIONS,
    NEGATIVE_PRECONDITIONS,
};
use super::error::{PddlError, Pos};
use super::sexpr::{read_document, SExpr};

const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    NEGATIVE_PRECONDITIONS,
    DISJUNCTIVE_PRECONDITIONS,
];

const UNSUPPORTED_HEADS: &[&str] = &[
    "forall",
    "exists",
    "when",
    "imply",
    "=",
    "increase",
    "decrease",
    "assign",
    "scale-up",
    "scale-down",
];

/// Parses a domain file. Identifiers are case-folded to lower case.
pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let doc = read_document(text)?;
    let items = doc.as_list().unwrap_or_default();
    let (name, sections) = define_header(&doc, items, "domain")?;

    let mut domain = Domain {
        name,
        requirements: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    let mut pending_actions = Vec::new();

    for section in sections {
        let head = section_head(section)?;
        let body = &section.as_list().unwrap_or_default()[1..];
        match head {
            ":requirements" => {
                for flag in body {
                    let f = expect_word(flag, "requirement flag")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&f) {
                        return Err(PddlError::unsupported(
                            flag.pos(),
                            format!("requirement `{f}`"),
                        ));
                    }
                    if !domain.has_requirement(f) {
                        domain.requirements.push(f.to_string());
                    }
                }
            }
            ":types" => {
                return Err(PddlError::unsupported(
                    section.pos(),
                    "`:types` section (flatten to untyped form first)",
                ))
            }
            ":constants" => {
                let mut seen = HashSet::new();
                for c in untyped_names(body, "constant", false)? {
                    if !seen.insert(c.0.clone()) {
                        return Err(PddlError::duplicate(c.1, "constant", &c.0));
                    }
                    domain.constants.push(c.0);
                }
            }
            ":predicates" => {
                for decl in body {
                    let pred = parse_predicate_decl(decl)?;
                    if domain.predicate(&pred.name).is_some() {
                        return Err(PddlError::duplicate(decl.pos(), "predicate", &pred.name));
                    }
                    domain.predicates.push(pred);
                }
            }
            ":action" => pending_actions.push(section),
            other => {
                return Err(PddlError::unsupported(
                    section.pos(),
                    format!("domain section `{other}`"),
                ))
            }
        }
    }

    for section in pending_actions {
        let action = parse_action(section, &domain)?;
        if domain.action(&action.name).is_some() {
            return Err(PddlError::duplicate(section.pos(), "action", &action.name));
        }
        domain.actions.push(action);
    }
    Ok(domain)
}

/// Parses a problem file, checking object references only.
pub fn parse_problem(text: &str) -> Result<Problem, PddlError> {
    parse_problem_inner(text, None)
}

/// Parses a problem file and cross-checks predicates, arities and
/// constants against `domain`.
pub fn parse_problem_for(text: &str, domain: &Domain) -> Result<Problem, PddlError> {
    parse_problem_inner(text, Some(domain))
}

fn parse_problem_inner(text: &str, domain: Option<&Domain>) -> Result<Problem, PddlError> {
    let doc = read_document(text)?;
    let items = doc.as_list().unwrap_or_default();
    let (name, sections) = define_header(&doc, items, "problem")?;

    let mut problem = Problem {
        name,
        domain_name: String::new(),
        requirements: Vec::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut saw_domain = false;
    let mut init_exprs: Vec<&SExpr> = Vec::new();
    let mut goal_expr: Option<&SExpr> = None;
    let mut object_pos = HashMap::new();

    for section in sections {
        let head = section_head(section)?;
        let body = &section.as_list().unwrap_or_default()[1..];
        match head {
            ":domain" => {
                let [d] = body else {
                    return Err(PddlError::syntax(section.pos(), "one domain name", "other"));
                };
                problem.domain_name = expect_word(d, "domain name")?.to_string();
                saw_domain = true;
            }
            ":requirements" => {
                for flag in body {
                    let f = expect_word(flag, "requirement flag")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&f) {
                        return Err(PddlError::unsupported(
                            flag.pos(),
                            format!("requirement `{f}`"),
                        ));
                    }
                    problem.requirements.push(f.to_string());
                }
            }
            ":objects" => {
                for (obj, pos) in untyped_names(body, "object", false)? {
                    if object_pos.insert(obj.clone(), pos).is_some() {
                        return Err(PddlError::duplicate(pos, "object", &obj));
                    }
                    problem.objects.push(obj);
                }
            }
            ":init" => init_exprs.extend(body),
            ":goal" => {
                let [g] = body else {
                    return Err(PddlError::syntax(
                        section.pos(),
                        "one goal expression",
                        "other",
                    ));
                };
                goal_expr = Some(g);
            }
            other => {
                return Err(PddlError::unsupported(
                    section.pos(),
                    format!("problem section `{other}`"),
                ))
            }
        }
    }
    if !saw_domain {
        return Err(PddlError::syntax(
            doc.pos(),
            "`(:domain ...)`",
            "no domain reference",
        ));
    }
    if let Some(d) = domain {
        if d.name != problem.domain_name {
            return Err(PddlError::cross_ref(
                doc.pos(),
                "domain",
                &problem.domain_name,
            ));
        }
    }

    let known: HashSet<&str> = problem
        .objects
        .iter()
        .map(String::as_str)
        .chain(
            domain
                .into_iter()
                .flat_map(|d| d.constants.iter().map(String::as_str)),
        )
        .collect();

    for e in init_exprs {
        problem.init.push(parse_ground_atom(e, &known, domain)?);
    }
    if let Some(g) = goal_expr {
        let parts: &[SExpr] = match g.head() {
            Some("and") => &g.as_list().unwrap_or_default()[1..],
            _ if g.as_list().is_some_and(<[SExpr]>::is_empty) => &[],
            _ => std::slice::from_ref(g),
        };
        for part in parts {
            problem.goal.push(parse_ground_atom(part, &known, domain)?);
        }
    }
    Ok(problem)
}

fn define_header<'a>(
    doc: &SExpr,
    items: &'a [SExpr],
    kind: &str,
) -> Result<(String, &'a [SExpr]), PddlError> {
    match items.first().and_then(SExpr::as_atom) {
        Some("define") => {}
        _ => {
            let found = items
                .first()
                .map_or("empty list".to_string(), SExpr::describe);
            return Err(PddlError::syntax(doc.pos(), "`define`", &found));
        }
    }
    let header = items.get(1).ok_or_else(|| {
        PddlError::syntax(doc.pos(), &format!("`({kind} <name>)`"), "end of list")
    })?;
    match header.as_list() {
        Some([k, n]) if k.as_atom() == Some(kind) => {
            let name = expect_word(n, &format!("{kind} name"))?;
            Ok((name.to_string(), &items[2..]))
        }
        _ => Err(PddlError::syntax(
            header.pos(),
            &format!("`({kind} <name>)`"),
            &header.describe(),
        )),
    }
}

fn section_head(section: &SExpr) -> Result<&str, PddlError> {
    match section.head() {
        Some(h) if h.starts_with(':') => Ok(h),
        _ => Err(PddlError::syntax(
            section.pos(),
            "a `(:section ...)` list",
            &section.describe(),
        )),
    }
}

fn expect_word<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, PddlError> {
    e.as_atom()
        .ok_or_else(|| PddlError::syntax(e.pos(), what, &e.describe()))
}

/// Reads a flat name list, rejecting `- type` annotations.
fn untyped_names(
    body: &[SExpr],
    what: &str,
    variables: bool,
) -> Result<Vec<(String, Pos)>, PddlError> {
    let mut out = Vec::new();
    for e in body {
        let w = expect_word(e, what)?;
        if w == "-" {
            return Err(PddlError::unsupported(e.pos(), "typed name list"));
        }
        if variables != w.starts_with('?') {
            let expected = if variables { "a `?variable`" } else { "a name" };
            return Err(PddlError::syntax(e.pos(), expected, &format!("`{w}`")));
        }
        out.push((w.to_string(), e.pos()));
    }
    Ok(out)
}

fn parse_predicate_decl(decl: &SExpr) -> Result<PredicateDecl, PddlError> {
    let items = decl
        .as_list()
        .ok_or_else(|| PddlError::syntax(decl.pos(), "predicate declaration", &decl.describe()))?;
    let name = items
        .first()
        .ok_or_else(|| PddlError::syntax(decl.pos(), "predicate name", "`()`"))
        .and_then(|n| expect_word(n, "predicate name"))?;
    let mut parameters = Vec::new();
    for (v, pos) in untyped_names(&items[1..], "parameter", true)? {
        if parameters.contains(&v) {
            return Err(PddlError::duplicate(pos, "parameter", &v));
        }
        parameters.push(v);
    }
    Ok(PredicateDecl::new(name, parameters))
}

struct ActionScope<'a> {
    domain: &'a Domain,
    parameters: &'a [String],
}

impl ActionScope<'_> {
    fn literal(&self, e: &SExpr, allow_negative: bool) -> Result<Literal, PddlError> {
        match e.head() {
            Some("not") => {
                let inner = match e.as_list() {
                    Some([_, inner]) => inner,
                    _ => return Err(PddlError::syntax(e.pos(), "`(not <atom>)`", &e.describe())),
                };
                if !allow_negative {
                    return Err(PddlError::unsupported(
                        e.pos(),
                        format!("negative precondition without `{NEGATIVE_PRECONDITIONS}`"),
                    ));
                }
                let (pred, args) = self.atom(inner)?;
                Ok(Literal::negative(pred, args))
            }
            _ => {
                let (pred, args) = self.atom(e)?;
                Ok(Literal::positive(pred, args))
            }
        }
    }

    fn atom(&self, e: &SExpr) -> Result<(String, Vec<String>), PddlError> {
        let items = e
            .as_list()
            .ok_or_else(|| PddlError::syntax(e.pos(), "an atom `(p ...)`", &e.describe()))?;
        let pred = items
            .first()
            .ok_or_else(|| PddlError::syntax(e.pos(), "predicate name", "`()`"))
            .and_then(|n| expect_word(n, "predicate name"))?;
        if UNSUPPORTED_HEADS.contains(&pred) || matches!(pred, "and" | "or" | "not") {
            return Err(PddlError::unsupported(
                e.pos(),
                format!("`{pred}` expression"),
            ));
        }
        let decl = self
            .domain
            .predicate(pred)
            .ok_or_else(|| PddlError::cross_ref(e.pos(), "predicate", pred))?;
        let mut args = Vec::new();
        for a in &items[1..] {
            let w = expect_word(a, "argument")?;
            if w.starts_with('?') {
                if !self.parameters.iter().any(|p| p == w) {
                    return Err(PddlError::cross_ref(a.pos(), "variable", w));
                }
            } else if !self.domain.constants.iter().any(|c| c == w) {
                return Err(PddlError::cross_ref(a.pos(), "constant", w));
            }
            args.push(w.to_string());
        }
        if args.len() != decl.arity() {
            return Err(PddlError::ArityMismatch {
                pos: e.pos(),
                predicate: pred.to_string(),
                expected: decl.arity(),
                found: args.len(),
            });
        }
        Ok((pred.to_string(), args))
    }

    /// `(and l*)`, a single literal, or `()`.
    fn conjunction(&self, e: &SExpr, allow_negative: bool) -> Result<Vec<Literal>, PddlError> {
        match e.head() {
            Some("and") => e.as_list().unwrap_or_default()[1..]
                .iter()
                .map(|l| {
                    if matches!(l.head(), Some("and" | "or")) {
                        Err(PddlError::unsupported(l.pos(), "nested connective"))
                    } else {
                        self.literal(l, allow_negative)
                    }
                })
                .collect(),
            _ if e.as_list().is_some_and(<[SExpr]>::is_empty) => Ok(Vec::new()),
            _ => Ok(vec![self.literal(e, allow_negative)?]),
        }
    }

    fn precondition(&self, e: &SExpr) -> Result<Precondition, PddlError> {
        let negative = self.domain.has_requirement(NEGATIVE_PRECONDITIONS);
        if e.head() == Some("or") {
            if !self.domain.has_requirement(DISJUNCTIVE_PRECONDITIONS) {
                return Err(PddlError::unsupported(
                    e.pos(),
                    format!("disjunction without `{DISJUNCTIVE_PRECONDITIONS}`"),
                ));
            }
            let disjuncts = e.as_list().unwrap_or_default()[1..]
                .iter()
                .map(|d| {
                    if d.head() == Some("or") {
                        Err(PddlError::unsupported(d.pos(), "nested disjunction"))
                    } else {
                        self.conjunction(d, negative)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Precondition::Or(disjuncts));
        }
        Ok(Precondition::And(self.conjunction(e, negative)?))
    }
}

fn parse_action(section: &SExpr, domain: &Domain) -> Result<Action, PddlError> {
    let items = section.as_list().unwrap_or_default();
    let name = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(section.pos(), "action name", "end of list"))
        .and_then(|n| expect_word(n, "action name"))?;

    let mut parameters: Vec<String> = Vec::new();
    let mut pre_expr = None;
    let mut eff_expr = None;
    let mut rest = items[2..].iter();
    while let Some(key) = rest.next() {
        let k = expect_word(key, "action keyword")?;
        let value = rest.next().ok_or_else(|| {
            PddlError::syntax(key.pos(), &format!("value for `{k}`"), "end of list")
        })?;
        match k {
            ":parameters" => {
                let list = value.as_list().ok_or_else(|| {
                    PddlError::syntax(value.pos(), "parameter list", &value.describe())
                })?;
                for (v, pos) in untyped_names(list, "parameter", true)? {
                    if parameters.contains(&v) {
                        return Err(PddlError::duplicate(pos, "parameter", &v));
                    }
                    parameters.push(v);
                }
            }
            ":precondition" => pre_expr = Some(value),
            ":effect" => eff_expr = Some(value),
            other => {
                return Err(PddlError::unsupported(
                    key.pos(),
                    format!("action keyword `{other}`"),
                ))
            }
        }
    }

    let scope = ActionScope {
        domain,
        parameters: &parameters,
    };
    let precondition = match pre_expr {
        Some(e) => scope.precondition(e)?,
        None => Precondition::default(),
    };
    let effects = match eff_expr {
        Some(e) => scope.conjunction(e, true)?,
        None => Vec::new(),
    };
    Ok(Action {
        name: name.to_string(),
        parameters,
        precondition,
        effects,
    })
}

fn parse_ground_atom(
    e: &SExpr,
    known: &HashSet<&str>,
    domain: Option<&Domain>,
) -> Result<Atom, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| PddlError::syntax(e.pos(), "a ground atom", &e.describe()))?;
    let pred = items
        .first()
        .ok_or_else(|| PddlError::syntax(e.pos(), "predicate name", "`()`"))
        .and_then(|n| expect_word(n, "predicate name"))?;
    if UNSUPPORTED_HEADS.contains(&pred) || matches!(pred, "and" | "or" | "not") {
        return Err(PddlError::unsupported(
            e.pos(),
            format!("`{pred}` in initial state or goal"),
        ));
    }
    let mut args = Vec::new();
    for a in &items[1..] {
        let w = expect_word(a, "object")?;
        if !known.contains(w) {
            return Err(PddlError::cross_ref(a.pos(), "object", w));
        }
        args.push(w.to_string());
    }
    if let Some(d) = domain {
        let decl = d
            .predicate(pred)
            .ok_or_else(|| PddlError::cross_ref(e.pos(), "predicate", pred))?;
        if decl.arity() != args.len() {
            return Err(PddlError::ArityMismatch {
                pos: e.pos(),
                predicate: pred.to_string(),
                expected: decl.arity(),
                found: args.len(),
            });
        }
    }
    Ok(Atom::new(pred, args))
}
