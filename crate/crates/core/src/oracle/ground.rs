use std::collections::{BTreeSet, HashMap, HashSet};

use super::state::State;
use super::{OracleError, OracleLimits};
use crate::pddl::{Atom, Domain, Literal, Problem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    /// Schema name.
    pub schema: String,
    /// Objects bound to the schema parameters, in parameter order.
    pub args: Vec<String>,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub add: Vec<usize>,
    /// Never overlaps `add`: an atom both added and deleted stays true.
    pub del: Vec<usize>,
}

impl GroundAction {
    /// `(schema arg ...)`.
    pub fn name(&self) -> String {
        Atom::new(self.schema.clone(), self.args.clone()).to_string()
    }

    pub fn applicable(&self, s: &State) -> bool {
        self.pre_pos.iter().all(|&a| s.contains(a)) && !self.pre_neg.iter().any(|&a| s.contains(a))
    }

    pub fn apply(&self, s: &State) -> State {
        let mut next = s.clone();
        for &a in &self.del {
            next.remove(a);
        }
        for &a in &self.add {
            next.insert(a);
        }
        next
    }
}

/// Propositional task obtained by grounding a domain/problem pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTask {
    pub atoms: Vec<Atom>,
    pub init: State,
    pub goal: Vec<usize>,
    pub actions: Vec<GroundAction>,
}

impl GroundTask {
    pub fn is_goal(&self, s: &State) -> bool {
        self.goal.iter().all(|&a| s.contains(a))
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// Atoms true in `s`, rendered.
    pub fn state_atoms(&self, s: &State) -> Vec<&Atom> {
        s.atoms().map(|i| &self.atoms[i]).collect()
    }
}

struct Interner {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl Interner {
    fn intern(&mut self, atom: Atom) -> usize {
        if let Some(&i) = self.index.get(&atom) {
            return i;
        }
        let i = self.atoms.len();
        self.index.insert(atom.clone(), i);
        self.atoms.push(atom);
        i
    }
}

/// Predicates that no action effect mentions.
pub fn static_predicates(d: &Domain) -> HashSet<String> {
    let dynamic: HashSet<&str> = d
        .actions
        .iter()
        .flat_map(|a| a.effects.iter().map(|l| l.predicate.as_str()))
        .collect();
    d.predicates
        .iter()
        .filter(|p| !dynamic.contains(p.name.as_str()))
        .map(|p| p.name.clone())
        .collect()
}

fn substitute(l: &Literal, params: &[String], binding: &[usize], objects: &[String]) -> Atom {
    let args = l
        .arguments
        .iter()
        .map(|arg| match params.iter().position(|p| p == arg) {
            Some(i) => objects[binding[i]].clone(),
            None => arg.clone(),
        })
        .collect();
    Atom::new(l.predicate.clone(), args)
}

/// Grounds every action over all object tuples.
///
/// Literals over static predicates are evaluated against the initial state
/// and dropped; instances they falsify are pruned. A disjunctive
/// precondition yields one ground action per disjunct (identical results
/// are merged).
pub fn ground(d: &Domain, p: &Problem, limits: &OracleLimits) -> Result<GroundTask, OracleError> {
    let mut objects: Vec<String> = Vec::new();
    for o in d.constants.iter().chain(&p.objects) {
        if !objects.contains(o) {
            objects.push(o.clone());
        }
    }
    let n = objects.len() as u128;
    let mut instantiations: u128 = 0;
    for a in &d.actions {
        let per = n.saturating_pow(a.parameters.len() as u32);
        instantiations = instantiations
            .saturating_add(per.saturating_mul(a.precondition.disjuncts().len() as u128));
    }
    if instantiations > limits.ground_cap as u128 {
        return Err(OracleError::GroundingCapExceeded {
            limit: limits.ground_cap,
        });
    }

    let statics = static_predicates(d);
    let init_set: HashSet<&Atom> = p.init.iter().collect();
    let mut interner = Interner {
        atoms: Vec::new(),
        index: HashMap::new(),
    };
    let init_idx: Vec<usize> = p.init.iter().map(|a| interner.intern(a.clone())).collect();
    let goal: Vec<usize> = p.goal.iter().map(|a| interner.intern(a.clone())).collect();

    let mut actions = Vec::new();
    // (schema, args, sorted positive pre, sorted negative pre)
    type Seen = (String, Vec<String>, Vec<usize>, Vec<usize>);
    let mut seen: HashSet<Seen> = HashSet::new();
    for a in &d.actions {
        let k = a.parameters.len();
        for disjunct in a.precondition.disjuncts() {
            // static literals checkable once the last of their parameters is bound
            let mut checks: Vec<Vec<&Literal>> = vec![Vec::new(); k + 1];
            for l in disjunct.iter().filter(|l| statics.contains(&l.predicate)) {
                let last = l
                    .arguments
                    .iter()
                    .filter_map(|arg| a.parameters.iter().position(|p| p == arg))
                    .max()
                    .map_or(0, |i| i + 1);
                checks[last].push(l);
            }
            let static_ok = |l: &Literal, binding: &[usize]| {
                let atom = substitute(l, &a.parameters, binding, &objects);
                init_set.contains(&atom) == l.is_positive()
            };
            if !checks[0].iter().all(|l| static_ok(l, &[])) {
                continue;
            }
            if k > 0 && objects.is_empty() {
                continue;
            }

            let mut binding = vec![0usize; k];
            let mut depth = 0;
            // iterative backtracking over parameter positions
            loop {
                if depth == k {
                    let mut pre_pos = Vec::new();
                    let mut pre_neg = Vec::new();
                    for l in disjunct.iter().filter(|l| !statics.contains(&l.predicate)) {
                        let idx = interner.intern(substitute(l, &a.parameters, &binding, &objects));
                        if l.is_positive() {
                            pre_pos.push(idx);
                        } else {
                            pre_neg.push(idx);
                        }
                    }
                    let mut add = Vec::new();
                    let mut del = Vec::new();
                    for l in &a.effects {
                        let idx = interner.intern(substitute(l, &a.parameters, &binding, &objects));
                        let list = if l.is_positive() { &mut add } else { &mut del };
                        if !list.contains(&idx) {
                            list.push(idx);
                        }
                    }
                    del.retain(|i| !add.contains(i));
                    let args: Vec<String> = binding.iter().map(|&i| objects[i].clone()).collect();
                    let mut key_pos = pre_pos.clone();
                    key_pos.sort_unstable();
                    let mut key_neg = pre_neg.clone();
                    key_neg.sort_unstable();
                    if seen.insert((a.name.clone(), args.clone(), key_pos, key_neg)) {
                        actions.push(GroundAction {
                            schema: a.name.clone(),
                            args,
                            pre_pos,
                            pre_neg,
                            add,
                            del,
                        });
                    }
                    if k == 0 {
                        break;
                    }
                    depth -= 1;
                    binding[depth] += 1;
                    continue;
                }
                if binding[depth] >= objects.len() {
                    if depth == 0 {
                        break;
                    }
                    binding[depth] = 0;
                    depth -= 1;
                    binding[depth] += 1;
                    continue;
                }
                let prefix = &binding[..=depth];
                if checks[depth + 1].iter().all(|l| static_ok(l, prefix)) {
                    depth += 1;
                } else {
                    binding[depth] += 1;
                }
            }
        }
    }

    let mut init = State::empty(interner.atoms.len());
    for i in init_idx {
        init.insert(i);
    }
    Ok(GroundTask {
        atoms: interner.atoms,
        init,
        goal,
        actions,
    })
}

/// Object tuples per schema, for diagnostics and the redundancy checks.
pub fn ground_action_counts(t: &GroundTask) -> BTreeSet<(String, usize)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for a in &t.actions {
        *counts.entry(a.schema.as_str()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
