use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::ground::GroundTask;
use super::state::State;
use super::{OracleError, OracleLimits};
use crate::variantgen::sha256_hex;

/// The reachable state graph of a task.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub states: Vec<State>,
    /// `(ground action index, successor state index)` per state.
    pub edges: Vec<Vec<(usize, usize)>>,
    /// BFS depth from the initial state.
    pub depth: Vec<usize>,
    /// Shortest distance to a goal state; `None` marks a dead end.
    pub goal_distance: Vec<Option<usize>>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dead_ends(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.goal_distance[i].is_none())
    }

    pub fn shortest_plan_length(&self) -> Option<usize> {
        self.goal_distance.first().copied().flatten()
    }
}

/// Breadth-first exploration of everything reachable from the initial
/// state, followed by backward BFS from the goal states.
pub fn explore(t: &GroundTask, limits: &OracleLimits) -> Result<StateSpace, OracleError> {
    let mut states = vec![t.init.clone()];
    let mut index: HashMap<State, usize> = HashMap::from([(t.init.clone(), 0)]);
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut depth = vec![0];
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        let s = states[i].clone();
        for (ai, a) in t.actions.iter().enumerate() {
            if !a.applicable(&s) {
                continue;
            }
            let next = a.apply(&s);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if states.len() >= limits.state_cap {
                        return Err(OracleError::StateCapExceeded {
                            limit: limits.state_cap,
                        });
                    }
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    edges.push(Vec::new());
                    depth.push(depth[i] + 1);
                    queue.push_back(j);
                    j
                }
            };
            edges[i].push((ai, j));
        }
    }

    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (i, out) in edges.iter().enumerate() {
        for &(_, j) in out {
            reverse[j].push(i);
        }
    }
    let mut goal_distance = vec![None; states.len()];
    let mut queue = VecDeque::new();
    for (i, s) in states.iter().enumerate() {
        if t.is_goal(s) {
            goal_distance[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(j) = queue.pop_front() {
        let d = goal_distance[j].unwrap_or(0) + 1;
        for &i in &reverse[j] {
            if goal_distance[i].is_none() {
                goal_distance[i] = Some(d);
                queue.push_back(i);
            }
        }
    }

    Ok(StateSpace {
        states,
        edges,
        depth,
        goal_distance,
    })
}

/// Every action sequence of length at most `bound` that ends in a goal
/// state, as lists of rendered action names after `rename`. Duplicate name
/// sequences collapse.
pub fn enumerate_plans<F>(
    t: &GroundTask,
    space: &StateSpace,
    bound: usize,
    limits: &OracleLimits,
    rename: F,
) -> Result<BTreeSet<Vec<String>>, OracleError>
where
    F: Fn(usize) -> String,
{
    let names: Vec<String> = (0..t.actions.len()).map(&rename).collect();
    let mut plans = BTreeSet::new();
    let mut prefix: Vec<usize> = Vec::new();
    // (state, next edge index) stack
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    if space.goal_distance[0].is_some_and(|d| d <= bound) && t.is_goal(&space.states[0]) {
        plans.insert(Vec::new());
    }
    while let Some(&mut (s, ref mut next)) = stack.last_mut() {
        let remaining = bound - prefix.len();
        let out = &space.edges[s];
        if remaining == 0 || *next >= out.len() {
            stack.pop();
            prefix.pop();
            continue;
        }
        let (ai, j) = out[*next];
        *next += 1;
        if space.goal_distance[j].is_none_or(|d| d > remaining - 1) {
            continue;
        }
        prefix.push(ai);
        if t.is_goal(&space.states[j]) {
            plans.insert(prefix.iter().map(|&a| names[a].clone()).collect());
            if plans.len() > limits.plan_cap {
                return Err(OracleError::PlanCapExceeded {
                    limit: limits.plan_cap,
                });
            }
        }
        stack.push((j, 0));
    }
    Ok(plans)
}

/// Order-independent digest of a plan set.
pub fn plan_set_hash(plans: &BTreeSet<Vec<String>>) -> String {
    let mut text = String::new();
    for p in plans {
        text.push_str(&p.join(";"));
        text.push('\n');
    }
    sha256_hex(text.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub solvable: bool,
    pub shortest_plan_length: Option<usize>,
    pub reachable_state_count: usize,
    pub dead_end_count: usize,
    pub ground_action_count: usize,
    pub plan_bound: usize,
    pub plan_count: usize,
    pub plan_set_hash: String,
}

pub fn report(
    t: &GroundTask,
    space: &StateSpace,
    plans: &BTreeSet<Vec<String>>,
    bound: usize,
) -> OracleReport {
    let shortest = space.shortest_plan_length();
    OracleReport {
        solvable: shortest.is_some(),
        shortest_plan_length: shortest,
        reachable_state_count: space.len(),
        dead_end_count: space.dead_ends().count(),
        ground_action_count: t.actions.len(),
        plan_bound: bound,
        plan_count: plans.len(),
        plan_set_hash: plan_set_hash(plans),
    }
}

/// Explores `t` exhaustively and enumerates plans up to `bound`.
pub fn solve_bfs(
    t: &GroundTask,
    bound: usize,
    limits: &OracleLimits,
) -> Result<OracleReport, OracleError> {
    let space = explore(t, limits)?;
    let plans = enumerate_plans(t, &space, bound, limits, |i| t.actions[i].name())?;
    Ok(report(t, &space, &plans, bound))
}

fn normalize_name(name: &str) -> String {
    let inner = name.trim().trim_start_matches('(').trim_end_matches(')');
    let words: Vec<String> = inner.split_whitespace().map(str::to_lowercase).collect();
    format!("({})", words.join(" "))
}

/// Whether `plan` (ground action names, with or without parentheses)
/// executes from the initial state and ends in a goal state.
pub fn validate_plan<S: AsRef<str>>(t: &GroundTask, plan: &[S]) -> Result<bool, OracleError> {
    let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, a) in t.actions.iter().enumerate() {
        by_name.entry(a.name()).or_default().push(i);
    }
    let mut s = t.init.clone();
    for step in plan {
        let name = normalize_name(step.as_ref());
        let candidates = by_name
            .get(&name)
            .ok_or_else(|| OracleError::UnknownAction(name.clone()))?;
        match candidates.iter().find(|&&i| t.actions[i].applicable(&s)) {
            Some(&i) => s = t.actions[i].apply(&s),
            None => return Ok(false),
        }
    }
    Ok(t.is_goal(&s))
}
