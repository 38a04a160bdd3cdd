use std::collections::BTreeMap;

use serde::Serialize;

use crate::harness::RunRecord;

/// `(planner, domain, mechanism)`.
pub type GroupKey = (String, String, String);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub planner: String,
    pub domain: String,
    pub mechanism: String,
    /// Mean energy in joules; `None` when no included run has a reading.
    pub mu: Option<f64>,
    /// Sample standard deviation in joules.
    pub sigma: Option<f64>,
    /// Mean duration in seconds.
    pub t: f64,
    /// Included runs.
    pub n: usize,
    /// Runs recorded for the group before filtering.
    pub total: usize,
    /// Set when sigma comes from a single energy reading and is reported as 0.
    pub sigma_singleton: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Summary {
    pub rows: Vec<SummaryStats>,
    /// Groups with records but no included run.
    pub empty_groups: Vec<GroupKey>,
}

/// Human-readable statement of [`is_included`].
pub const INCLUSION_RULE: &str = "outcome PlanFound or Failure, finished within the timeout";

/// Runs that finished in time with a plan or a failure report.
pub fn is_included(r: &RunRecord, timeout_s: Option<f64>) -> bool {
    r.outcome.is_included() && timeout_s.is_none_or(|t| r.duration_s < t)
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample (n - 1) standard deviation; 0 for a single value.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() == 1 {
        return Some(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

fn key(r: &RunRecord) -> GroupKey {
    (r.planner.clone(), r.domain.clone(), r.mechanism.clone())
}

/// Groups by planner, domain and mechanism and summarises the included
/// runs, pooling instances and repetitions.
pub fn summarize(records: &[RunRecord], timeout_s: Option<f64>) -> Summary {
    let mut groups: BTreeMap<GroupKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    let mut out = Summary::default();
    for (k, rs) in groups {
        let included: Vec<&RunRecord> = rs
            .iter()
            .copied()
            .filter(|r| is_included(r, timeout_s))
            .collect();
        if included.is_empty() {
            out.empty_groups.push(k);
            continue;
        }
        let energies: Vec<f64> = included.iter().filter_map(|r| r.energy_j).collect();
        let durations: Vec<f64> = included.iter().map(|r| r.duration_s).collect();
        out.rows.push(SummaryStats {
            planner: k.0,
            domain: k.1,
            mechanism: k.2,
            mu: mean(&energies),
            sigma: sample_sd(&energies),
            t: mean(&durations).unwrap_or(0.0),
            n: included.len(),
            total: rs.len(),
            sigma_singleton: energies.len() == 1,
        });
    }
    out
}

/// Pearson's r, or `None` for fewer than two pairs or zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let mx = mean(x)?;
    let my = mean(y)?;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub planner: String,
    pub domain: String,
    pub mechanism: String,
    pub r: Option<f64>,
    pub instances_used: usize,
}

fn instance_means(records: &[&RunRecord], timeout_s: Option<f64>) -> BTreeMap<String, f64> {
    let mut by: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| is_included(r, timeout_s)) {
        if let Some(e) = r.energy_j {
            by.entry(r.instance.clone()).or_default().push(e);
        }
    }
    by.into_iter()
        .filter_map(|(k, v)| mean(&v).map(|m| (k, m)))
        .collect()
}

/// Correlates one variant group with the baseline group over the
/// per-instance mean energies of the instances both have.
pub fn correlate(
    variant: &[&RunRecord],
    baseline: &[&RunRecord],
    timeout_s: Option<f64>,
) -> (Option<f64>, usize) {
    let v = instance_means(variant, timeout_s);
    let b = instance_means(baseline, timeout_s);
    let (x, y): (Vec<f64>, Vec<f64>) = v
        .iter()
        .filter_map(|(i, vm)| b.get(i).map(|bm| (*vm, *bm)))
        .unzip();
    (pearson(&x, &y), x.len())
}

/// One correlation per non-baseline group that has a baseline counterpart
/// with the same planner and domain.
pub fn correlations(
    records: &[RunRecord],
    baseline: &str,
    timeout_s: Option<f64>,
) -> Vec<CorrelationResult> {
    let mut groups: BTreeMap<GroupKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((planner, domain, mechanism), rs) in &groups {
        if mechanism == baseline {
            continue;
        }
        let Some(base) = groups.get(&(planner.clone(), domain.clone(), baseline.to_string()))
        else {
            continue;
        };
        let (r, used) = correlate(rs, base, timeout_s);
        out.push(CorrelationResult {
            planner: planner.clone(),
            domain: domain.clone(),
            mechanism: mechanism.clone(),
            r,
            instances_used: used,
        });
    }
    out
}
