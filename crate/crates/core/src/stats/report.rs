use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::summary::{correlations, summarize, GroupKey, INCLUSION_RULE};
use crate::harness::RunRecord;
use crate::variantgen::{Category, MechanismId};

pub const RANGE_DASH: &str = "\u{2013}";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

/// One row of the detail table and of the CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `SSC`, `MRC`, `TDC`, the baseline name, or `other`.
    pub category: String,
    pub mechanism: String,
    pub planner: String,
    pub domain: String,
    pub mu_j: Option<f64>,
    pub sigma_j: Option<f64>,
    pub t_s: f64,
    pub r: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub baseline: String,
    pub rows: Vec<ReportRow>,
    /// `(group, included, total)` for every group seen.
    pub coverage: Vec<(GroupKey, usize, usize)>,
    pub singleton_sigma: Vec<GroupKey>,
}

fn category_of(mechanism: &str, baseline: &str) -> String {
    if mechanism == baseline {
        return baseline.to_string();
    }
    match mechanism.parse::<MechanismId>() {
        Ok(m) => m.category().to_string(),
        Err(_) => "other".to_string(),
    }
}

fn sort_key(row: &ReportRow, baseline: &str) -> (usize, String, String, usize, String) {
    let (cat, idx) = if row.mechanism == baseline {
        (0, 0)
    } else {
        match row.mechanism.parse::<MechanismId>() {
            Ok(m) => (
                1,
                MechanismId::ALL.iter().position(|x| *x == m).unwrap_or(0),
            ),
            Err(_) => (2, 0),
        }
    };
    (
        cat,
        row.planner.clone(),
        row.domain.clone(),
        idx,
        row.mechanism.clone(),
    )
}

/// Summaries and correlations against `baseline`, in a fixed order.
pub fn build_report(records: &[RunRecord], baseline: &str, timeout_s: Option<f64>) -> Report {
    let summary = summarize(records, timeout_s);
    let rs: BTreeMap<GroupKey, Option<f64>> = correlations(records, baseline, timeout_s)
        .into_iter()
        .map(|c| ((c.planner, c.domain, c.mechanism), c.r))
        .collect();

    let mut totals: BTreeMap<GroupKey, usize> = BTreeMap::new();
    for r in records {
        *totals
            .entry((r.planner.clone(), r.domain.clone(), r.mechanism.clone()))
            .or_default() += 1;
    }
    let included: BTreeMap<GroupKey, usize> = summary
        .rows
        .iter()
        .map(|s| {
            (
                (s.planner.clone(), s.domain.clone(), s.mechanism.clone()),
                s.n,
            )
        })
        .collect();

    let mut rows: Vec<ReportRow> = summary
        .rows
        .iter()
        .map(|s| {
            let k = (s.planner.clone(), s.domain.clone(), s.mechanism.clone());
            ReportRow {
                category: category_of(&s.mechanism, baseline),
                mechanism: s.mechanism.clone(),
                planner: s.planner.clone(),
                domain: s.domain.clone(),
                mu_j: s.mu,
                sigma_j: s.sigma,
                t_s: s.t,
                r: rs.get(&k).copied().flatten(),
                n: s.n,
            }
        })
        .collect();
    rows.sort_by_key(|r| sort_key(r, baseline));

    Report {
        baseline: baseline.to_string(),
        rows,
        coverage: totals
            .into_iter()
            .map(|(k, total)| {
                let n = included.get(&k).copied().unwrap_or(0);
                (k, n, total)
            })
            .collect(),
        singleton_sigma: summary
            .rows
            .iter()
            .filter(|s| s.sigma_singleton)
            .map(|s| (s.planner.clone(), s.domain.clone(), s.mechanism.clone()))
            .collect(),
    }
}

/// Three significant figures below 100, whole numbers from 100 up.
pub fn fmt_value(v: f64) -> String {
    if !v.is_finite() {
        return "n/a".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 100.0 {
        return format!("{v:.0}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    let text = format!("{v:.decimals$}");
    // rounding can carry into a new digit, e.g. 99.96 -> "100.0"
    if text.trim_start_matches('-').starts_with("100") && decimals > 0 {
        return format!("{v:.0}");
    }
    text
}

pub fn fmt_r(r: f64) -> String {
    format!("{r:.2}")
}

/// `lo–hi` over the defined values, or a single value when both ends
/// print the same.
pub fn fmt_range(values: &[Option<f64>], fmt: fn(f64) -> String) -> String {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    if defined.is_empty() {
        return "n/a".into();
    }
    let lo = defined.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (a, b) = (fmt(lo), fmt(hi));
    if a == b {
        a
    } else {
        format!("{a}{RANGE_DASH}{b}")
    }
}

fn opt(v: Option<f64>, fmt: fn(f64) -> String) -> String {
    v.map_or_else(|| "n/a".into(), fmt)
}

pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => markdown(report),
        ReportFormat::Csv => csv_text(report),
    }
}

fn markdown(report: &Report) -> String {
    let mut out = String::new();
    let b = &report.baseline;
    let _ = writeln!(out, "# Energy report\n");
    let _ = writeln!(
        out,
        "μ: mean energy (J) pooled over instances and repetitions; σ: sample standard deviation (J); \
         t: mean duration (s); r: Pearson correlation of per-instance mean energy, variant vs `{b}`. \
         Included runs: {INCLUSION_RULE}. Category cells give the min{RANGE_DASH}max over the category's mechanisms.\n"
    );

    let baseline_rows: Vec<&ReportRow> = report.rows.iter().filter(|r| r.mechanism == *b).collect();
    if !baseline_rows.is_empty() {
        let _ = writeln!(out, "## Baseline (`{b}`)\n");
        let _ = writeln!(out, "| Planner | Domain | μ (J) | σ (J) | t (s) | n |");
        let _ = writeln!(out, "|---|---|---|---|---|---|");
        for r in baseline_rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                r.planner,
                r.domain,
                opt(r.mu_j, fmt_value),
                opt(r.sigma_j, fmt_value),
                fmt_value(r.t_s),
                r.n
            );
        }
        out.push('\n');
    }

    for cat in [Category::Ssc, Category::Mrc, Category::Tdc] {
        let name = cat.to_string();
        let mut cells: BTreeMap<(String, String), Vec<&ReportRow>> = BTreeMap::new();
        for r in report.rows.iter().filter(|r| r.category == name) {
            cells
                .entry((r.planner.clone(), r.domain.clone()))
                .or_default()
                .push(r);
        }
        if cells.is_empty() {
            continue;
        }
        let _ = writeln!(out, "## {name}\n");
        let _ = writeln!(
            out,
            "| Planner | Domain | μ (J) | σ (J) | t (s) | r | mechanisms |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for ((planner, domain), rs) in cells {
            let mu: Vec<_> = rs.iter().map(|r| r.mu_j).collect();
            let sigma: Vec<_> = rs.iter().map(|r| r.sigma_j).collect();
            let t: Vec<_> = rs.iter().map(|r| Some(r.t_s)).collect();
            let r: Vec<_> = rs.iter().map(|r| r.r).collect();
            let _ = writeln!(
                out,
                "| {planner} | {domain} | {} | {} | {} | {} | {} |",
                fmt_range(&mu, fmt_value),
                fmt_range(&sigma, fmt_value),
                fmt_range(&t, fmt_value),
                fmt_range(&r, fmt_r),
                rs.len()
            );
        }
        out.push('\n');
    }

    let _ = writeln!(out, "## Per-mechanism detail\n");
    let _ = writeln!(
        out,
        "| Category | Mechanism | Planner | Domain | μ (J) | σ (J) | t (s) | r | n |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.category,
            r.mechanism,
            r.planner,
            r.domain,
            opt(r.mu_j, fmt_value),
            opt(r.sigma_j, fmt_value),
            fmt_value(r.t_s),
            if r.mechanism == *b {
                "".into()
            } else {
                opt(r.r, fmt_r)
            },
            r.n
        );
    }
    out.push('\n');

    let _ = writeln!(out, "## Coverage\n");
    let _ = writeln!(
        out,
        "| Planner | Domain | Mechanism | included | recorded |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|");
    for ((p, d, m), n, total) in &report.coverage {
        let mark = if *n == 0 { " (no included runs)" } else { "" };
        let _ = writeln!(out, "| {p} | {d} | {m} | {n}{mark} | {total} |");
    }
    if !report.singleton_sigma.is_empty() {
        out.push('\n');
        let _ = writeln!(out, "σ is reported as 0 for single-reading groups:");
        for (p, d, m) in &report.singleton_sigma {
            let _ = writeln!(out, "- {p} / {d} / {m}");
        }
    }
    out
}

fn csv_text(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

/// Reads rows written by the CSV report.
pub fn read_csv_report(text: &str) -> Result<Vec<ReportRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting() {
        assert_eq!(fmt_value(12.5), "12.5");
        assert_eq!(fmt_value(12.549), "12.5");
        assert_eq!(fmt_value(5.0), "5.00");
        assert_eq!(fmt_value(0.01234), "0.0123");
        assert_eq!(fmt_value(1234.6), "1235");
        assert_eq!(fmt_value(99.96), "100");
        assert_eq!(fmt_value(-4.5678), "-4.57");
        assert_eq!(fmt_value(0.0), "0");
        assert_eq!(fmt_r(0.75592), "0.76");
    }

    #[test]
    fn ranges() {
        assert_eq!(fmt_range(&[Some(12.6), Some(12.5)], fmt_value), "12.5–12.6");
        assert_eq!(fmt_range(&[Some(5.0)], fmt_value), "5.00");
        assert_eq!(fmt_range(&[Some(5.0), Some(5.001)], fmt_value), "5.00");
        assert_eq!(fmt_range(&[None, Some(0.5)], fmt_r), "0.50");
        assert_eq!(fmt_range(&[None], fmt_r), "n/a");
    }
}
