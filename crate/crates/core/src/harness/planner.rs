use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

pub const DOMAIN: &str = "{domain}";
pub const PROBLEM: &str = "{problem}";
pub const PLAN_OUT: &str = "{plan-out}";

#[derive(Debug, thiserror::Error)]
pub enum PlannerConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("planner config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("planner `{id}`: {message}")]
    Invalid { id: String, message: String },
}

/// An external planner and how to read its exit status.
///
/// Exit codes outside all four sets, and deaths by signal, classify as
/// crashes. The defaults follow Fast Downward's driver.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    pub id: String,
    /// argv; `{domain}` and `{problem}` must each appear exactly once,
    /// `{plan-out}` at most once. Placeholders may sit inside a larger
    /// argument such as `--plan-file={plan-out}`.
    pub command: Vec<String>,
    #[serde(default = "default_success")]
    pub success_exit_codes: BTreeSet<i32>,
    #[serde(default = "default_unsolvable")]
    pub unsolvable_exit_codes: BTreeSet<i32>,
    #[serde(default = "default_failure")]
    pub failure_exit_codes: BTreeSet<i32>,
    #[serde(default = "default_memory")]
    pub memory_exit_codes: BTreeSet<i32>,
    #[serde(default)]
    pub plan_file_expected: bool,
}

fn default_success() -> BTreeSet<i32> {
    [0].into()
}
fn default_unsolvable() -> BTreeSet<i32> {
    [11].into()
}
fn default_failure() -> BTreeSet<i32> {
    [12].into()
}
fn default_memory() -> BTreeSet<i32> {
    [22].into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlannerFile {
    #[serde(default)]
    planner: Vec<PlannerSpec>,
}

fn count(argv: &[String], placeholder: &str) -> usize {
    argv.iter().map(|a| a.matches(placeholder).count()).sum()
}

impl PlannerSpec {
    pub fn new(id: impl Into<String>, command: Vec<String>) -> Result<Self, PlannerConfigError> {
        let spec = PlannerSpec {
            id: id.into(),
            command,
            success_exit_codes: default_success(),
            unsolvable_exit_codes: default_unsolvable(),
            failure_exit_codes: default_failure(),
            memory_exit_codes: default_memory(),
            plan_file_expected: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PlannerConfigError> {
        let invalid = |message: String| PlannerConfigError::Invalid {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(invalid(
                "id must be non-empty and contain no path separators".into(),
            ));
        }
        if self.command.is_empty() {
            return Err(invalid("empty command".into()));
        }
        for p in [DOMAIN, PROBLEM] {
            let n = count(&self.command, p);
            if n != 1 {
                return Err(invalid(format!("{p} must appear exactly once, found {n}")));
            }
        }
        if count(&self.command, PLAN_OUT) > 1 {
            return Err(invalid(format!("{PLAN_OUT} may appear at most once")));
        }
        if self.plan_file_expected && count(&self.command, PLAN_OUT) == 0 {
            return Err(invalid(format!(
                "plan_file_expected needs {PLAN_OUT} in the command"
            )));
        }
        let sets = [
            &self.success_exit_codes,
            &self.unsolvable_exit_codes,
            &self.failure_exit_codes,
            &self.memory_exit_codes,
        ];
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                if let Some(code) = a.intersection(b).next() {
                    return Err(invalid(format!("exit code {code} is in two classes")));
                }
            }
        }
        Ok(())
    }

    /// The argv with placeholders replaced.
    pub fn argv(&self, domain: &Path, problem: &Path, plan_out: &Path) -> Vec<String> {
        self.command
            .iter()
            .map(|a| {
                a.replace(DOMAIN, &domain.to_string_lossy())
                    .replace(PROBLEM, &problem.to_string_lossy())
                    .replace(PLAN_OUT, &plan_out.to_string_lossy())
            })
            .collect()
    }
}

/// Parses a config with one `[[planner]]` table per planner.
pub fn parse_planners(text: &str) -> Result<Vec<PlannerSpec>, PlannerConfigError> {
    let file: PlannerFile = toml::from_str(text)?;
    let mut seen = BTreeSet::new();
    for p in &file.planner {
        p.validate()?;
        if !seen.insert(p.id.clone()) {
            return Err(PlannerConfigError::Invalid {
                id: p.id.clone(),
                message: "duplicate planner id".into(),
            });
        }
    }
    Ok(file.planner)
}

pub fn load_planners(path: &Path) -> Result<Vec<PlannerSpec>, PlannerConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| PlannerConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_planners(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_substitutes() {
        let ps = parse_planners(
            r#"
            [[planner]]
            id = "fd"
            command = ["fast-downward", "--plan-file={plan-out}", "{domain}", "{problem}", "--search", "astar(lmcut())"]
            plan_file_expected = true
            "#,
        )
        .unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].unsolvable_exit_codes, [11].into());
        let argv = ps[0].argv(
            Path::new("d.pddl"),
            Path::new("p.pddl"),
            Path::new("out.plan"),
        );
        assert_eq!(argv[1], "--plan-file=out.plan");
        assert_eq!(&argv[2..4], ["d.pddl", "p.pddl"]);
    }

    #[test]
    fn placeholder_counts_enforced() {
        let cmd = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(PlannerSpec::new("a", cmd(&["x", "{domain}"])).is_err());
        assert!(PlannerSpec::new("a", cmd(&["x", "{domain}", "{problem}", "{domain}"])).is_err());
        assert!(PlannerSpec::new("a", cmd(&["x", "{domain}{problem}"])).is_ok());
        assert!(PlannerSpec::new("a/b", cmd(&["x", "{domain}", "{problem}"])).is_err());
    }

    #[test]
    fn rejects_overlapping_codes_and_duplicates() {
        let overlap = r#"
            [[planner]]
            id = "a"
            command = ["x", "{domain}", "{problem}"]
            failure_exit_codes = [0]
        "#;
        assert!(parse_planners(overlap).is_err());
        let dup = r#"
            [[planner]]
            id = "a"
            command = ["x", "{domain}", "{problem}"]
            [[planner]]
            id = "a"
            command = ["y", "{domain}", "{problem}"]
        "#;
        assert!(matches!(
            parse_planners(dup),
            Err(PlannerConfigError::Invalid { .. })
        ));
    }
}
