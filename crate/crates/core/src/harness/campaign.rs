use std::collections::{BTreeSet, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::energy::RaplMeter;
use super::planner::PlannerSpec;
use super::run::{run_planner_once, HarnessLimits, LimitsError, RunError, RunRecord, RunTarget};
use crate::variantgen::{load_manifest, manifest_root, EntryStatus, ManifestError};

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Limits(#[from] LimitsError),
    #[error("invalid instance pattern: {0}")]
    Pattern(#[from] glob::PatternError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} is in use by another campaign")]
    Locked { path: PathBuf },
    #[error("{path}:{line}: unreadable record: {source}")]
    Record {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone)]
pub struct CampaignOptions {
    /// Append-only JSON Lines results log.
    pub results: PathBuf,
    /// Per-run logs go under `<logs>/<planner>/<domain>/<mechanism>/<instance>/rep-<k>/`.
    /// Defaults to the results path with extension `logs`.
    pub logs: Option<PathBuf>,
    /// Glob over instance ids; `None` selects every instance.
    pub instances: Option<String>,
    /// Stop after writing this many new records.
    pub stop_after: Option<usize>,
    /// Energy sampling cadence during a run.
    pub sample_interval: Option<Duration>,
    /// Measure energy; when false or no meter is found, energy is null.
    pub measure_energy: bool,
}

impl CampaignOptions {
    pub fn new(results: impl Into<PathBuf>) -> Self {
        CampaignOptions {
            results: results.into(),
            logs: None,
            instances: None,
            stop_after: None,
            sample_interval: None,
            measure_energy: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CampaignSummary {
    pub written: usize,
    /// Keys already in the log when the campaign started.
    pub resumed: usize,
    pub skipped_variants: Vec<String>,
    /// `(planner, reason)` for planners that could not be started.
    pub skipped_planners: Vec<(String, String)>,
    pub energy_measured: bool,
    pub stopped_early: bool,
}

type Key = (String, String, String, String, usize);

/// Reads the keys already recorded. A trailing partial line, left by a
/// campaign killed mid-write, is cut off.
fn recorded_keys(file: &mut File, path: &Path) -> Result<HashSet<Key>, CampaignError> {
    let io_err = |source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut text = String::new();
    file.seek(SeekFrom::Start(0)).map_err(io_err)?;
    file.read_to_string(&mut text).map_err(io_err)?;
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    if complete < text.len() {
        log::warn!("{}: dropping partial trailing record", path.display());
        file.set_len(complete as u64).map_err(io_err)?;
    }
    let mut keys = HashSet::new();
    for (i, line) in text[..complete].lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: RunRecord = serde_json::from_str(line).map_err(|source| CampaignError::Record {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        keys.insert(r.key());
    }
    file.seek(SeekFrom::End(0)).map_err(io_err)?;
    Ok(keys)
}

fn lock(file: &File, path: &Path) -> Result<(), CampaignError> {
    // SAFETY: flock on an fd we own; released when the file closes or the
    // process dies.
    if unsafe { libc::flock(file.as_raw_fd(), libc::LOCK_EX | libc::LOCK_NB) } != 0 {
        return Err(CampaignError::Locked {
            path: path.to_path_buf(),
        });
    }
    Ok(())
}

struct Cell {
    mechanism: String,
    instance: String,
    domain_file: PathBuf,
    problem_file: PathBuf,
}

/// Runs every planner on every selected variant and instance,
/// `limits.repetitions` times, one process at a time.
///
/// Order is round-robin: each repetition visits every planner, variant
/// and instance before the next starts. Keys already in the results log
/// are skipped, so an interrupted campaign resumes where it stopped.
pub fn run_campaign(
    manifest_path: &Path,
    planners: &[PlannerSpec],
    limits: &HarnessLimits,
    opts: &CampaignOptions,
) -> Result<CampaignSummary, CampaignError> {
    limits.validate()?;
    let manifest = load_manifest(manifest_path)?;
    let root = manifest_root(manifest_path);
    let pattern = opts
        .instances
        .as_deref()
        .map(glob::Pattern::new)
        .transpose()?;
    let selected = |instance: &str| {
        pattern
            .as_ref()
            .is_none_or(|p| p.matches(instance) || p.matches(&format!("{instance}.pddl")))
    };

    let mut summary = CampaignSummary::default();
    let mut cells = Vec::new();
    for e in &manifest.entries {
        if e.status != EntryStatus::Ok {
            summary.skipped_variants.push(e.mechanism.clone());
            continue;
        }
        let Some(domain_file) = &e.domain_file else {
            continue;
        };
        for pf in e.problems.iter().filter(|pf| selected(&pf.instance)) {
            cells.push(Cell {
                mechanism: e.mechanism.clone(),
                instance: pf.instance.clone(),
                domain_file: root.join(domain_file),
                problem_file: root.join(&pf.file),
            });
        }
    }

    if let Some(parent) = opts.results.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CampaignError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    let mut out = OpenOptions::new()
        .read(true)
        .append(true)
        .create(true)
        .open(&opts.results)
        .map_err(|source| CampaignError::Io {
            path: opts.results.clone(),
            source,
        })?;
    lock(&out, &opts.results)?;
    let done = recorded_keys(&mut out, &opts.results)?;
    summary.resumed = done.len();
    let logs = opts
        .logs
        .clone()
        .unwrap_or_else(|| opts.results.with_extension("logs"));

    let meter = if opts.measure_energy {
        match RaplMeter::from_env() {
            Ok(m) => Some(m),
            Err(e) => {
                log::warn!("{e}; recording duration only");
                None
            }
        }
    } else {
        None
    };
    summary.energy_measured = meter.is_some();

    let mut dead: BTreeSet<String> = BTreeSet::new();
    for rep in 0..limits.repetitions {
        for planner in planners {
            for cell in &cells {
                if dead.contains(&planner.id) {
                    break;
                }
                let key: Key = (
                    planner.id.clone(),
                    manifest.domain.clone(),
                    cell.mechanism.clone(),
                    cell.instance.clone(),
                    rep,
                );
                if done.contains(&key) {
                    continue;
                }
                if opts.stop_after.is_some_and(|n| summary.written >= n) {
                    summary.stopped_early = true;
                    return Ok(summary);
                }
                let log_dir = logs
                    .join(&planner.id)
                    .join(&manifest.domain)
                    .join(&cell.mechanism)
                    .join(&cell.instance)
                    .join(format!("rep-{rep}"));
                let target = RunTarget {
                    domain_id: &manifest.domain,
                    mechanism: &cell.mechanism,
                    instance: &cell.instance,
                    rep,
                    domain_file: &cell.domain_file,
                    problem_file: &cell.problem_file,
                    log_dir: &log_dir,
                };
                match run_planner_once(
                    planner,
                    &target,
                    limits,
                    meter.as_ref(),
                    opts.sample_interval,
                ) {
                    Ok(record) => {
                        out.write_all(record.to_json_line().as_bytes())
                            .and_then(|_| out.flush())
                            .map_err(|source| CampaignError::Io {
                                path: opts.results.clone(),
                                source,
                            })?;
                        summary.written += 1;
                    }
                    Err(e @ RunError::SpawnError { .. }) => {
                        log::error!("{e}; skipping planner {}", planner.id);
                        summary
                            .skipped_planners
                            .push((planner.id.clone(), e.to_string()));
                        dead.insert(planner.id.clone());
                    }
                    Err(RunError::Io { path, source }) => {
                        return Err(CampaignError::Io { path, source })
                    }
                }
            }
        }
    }
    Ok(summary)
}

/// Reads a results log, ignoring a trailing partial line.
pub fn read_results(path: &Path) -> Result<Vec<RunRecord>, CampaignError> {
    let text = fs::read_to_string(path).map_err(|source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    text[..complete]
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| CampaignError::Record {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}
