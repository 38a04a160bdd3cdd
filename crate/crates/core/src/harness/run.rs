use std::fs::{self, File};
use std::io;
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::time::{Duration, Instant};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::energy::{RaplMeter, DEFAULT_SAMPLE_INTERVAL};
use super::planner::PlannerSpec;

pub const GIB: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessLimits {
    pub cpu_cores: usize,
    /// First core of the pinned range `first_core..first_core + cpu_cores`.
    pub first_core: usize,
    pub memory_bytes: u64,
    pub timeout: Duration,
    pub repetitions: usize,
}

impl Default for HarnessLimits {
    fn default() -> Self {
        HarnessLimits {
            cpu_cores: 1,
            first_core: 0,
            memory_bytes: 8 * GIB,
            timeout: Duration::from_secs(300),
            repetitions: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid harness limits: {0}")]
pub struct LimitsError(String);

impl HarnessLimits {
    pub fn validate(&self) -> Result<(), LimitsError> {
        if self.cpu_cores == 0
            || self.memory_bytes == 0
            || self.timeout.is_zero()
            || self.repetitions == 0
        {
            return Err(LimitsError(
                "cores, memory, timeout and repetitions must be positive".into(),
            ));
        }
        if self.first_core + self.cpu_cores > libc::CPU_SETSIZE as usize {
            return Err(LimitsError(format!(
                "cores {}..{} exceed the cpu set size",
                self.first_core,
                self.first_core + self.cpu_cores
            )));
        }
        Ok(())
    }
}

/// Parses sizes such as `8g`, `512m`, `1024k` or a plain byte count.
pub fn parse_memory(text: &str) -> Option<u64> {
    let t = text.trim().to_ascii_lowercase();
    let t = t.strip_suffix('b').unwrap_or(&t);
    let (num, mult) = match t.chars().last()? {
        'k' => (&t[..t.len() - 1], 1u64 << 10),
        'm' => (&t[..t.len() - 1], 1 << 20),
        'g' => (&t[..t.len() - 1], 1 << 30),
        't' => (&t[..t.len() - 1], 1 << 40),
        _ => (t, 1),
    };
    let n: u64 = num.trim().parse().ok()?;
    n.checked_mul(mult).filter(|&b| b > 0)
}

/// The first core this process may run on, if it can be determined.
pub fn first_allowed_core() -> Option<usize> {
    // SAFETY: cpu_set_t is plain data; sched_getaffinity writes into it.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        if libc::sched_getaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &mut set) != 0 {
            return None;
        }
        (0..libc::CPU_SETSIZE as usize).find(|&c| libc::CPU_ISSET(c, &set))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    PlanFound,
    ProvedUnsolvable,
    Failure,
    Timeout,
    MemoryExceeded,
    CrashError,
}

impl Outcome {
    /// Runs that terminated in time with a planning result.
    pub fn is_included(self) -> bool {
        matches!(self, Outcome::PlanFound | Outcome::Failure)
    }
}

/// One line of the results log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub planner: String,
    pub domain: String,
    pub mechanism: String,
    pub instance: String,
    pub rep: usize,
    pub energy_j: Option<f64>,
    pub duration_s: f64,
    pub outcome: Outcome,
    /// The exit code, or minus the signal number if the process was killed.
    pub exit_code: i32,
    pub started_at: DateTime<Utc>,
}

impl RunRecord {
    pub fn key(&self) -> (String, String, String, String, usize) {
        (
            self.planner.clone(),
            self.domain.clone(),
            self.mechanism.clone(),
            self.instance.clone(),
            self.rep,
        )
    }

    pub fn to_json_line(&self) -> String {
        let mut v = serde_json::to_value(self).expect("record serializes");
        v["started_at"] = self
            .started_at
            .to_rfc3339_opts(SecondsFormat::Micros, true)
            .into();
        let mut line = v.to_string();
        line.push('\n');
        line
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot spawn `{program}`: {source}")]
    SpawnError { program: String, source: io::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Where a run reads and writes, and what it is called in the record.
#[derive(Debug, Clone)]
pub struct RunTarget<'a> {
    pub domain_id: &'a str,
    pub mechanism: &'a str,
    pub instance: &'a str,
    pub rep: usize,
    pub domain_file: &'a Path,
    pub problem_file: &'a Path,
    /// Directory receiving `stdout`, `stderr` and the plan file.
    pub log_dir: &'a Path,
}

fn exit_code(status: ExitStatus) -> i32 {
    status
        .code()
        .unwrap_or_else(|| -status.signal().unwrap_or(0))
}

pub fn classify(
    spec: &PlannerSpec,
    status: Option<ExitStatus>,
    timed_out: bool,
    plan_exists: bool,
) -> Outcome {
    if timed_out {
        return Outcome::Timeout;
    }
    let Some(code) = status.and_then(|s| s.code()) else {
        return Outcome::CrashError;
    };
    if spec.success_exit_codes.contains(&code) {
        if spec.plan_file_expected && !plan_exists {
            Outcome::CrashError
        } else {
            Outcome::PlanFound
        }
    } else if spec.unsolvable_exit_codes.contains(&code) {
        Outcome::ProvedUnsolvable
    } else if spec.failure_exit_codes.contains(&code) {
        Outcome::Failure
    } else if spec.memory_exit_codes.contains(&code) {
        Outcome::MemoryExceeded
    } else {
        Outcome::CrashError
    }
}

fn restrict_child(cmd: &mut Command, limits: &HarnessLimits) {
    let cores = limits.first_core..limits.first_core + limits.cpu_cores;
    let mem = limits.memory_bytes as libc::rlim_t;
    // SAFETY: only async-signal-safe libc calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setpgid(0, 0) != 0 {
                return Err(io::Error::last_os_error());
            }
            let mut set: libc::cpu_set_t = std::mem::zeroed();
            for c in cores.clone() {
                libc::CPU_SET(c, &mut set);
            }
            if libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) != 0 {
                return Err(io::Error::last_os_error());
            }
            let rl = libc::rlimit {
                rlim_cur: mem,
                rlim_max: mem,
            };
            if libc::setrlimit(libc::RLIMIT_AS, &rl) != 0 {
                return Err(io::Error::last_os_error());
            }
            Ok(())
        });
    }
}

/// Runs the planner once under `limits` and classifies the result.
///
/// The child gets its own process group, so on timeout everything it
/// started is killed. Energy is `None` when `meter` is.
pub fn run_planner_once(
    spec: &PlannerSpec,
    target: &RunTarget<'_>,
    limits: &HarnessLimits,
    meter: Option<&RaplMeter>,
    sample_interval: Option<Duration>,
) -> Result<RunRecord, RunError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(target.log_dir).map_err(io_err(target.log_dir))?;
    let stdout_path = target.log_dir.join("stdout");
    let stderr_path = target.log_dir.join("stderr");
    let plan_path = target.log_dir.join("plan");
    if plan_path.exists() {
        fs::remove_file(&plan_path).map_err(io_err(&plan_path))?;
    }
    let stdout = File::create(&stdout_path).map_err(io_err(&stdout_path))?;
    let stderr = File::create(&stderr_path).map_err(io_err(&stderr_path))?;

    let argv = spec.argv(target.domain_file, target.problem_file, &plan_path);
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .current_dir(target.log_dir)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr);
    restrict_child(&mut cmd, limits);

    let measurement = meter.and_then(|m| {
        m.start(sample_interval.unwrap_or(DEFAULT_SAMPLE_INTERVAL))
            .map_err(|e| log::warn!("{e}"))
            .ok()
    });
    let started_at = Utc::now();
    let clock = Instant::now();
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(source) => {
            if let Some(m) = measurement {
                let _ = m.finish();
            }
            return Err(RunError::SpawnError {
                program: argv[0].clone(),
                source,
            });
        }
    };
    let pgid = child.id() as libc::pid_t;

    let mut timed_out = false;
    let mut pause = Duration::from_millis(1);
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) => {}
            Err(e) => {
                log::warn!("waiting for planner {}: {e}", spec.id);
                break None;
            }
        }
        let elapsed = clock.elapsed();
        if elapsed >= limits.timeout {
            timed_out = true;
            // SAFETY: signalling our own child's process group.
            unsafe {
                libc::killpg(pgid, libc::SIGKILL);
            }
            break child.wait().ok();
        }
        std::thread::sleep(pause.min(limits.timeout - elapsed));
        pause = (pause * 2).min(Duration::from_millis(50));
    };
    let duration = clock.elapsed();
    // reap anything the planner left behind in its group
    // SAFETY: as above.
    unsafe {
        libc::killpg(pgid, libc::SIGKILL);
    }
    let energy_j = measurement.and_then(|m| m.finish().map_err(|e| log::warn!("{e}")).ok());

    let outcome = classify(spec, status, timed_out, plan_path.is_file());
    Ok(RunRecord {
        planner: spec.id.clone(),
        domain: target.domain_id.to_string(),
        mechanism: target.mechanism.to_string(),
        instance: target.instance.to_string(),
        rep: target.rep,
        energy_j,
        duration_s: duration.as_secs_f64(),
        outcome,
        exit_code: status.map_or(-libc::SIGKILL, exit_code),
        started_at,
    })
}
