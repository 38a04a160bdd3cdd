use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pddl_morph::harness::{
    first_allowed_core, load_planners, parse_memory, read_results, run_campaign, CampaignOptions,
    HarnessLimits,
};
use pddl_morph::oracle::{
    check_manifest, CheckStatus, OracleLimits, DEFAULT_CAP, DEFAULT_EXTRA_DEPTH,
};
use pddl_morph::pddl::{parse_domain, parse_problem_for, Problem};
use pddl_morph::stats::{build_report, emit_report, ReportFormat};
use pddl_morph::variantgen::{
    generate_suite, write_suite, GeneratorConfig, MechanismId, DEFAULT_PREFIX, DEFAULT_RATIO,
};
use pddl_morph::Execution;

const EXIT_PARSE: u8 = 2;
const EXIT_SKIPPED: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 4;
const EXIT_RUNTIME: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "pddl-morph",
    version,
    about = "Generate, certify and benchmark PDDL domain-model variants"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the original task and every variant, plus a manifest.
    Generate {
        #[arg(long)]
        domain: PathBuf,
        /// Problem files or glob patterns; repeatable.
        #[arg(long, required = true, num_args = 1..)]
        problems: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RATIO)]
        ratio: f64,
        #[arg(long, default_value = DEFAULT_PREFIX)]
        prefix: String,
        /// Disable parallel generation.
        #[arg(long)]
        sequential: bool,
    },
    /// Compare every variant with the original by exhaustive search.
    OracleCheck {
        /// Path to suite-manifest.json.
        #[arg(long)]
        suite: PathBuf,
        /// Glob over instance ids.
        #[arg(long)]
        instances: Option<String>,
        /// Plan sets are compared up to the shortest length plus this.
        #[arg(long, default_value_t = DEFAULT_EXTRA_DEPTH)]
        extra_depth: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        ground_cap: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        state_cap: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        plan_cap: usize,
        /// Write JSON lines here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Run planners over the suite, one process at a time.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        /// TOML file with one [[planner]] table per planner.
        #[arg(long)]
        planners: PathBuf,
        #[arg(long)]
        instances: Option<String>,
        #[arg(long, default_value_t = 30)]
        reps: usize,
        /// Wall-clock limit per run, seconds.
        #[arg(long, default_value_t = 300.0)]
        timeout: f64,
        /// Address-space limit, e.g. 8g or 512m.
        #[arg(long, default_value = "8g")]
        mem: String,
        /// First core to pin to; defaults to the first allowed core.
        #[arg(long)]
        core: Option<usize>,
        #[arg(long, default_value_t = 1)]
        cores: usize,
        #[arg(long)]
        out: PathBuf,
        /// Energy sampling interval during a run, seconds.
        #[arg(long, default_value_t = 60.0)]
        sample_interval: f64,
        /// Record duration only.
        #[arg(long)]
        no_energy: bool,
        /// Stop after this many new records.
        #[arg(long)]
        stop_after: Option<usize>,
    },
    /// Summarise a results log.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "original")]
        baseline: String,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        /// Markdown output also writes the CSV next to it.
        #[arg(long)]
        out: PathBuf,
        /// Also exclude runs at or above this duration, seconds.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// List the mechanism catalogue.
    Mechanisms {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
}

/// An error with a specific exit code.
struct Exit(u8, anyhow::Error);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit(EXIT_RUNTIME, e)
    }
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn expand_problems(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut files = BTreeSet::new();
    for pat in patterns {
        let path = Path::new(pat);
        if path.is_file() {
            files.insert(path.to_path_buf());
            continue;
        }
        let before = files.len();
        for p in glob::glob(pat).with_context(|| format!("bad pattern `{pat}`"))? {
            let p = p?;
            if p.is_file() {
                files.insert(p);
            }
        }
        if files.len() == before {
            bail!("no problem file matches `{pat}`");
        }
    }
    Ok(files.into_iter().collect())
}

fn instance_ids(files: &[PathBuf]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for f in files {
        let stem = f
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".into());
        let mut id = stem.clone();
        let mut n = 2;
        while ids.contains(&id) {
            id = format!("{stem}-{n}");
            n += 1;
        }
        ids.push(id);
    }
    ids
}

fn cmd_generate(
    domain: &Path,
    problems: &[String],
    out: &Path,
    ratio: f64,
    prefix: String,
    sequential: bool,
) -> Result<u8, Exit> {
    let text =
        fs::read_to_string(domain).with_context(|| format!("reading {}", domain.display()))?;
    let d = parse_domain(&text)
        .map_err(|e| Exit(EXIT_PARSE, anyhow::anyhow!("{}:{e}", domain.display())))?;
    let files = expand_problems(problems)?;
    let mut parsed: Vec<Problem> = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
        let p = parse_problem_for(&text, &d)
            .map_err(|e| Exit(EXIT_PARSE, anyhow::anyhow!("{}:{e}", f.display())))?;
        parsed.push(p);
    }
    let cfg = GeneratorConfig {
        redundancy_ratio: ratio,
        dummy_prefix: prefix,
        reference_problem: None,
    };
    let suite = generate_suite(&d, &parsed, &cfg, exec(sequential))
        .map_err(|e| Exit(EXIT_USAGE, e.into()))?
        .with_instance_ids(instance_ids(&files));
    let manifest = write_suite(&suite, out).map_err(anyhow::Error::from)?;
    println!("{}", manifest.display());
    let skipped: Vec<_> = suite.skipped().collect();
    for e in &skipped {
        if let Err(reason) = &e.result {
            eprintln!("skipped {}: {reason}", e.mechanism.id());
        }
    }
    log::info!("{} entries, {} skipped", suite.len(), skipped.len());
    Ok(if skipped.is_empty() { 0 } else { EXIT_SKIPPED })
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle_check(
    suite: &Path,
    instances: Option<String>,
    extra_depth: usize,
    limits: OracleLimits,
    out: Option<PathBuf>,
    sequential: bool,
) -> Result<u8, Exit> {
    let pattern = instances
        .as_deref()
        .map(glob::Pattern::new)
        .transpose()
        .map_err(|e| Exit(EXIT_USAGE, e.into()))?;
    let keep = |i: &str| pattern.as_ref().is_none_or(|p| p.matches(i));
    let records = check_manifest(suite, keep, extra_depth, &limits, exec(sequential))
        .map_err(anyhow::Error::from)?;

    let mut sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut code = 0;
    for r in &records {
        let line = serde_json::to_string(r).map_err(anyhow::Error::from)?;
        writeln!(sink, "{line}").map_err(anyhow::Error::from)?;
        match r.status {
            CheckStatus::Pass => {}
            CheckStatus::Fail => {
                code = EXIT_CHECK_FAILED;
                let witness = r
                    .evidence
                    .as_ref()
                    .and_then(|e| e.witness.as_ref())
                    .map(|w| serde_json::to_string(w).unwrap_or_default())
                    .unwrap_or_else(|| "none".into());
                eprintln!(
                    "FAIL {} {}: {}; witness {witness}",
                    r.mechanism, r.instance, r.verdict
                );
            }
            CheckStatus::Inconclusive => {
                if code == 0 {
                    code = EXIT_INCONCLUSIVE;
                }
                eprintln!("INCONCLUSIVE {} {}: {}", r.mechanism, r.instance, r.verdict);
            }
        }
    }
    sink.flush().map_err(anyhow::Error::from)?;
    let passed = records
        .iter()
        .filter(|r| r.status == CheckStatus::Pass)
        .count();
    eprintln!("{passed}/{} checks passed", records.len());
    Ok(code)
}

fn seconds(s: f64, what: &str) -> Result<Duration, Exit> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| {
            Exit(
                EXIT_USAGE,
                anyhow::anyhow!("{what} must be a positive number of seconds"),
            )
        })
}

fn run(cli: Cli) -> Result<u8, Exit> {
    match cli.command {
        Command::Generate {
            domain,
            problems,
            out,
            ratio,
            prefix,
            sequential,
        } => cmd_generate(&domain, &problems, &out, ratio, prefix, sequential),
        Command::OracleCheck {
            suite,
            instances,
            extra_depth,
            ground_cap,
            state_cap,
            plan_cap,
            out,
            sequential,
        } => cmd_oracle_check(
            &suite,
            instances,
            extra_depth,
            OracleLimits {
                ground_cap,
                state_cap,
                plan_cap,
            },
            out,
            sequential,
        ),
        Command::Bench {
            suite,
            planners,
            instances,
            reps,
            timeout,
            mem,
            core,
            cores,
            out,
            sample_interval,
            no_energy,
            stop_after,
        } => {
            let memory_bytes = parse_memory(&mem).ok_or_else(|| {
                Exit(
                    EXIT_USAGE,
                    anyhow::anyhow!("cannot read memory size `{mem}`"),
                )
            })?;
            let limits = HarnessLimits {
                cpu_cores: cores,
                first_core: core.or_else(first_allowed_core).unwrap_or(0),
                memory_bytes,
                timeout: seconds(timeout, "--timeout")?,
                repetitions: reps,
            };
            limits.validate().map_err(|e| Exit(EXIT_USAGE, e.into()))?;
            let planners = load_planners(&planners).map_err(|e| Exit(EXIT_USAGE, e.into()))?;
            let opts = CampaignOptions {
                instances,
                stop_after,
                sample_interval: Some(seconds(sample_interval, "--sample-interval")?),
                measure_energy: !no_energy,
                ..CampaignOptions::new(&out)
            };
            let s = run_campaign(&suite, &planners, &limits, &opts).map_err(anyhow::Error::from)?;
            eprintln!(
                "{} new records ({} already present), energy {}",
                s.written,
                s.resumed,
                if s.energy_measured {
                    "measured"
                } else {
                    "not measured"
                }
            );
            for v in &s.skipped_variants {
                eprintln!("variant {v} skipped in the manifest");
            }
            for (p, why) in &s.skipped_planners {
                eprintln!("planner {p} skipped: {why}");
            }
            if s.stopped_early {
                eprintln!("stopped early; rerun to resume");
            }
            println!("{}", out.display());
            Ok(0)
        }
        Command::Report {
            input,
            baseline,
            format,
            out,
            timeout,
        } => {
            let records = read_results(&input).map_err(anyhow::Error::from)?;
            let report = build_report(&records, &baseline, timeout);
            let write = |path: &Path, text: String| -> Result<()> {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)?;
                }
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            };
            match format {
                Format::Markdown => {
                    write(&out, emit_report(&report, ReportFormat::Markdown))?;
                    let csv = out.with_extension("csv");
                    write(&csv, emit_report(&report, ReportFormat::Csv))?;
                    println!("{}\n{}", out.display(), csv.display());
                }
                Format::Csv => {
                    write(&out, emit_report(&report, ReportFormat::Csv))?;
                    println!("{}", out.display());
                }
            }
            Ok(0)
        }
        Command::Mechanisms { json } => {
            let mut text = String::new();
            if json {
                let list: Vec<_> = MechanismId::ALL
                    .iter()
                    .map(|m| {
                        serde_json::json!({
                            "id": m.id(),
                            "category": m.category().as_str(),
                            "description": m.description(),
                        })
                    })
                    .collect();
                text = serde_json::to_string_pretty(&list).map_err(anyhow::Error::from)?;
                text.push('\n');
            } else {
                for m in MechanismId::ALL {
                    text.push_str(&format!(
                        "{:<9} {}  {}\n",
                        m.id(),
                        m.category(),
                        m.description()
                    ));
                }
            }
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
