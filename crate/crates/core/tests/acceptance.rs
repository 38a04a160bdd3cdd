//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chrono::Utc;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pddl_morph::harness::{
    energy_delta, energy_delta_uj, first_allowed_core, read_results, run_campaign,
    run_planner_once, write_synthetic_zone, CampaignOptions, EnergySample, HarnessLimits, Outcome,
    PlannerSpec, RaplMeter, RunRecord, RunTarget, RAPL_ROOT_ENV,
};
use pddl_morph::oracle::{
    check_suite, compare_tasks, ground, ComparisonVerdict, OracleLimits, Projection,
    DEFAULT_EXTRA_DEPTH,
};
use pddl_morph::pddl::{
    parse_domain, parse_problem_for, print_domain, print_problem, Domain, Precondition, Problem,
};
use pddl_morph::stats::{build_report, emit_report, pearson, summarize, ReportFormat};
use pddl_morph::variantgen::tdc::goal_symbols;
use pddl_morph::variantgen::{
    generate_suite, write_suite, Category, GeneratorConfig, MechanismId, VariantSuite,
};
use pddl_morph::Execution;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn load(domain: &str, problems: &[&str]) -> (Domain, Vec<Problem>) {
    let d = parse_domain(&fixture(domain)).expect("fixture domain parses");
    let ps = problems
        .iter()
        .map(|p| parse_problem_for(&fixture(p), &d).expect("fixture problem parses"))
        .collect();
    (d, ps)
}

fn gripper() -> (Domain, Vec<Problem>) {
    load("gripper.pddl", &["gripper-p1.pddl"])
}

fn blocks() -> (Domain, Vec<Problem>) {
    load(
        "blocksworld.pddl",
        &["blocksworld-p1.pddl", "blocksworld-p2.pddl"],
    )
}

fn suite_of((d, ps): (Domain, Vec<Problem>)) -> VariantSuite {
    generate_suite(&d, &ps, &GeneratorConfig::default(), Execution::Parallel).expect("valid config")
}

fn suite_cardinality() -> Check {
    let mut notes = Vec::new();
    for (name, input) in [("gripper", gripper()), ("blocksworld", blocks())] {
        let started = Instant::now();
        let suite = suite_of(input);
        let elapsed = started.elapsed();
        let count = |c| {
            suite
                .entries
                .iter()
                .filter(|e| e.mechanism.category() == c)
                .count()
        };
        let (ssc, mrc, tdc) = (
            count(Category::Ssc),
            count(Category::Mrc),
            count(Category::Tdc),
        );
        ensure!(suite.len() == 32, "{name}: {} entries", suite.len());
        ensure!((ssc, mrc, tdc) == (20, 7, 4), "{name}: {ssc}/{mrc}/{tdc}");
        ensure!(elapsed < Duration::from_secs(1), "{name}: took {elapsed:?}");
        let skips = suite.skipped().count();
        if name == "gripper" {
            ensure!(skips == 0, "gripper: {skips} skips");
        }
        notes.push(format!(
            "{name} 1+{ssc}+{mrc}+{tdc} in {:.0} ms, {skips} skips",
            elapsed.as_secs_f64() * 1e3
        ));
    }
    Ok(notes.join("; "))
}

fn compare(suite: &VariantSuite, m: MechanismId) -> pddl_morph::oracle::Comparison {
    let limits = OracleLimits::default();
    let v = suite.variant(m);
    let a = ground(&suite.original.domain, &suite.original.problems[0], &limits).expect("grounds");
    let b = ground(&v.domain, &v.problems[0], &limits).expect("grounds");
    compare_tasks(
        &a,
        &b,
        &Projection::new(&suite.dummy_prefix),
        DEFAULT_EXTRA_DEPTH,
        &limits,
    )
    .expect("within caps")
}

fn ssc_neutrality() -> Check {
    let suite = suite_of(gripper());
    let started = Instant::now();
    let mut n = 0;
    for m in MechanismId::in_category(Category::Ssc) {
        let c = compare(&suite, m);
        ensure!(
            c.verdict == ComparisonVerdict::Equivalent,
            "{}: {}",
            m.id(),
            c.verdict.as_str()
        );
        ensure!(
            c.original.plan_set_hash == c.variant.plan_set_hash,
            "{}: plan sets differ",
            m.id()
        );
        n += 1;
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{n}/20 equivalent in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn mrc_preservation() -> Check {
    let suite = suite_of(gripper());
    let mut original_len = None;
    for m in MechanismId::in_category(Category::Mrc) {
        let c = compare(&suite, m);
        ensure!(
            c.verdict >= ComparisonVerdict::SolvabilityPreserving,
            "{}: {}",
            m.id(),
            c.verdict.as_str()
        );
        ensure!(
            c.variant.shortest_plan_length == c.original.shortest_plan_length,
            "{}: length {:?} vs {:?}",
            m.id(),
            c.variant.shortest_plan_length,
            c.original.shortest_plan_length
        );
        original_len = c.original.shortest_plan_length;
    }
    ensure!(
        original_len == Some(3),
        "original shortest plan {original_len:?}"
    );
    let roa = compare(&suite, MechanismId::MrcRoa);
    ensure!(
        roa.variant.ground_action_count > roa.original.ground_action_count,
        "ROA ground actions {} vs {}",
        roa.variant.ground_action_count,
        roa.original.ground_action_count
    );
    Ok(format!(
        "7/7 >= solvability-preserving at length 3; ROA ground actions {} > {}",
        roa.variant.ground_action_count, roa.original.ground_action_count
    ))
}

fn tdc_deviation() -> Check {
    let suite = suite_of(gripper());
    let goals = goal_symbols(&suite.original.problems[0]);
    let rpd = compare(&suite, MechanismId::TdcRpd);
    ensure!(
        rpd.variant.dead_end_count >= 1,
        "RPD dead ends {}",
        rpd.variant.dead_end_count
    );

    let introduced = |m: MechanismId| -> Vec<pddl_morph::pddl::Action> {
        let v = suite.variant(m);
        v.domain
            .actions
            .iter()
            .filter(|a| suite.original.domain.action(&a.name).is_none())
            .cloned()
            .collect()
    };
    let adds_goal = |a: &pddl_morph::pddl::Action| {
        a.effects
            .iter()
            .any(|l| l.is_positive() && goals.contains(&l.predicate))
    };
    for m in [
        MechanismId::TdcDef,
        MechanismId::TdcApd,
        MechanismId::TdcCop,
    ] {
        let new = introduced(m);
        ensure!(!new.is_empty(), "{}: no introduced action", m.id());
        for a in &new {
            ensure!(
                !adds_goal(a),
                "{}: `{}` adds a goal predicate",
                m.id(),
                a.name
            );
        }
    }
    let records = check_suite(
        &suite,
        DEFAULT_EXTRA_DEPTH,
        &OracleLimits::default(),
        Execution::Parallel,
    );
    let tdc: Vec<String> = records
        .iter()
        .filter(|r| r.mechanism.starts_with("TDC"))
        .map(|r| {
            format!(
                "{}={}{}",
                r.mechanism,
                r.verdict,
                if r.degenerate { "(degenerate)" } else { "" }
            )
        })
        .collect();
    Ok(format!(
        "RPD dead ends {}; {}",
        rpd.variant.dead_end_count,
        tdc.join(", ")
    ))
}

fn permute_domain(d: &Domain, rng: &mut ChaCha8Rng) -> Domain {
    let mut d = d.clone();
    d.predicates.shuffle(rng);
    d.actions.shuffle(rng);
    for a in &mut d.actions {
        a.effects.shuffle(rng);
        match &mut a.precondition {
            Precondition::And(ls) => ls.shuffle(rng),
            Precondition::Or(ds) => {
                ds.shuffle(rng);
                for c in ds.iter_mut() {
                    c.shuffle(rng);
                }
            }
        }
    }
    d
}

fn permute_problem(p: &Problem, rng: &mut ChaCha8Rng) -> Problem {
    let mut p = p.clone();
    p.objects.shuffle(rng);
    p.init.shuffle(rng);
    p.goal.shuffle(rng);
    p
}

fn round_trip() -> Check {
    let inputs = [gripper(), blocks()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures = 0;
    let mut cases = 0;
    for i in 0..1000 {
        let (d, ps) = &inputs[i % inputs.len()];
        let d = permute_domain(d, &mut rng);
        let text = print_domain(&d);
        match parse_domain(&text) {
            Ok(back) if back == d && print_domain(&back) == text => {}
            _ => failures += 1,
        }
        for p in ps {
            let p = permute_problem(p, &mut rng);
            let text = print_problem(&p);
            match parse_problem_for(&text, &d) {
                Ok(back) if back == p && print_problem(&back) == text => {}
                _ => failures += 1,
            }
        }
        cases += 1;
    }
    ensure!(failures == 0, "{failures} failures");
    Ok(format!(
        "{cases} permuted domains with their problems, 0 failures"
    ))
}

fn record(e: f64, outcome: Outcome) -> RunRecord {
    RunRecord {
        planner: "p".into(),
        domain: "d".into(),
        mechanism: "original".into(),
        instance: "i".into(),
        rep: 0,
        energy_j: Some(e),
        duration_s: 1.0,
        outcome,
        exit_code: 0,
        started_at: Utc::now(),
    }
}

fn statistics() -> Check {
    let rs: Vec<RunRecord> = [10.0, 12.0, 14.0]
        .map(|e| record(e, Outcome::PlanFound))
        .to_vec();
    let s = summarize(&rs, None);
    let row = &s.rows[0];
    ensure!(
        row.mu == Some(12.0) && row.sigma == Some(2.0),
        "mu {:?} sigma {:?}",
        row.mu,
        row.sigma
    );
    ensure!(row.t == 1.0, "t {}", row.t);
    let cases: [(&[f64], &[f64], Option<f64>); 4] = [
        (&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], Some(1.0)),
        (&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0], Some(-1.0)),
        (&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0], None),
        // 24 / sqrt(42 * 24) = 2 / sqrt(7)
        (&[1.0, 2.0, 4.0], &[1.0, 3.0, 3.0], Some(2.0 / 7f64.sqrt())),
    ];
    for (x, y, want) in cases {
        let got = pearson(x, y);
        match (got, want) {
            (Some(g), Some(w)) => ensure!((g - w).abs() <= 1e-12, "r{x:?},{y:?} = {g}, want {w}"),
            (None, None) => {}
            _ => return Err(format!("r{x:?},{y:?} = {got:?}, want {want:?}")),
        }
    }
    Ok("mu=12 sigma=2; four r values within 1e-12; zero variance undefined".into())
}

fn stub(script: &str) -> PlannerSpec {
    let mut s = PlannerSpec::new(
        "stub",
        [
            "sh",
            "-c",
            script,
            "stub",
            "{domain}",
            "{problem}",
            "{plan-out}",
        ]
        .map(String::from)
        .to_vec(),
    )
    .expect("valid stub");
    s.plan_file_expected = true;
    s
}

fn limits(reps: usize, timeout: Duration) -> HarnessLimits {
    HarnessLimits {
        first_core: first_allowed_core().unwrap_or(0),
        timeout,
        repetitions: reps,
        ..HarnessLimits::default()
    }
}

fn blocks_two_variant_manifest(dir: &Path) -> PathBuf {
    let mut suite = suite_of(blocks());
    suite
        .entries
        .retain(|e| e.mechanism == MechanismId::SscPdu1);
    write_suite(&suite, dir).expect("suite written")
}

fn harness_protocol(power: &Path) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = blocks_two_variant_manifest(dir.path());
    let results = dir.path().join("results.jsonl");
    let planner = [stub("sleep 0.1; echo '(pick-up a)' > \"$3\"")];
    let l = limits(30, Duration::from_secs(10));
    let mut opts = CampaignOptions::new(&results);
    opts.sample_interval = Some(Duration::from_millis(50));

    opts.stop_after = Some(50);
    let first = run_campaign(&manifest, &planner, &l, &opts).map_err(|e| e.to_string())?;
    ensure!(
        first.written == 50 && first.stopped_early,
        "first leg wrote {}",
        first.written
    );
    opts.stop_after = None;
    let second = run_campaign(&manifest, &planner, &l, &opts).map_err(|e| e.to_string())?;
    ensure!(second.written == 70, "resume wrote {}", second.written);
    ensure!(second.energy_measured, "synthetic meter not picked up");

    let rs = read_results(&results).map_err(|e| e.to_string())?;
    ensure!(rs.len() == 120, "{} records", rs.len());
    let keys: BTreeSet<_> = rs.iter().map(|r| r.key()).collect();
    ensure!(keys.len() == 120, "{} distinct keys", keys.len());
    for w in rs.windows(2) {
        let end =
            w[0].started_at + chrono::Duration::microseconds((w[0].duration_s * 1e6).ceil() as i64);
        ensure!(
            end <= w[1].started_at + chrono::Duration::microseconds(1),
            "runs overlap at rep {}",
            w[1].rep
        );
    }
    ensure!(
        rs.iter().all(|r| r.outcome == Outcome::PlanFound),
        "non-PlanFound outcome"
    );
    ensure!(
        rs.iter().all(|r| r.energy_j.is_some_and(|e| e >= 0.0)),
        "missing or negative energy"
    );

    // forced wrap: the stub moves the counter from max-100 to 400
    let max = 262_143_328_850u64;
    let zone = write_synthetic_zone(power, "intel-rapl:1", "package-1", max - 100, max)
        .map_err(|e| e.to_string())?;
    let before = EnergySample {
        zone: "package-1".into(),
        counter_uj: max - 100,
        max_range_uj: max,
    };
    let after = EnergySample {
        zone: "package-1".into(),
        counter_uj: 400,
        max_range_uj: max,
    };
    ensure!(
        energy_delta_uj(&before, &after) == 500,
        "delta {}",
        energy_delta_uj(&before, &after)
    );
    ensure!(
        energy_delta(&before, &after) == 0.0005,
        "joules {}",
        energy_delta(&before, &after)
    );

    let meter = RaplMeter::discover(power).map_err(|e| e.to_string())?;
    let pkg0 = power.join("intel-rapl:0/energy_uj");
    let counter0 = fs::read_to_string(&pkg0).map_err(|e| e.to_string())?;
    let script = format!(
        "echo 400 > '{}'; echo plan > \"$3\"",
        zone.join("energy_uj").display()
    );
    let d = dir.path().join("blocksworld/original/domain.pddl");
    let p = dir
        .path()
        .join("blocksworld/original/problems/blocks-p1.pddl");
    let logs = dir.path().join("wrap-run");
    let target = RunTarget {
        domain_id: "blocksworld",
        mechanism: "original",
        instance: "blocks-p1",
        rep: 0,
        domain_file: &d,
        problem_file: &p,
        log_dir: &logs,
    };
    let r = run_planner_once(&stub(&script), &target, &l, Some(&meter), None)
        .map_err(|e| e.to_string())?;
    ensure!(
        fs::read_to_string(&pkg0).map_err(|e| e.to_string())? == counter0,
        "package-0 moved"
    );
    let uj = r.energy_j.map(|j| (j * 1e6).round() as u64);
    ensure!(uj == Some(500), "wrapped run measured {uj:?} uJ");
    Ok("120 records, 50 + 70 on resume, no overlap, energy >= 0, wrap = 500 uJ".into())
}

fn timeout_exclusion() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut suite = suite_of(gripper());
    suite.entries.clear();
    let manifest = write_suite(&suite, dir.path()).map_err(|e| e.to_string())?;
    let results = dir.path().join("results.jsonl");
    let l = limits(1, Duration::from_secs(1));
    let mut opts = CampaignOptions::new(&results);
    opts.measure_energy = false;
    let s = run_campaign(&manifest, &[stub("sleep 2; echo plan > \"$3\"")], &l, &opts)
        .map_err(|e| e.to_string())?;
    ensure!(s.written == 1, "{} records", s.written);
    let mut rs = read_results(&results).map_err(|e| e.to_string())?;
    let r = &mut rs[0];
    ensure!(r.outcome == Outcome::Timeout, "outcome {:?}", r.outcome);
    ensure!(r.duration_s >= 1.0, "duration {}", r.duration_s);
    r.planner = "p".into();
    r.domain = "d".into();
    r.energy_j = Some(99.0);
    let mut all = vec![
        record(10.0, Outcome::PlanFound),
        record(12.0, Outcome::PlanFound),
    ];
    all.push(r.clone());
    let summary = summarize(&all, Some(300.0));
    let row = &summary.rows[0];
    ensure!(
        row.n == 2 && row.mu == Some(11.0),
        "n {} mu {:?}",
        row.n,
        row.mu
    );
    Ok(format!(
        "Timeout after {:.2} s, excluded (mu 11 over n 2)",
        rs[0].duration_s
    ))
}

fn report_shape() -> Check {
    let mut a = record(12.5, Outcome::PlanFound);
    a.mechanism = "SSC-PDU1".into();
    let mut b = record(12.6, Outcome::PlanFound);
    b.mechanism = "SSC-PDU2".into();
    let md = emit_report(
        &build_report(&[a, b], "original", None),
        ReportFormat::Markdown,
    );
    let section = md.split("## SSC").nth(1).ok_or("no SSC section")?;
    let line = section
        .lines()
        .find(|l| l.starts_with("| p | d |"))
        .ok_or("no planner row")?;
    ensure!(line.contains("| 12.5–12.6 |"), "row `{line}`");
    Ok(format!("SSC row `{line}`"))
}

fn main() -> ExitCode {
    // the harness reads the synthetic powercap tree through the override
    let power = tempfile::tempdir().expect("tempdir");
    write_synthetic_zone(
        power.path(),
        "intel-rapl:0",
        "package-0",
        1_000_000,
        262_143_328_850,
    )
    .expect("synthetic zone");
    std::env::set_var(RAPL_ROOT_ENV, power.path());

    let power_root = power.path().to_path_buf();
    type Criterion = (&'static str, Box<dyn Fn() -> Check>);
    let criteria: Vec<Criterion> = vec![
        ("suite cardinality", Box::new(suite_cardinality)),
        ("SSC neutrality", Box::new(ssc_neutrality)),
        ("MRC preservation", Box::new(mrc_preservation)),
        ("TDC deviation", Box::new(tdc_deviation)),
        ("round-trip", Box::new(round_trip)),
        ("statistics", Box::new(statistics)),
        (
            "harness protocol",
            Box::new(move || harness_protocol(&power_root)),
        ),
        ("timeout exclusion", Box::new(timeout_exclusion)),
        ("report shape", Box::new(report_shape)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!(
        "{}/{} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
