use std::fs;
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};
use std::time::Duration;

use pddl_morph::harness::{
    first_allowed_core, read_results, run_campaign, CampaignError, CampaignOptions, HarnessLimits,
    Outcome, PlannerSpec,
};
use pddl_morph::pddl::{parse_domain, parse_problem_for};
use pddl_morph::variantgen::{
    generate_suite, load_manifest, write_suite, EntryStatus, GeneratorConfig,
};
use pddl_morph::Execution;

fn gripper_manifest(dir: &Path) -> PathBuf {
    let d = parse_domain(include_str!("../fixtures/gripper.pddl")).unwrap();
    let p = parse_problem_for(include_str!("../fixtures/gripper-p1.pddl"), &d).unwrap();
    let mut p2 = p.clone();
    p2.name = "gripper-p2".into();
    let suite = generate_suite(
        &d,
        &[p, p2],
        &GeneratorConfig::default(),
        Execution::Sequential,
    )
    .unwrap()
    .with_instance_ids(vec!["gripper-p1".into(), "gripper-p2".into()]);
    write_suite(&suite, dir).unwrap()
}

/// Keeps only the listed entries in a written manifest.
fn restrict(manifest: &Path, keep: &[&str]) {
    let mut m = load_manifest(manifest).unwrap();
    m.entries.retain(|e| keep.contains(&e.mechanism.as_str()));
    fs::write(manifest, serde_json::to_string_pretty(&m).unwrap()).unwrap();
}

fn stub(id: &str, script: &str) -> PlannerSpec {
    let mut s = PlannerSpec::new(
        id,
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
    .unwrap();
    s.plan_file_expected = true;
    s
}

fn limits(reps: usize) -> HarnessLimits {
    HarnessLimits {
        first_core: first_allowed_core().unwrap_or(0),
        timeout: Duration::from_secs(10),
        repetitions: reps,
        ..HarnessLimits::default()
    }
}

fn opts(results: &Path) -> CampaignOptions {
    CampaignOptions {
        measure_energy: false,
        ..CampaignOptions::new(results)
    }
}

#[test]
fn skipped_entries_and_dead_planners() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gripper_manifest(dir.path());
    restrict(&manifest, &["original", "SSC-PDU1", "MRC-ROB"]);
    let mut m = load_manifest(&manifest).unwrap();
    m.entries[2].status = EntryStatus::Skipped;
    m.entries[2].domain_file = None;
    fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();

    let results = dir.path().join("out/results.jsonl");
    let planners = [
        stub("good", "echo '(pick)' > \"$3\""),
        PlannerSpec::new(
            "missing",
            ["/no/such/planner", "{domain}", "{problem}"]
                .map(String::from)
                .to_vec(),
        )
        .unwrap(),
    ];
    let s = run_campaign(&manifest, &planners, &limits(2), &opts(&results)).unwrap();
    assert_eq!(s.written, 2 * 2 * 2);
    assert_eq!(s.skipped_variants, ["MRC-ROB"]);
    assert_eq!(s.skipped_planners.len(), 1);
    assert_eq!(s.skipped_planners[0].0, "missing");
    assert!(!s.energy_measured);

    let rs = read_results(&results).unwrap();
    assert!(rs
        .iter()
        .all(|r| r.planner == "good" && r.mechanism != "MRC-ROB"));
    assert!(rs
        .iter()
        .all(|r| r.outcome == Outcome::PlanFound && r.energy_j.is_none()));
    // round-robin: both repetitions of a cell are separated by the others
    let order: Vec<(usize, &str)> = rs.iter().map(|r| (r.rep, r.mechanism.as_str())).collect();
    assert_eq!(order[0].0, 0);
    assert_eq!(order[4].0, 1);
    assert!(dir
        .path()
        .join("out/results.logs/good/gripper/original/gripper-p1/rep-0/plan")
        .is_file());
}

#[test]
fn instance_glob_selects() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gripper_manifest(dir.path());
    restrict(&manifest, &["original"]);
    let results = dir.path().join("r.jsonl");
    let mut o = opts(&results);
    o.instances = Some("*-p2".into());
    let s = run_campaign(&manifest, &[stub("a", "echo x > \"$3\"")], &limits(1), &o).unwrap();
    assert_eq!(s.written, 1);
    assert_eq!(read_results(&results).unwrap()[0].instance, "gripper-p2");

    o.instances = Some("gripper-p1.pddl".into());
    let s = run_campaign(&manifest, &[stub("a", "echo x > \"$3\"")], &limits(1), &o).unwrap();
    assert_eq!((s.written, s.resumed), (1, 1));

    o.instances = Some("[".into());
    assert!(matches!(
        run_campaign(&manifest, &[stub("a", "true")], &limits(1), &o),
        Err(CampaignError::Pattern(_))
    ));
}

#[test]
fn partial_trailing_line_is_dropped_on_resume() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gripper_manifest(dir.path());
    restrict(&manifest, &["original"]);
    let results = dir.path().join("r.jsonl");
    let planner = [stub("a", "echo x > \"$3\"")];
    let mut o = opts(&results);
    o.stop_after = Some(3);
    let s = run_campaign(&manifest, &planner, &limits(3), &o).unwrap();
    assert!(s.stopped_early);
    let mut text = fs::read_to_string(&results).unwrap();
    let last_start = text.trim_end().rfind('\n').unwrap() + 1;
    text.truncate(last_start + 20);
    fs::write(&results, &text).unwrap();

    o.stop_after = None;
    let s = run_campaign(&manifest, &planner, &limits(3), &o).unwrap();
    assert_eq!((s.resumed, s.written), (2, 4));
    let rs = read_results(&results).unwrap();
    assert_eq!(rs.len(), 6);
    let mut keys: Vec<_> = rs.iter().map(|r| r.key()).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), 6);
}

#[test]
fn concurrent_campaign_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gripper_manifest(dir.path());
    let results = dir.path().join("r.jsonl");
    let held = fs::File::create(&results).unwrap();
    // SAFETY: flock on a file this test owns.
    assert_eq!(
        unsafe { libc::flock(held.as_raw_fd(), libc::LOCK_EX | libc::LOCK_NB) },
        0
    );
    assert!(matches!(
        run_campaign(&manifest, &[stub("a", "true")], &limits(1), &opts(&results)),
        Err(CampaignError::Locked { .. })
    ));
}

#[test]
fn invalid_limits_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gripper_manifest(dir.path());
    let l = HarnessLimits {
        repetitions: 0,
        ..limits(1)
    };
    assert!(matches!(
        run_campaign(
            &manifest,
            &[stub("a", "true")],
            &l,
            &opts(&dir.path().join("r"))
        ),
        Err(CampaignError::Limits(_))
    ));
}
