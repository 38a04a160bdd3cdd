use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pddl_morph::oracle::{check_suite, OracleLimits, DEFAULT_EXTRA_DEPTH};
use pddl_morph::pddl::{parse_domain, parse_problem_for, Domain, Problem};
use pddl_morph::variantgen::{generate_suite, GeneratorConfig};
use pddl_morph::Execution;

fn inputs() -> Vec<(&'static str, Domain, Vec<Problem>)> {
    let gripper = parse_domain(include_str!("../fixtures/gripper.pddl")).unwrap();
    let gp =
        vec![parse_problem_for(include_str!("../fixtures/gripper-p1.pddl"), &gripper).unwrap()];
    let blocks = parse_domain(include_str!("../fixtures/blocksworld.pddl")).unwrap();
    let bp = [
        include_str!("../fixtures/blocksworld-p1.pddl"),
        include_str!("../fixtures/blocksworld-p2.pddl"),
    ]
    .iter()
    .map(|t| parse_problem_for(t, &blocks).unwrap())
    .collect();
    vec![("gripper", gripper, gp), ("blocksworld", blocks, bp)]
}

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn generate(c: &mut Criterion) {
    let mut g = c.benchmark_group("generate_suite");
    for (name, d, ps) in inputs() {
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), &exec, |b, &exec| {
                b.iter(|| generate_suite(&d, &ps, &GeneratorConfig::default(), exec).unwrap())
            });
        }
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("check_suite");
    g.sample_size(10);
    for (name, d, ps) in inputs() {
        let suite =
            generate_suite(&d, &ps, &GeneratorConfig::default(), Execution::Sequential).unwrap();
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), &exec, |b, &exec| {
                b.iter(|| check_suite(&suite, DEFAULT_EXTRA_DEPTH, &OracleLimits::default(), exec))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, generate, oracle);
criterion_main!(benches);
