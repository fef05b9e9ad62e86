use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qcqp_vqe::generate::gen_instance;
use qcqp_vqe::sim::{diagonal_of_with, DEFAULT_QUBIT_LIMIT};
use qcqp_vqe::suite::{run_suite, Suite, SuiteSpec};
use qcqp_vqe::{minimize, AnsatzConfig, DualConfig, Execution, VqeSettings};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn diagonal(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagonal_of");
    for n in [12, 16] {
        let inst = gen_instance(n, 0, 3, false).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| diagonal_of_with(black_box(inst.objective()), DEFAULT_QUBIT_LIMIT, exec))
            });
        }
    }
    group.finish();
}

fn restarts(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize_restarts");
    group.sample_size(10);
    let inst = gen_instance(4, 0, 5, false).unwrap();
    let obs = qcqp_vqe::diagonal_of(inst.objective()).unwrap();
    let cfg = AnsatzConfig::new(4);
    for (name, exec) in MODES {
        let settings = VqeSettings {
            restarts: 8,
            execution: exec,
            ..VqeSettings::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| minimize(&cfg, &obs, &settings, 7).unwrap())
        });
    }
    group.finish();
}

fn suite_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("table1_suite");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut spec = SuiteSpec::new(Suite::Table1, 1);
        spec.execution = exec;
        spec.dual = DualConfig {
            max_outer: 40,
            ..DualConfig::default()
        };
        group.bench_function(name, |b| b.iter(|| run_suite(&spec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, diagonal, restarts, suite_batch);
criterion_main!(benches);
