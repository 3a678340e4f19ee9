use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wfock::hecke::Engine;
use wfock::par::Exec;
use wfock::relations::{check_relation, Relation, SweepBounds};
use wfock::ring::instance;
use wfock::series::oracle_suite;

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel { jobs: 0 })]
}

fn relation_sweep(c: &mut Criterion) {
    let bounds = SweepBounds {
        max_degree: 5,
        max_index: 2,
    };
    let mut group = c.benchmark_group("q1_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            // fresh engine per iteration so the memo does not hide the work
            b.iter(|| {
                let e = Engine::new(instance("curve:g=1,e=1").unwrap());
                check_relation(&e, Relation::Q1, &bounds, exec)
            })
        });
    }
    group.finish();
}

fn oracle_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                let e = Engine::new(instance("p2").unwrap());
                oracle_suite(&e, 3, exec)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, relation_sweep, oracle_sweep);
criterion_main!(benches);
