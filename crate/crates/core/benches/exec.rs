use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wavefd::analysis::{refinement_study_with, ErrorKind};
use wavefd::continuous::traveling_bump_problem;
use wavefd::exec::Exec;
use wavefd::scheme::GridSpec;
use wavefd::trials::run_batch;

fn strategies() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn refinement(c: &mut Criterion) {
    let (prob, exact) = traveling_bump_problem(0.0, 1.0, 6, 1.0).unwrap();
    let base = GridSpec::new(-6.0, 6.0, 2.0, 0.1, 0.05, 1.0, 0.3, 0.2).unwrap();
    let mut group = c.benchmark_group("refinement_study");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(name, |b| {
            b.iter(|| {
                refinement_study_with(&prob, &exact, black_box(&base), 4, ErrorKind::Convergence, exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_batch");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(name, |b| b.iter(|| run_batch(black_box(1), 100, true, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, refinement, trials);
criterion_main!(benches);
