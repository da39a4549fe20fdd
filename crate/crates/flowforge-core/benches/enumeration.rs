use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flowforge_core::cumulant::classify_cumulants;
use flowforge_core::flowgen::{build_hierarchy_with, HierarchyOptions};
use flowforge_core::multiindex::{check_population_equivalence, enumerate};
use flowforge_core::params::rat;
use flowforge_core::{Exec, ModelParams};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn hierarchy(c: &mut Criterion) {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let mut g = c.benchmark_group("hierarchy_order5");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| build_hierarchy_with(&p, HierarchyOptions { max_order: Some(5), exec, ..Default::default() }))
        });
    }
    g.finish();
}

fn population(c: &mut Criterion) {
    let mut g = c.benchmark_group("population_check_5x4");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_population_equivalence(5, 4, exec))
        });
    }
    g.finish();
}

fn cumulants(c: &mut Criterion) {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let mut g = c.benchmark_group("cumulant_scan_p4_o3");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| classify_cumulants(&p, 4, 3, exec).unwrap())
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    c.bench_function("enumerate_order6", |b| b.iter(|| enumerate(&p, 6)));
}

criterion_group!(benches, hierarchy, population, cumulants, enumeration);
criterion_main!(benches);
