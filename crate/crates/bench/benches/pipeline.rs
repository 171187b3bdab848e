//! Benchmarks for the three hot paths: instance generation, the greedy
//! multi-task selection sweep, and the penalized per-task refit.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use somp_core::alasso::{compute_weights, fit_alasso_path, AlassoConfig};
use somp_core::simgen::{generate, NoiseSpec, Scenario, SimulationSpec};
use somp_core::somp::{run_somp, select_by_bic, SompConfig};

fn spec(scenario: Scenario, n: usize, p: usize, tasks: usize) -> SimulationSpec {
    SimulationSpec {
        scenario,
        n,
        p,
        s: if matches!(scenario, Scenario::Sim3) { 3 } else { 5 },
        num_tasks: tasks,
        t_nonzero: tasks,
        noise: NoiseSpec::Snr(10.0),
        rho: matches!(scenario, Scenario::Sim3 | Scenario::Sim4).then_some(0.5),
        seed: 42,
        test_n: Some(10),
    }
}

fn bench_generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    for (label, s) in [
        ("iid_200x2000", spec(Scenario::Sim1, 200, 2000, 20)),
        ("ar_100x1000", spec(Scenario::Sim3, 100, 1000, 20)),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &s, |b, s| {
            b.iter(|| generate(s).unwrap())
        });
    }
    group.finish();
}

fn bench_selection(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_path");
    group.sample_size(10);
    for (label, s) in [
        ("iid_200x2000_t20", spec(Scenario::Sim1, 200, 2000, 20)),
        ("ar_100x1000_t50", spec(Scenario::Sim3, 100, 1000, 50)),
    ] {
        let instance = generate(&s).unwrap();
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| run_somp(&instance.train, &SompConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_refit(c: &mut Criterion) {
    let s = spec(Scenario::Sim3, 100, 1000, 10);
    let instance = generate(&s).unwrap();
    let path = run_somp(&instance.train, &SompConfig::default()).unwrap();
    let (_, support) = select_by_bic(&path);
    let config = AlassoConfig::default();
    c.bench_function("alasso_path_100x1000", |b| {
        b.iter(|| {
            for task in 0..instance.train.num_tasks() {
                let w = compute_weights(&instance.train, task, &support, config.weight_epsilon)
                    .unwrap();
                fit_alasso_path(&instance.train, task, &support, &w, &config).unwrap();
            }
        })
    });
}

criterion_group!(benches, bench_generate, bench_selection, bench_refit);
criterion_main!(benches);
