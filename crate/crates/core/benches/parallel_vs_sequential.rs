use std::hint::black_box;

use aucgap::{
    analyze, bootstrap_gap, build_groups, generate, subgroup_aucs_with, validate_groups,
    AnalysisOptions, BootstrapOptions, Execution, GroupRecipe, GroupSpec, MissingPolicy,
    ValidityPolicy,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn cohort(n_groups: usize, per_class: usize) -> Vec<aucgap::EvaluationRecord> {
    let recipes: Vec<GroupRecipe> = (0..n_groups)
        .map(|g| GroupRecipe::new(format!("g{g:02}"), per_class, per_class, g as f64 * 0.1))
        .collect();
    generate(&recipes, 11).unwrap()
}

fn bench_subgroup_aucs(c: &mut Criterion) {
    let records = cohort(16, 5_000);
    let assignment = build_groups(&records, &[GroupSpec::Single("group".into())], MissingPolicy::Error).unwrap();
    let validity = validate_groups(&assignment, &records, &ValidityPolicy::default());

    let mut group = c.benchmark_group("subgroup_aucs");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "16x10k"), |b| {
            b.iter(|| black_box(subgroup_aucs_with(&records, &assignment, &validity, exec)))
        });
    }
    group.finish();
}

fn bench_bootstrap(c: &mut Criterion) {
    let records = cohort(4, 2_000);
    let assignment = build_groups(&records, &[GroupSpec::Single("group".into())], MissingPolicy::Error).unwrap();
    let validity = validate_groups(&assignment, &records, &ValidityPolicy::default());

    let mut group = c.benchmark_group("bootstrap_gap");
    group.sample_size(10);
    for (name, exec) in MODES {
        let options = BootstrapOptions {
            execution: exec,
            ..BootstrapOptions::new(200, 7)
        };
        group.bench_function(BenchmarkId::new(name, "4x4k_200"), |b| {
            b.iter(|| black_box(bootstrap_gap(&records, &assignment, &validity, &options).unwrap()))
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let records = cohort(8, 5_000);
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut options = AnalysisOptions::new(vec![GroupSpec::Single("group".into())]);
        options.execution = exec;
        options.bootstrap = Some(BootstrapOptions {
            execution: exec,
            ..BootstrapOptions::new(100, 3)
        });
        group.bench_function(BenchmarkId::new(name, "8x10k"), |b| {
            b.iter(|| black_box(analyze(&records, &options).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_subgroup_aucs, bench_bootstrap, bench_pipeline);
criterion_main!(benches);
