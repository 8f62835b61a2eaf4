use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ivinv_core::format::{parse_situation, ParseOptions};
use ivinv_core::{fixtures, random, rules};

fn airports() -> ivinv_core::IntervalInventorySituation {
    parse_situation(fixtures::AIRPORTS2023, ParseOptions::default())
        .unwrap()
        .situation
}

fn rules_on_case_study(c: &mut Criterion) {
    let s = airports();
    c.bench_function("soc/airports", |b| b.iter(|| rules::interval_soc(black_box(&s)).unwrap()));
    c.bench_function("shapley_exact/airports", |b| {
        b.iter(|| rules::interval_shapley(black_box(&s)).unwrap())
    });
    c.bench_function("shapley_monte_carlo/airports/10k", |b| {
        b.iter(|| rules::interval_shapley_monte_carlo(black_box(&s), 10_000, 7).unwrap())
    });
}

fn scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("scaling");
    group.sample_size(20);
    let mut rng = random::rng(1);
    for n in [8, 12, 16] {
        let s = random::situation(&mut rng, n);
        group.bench_with_input(BenchmarkId::new("materialize", n), &s, |b, s| {
            b.iter(|| s.materialize_game())
        });
        let g = s.materialize_game();
        group.bench_with_input(BenchmarkId::new("border_shapley_exact", n), &g, |b, g| {
            b.iter(|| g.lower.shapley_exact().unwrap())
        });
        group.bench_with_input(BenchmarkId::new("border_shapley_sampled_10k", n), &g, |b, g| {
            b.iter(|| g.lower.shapley_sampled(10_000, 3))
        });
    }
    group.finish();
}

criterion_group!(benches, rules_on_case_study, scaling);
criterion_main!(benches);
