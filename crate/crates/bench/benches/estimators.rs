use criterion::{criterion_group, criterion_main, Criterion};
use psrfr_core::prelude::*;

fn sample(n: usize) -> LabeledSample {
    let dist = presets::normal(CovarianceScenario::NormP10);
    let x = dist.sample(n, SeededStream::new(11, 0)).unwrap();
    let noise = sample_noise(n, SeededStream::new(11, 1));
    generate(&default_spec(ModelId::N5, 10).unwrap(), x, &noise).unwrap()
}

fn estimators(c: &mut Criterion) {
    let s = sample(500);
    let mut g = c.benchmark_group("n500_p10");
    for method in [Method::Psrfr, Method::Sir, Method::Save, Method::Phd] {
        g.bench_function(method.as_str(), |b| {
            b.iter(|| fit(method, &s.predictors, &s.response, 2, DEFAULT_SLICES).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let cfg = ExperimentConfig::new(
        ModelId::N1,
        presets::normal(CovarianceScenario::NormP10),
        500,
        vec![Method::Psrfr],
        20,
        3,
    )
    .unwrap();
    c.bench_function("experiment_n1_20reps", |b| {
        b.iter(|| run_experiment(&cfg).unwrap())
    });
}

criterion_group!(benches, estimators, monte_carlo);
criterion_main!(benches);
