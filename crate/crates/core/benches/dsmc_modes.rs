use bounded_opinion::dsmc::{advance, init_ensemble, InitialCondition, KernelKind, SimConfig};
use bounded_opinion::equilibrium::EnergyClosure;
use bounded_opinion::par::ExecMode;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn config(n: usize, exec: ExecMode) -> SimConfig {
    SimConfig {
        lambda: 0.0,
        delta_amp: 0.01,
        a_rate: 1.0,
        b_rate: 0.1,
        m_party: 0.5,
        n_particles: n,
        dt: 0.1,
        t_end: 1.0,
        seed: 1,
        init: InitialCondition::symmetric_band(0.5, 0.9),
        output_every: 1,
        histogram_every: 0,
        histogram_bins: 50,
        kernel: KernelKind::Moller,
        closure: EnergyClosure::MjConsistent,
        exec,
    }
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("ten_steps");
    group.sample_size(10);
    for &n in &[10_000usize, 100_000] {
        for (name, exec) in
            [("deterministic", ExecMode::Deterministic), ("parallel", ExecMode::Parallel { chunks: 64 })]
        {
            let cfg = config(n, exec);
            group.bench_with_input(BenchmarkId::new(name, n), &cfg, |b, cfg| {
                b.iter_batched(
                    || init_ensemble(cfg).unwrap(),
                    |mut st| {
                        for _ in 0..10 {
                            advance(&mut st, cfg, cfg.dt).unwrap();
                        }
                        st
                    },
                    criterion::BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
