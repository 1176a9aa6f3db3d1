use std::fmt::Write;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dsut_core::generate::declared_requirements;
use dsut_core::{parse_facts, run_strategy, Execution, StrategyConfig, SystemModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Four layers of `n` components each: a ring with random chords, every
/// component mapped to two below, and an all-to-all requirement between two
/// classes on the top layer.
fn synthetic(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let name = |layer: usize, i: usize| {
        format!(
            "component_({}{layer},{})",
            if i.is_multiple_of(2) { "a" } else { "b" },
            i / 2 + 1
        )
    };
    for layer in 1..=4 {
        for i in 0..n {
            writeln!(
                out,
                "object_(layer({layer}), {}, type_(t), parameters_([])).",
                name(layer, i)
            )
            .unwrap();
        }
        for i in 0..n {
            let j = (i + 1) % n;
            writeln!(
                out,
                "connection_(layer({layer}), {}, {}, parameters_([])).",
                name(layer, i),
                name(layer, j)
            )
            .unwrap();
            if rng.gen_bool(0.15) {
                let k = rng.gen_range(0..n);
                if k != i && k != j && (k + 1) % n != i {
                    writeln!(
                        out,
                        "connection_(layer({layer}), {}, {}, parameters_([])).",
                        name(layer, i),
                        name(layer, k)
                    )
                    .unwrap();
                }
            }
        }
        if layer > 1 {
            for i in 0..n {
                let a = rng.gen_range(0..n);
                let b = (a + 1 + rng.gen_range(0..n - 1)) % n;
                for k in [a, b] {
                    writeln!(
                        out,
                        "map_(layer({layer}), {}, {}, parameters_([])).",
                        name(layer, i),
                        name(layer - 1, k)
                    )
                    .unwrap();
                }
            }
        }
    }
    out.push_str("requirement_(layer(4), component_(a4,_), component_(b4,_), parameters_([])).\n");
    out
}

fn bench_strategy(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_strategy");
    group.sample_size(10);
    for n in [16, 32] {
        let facts = parse_facts(&synthetic(n, 7)).unwrap();
        let model = SystemModel::build(&facts).unwrap();
        let reqs = declared_requirements(&facts.requirements);
        for (label, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let config = StrategyConfig {
                execution,
                ..StrategyConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| black_box(run_strategy(&model, &reqs, &config)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_strategy);
criterion_main!(benches);
