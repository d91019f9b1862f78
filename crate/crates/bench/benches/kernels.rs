use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigUint;
use ternrec_core::experiments::z_density;
use ternrec_core::modular::term_mod;
use ternrec_core::recurrence::term;
use ternrec_core::representation::{represent_with, RepresentConfig};
use ternrec_core::{classify_prime, Preset};

fn bench_term_mod(c: &mut Criterion) {
    let spec = Preset::Tribonacci.spec();
    c.bench_function("term_mod n=1e18 p=1e9+7", |b| {
        b.iter(|| term_mod(&spec, black_box(1_000_000_000_000_000_000), 1_000_000_007))
    });
}

fn bench_classify(c: &mut Criterion) {
    let spec = Preset::Tribonacci.spec();
    let mut g = c.benchmark_group("classify_prime");
    for p in [7u64, 9_973, 999_983, 1_000_000_007] {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| classify_prime(&spec, black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn bench_represent(c: &mut Criterion) {
    let spec = Preset::Tribonacci.spec();
    let mut g = c.benchmark_group("represent");
    g.sample_size(20);
    for n in [18u64, 46, 86] {
        let big = term(&spec, n).unwrap().to_biguint().unwrap();
        for (tier, cfg) in [
            ("enumerate", RepresentConfig::default()),
            ("cornacchia", RepresentConfig { enumeration_limit: 0, ..Default::default() }),
        ] {
            if tier == "enumerate" && n > 60 {
                continue;
            }
            g.bench_with_input(BenchmarkId::new(tier, n), &big, |b, big: &BigUint| {
                b.iter(|| represent_with(black_box(big), n, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn bench_z_density(c: &mut Criterion) {
    let spec = Preset::Tribonacci.spec();
    let mut g = c.benchmark_group("z_density");
    g.sample_size(10);
    g.bench_function("x=1e5", |b| b.iter(|| z_density(&spec, black_box(100_000)).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_term_mod, bench_classify, bench_represent, bench_z_density);
criterion_main!(benches);
