use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use solvable_growth::descent::{capture_ur, DescentConfig, DescentInstance};
use solvable_growth::dichotomy::{run_dichotomy, verify_certificate, DichotomyConfig};
use solvable_growth::setcalc::{product_set, WordLengths};
use solvable_growth::{Group, DEFAULT_CAP};
use solvable_growth_bench::{borel_generators, borel_subset, subgroup_set, tts_set};

fn closure(c: &mut Criterion) {
    let mut g = c.benchmark_group("closure");
    for (p, r) in [(7, 2), (5, 3), (7, 3)] {
        let gens = borel_generators(p, r);
        g.bench_with_input(BenchmarkId::new("borel", format!("p{p}_r{r}")), &gens, |b, gens| {
            b.iter(|| Group::generate(gens.ctx(), gens.dim(), gens.to_vec(), DEFAULT_CAP).unwrap())
        });
    }
    g.finish();
}

fn product_sets(c: &mut Criterion) {
    let mut g = c.benchmark_group("product_set");
    let a = borel_subset(11, 3, 6, 1);
    for k in [2, 3, 4] {
        g.bench_with_input(BenchmarkId::new("A_k", k), &k, |b, &k| {
            b.iter(|| product_set(black_box(&a), k, DEFAULT_CAP).unwrap())
        });
    }
    g.bench_function("word_lengths", |b| b.iter(|| WordLengths::new(black_box(&a), DEFAULT_CAP).unwrap()));
    g.finish();
}

fn descent(c: &mut Criterion) {
    let a = tts_set(5);
    c.bench_function("descent/tts_f5", |b| {
        b.iter(|| {
            let inst = DescentInstance::from_set(&a, DEFAULT_CAP).unwrap();
            capture_ur(&inst, 2.0, &DescentConfig::default()).unwrap()
        })
    });
}

fn dichotomy(c: &mut Criterion) {
    let mut g = c.benchmark_group("dichotomy");
    g.sample_size(10);
    let cases = [("random_subset", borel_subset(7, 3, 5, 3)), ("subgroup", subgroup_set(7, 3, 400, 5))];
    for (name, a) in &cases {
        g.bench_with_input(BenchmarkId::new("run_and_verify", name), a, |b, a| {
            b.iter(|| {
                let cert = run_dichotomy(a, 2.0, &DichotomyConfig::default()).unwrap();
                verify_certificate(&cert, a, false, DEFAULT_CAP).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, closure, product_sets, descent, dichotomy);
criterion_main!(benches);
