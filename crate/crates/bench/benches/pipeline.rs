use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zhkit::diagram as dg;
use zhkit::extract::zh_to_circuit;
use zhkit::revcomp::{compile_permutation, Permutation};
use zhkit::rewrite::{check_soundness, rule_catalog};
use zhkit::synth::{matrix_to_diagram_phase_free, Matrix};
use zhkit::{contract, CycInt, Scalar};

fn contraction(c: &mut Criterion) {
    let g = dg::h_box_w(3, 3, 3);
    c.bench_function("contract 6-ary H-box d=3", |b| b.iter(|| contract(black_box(&g)).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let graphs: Vec<_> = (0..8).map(|_| dg::random_diagram(5, &mut rng, 6, 4)).collect();
    c.bench_function("contract 8 random diagrams d=5", |b| {
        b.iter(|| graphs.iter().map(|g| contract(g).unwrap().data.len()).sum::<usize>())
    });
}

fn soundness(c: &mut Criterion) {
    let rules = rule_catalog(3);
    c.bench_function("catalog soundness d=3 arity 2", |b| {
        b.iter(|| rules.iter().filter(|r| check_soundness(r, 3, 2).passed()).count())
    });
}

fn synthesis(c: &mut Criterion) {
    let d = 3;
    let m = Matrix::from_fn(d, 1, 1, |r, col| {
        let c: Vec<i64> = (0..d as i64).map(|j| (r as i64 + 2 * col as i64 + j) % 3 - 1).collect();
        Scalar::new(CycInt::from_i64s(d, &c), 0)
    });
    let mut group = c.benchmark_group("synthesis");
    group.sample_size(10);
    group.bench_function("phase-free 3x3", |b| b.iter(|| matrix_to_diagram_phase_free(black_box(&m)).unwrap()));
    let s = matrix_to_diagram_phase_free(&m).unwrap();
    group.bench_function("contract synthesized 3x3", |b| b.iter(|| contract(&s.diagram).unwrap()));
    group.finish();
}

fn reversible(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = Permutation::random(3, 3, &mut rng);
    c.bench_function("compile permutation d=3 n=3", |b| b.iter(|| compile_permutation(black_box(&p)).unwrap()));
}

fn extraction(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = dg::random_diagram(3, &mut rng, 5, 3);
    c.bench_function("extract random diagram d=3", |b| b.iter(|| zh_to_circuit(black_box(&g)).unwrap()));
    let pc = zh_to_circuit(&g).unwrap();
    c.bench_function("simulate extracted circuit", |b| b.iter(|| pc.tensor().unwrap()));
}

criterion_group!(benches, contraction, soundness, synthesis, reversible, extraction);
criterion_main!(benches);
