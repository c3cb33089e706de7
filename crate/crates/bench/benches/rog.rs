//! Timings for the eigensolver, pencil analysis, classification,
//! decomposition, witnesses and rounding on seeded random inputs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rog_core::classify::classify_two;
use rog_core::decompose::{self, sampling};
use rog_core::linalg::{self, sym_outer, SymMatrix};
use rog_core::qcqp::{self, QcqpInstance};
use rog_core::{pencil, rng_from_seed, witness, ConeSpec, Family, Sense};

fn eig(c: &mut Criterion) {
    let mut g = c.benchmark_group("eig");
    let mut rng = rng_from_seed(1);
    for n in [4, 8, 16, 32] {
        let m = sampling::gaussian_sym(n, &mut rng);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| linalg::eig(black_box(m)))
        });
    }
    g.finish();
}

fn pencil_ops(c: &mut Criterion) {
    let mut rng = rng_from_seed(2);
    let (m1, m2) = (sampling::gaussian_sym(6, &mut rng), sampling::gaussian_sym(6, &mut rng));
    c.bench_function("psd_search/6", |b| {
        b.iter(|| pencil::psd_search(black_box(&m1), black_box(&m2)))
    });
    c.bench_function("dines_solve/6", |b| {
        let mut rng = rng_from_seed(3);
        b.iter(|| pencil::dines_solve(&m1, &m2, [0.6, -0.8], &mut rng))
    });
}

fn classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify_two");
    let n3 = (SymMatrix::diag(&[1.0, -1.0, 0.0]), SymMatrix::diag(&[0.0, 1.0, -1.0]));
    let mut rng = rng_from_seed(4);
    let n6 = (sampling::gaussian_sym(6, &mut rng), sampling::gaussian_sym(6, &mut rng));
    for (name, (m1, m2)) in [("not_rog_3", n3), ("random_6", n6)] {
        g.bench_function(name, |b| {
            let mut rng = rng_from_seed(5);
            b.iter(|| classify_two(&m1, &m2, [Sense::Eq; 2], &mut rng))
        });
    }
    g.finish();
}

fn decompositions(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    let mut rng = rng_from_seed(6);
    let single = ConeSpec::single(sampling::gaussian_sym(8, &mut rng), Sense::Geq);
    let x = sampling::sample_feasible(&single, &mut rng).unwrap();
    g.bench_function("single_lmi_8", |b| b.iter(|| decompose::decompose(&single, &x, None)));

    let cv = sampling::gaussian_vector(5, &mut rng);
    let (m1, m2) = (
        sym_outer(&sampling::gaussian_vector(5, &mut rng), &cv),
        sym_outer(&sampling::gaussian_vector(5, &mut rng), &cv),
    );
    let cert = classify_two(&m1, &m2, [Sense::Geq; 2], &mut rng).unwrap();
    let pair = ConeSpec::pair(m1, m2, Sense::Geq).unwrap();
    let x = sampling::sample_feasible(&pair, &mut rng).unwrap();
    g.bench_function("shared_factor_geq_5", |b| {
        b.iter(|| decompose::decompose(&pair, &x, Some(&cert)))
    });

    let e = |i| linalg::unit(3, i);
    let dnn = ConeSpec::with_family(
        3,
        Family::ThreeProducts {
            a: e(0),
            b: e(1),
            c: e(2),
            sense: Sense::Geq,
        },
    )
    .unwrap();
    let x = SymMatrix::from_rows(&[vec![2.0, 1.0, 1.0], vec![1.0, 2.0, 1.0], vec![1.0, 1.0, 2.0]]).unwrap();
    g.bench_function("doubly_nonnegative_3", |b| {
        b.iter(|| decompose::decompose(&dnn, &x, None))
    });
    g.finish();
}

fn witnesses(c: &mut Criterion) {
    let (m1, m2) = (SymMatrix::diag(&[1.0, -1.0, 0.0]), SymMatrix::diag(&[0.0, 1.0, -1.0]));
    c.bench_function("variety_lines_3d", |b| b.iter(|| witness::variety_lines_3d(&m1, &m2)));
    c.bench_function("witness/3", |b| {
        let mut rng = rng_from_seed(7);
        b.iter(|| witness::witness(&m1, &m2, &mut rng))
    });
    let m1 = SymMatrix::diag(&[1.0, -1.0, 2.0, -3.0, 1.0]);
    let m2 = SymMatrix::diag(&[-1.0, 2.0, -1.0, 1.0, -2.0]);
    c.bench_function("witness/5", |b| {
        let mut rng = rng_from_seed(8);
        b.iter(|| witness::witness(&m1, &m2, &mut rng))
    });
}

fn rounding(c: &mut Criterion) {
    let mut rng = rng_from_seed(9);
    let spec = ConeSpec::single(sampling::gaussian_sym(6, &mut rng), Sense::Geq);
    let x = sampling::sample_feasible(&spec, &mut rng).unwrap();
    let x = x.scale(1.0 / x.get(0, 0));
    let cert = rog_core::classify::classify(&spec, &mut rng).unwrap();
    let inst = QcqpInstance::new(sampling::gaussian_sym(6, &mut rng), None, spec).unwrap();
    c.bench_function("sdp_round/6", |b| b.iter(|| qcqp::sdp_round(&inst, &x, &cert)));
    c.bench_function("rank2_reduce/6", |b| b.iter(|| qcqp::rank2_reduce(&inst, &x, &cert)));
}

criterion_group!(benches, eig, pencil_ops, classify, decompositions, witnesses, rounding);
criterion_main!(benches);
