//! Cross-module invariants: classification against decomposition and
//! witnesses, sense invariance, and randomized property checks.

mod common;

use proptest::prelude::*;
use rand::Rng;
use rog_core::classify::{classify_two, verify_certificate, Verdict};
use rog_core::decompose::{self, sampling};
use rog_core::linalg::{self, sym_outer, unit, SymMatrix};
use rog_core::pencil::{dines_solve, image};
use rog_core::qcqp;
use rog_core::witness::verify_bundle;
use rog_core::{cones, rng_from_seed, ConeSpec, Sense};

use common::random_pair;

#[test]
fn verdicts_agree_with_decompositions_and_witnesses() {
    let mut rng = rng_from_seed(21);
    let (mut rog, mut not_rog) = (0, 0);
    for i in 0..200 {
        let n = 2 + i % 5;
        let (m1, m2) = random_pair(n, &mut rng);
        let cert = classify_two(&m1, &m2, [Sense::Eq; 2], &mut rng).unwrap();
        match cert.verdict {
            Verdict::Rog => {
                rog += 1;
                let spec = ConeSpec::pair(m1, m2, Sense::Eq).unwrap();
                for _ in 0..20 {
                    let Ok(x) = sampling::sample_feasible(&spec, &mut rng) else {
                        // the cone is {0}
                        break;
                    };
                    let d = decompose::decompose(&spec, &x, Some(&cert)).unwrap();
                    assert!((&x - &d.reconstruct(n)).frobenius() <= 1e-8 * (1.0 + x.frobenius()));
                    for a in &d.atoms {
                        assert!(cones::member(&spec, &a.matrix(), 1e-7).unwrap().feasible);
                    }
                }
            }
            Verdict::NotRog => {
                not_rog += 1;
                verify_bundle(&m1, &m2, cert.witness().unwrap()).unwrap();
            }
            v => panic!("pair verdict {v:?}"),
        }
    }
    assert!(rog > 0 && not_rog > 0, "{rog} ROG, {not_rog} NotROG");
}

#[test]
fn verdict_ignores_sense() {
    let mut rng = rng_from_seed(22);
    for i in 0..100 {
        let n = 2 + i % 5;
        let (m1, m2) = random_pair(n, &mut rng);
        let geq = classify_two(&m1, &m2, [Sense::Geq; 2], &mut rng).unwrap();
        let eq = classify_two(&m1, &m2, [Sense::Eq; 2], &mut rng).unwrap();
        assert_eq!(geq.verdict, eq.verdict);
        let spec = ConeSpec::pair(m1, m2, Sense::Geq).unwrap();
        verify_certificate(&spec, &geq).unwrap();
    }
}

#[test]
fn facial_reduction_keeps_the_shared_factor_ray() {
    let mut rng = rng_from_seed(23);
    for _ in 0..20 {
        let c = sampling::gaussian_vector(2, &mut rng);
        let m1 = sym_outer(&sampling::gaussian_vector(2, &mut rng), &c);
        let m2 = sym_outer(&sampling::gaussian_vector(2, &mut rng), &c);
        let spec = ConeSpec::pair(m1, m2, Sense::Eq).unwrap();
        let fr = cones::facial_reduce(&spec).unwrap();
        assert_eq!(fr.kept.dim(), 1);
        assert!(linalg::dot(&fr.kept.basis[0], &c).abs() < 1e-12 * linalg::norm(&c));
        let x = sampling::sample_feasible(&spec, &mut rng).unwrap();
        assert_eq!(linalg::numerical_rank(&x, 1e-9), 1);
    }
}

#[test]
fn dines_reaches_thin_image_directions() {
    // no psd combination, but the image is nearly a half-plane
    let d = 1e-4;
    let m1 = SymMatrix::diag(&[1.0, -d, -d]);
    let m2 = SymMatrix::diag(&[-d, 1.0, -d]);
    let mut rng = rng_from_seed(24);
    for k in 0..24 {
        let a = k as f64 * std::f64::consts::TAU / 24.0;
        let t = [a.cos(), a.sin()];
        let x = dines_solve(&m1, &m2, t, &mut rng).unwrap();
        let im = image(&m1, &m2, &x);
        assert!((im[0] - t[0]).hypot(im[1] - t[1]) <= 1e-8, "angle {a}: {im:?}");
    }
}

#[test]
fn lopsided_splits_keep_the_reconstruction() {
    // shared-factor GEQ pairs reach splits whose two steps differ by many
    // orders of magnitude
    let mut rng = rng_from_seed(25);
    for _ in 0..200 {
        let n = rng.random_range(2..=5);
        let c = sampling::gaussian_vector(n, &mut rng);
        let m1 = sym_outer(&sampling::gaussian_vector(n, &mut rng), &c);
        let m2 = sym_outer(&sampling::gaussian_vector(n, &mut rng), &c);
        let cert = classify_two(&m1, &m2, [Sense::Geq; 2], &mut rng).unwrap();
        let spec = ConeSpec::pair(m1, m2, Sense::Geq).unwrap();
        let x = sampling::sample_feasible(&spec, &mut rng).unwrap();
        let d = decompose::decompose(&spec, &x, Some(&cert)).unwrap();
        assert!((&x - &d.reconstruct(n)).frobenius() <= 1e-8 * (1.0 + x.frobenius()));
    }
}

fn sym_strategy(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-3.0..3.0f64, n * n)
        .prop_map(move |v| SymMatrix::from_fn(n, |i, j| v[i.min(j) * n + i.max(j)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_is_scale_and_congruence_invariant(
        (m1, m2) in (2usize..=4).prop_flat_map(|n| (sym_strategy(n), sym_strategy(n))),
        s1 in 0.1..10.0f64,
        s2 in 0.1..10.0f64,
        seed in any::<u64>(),
    ) {
        let mut rng = rng_from_seed(seed);
        prop_assume!(!rog_core::pencil::dependent(&m1, &m2));
        let base = classify_two(&m1, &m2, [Sense::Eq; 2], &mut rng).unwrap().verdict;
        let scaled = classify_two(&m1.scale(s1), &m2.scale(s2), [Sense::Eq; 2], &mut rng).unwrap().verdict;
        let q = sampling::random_orthogonal(m1.n(), &mut rng);
        let turned = classify_two(&m1.congruence(&q), &m2.congruence(&q), [Sense::Eq; 2], &mut rng).unwrap().verdict;
        prop_assert_eq!(base, scaled);
        prop_assert_eq!(base, turned);
    }

    #[test]
    fn single_lmi_points_decompose(m in (2usize..=6).prop_flat_map(sym_strategy), eq in any::<bool>(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let sense = if eq { Sense::Eq } else { Sense::Geq };
        let spec = ConeSpec::single(m.clone(), sense);
        prop_assume!(!m.is_zero(1e-12));
        if let Ok(x) = sampling::sample_feasible(&spec, &mut rng) {
            let d = decompose::decompose(&spec, &x, None).unwrap();
            prop_assert!((&x - &d.reconstruct(m.n())).frobenius() <= 1e-8 * (1.0 + x.frobenius()));
            if eq {
                prop_assert_eq!(d.len(), linalg::numerical_rank(&x, 1e-9));
            }
        }
    }

    #[test]
    fn hull_forms_agree_off_the_boundary(y1 in -0.2..1.2f64, y2 in -1.5..1.5f64, t in 0.0..2.0f64) {
        let tol = 1e-9;
        let closed = qcqp::perspective_hull_member(y1, y2, t, tol);
        let lifted = qcqp::perspective_lift_check_tol(y1, y2, t, tol);
        let near = closed != qcqp::perspective_hull_member(y1, y2, t, -tol)
            || lifted != qcqp::perspective_lift_check_tol(y1, y2, t, -tol);
        prop_assert!(near || closed == lifted);
    }

    #[test]
    fn three_products_atoms_are_nonnegative(cols in prop::collection::vec(prop::collection::vec(0.0..2.0f64, 3), 1..5)) {
        let x = cols.iter().fold(SymMatrix::zeros(3), |m, v| m.add_outer(1.0, v));
        prop_assume!(x.frobenius() > 1e-6);
        let e = |i| unit(3, i);
        let d = decompose::decompose_three_products(&e(0), &e(1), &e(2), Sense::Geq, &x).unwrap();
        prop_assert!(decompose::atoms_nonnegative(&d, 1e-12));
    }
}
