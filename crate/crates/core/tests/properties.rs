use cuntzr_core::bialgebra::{delta, opposite_left, opposite_right, TensorElement2};
use cuntzr_core::cuntz::{random_monomial, AlgebraElement, CuntzMonomial, DirectSumElement};
use cuntzr_core::gns::{FockVector, GpRepresentation};
use cuntzr_core::rmatrix::{apply_r, build_r};
use cuntzr_core::states::{boxtimes, commutes, star, twist_state, GpState, UnitVector};
use cuntzr_core::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_element(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> AlgebraElement {
    let terms: Vec<_> = (0..rng.gen_range(1..=3))
        .map(|_| (random_monomial(rng, n, max_len), random_c64(rng)))
        .collect();
    AlgebraElement::from_terms(n, terms).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |_, _| random_c64(rng));
    m.qr().q()
}

fn random_fock(rng: &mut ChaCha8Rng) -> FockVector {
    FockVector::from_entries((0..4).map(|_| (rng.gen_range(1..30), random_c64(rng))))
}

fn same_tensor(a: &TensorElement2, b: &TensorElement2) -> bool {
    a.canonical_equal(b)
}

fn mono(n: usize, u: &[usize], v: &[usize]) -> CuntzMonomial {
    CuntzMonomial::new(n, u, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let (a, b, c) = (
            random_element(&mut r, n, 2),
            random_element(&mut r, n, 2),
            random_element(&mut r, n, 2),
        );
        let left = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let right = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert!(left.canonical_equal(&right).unwrap());
    }

    #[test]
    fn adjoint_is_an_anti_multiplicative_involution(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let (a, b) = (random_element(&mut r, n, 2), random_element(&mut r, n, 2));
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let ab = a.try_mul(&b).unwrap().adjoint();
        let ba = b.adjoint().try_mul(&a.adjoint()).unwrap();
        prop_assert!(ab.canonical_equal(&ba).unwrap());
    }

    #[test]
    fn delta_is_a_star_homomorphism(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 4, 6])) {
        let mut r = rng(seed);
        let a = DirectSumElement::from(random_element(&mut r, n, 2));
        let b = DirectSumElement::from(random_element(&mut r, n, 2));
        prop_assert!(same_tensor(&delta(&a.mul(&b)), &delta(&a).mul(&delta(&b))));
        prop_assert!(same_tensor(&delta(&a.adjoint()), &delta(&a).adjoint()));
    }

    #[test]
    fn delta_op_is_coassociative(seed in any::<u64>(), n in prop::sample::select(vec![4usize, 6, 8])) {
        let mut r = rng(seed);
        let x = DirectSumElement::from(random_monomial(&mut r, n, 2));
        prop_assert!(opposite_left(&x).canonical_equal(&opposite_right(&x)));
    }

    #[test]
    fn boxtimes_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (z, y, w) = (
            UnitVector::random(&mut r, 2),
            UnitVector::random(&mut r, 3),
            UnitVector::random(&mut r, 2),
        );
        let left = boxtimes(&boxtimes(&z, &y), &w);
        let right = boxtimes(&z, &boxtimes(&y, &w));
        prop_assert!(left.max_abs_diff(&right) <= 1e-15);
    }

    #[test]
    fn star_matches_boxtimes(seed in any::<u64>(), pair in prop::sample::select(vec![(2usize, 2usize), (2, 3), (3, 2)])) {
        let mut r = rng(seed);
        let (z, y) = (UnitVector::random(&mut r, pair.0), UnitVector::random(&mut r, pair.1));
        let product = star(GpState::new(z.clone()).into(), GpState::new(y.clone()).into());
        let closed = GpState::new(boxtimes(&z, &y));
        for _ in 0..20 {
            let x = random_monomial(&mut r, pair.0 * pair.1, 3);
            let diff = (product.eval_monomial(&x).unwrap() - closed.eval_monomial(&x)).norm();
            prop_assert!(diff <= 1e-12, "{x}: {diff:e}");
        }
    }

    #[test]
    fn states_are_positive_and_unital(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let state = GpState::new(UnitVector::random(&mut r, n));
        let x = random_element(&mut r, n, 2);
        let value = state.eval(&x.adjoint().try_mul(&x).unwrap()).unwrap();
        prop_assert!(value.re >= -1e-12 && value.im.abs() <= 1e-12);
        prop_assert!((state.eval(&AlgebraElement::unit(n)).unwrap() - 1.0).norm() <= 1e-15);
    }

    #[test]
    fn commutes_is_symmetric_and_reflexive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = GpState::new(UnitVector::random(&mut r, 2));
        let b = GpState::new(UnitVector::random(&mut r, 2));
        prop_assert!(commutes(&a, &a).commutes);
        prop_assert_eq!(commutes(&a, &b).commutes, commutes(&b, &a).commutes);
    }

    #[test]
    fn twist_state_matches_direct_evaluation(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let z = UnitVector::random(&mut r, n);
        let u = random_unitary(&mut r, n);
        let twisted = twist_state(&z, &u).unwrap();
        let direct = GpState::new(z);
        for _ in 0..10 {
            let x = AlgebraElement::from(random_monomial(&mut r, n, 2));
            let lhs = twisted.eval(&x).unwrap();
            let rhs = direct.eval(&x.unitary_action(&u).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-11);
        }
    }

    #[test]
    fn representation_satisfies_cuntz_relations(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let rep = GpRepresentation::for_state(&GpState::new(UnitVector::random(&mut r, n)));
        let v = random_fock(&mut r);
        for i in 1..=n {
            for j in 1..=n {
                let w = rep.act_generator(i, true, &rep.act_generator(j, false, &v));
                let expected = if i == j { v.clone() } else { FockVector::zero() };
                prop_assert!(w.distance(&expected) <= 1e-12);
            }
        }
        let mut sum = FockVector::zero();
        for i in 1..=n {
            sum.axpy(C64::new(1.0, 0.0), &rep.act_generator(i, false, &rep.act_generator(i, true, &v)));
        }
        prop_assert!(sum.distance(&v) <= 1e-12);
    }

    #[test]
    fn vector_state_and_gns_inner_product(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let state = GpState::new(UnitVector::random(&mut r, n));
        let rep = GpRepresentation::for_state(&state);
        for _ in 0..10 {
            let x = random_monomial(&mut r, n, 2);
            let y = random_monomial(&mut r, n, 2);
            let omega = rep.omega();
            let vector_state = omega.inner(&rep.act(&x, &omega).unwrap());
            prop_assert!((vector_state - state.eval_monomial(&x)).norm() <= 1e-11);
            let lx = rep.lambda_monomial(&x).unwrap();
            let ly = rep.lambda_monomial(&y).unwrap();
            let xy = AlgebraElement::from(x.adjoint()).try_mul(&AlgebraElement::from(y)).unwrap();
            prop_assert!((lx.inner(&ly) - state.eval(&xy).unwrap()).norm() <= 1e-11);
        }
    }

    #[test]
    fn vector_states_do_not_depend_on_the_completion(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let state = GpState::new(UnitVector::random(&mut r, n));
        let first = GpRepresentation::for_state(&state);
        // rotate the rows below the first; the first row z̄ is unchanged
        let mut block = DMatrix::identity(n, n);
        block.view_mut((1, 1), (n - 1, n - 1)).copy_from(&random_unitary(&mut r, n - 1));
        let second = GpRepresentation::from_unitary(&block * first.unitary()).unwrap();
        prop_assert!(second.state().vector().max_abs_diff(state.vector()) <= 1e-12);
        for _ in 0..10 {
            let x = random_monomial(&mut r, n, 3);
            let a = first.omega().inner(&first.act(&x, &first.omega()).unwrap());
            let b = second.omega().inner(&second.act(&x, &second.omega()).unwrap());
            prop_assert!((a - b).norm() <= 1e-11);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn equal_states_give_the_flip(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let rep = GpRepresentation::for_state(&GpState::new(UnitVector::random(&mut r, n)));
        let rmat = build_r(&rep, &rep, 1).unwrap();
        prop_assert!(rmat.unitarity_defect() <= 1e-9);
        for q in rmat.basis() {
            prop_assert!(apply_r(&rmat, q).unwrap().distance(&q.swap()) <= 1e-12);
        }
    }
}

#[test]
fn generators_satisfy_cuntz_relations() {
    for n in 1..=5 {
        let mut sum = AlgebraElement::zero(n);
        for i in 1..=n {
            let s_i = AlgebraElement::from(mono(n, &[i], &[]));
            for j in 1..=n {
                let s_j = AlgebraElement::from(mono(n, &[j], &[]));
                let product = s_i.adjoint().try_mul(&s_j).unwrap();
                let expected = if i == j {
                    AlgebraElement::unit(n)
                } else {
                    AlgebraElement::zero(n)
                };
                assert!(product.canonical_equal(&expected).unwrap());
            }
            sum = sum.try_add(&s_i.try_mul(&s_i.adjoint()).unwrap()).unwrap();
        }
        assert!(sum.canonical_equal(&AlgebraElement::unit(n)).unwrap());
    }
}

#[test]
fn range_projections_sum_to_identity_on_low_basis() {
    let rep = GpRepresentation::for_state(&GpState::uniform(3));
    for k in 1..=100u64 {
        let v = FockVector::basis(k);
        let mut sum = FockVector::zero();
        for i in 1..=3 {
            sum.axpy(
                C64::new(1.0, 0.0),
                &rep.act_generator(i, false, &rep.act_generator(i, true, &v)),
            );
        }
        assert!(sum.distance(&v) <= 1e-12);
    }
}

#[test]
fn standard_r_is_stable_in_depth() {
    for (n, m) in [(2, 3), (3, 2)] {
        let (a, b) = (GpRepresentation::standard(n), GpRepresentation::standard(m));
        for depth in 0..2 {
            let small = build_r(&a, &b, depth).unwrap();
            let large = build_r(&a, &b, depth + 1).unwrap();
            for q in small.basis() {
                assert_eq!(apply_r(&small, q).unwrap(), apply_r(&large, q).unwrap());
            }
        }
    }
}
