use hsl_core::random::{haar_unitary, random_density, random_state};
use hsl_core::statespace::{
    fidelity, fidelity_with_pure, inner, trace_distance, DensityOperator, RegisterShape, StateVector,
};
use hsl_core::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Shapes with total dimension at most 8.
fn small_shape() -> impl Strategy<Value = RegisterShape> {
    prop_oneof![
        (2usize..=8).prop_map(|n| RegisterShape::new(n, 0).unwrap()),
        (2usize..=4).prop_map(|n| RegisterShape::new(n, 1).unwrap()),
        Just(RegisterShape::new(2, 2).unwrap()),
    ]
}

fn conjugate(rho: &DensityOperator, u: &DMatrix<C64>) -> DensityOperator {
    DensityOperator::new(rho.shape(), u * rho.matrix() * u.adjoint()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fuchs_van_de_graaf_sandwich(shape in small_shape(), seed in any::<u64>(), r1 in 1usize..=4, r2 in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, shape, r1).unwrap();
        let sigma = random_density(&mut rng, shape, r2).unwrap();
        let d = trace_distance(&rho, &sigma).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!(1.0 - f.sqrt() <= d + 1e-9, "lower side: D={d}, F={f}");
        prop_assert!(d <= (1.0 - f).max(0.0).sqrt() + 1e-9, "upper side: D={d}, F={f}");
    }

    #[test]
    fn metrics_are_symmetric_and_unitarily_invariant(shape in small_shape(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, shape, 2).unwrap();
        let sigma = random_density(&mut rng, shape, 3).unwrap();
        let u = haar_unitary(&mut rng, shape.dim());
        let d = trace_distance(&rho, &sigma).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((d - trace_distance(&sigma, &rho).unwrap()).abs() < 1e-9);
        prop_assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-9);
        let (ru, su) = (conjugate(&rho, &u), conjugate(&sigma, &u));
        prop_assert!((d - trace_distance(&ru, &su).unwrap()).abs() < 1e-9);
        prop_assert!((f - fidelity(&ru, &su).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn pure_fidelity_shortcut_matches_general_formula(shape in small_shape(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, shape, 3).unwrap();
        let psi = random_state(&mut rng, shape);
        let general = fidelity(&rho, &DensityOperator::from_pure(&psi)).unwrap();
        prop_assert!((general - fidelity_with_pure(&rho, &psi).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_is_a_metric(shape in small_shape(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(&mut rng, shape, 1).unwrap();
        let b = random_density(&mut rng, shape, 2).unwrap();
        let c = random_density(&mut rng, shape, 4).unwrap();
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn append_qubit_is_an_isometry(n in 2usize..=8, l in 0usize..=2, seed in any::<u64>(), bit in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::new(n, l).unwrap();
        let u = random_state(&mut rng, shape);
        let v = random_state(&mut rng, shape);
        let before = inner(&u, &v).unwrap();
        let (ua, va) = (u.append_qubit(bit), v.append_qubit(bit));
        prop_assert_eq!(ua.shape().workspace_qubits(), l + 1);
        prop_assert!((inner(&ua, &va).unwrap() - before).norm() < 1e-12);
        prop_assert!((ua.norm() - u.norm()).abs() < 1e-12);
        let other = ua.project_qubit(l, !bit).unwrap();
        prop_assert_eq!(other.norm_squared(), 0.0);
    }

    #[test]
    fn inner_is_bounded_by_norms(n in 2usize..=8, seed in any::<u64>(), scale in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::new(n, 1).unwrap();
        let u = random_state(&mut rng, shape).scaled(C64::new(scale, 0.0));
        let v = random_state(&mut rng, shape);
        prop_assert!(inner(&u, &v).unwrap().norm() <= u.norm() * v.norm() + 1e-12);
        let z = C64::new(0.3, -1.1);
        let lhs = inner(&u.scaled(z), &v).unwrap();
        prop_assert!((lhs - z.conj() * inner(&u, &v).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn orthogonal_pure_states_are_perfectly_distinguishable() {
    let s = RegisterShape::new(4, 0).unwrap();
    let a = DensityOperator::from_pure(&StateVector::basis(s, 0, 0).unwrap());
    let b = DensityOperator::from_pure(&StateVector::basis(s, 1, 0).unwrap());
    assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    assert!(fidelity(&a, &b).unwrap().abs() < 1e-12);
    assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
}
