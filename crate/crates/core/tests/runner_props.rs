use hsl_core::density_sim;
use hsl_core::oracles::InputString;
use hsl_core::random::{haar_unitary, random_algorithm, random_state};
use hsl_core::runner::{
    run, run_with, success_detection, success_finding, AnswerMap, HybridAlgorithm, OracleMode, RunOptions, UnitarySpec,
};
use hsl_core::statespace::{RegisterShape, StateVector};
use hsl_core::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_input(rng: &mut ChaCha8Rng, n: usize) -> InputString {
    InputString::from_bits((0..n).map(|_| rng.random_bool(0.5)).collect()).unwrap()
}

fn minus_state(n: usize) -> StateVector {
    let shape = RegisterShape::new(n, 1).unwrap();
    let amp = 1.0 / (2.0 * n as f64).sqrt();
    let amps = (0..2 * n)
        .map(|p| C64::new(if p % 2 == 0 { amp } else { -amp }, 0.0))
        .collect();
    StateVector::new(shape, amps).unwrap()
}

/// `|i⟩|w⟩ ↦ |i⟩|w ⊕ i⟩` on an index of size 4 and two qubits.
fn copy_index() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(16, 16);
    for i in 0..4 {
        for w in 0..4 {
            m[(i * 4 + (w ^ i), i * 4 + w)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// An algorithm at `n = 4` that copies the index into fresh qubits right
/// before each of its two classical calls, which makes the pseudo-classical
/// oracle indistinguishable from the classical one.
fn index_copying_algorithm(rng: &mut ChaCha8Rng, with_copy: bool) -> HybridAlgorithm {
    let shape = RegisterShape::new(4, 4).unwrap();
    let alpha = random_state(rng, RegisterShape::new(4, 0).unwrap());
    let mut amps = vec![C64::new(0.0, 0.0); shape.dim()];
    for i in 0..4 {
        amps[shape.offset(i, i << 2)] = alpha.amplitude(i, 0);
    }
    let initial = StateVector::new(shape, amps).unwrap();
    let mix = UnitarySpec::Embedded {
        qubits: vec![4],
        matrix: haar_unitary(rng, 8),
    };
    let copy = UnitarySpec::Embedded {
        qubits: vec![2, 3],
        matrix: if with_copy {
            copy_index()
        } else {
            DMatrix::identity(16, 16)
        },
    };
    let last = UnitarySpec::Embedded {
        qubits: vec![4, 5],
        matrix: haar_unitary(rng, 16),
    };
    HybridAlgorithm::new(
        initial,
        "C Q:4 C".parse().unwrap(),
        vec![mix.clone(), UnitarySpec::Sequence(vec![mix, copy]), last],
        AnswerMap::Index,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn distribution_accounts_for_pruned_mass(seed in any::<u64>(), n in 2usize..=6, tau in 0usize..=4, classical in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, n, 1, tau).unwrap();
        let x = random_input(&mut rng, n);
        let mode = if classical { OracleMode::UseClassical } else { OracleMode::UsePseudoClassical };
        let r = run(&alg, &x, mode).unwrap();
        prop_assert!(r.answer_distribution.values().all(|&p| p >= 0.0));
        let total: f64 = r.answer_distribution.values().sum();
        prop_assert!((total - (1.0 - r.pruned_mass)).abs() < 1e-10);
    }

    #[test]
    fn spectral_compression_keeps_outcomes(seed in any::<u64>(), n in 2usize..=4, tau in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, n, 0, tau).unwrap();
        let x = random_input(&mut rng, n);
        let plain = run(&alg, &x, OracleMode::UseClassical).unwrap();
        let opts = RunOptions { compress: true, ..RunOptions::default() };
        let packed = run_with(&alg, &x, OracleMode::UseClassical, opts).unwrap();
        prop_assert!(packed.final_ensemble.len() <= plain.final_ensemble.len());
        let (a, b) = (plain.final_ensemble.outcome_probabilities(), packed.final_ensemble.outcome_probabilities());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn workspace_grows_by_classical_calls(seed in any::<u64>(), l0 in 0usize..=2, tau in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, 3, l0, tau).unwrap();
        let want = l0 + alg.schedule().tau_c();
        prop_assert_eq!(alg.final_shape().workspace_qubits(), want);
        let r = run(&alg, &InputString::marked(3, 1).unwrap(), OracleMode::UsePseudoClassical).unwrap();
        prop_assert_eq!(r.final_ensemble.shape().workspace_qubits(), want);
    }

    #[test]
    fn index_copy_makes_oracles_equivalent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = index_copying_algorithm(&mut rng, true);
        let x = random_input(&mut rng, 4);
        let c = run(&alg, &x, OracleMode::UseClassical).unwrap();
        let p = run(&alg, &x, OracleMode::UsePseudoClassical).unwrap();
        for a in 0..4 {
            prop_assert!((c.probability(a) - p.probability(a)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_input_keeps_pseudo_classical_run_pure(seed in any::<u64>(), n in 2usize..=6, tau in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, n, 1, tau).unwrap();
        let r = run(&alg, &InputString::zeros(n).unwrap(), OracleMode::UsePseudoClassical).unwrap();
        prop_assert_eq!(r.final_ensemble.len(), 1);
    }
}

#[test]
fn without_the_copy_the_oracles_differ() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alg = index_copying_algorithm(&mut rng, false);
    let x: InputString = "0110".parse().unwrap();
    let c = run(&alg, &x, OracleMode::UseClassical).unwrap();
    let p = run(&alg, &x, OracleMode::UsePseudoClassical).unwrap();
    let gap = (0..4)
        .map(|a| (c.probability(a) - p.probability(a)).abs())
        .fold(0.0, f64::max);
    assert!(gap > 1e-3, "gap {gap}");
}

#[test]
fn no_query_uniform_state_gives_uniform_answers() {
    for n in [2, 5, 8] {
        let alg = HybridAlgorithm::new(
            StateVector::uniform(RegisterShape::new(n, 0).unwrap()),
            "".parse().unwrap(),
            vec![],
            AnswerMap::Index,
        )
        .unwrap();
        let r = run(&alg, &InputString::marked(n, 0).unwrap(), OracleMode::UseClassical).unwrap();
        for a in 0..n as u32 {
            assert!((r.probability(a) - 1.0 / n as f64).abs() < 1e-15);
        }
        assert!((success_finding(&alg, OracleMode::UseClassical).unwrap() - 1.0 / n as f64).abs() < 1e-15);
    }
}

#[test]
fn one_grover_iteration_finds_among_four() {
    let alg = HybridAlgorithm::new(
        minus_state(4),
        "Q:0".parse().unwrap(),
        vec![UnitarySpec::Diffusion],
        AnswerMap::Index,
    )
    .unwrap();
    for k in 0..4 {
        let r = run(&alg, &InputString::marked(4, k).unwrap(), OracleMode::UseClassical).unwrap();
        assert!((r.probability(k as u32) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn constant_detectors_fail_somewhere() {
    let alg = HybridAlgorithm::new(
        minus_state(4),
        "Q:0".parse().unwrap(),
        vec![UnitarySpec::Diffusion],
        AnswerMap::Constant(0),
    )
    .unwrap();
    assert_eq!(success_detection(&alg, OracleMode::UseClassical).unwrap(), 0.0);
    let one = alg.with_answer_map(AnswerMap::Constant(1)).unwrap();
    assert_eq!(success_detection(&one, OracleMode::UseClassical).unwrap(), 0.0);
}

#[test]
fn grover_detection_matches_density_simulation() {
    let base = HybridAlgorithm::new(
        minus_state(4),
        "Q:0".parse().unwrap(),
        vec![UnitarySpec::Diffusion],
        AnswerMap::Index,
    )
    .unwrap();
    let maps = [
        AnswerMap::IndexInSet(vec![0, 1]),
        AnswerMap::IndexInSet(vec![2]),
        AnswerMap::AnyWorkspaceOne,
        AnswerMap::Table(vec![0, 1, 1, 0, 1, 0, 0, 1]),
    ];
    for map in maps {
        let alg = base.with_answer_map(map.clone()).unwrap();
        for mode in [OracleMode::UseClassical, OracleMode::UsePseudoClassical] {
            let a = success_detection(&alg, mode).unwrap();
            let b = density_sim::success_detection(&alg, mode).unwrap();
            assert!((a - b).abs() < 1e-10, "{map:?}: {a} vs {b}");
        }
    }
}

#[test]
fn finding_rejects_binary_answer_maps_that_overflow() {
    let alg = HybridAlgorithm::new(
        minus_state(4),
        "Q:0".parse().unwrap(),
        vec![UnitarySpec::Diffusion],
        AnswerMap::Constant(7),
    )
    .unwrap();
    assert!(success_finding(&alg, OracleMode::UseClassical).is_err());
    assert!(success_detection(&alg, OracleMode::UseClassical).is_err());
}
