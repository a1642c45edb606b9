use hsl_core::oracles::OracleKind;
use hsl_core::progress::{
    ab_recursion, dominant_components, failure_lower_bound, measures, progress_ab, progress_h, theorem_bounds, verify,
    verify_with, witness_w, VerifyOptions,
};
use hsl_core::random::random_algorithm;
use hsl_core::runner::{success_finding, AnswerMap, HybridAlgorithm, OracleMode, Schedule, UnitarySpec};
use hsl_core::statespace::{inner, RegisterShape, StateVector};
use hsl_core::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn minus_state(n: usize) -> StateVector {
    let shape = RegisterShape::new(n, 1).unwrap();
    let amp = 1.0 / (2.0 * n as f64).sqrt();
    let amps = (0..2 * n)
        .map(|p| C64::new(if p % 2 == 0 { amp } else { -amp }, 0.0))
        .collect();
    StateVector::new(shape, amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Every per-step claim and final bound holds on random algorithms.
    #[test]
    fn random_algorithms_satisfy_all_claims(seed in any::<u64>(), n in 2usize..=8, tau in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, n, 1, tau).unwrap();
        let v = verify(&alg).unwrap();
        let bad: Vec<_> = v.report.failures().map(|e| format!("{} t={:?}: {} vs {}", e.name, e.step, e.achieved, e.bound)).collect();
        prop_assert!(bad.is_empty(), "{}: {:?}", alg.schedule(), bad);
    }

    #[test]
    fn a_b_match_inner_products(seed in any::<u64>(), tau in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, 4, 1, tau).unwrap();
        let tr = dominant_components(&alg).unwrap();
        let (a, b) = progress_ab(&tr);
        for t in 0..=tau {
            let (mut sa, mut sb) = (0.0, 0.0);
            for k in 0..4 {
                let psi = tr.psi_marked(t, k);
                let ak = inner(tr.psi0(t), psi).unwrap().norm_sqr();
                sa += ak;
                sb += psi.norm_squared() - ak;
            }
            prop_assert!((a[t] - sa / 4.0).abs() < 1e-12);
            prop_assert!((b[t] - sb / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn failure_lower_bound_is_respected(seed in any::<u64>(), tau in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, 8, 1, tau).unwrap();
        let tr = dominant_components(&alg).unwrap();
        let last = &measures(&tr)[tau];
        let failure = 1.0 - success_finding(&alg, OracleMode::UsePseudoClassical).unwrap();
        prop_assert!(failure >= failure_lower_bound(last.a, last.b, 8) - 1e-9);
    }

    #[test]
    fn success_respects_theorem_two(seed in any::<u64>(), n in 2usize..=8, tau in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algorithm(&mut rng, n, 1, tau).unwrap();
        let s = alg.schedule();
        let bound = theorem_bounds(n, s.tau_c(), s.tau_q(), 0.0).success_bound;
        for mode in [OracleMode::UsePseudoClassical, OracleMode::UseClassical] {
            prop_assert!(success_finding(&alg, mode).unwrap() <= bound + 1e-9);
        }
    }
}

#[test]
fn grover_step_progress_is_four_over_n() {
    for n in [4, 16, 64] {
        let alg = HybridAlgorithm::new(
            minus_state(n),
            "Q:0".parse().unwrap(),
            vec![UnitarySpec::Diffusion],
            AnswerMap::Index,
        )
        .unwrap();
        let h = progress_h(&dominant_components(&alg).unwrap());
        assert_eq!(h[0], 0.0);
        assert!((h[1] - 4.0 / n as f64).abs() < 1e-12, "n={n}: {}", h[1]);
    }
}

#[test]
fn pseudo_classical_query_on_uniform_state() {
    for n in [4, 8] {
        let nf = n as f64;
        let shape = RegisterShape::new(n, 0).unwrap();
        let alg = HybridAlgorithm::new(
            StateVector::uniform(shape),
            "P".parse().unwrap(),
            vec![UnitarySpec::Identity],
            AnswerMap::Index,
        )
        .unwrap();
        let tr = dominant_components(&alg).unwrap();
        for k in 0..n {
            assert!((tr.psi_marked(1, k).norm_squared() - (1.0 - 1.0 / nf)).abs() < 1e-12);
        }
        let m = &measures(&tr)[1];
        assert!((m.h - 1.0 / nf).abs() < 1e-12);
        let ak = (1.0 - 1.0 / nf).powi(2);
        assert!((m.a - ak).abs() < 1e-12);
        assert!((m.b - (1.0 - 1.0 / nf - ak)).abs() < 1e-12);
    }
}

/// After one quantum query with identity unitaries the components carry no
/// overlap with the marked-index subspace beyond what the query flipped, so
/// the pseudo-classical witness spends the whole budget.
#[test]
fn witness_spends_whole_budget_after_grover_query() {
    for n in [4, 8, 16] {
        let nf = n as f64;
        let alg = HybridAlgorithm::new(
            minus_state(n),
            "Q:0 P".parse().unwrap(),
            vec![UnitarySpec::Identity, UnitarySpec::Identity],
            AnswerMap::Index,
        )
        .unwrap();
        let tr = dominant_components(&alg).unwrap();
        let b1 = measures(&tr)[1].b;
        assert!((b1 - (4.0 / nf - 4.0 / (nf * nf))).abs() < 1e-12, "n={n}: B1={b1}");
        let w = witness_w(&tr, 2).unwrap();
        assert!((w - b1).abs() < 1e-12, "n={n}: w={w}, B1={b1}");
        assert!(verify(&alg).unwrap().report.all_pass());
    }
}

#[test]
fn recursion_attains_lemma_bound_with_classical_first_order() {
    for n in [8, 16, 64] {
        let s = Schedule::classical_then_quantum(4, 2, 0);
        let rec = ab_recursion(&s, &[0.0; 4], n).unwrap();
        let bound = theorem_bounds(n, 4, 2, 0.0).b_final_bound;
        assert!((rec.b[6] - 36.0 / n as f64).abs() < 1e-12);
        assert!((bound - 36.0 / n as f64).abs() < 1e-12);
    }
}

#[test]
fn all_quantum_components_stay_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let shape = RegisterShape::new(8, 2).unwrap();
    let alg = HybridAlgorithm::new(
        hsl_core::random::random_state(&mut rng, shape),
        "Q:0Q:1Q:0".parse().unwrap(),
        (0..3)
            .map(|_| hsl_core::random::random_unitary(&mut rng, shape))
            .collect(),
        AnswerMap::Index,
    )
    .unwrap();
    let tr = dominant_components(&alg).unwrap();
    for t in 0..=3 {
        for k in 0..8 {
            assert!((tr.psi_marked(t, k).norm() - 1.0).abs() < 1e-12);
        }
    }
    let m = measures(&tr);
    for (t, s) in m.iter().enumerate().skip(1) {
        assert!((s.a + s.b - 1.0).abs() < 1e-12);
        assert!(alg.schedule().kind(t) != OracleKind::PseudoClassical);
    }
}

#[test]
fn detection_checks_pass_on_grover_threshold() {
    let alg = HybridAlgorithm::new(
        minus_state(4),
        "Q:0".parse().unwrap(),
        vec![UnitarySpec::Diffusion],
        AnswerMap::Index,
    )
    .unwrap();
    let opts = VerifyOptions {
        detection_map: Some(AnswerMap::IndexInSet(vec![0, 1, 2, 3])),
        ..VerifyOptions::default()
    };
    let v = verify_with(&alg, &opts).unwrap();
    assert!(v.report.all_pass());
    assert!(v.report.get("detection.h").count() == 1);
    assert!(v.detection_success.is_some());
}
