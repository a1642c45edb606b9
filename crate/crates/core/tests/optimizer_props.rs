use hsl_core::baselines::optimal_quantum_success;
use hsl_core::optimizer::{optimize, ClassicalPolicy, ParamAlgorithm, DEFAULT_BUDGET};
use hsl_core::progress::theorem_bounds;
use hsl_core::runner::Schedule;

#[test]
fn recovers_grover_on_quantum_schedules() {
    for n in [4, 16] {
        for tq in [1, 2] {
            let pa = ParamAlgorithm::new(
                n,
                Schedule::classical_then_quantum(0, tq, 0),
                ClassicalPolicy::FreshIndex,
                0,
            )
            .unwrap();
            let r = optimize(&pa, DEFAULT_BUDGET, 0).unwrap();
            let want = optimal_quantum_success(n, tq);
            assert!(
                (r.best_success - want).abs() < 1e-6,
                "n={n} tq={tq}: {} vs {want}",
                r.best_success
            );
            assert!(r.evaluations <= DEFAULT_BUDGET);
        }
    }
}

#[test]
fn results_stay_below_the_bound() {
    for (n, sched, policy) in [
        (16, "PQ:0", ClassicalPolicy::Coherent),
        (16, "PQ:0", ClassicalPolicy::FreshIndex),
        (8, "CCQ:0", ClassicalPolicy::FreshIndex),
        (8, "PQ:0P", ClassicalPolicy::Coherent),
    ] {
        let s: Schedule = sched.parse().unwrap();
        let pa = ParamAlgorithm::new(n, s.clone(), policy, 1).unwrap();
        let r = optimize(&pa, 400, 1).unwrap();
        let bound = theorem_bounds(n, s.tau_c(), s.tau_q(), 0.0).success_bound;
        assert!(r.best_success <= bound + 1e-9, "{sched}: {} > {bound}", r.best_success);
        assert!((r.bound - bound).abs() < 1e-15);
        assert!((r.ratio - r.best_success / bound.min(1.0)).abs() < 1e-12);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]), "history must not decrease");
    }
}

#[test]
fn same_seed_same_result() {
    let pa = ParamAlgorithm::new(8, "PQ:0Q:0".parse().unwrap(), ClassicalPolicy::Coherent, 3).unwrap();
    let a = optimize(&pa, 300, 11).unwrap();
    let b = optimize(&pa, 300, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn empty_schedule_is_a_guess() {
    let pa = ParamAlgorithm::new(5, Schedule::new(vec![]), ClassicalPolicy::FreshIndex, 0).unwrap();
    let r = optimize(&pa, 10, 0).unwrap();
    assert!((r.best_success - 0.2).abs() < 1e-15);
    assert_eq!(r.evaluations, 1);
    assert!(optimize(&pa, 0, 0).is_err());
}
