//! Dominant pure components and the progress measures built on them.
//!
//! For `κ = 0` the input is all zeros; `κ = k + 1` marks index `k`. Classical
//! steps always use pseudo-classical semantics here and keep only the
//! outcome-0 component, so `ψ_κ^t` is sub-normalized for `κ ≥ 1`.

mod bounds;
mod checks;
mod measures;
mod report;

pub use bounds::{failure_lower_bound, theorem_bounds, TheoremBounds};
pub use checks::{
    check_a_vs_h, check_ab_steps, check_answer_failure, check_h_relation, check_h_steps, check_recursion,
    limitation_demo, verify, verify_with, BoundEntry, BoundReport, LimitationDemo, Relation, Verification,
    VerifyOptions,
};
pub use measures::{
    ab_recursion, measures, progress_ab, progress_h, witness_raw, witness_w, witnesses, Recursion, StepMeasures,
};
pub use report::{ProgressTrace, SummaryRow, SUMMARY_COLUMNS};

use crate::oracles::{self, InputString, OracleKind};
use crate::runner::{HybridAlgorithm, Schedule};
use crate::statespace::StateVector;
use crate::{par, Result, C64};

/// Deliberately broken oracle behaviour, used as a negative control for
/// the checkers.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Classical steps flip the sign of the marked amplitude instead of
    /// removing it.
    PhaseOnClassical,
}

/// `ψ_κ^t` for `t = 0..=τ` and `κ = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTrace {
    n: usize,
    schedule: Schedule,
    states: Vec<Vec<StateVector>>,
}

impl ComponentTrace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> usize {
        self.schedule.tau()
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// `ψ_κ^t`.
    pub fn psi(&self, t: usize, kappa: usize) -> &StateVector {
        &self.states[t][kappa]
    }

    /// `ψ_0^t`.
    pub fn psi0(&self, t: usize) -> &StateVector {
        &self.states[t][0]
    }

    /// `ψ_k^t` for the input marking index `k` (0-based).
    pub fn psi_marked(&self, t: usize, k: usize) -> &StateVector {
        &self.states[t][k + 1]
    }
}

pub fn dominant_components(alg: &HybridAlgorithm) -> Result<ComponentTrace> {
    build_trace(alg, None)
}

#[doc(hidden)]
pub fn dominant_components_with_fault(alg: &HybridAlgorithm, fault: Fault) -> Result<ComponentTrace> {
    build_trace(alg, Some(fault))
}

fn faulty_classical(x: &InputString, psi: &StateVector, fault: Fault) -> StateVector {
    match fault {
        Fault::PhaseOnClassical => {
            let shape = psi.shape();
            let w = shape.workspace_dim();
            let mut out = psi.clone();
            let amps = out.amplitudes_mut();
            for i in (0..shape.n()).filter(|&i| x.bit(i)) {
                for ws in 0..w {
                    amps[i * w + ws] *= C64::new(-1.0, 0.0);
                }
            }
            out.append_qubit(false)
        }
    }
}

fn build_trace(alg: &HybridAlgorithm, fault: Option<Fault>) -> Result<ComponentTrace> {
    let n = alg.n();
    let per_kappa = par::try_map_range(n + 1, |kappa| {
        let x = InputString::kappa(n, kappa)?;
        let mut cur = alg.initial_state().clone();
        let mut states = Vec::with_capacity(alg.schedule().tau() + 1);
        states.push(cur.clone());
        for (kind, u) in alg.schedule().steps().iter().zip(alg.unitaries()) {
            let queried = match kind {
                OracleKind::Quantum { target } => oracles::quantum_apply(&x, &cur, *target)?,
                _ => match fault {
                    Some(f) => faulty_classical(&x, &cur, f),
                    None => oracles::pseudo_classical_component(&x, &cur, false)?,
                },
            };
            cur = u.apply(&queried)?;
            states.push(cur.clone());
        }
        Ok::<_, crate::Error>(states)
    })?;
    let tau = alg.schedule().tau();
    let mut states: Vec<Vec<StateVector>> = (0..=tau).map(|_| Vec::with_capacity(n + 1)).collect();
    for column in per_kappa {
        for (t, s) in column.into_iter().enumerate() {
            states[t].push(s);
        }
    }
    Ok(ComponentTrace {
        n,
        schedule: alg.schedule().clone(),
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{run, AnswerMap, OracleMode, UnitarySpec};
    use crate::statespace::RegisterShape;

    #[test]
    fn zero_input_trace_is_the_runner_branch() {
        let s = RegisterShape::new(4, 1).unwrap();
        let init = StateVector::uniform(s);
        let alg = HybridAlgorithm::new(
            init,
            "PQ:1P".parse().unwrap(),
            vec![
                UnitarySpec::Diffusion,
                UnitarySpec::PhaseRotation { angle: 1.0 },
                UnitarySpec::Diffusion,
            ],
            AnswerMap::Index,
        )
        .unwrap();
        let tr = dominant_components(&alg).unwrap();
        let r = run(&alg, &InputString::zeros(4).unwrap(), OracleMode::UsePseudoClassical).unwrap();
        assert_eq!(r.final_ensemble.len(), 1);
        assert_eq!(&r.final_ensemble.branches()[0].state, tr.psi0(3));
    }

    #[test]
    fn one_query_on_uniform_state_removes_one_nth() {
        let s = RegisterShape::new(4, 0).unwrap();
        let alg = HybridAlgorithm::new(
            StateVector::uniform(s),
            "P".parse().unwrap(),
            vec![UnitarySpec::Identity],
            AnswerMap::Index,
        )
        .unwrap();
        let tr = dominant_components(&alg).unwrap();
        for k in 0..4 {
            assert!((tr.psi_marked(1, k).norm_squared() - 0.75).abs() < 1e-15);
        }
        assert!((tr.psi0(1).norm_squared() - 1.0).abs() < 1e-15);
    }
}
