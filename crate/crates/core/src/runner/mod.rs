//! Hybrid algorithms: schedule, unitaries, initial state and answer map,
//! plus exact execution against a concrete input.

mod answer;
mod schedule;
mod unitary;

use std::collections::BTreeMap;

use serde::Serialize;

pub use answer::AnswerMap;
pub use schedule::Schedule;
pub use unitary::{UnitarySpec, UNITARY_TOL};

use crate::oracles::{self, InputString, OracleKind, DEFAULT_PRUNE_TOL};
use crate::statespace::{BranchEnsemble, RegisterShape, StateVector};
use crate::{par, Error, Result};

/// How classical steps are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum OracleMode {
    #[default]
    UseClassical,
    /// Every classical step calls the pseudo-classical oracle instead.
    UsePseudoClassical,
}

/// A fully specified, input-independent hybrid algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridAlgorithm {
    n: usize,
    l0: usize,
    initial_state: StateVector,
    schedule: Schedule,
    unitaries: Vec<UnitarySpec>,
    answer_map: AnswerMap,
}

impl HybridAlgorithm {
    /// Validates the dimension chain, targets, unitaries and answer map.
    pub fn new(
        initial_state: StateVector,
        schedule: Schedule,
        unitaries: Vec<UnitarySpec>,
        answer_map: AnswerMap,
    ) -> Result<Self> {
        let shape = initial_state.shape();
        let norm = initial_state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        if unitaries.len() != schedule.tau() {
            return Err(Error::DimensionMismatch {
                expected: schedule.tau(),
                got: unitaries.len(),
            });
        }
        let mut cur = shape;
        for (step, (kind, u)) in schedule.steps().iter().zip(&unitaries).enumerate() {
            match kind {
                OracleKind::Quantum { target } => {
                    if *target >= cur.workspace_qubits() {
                        return Err(Error::MissingQubit {
                            target: *target,
                            available: cur.workspace_qubits(),
                        });
                    }
                }
                _ => cur = cur.with_qubit(),
            }
            u.validate(cur)
                .map_err(|reason| Error::InvalidUnitary { step: step + 1, reason })?;
        }
        answer_map.validate(cur).map_err(Error::AnswerSet)?;
        Ok(Self {
            n: shape.n(),
            l0: shape.workspace_qubits(),
            initial_state,
            schedule,
            unitaries,
            answer_map,
        })
    }

    /// The same circuit with a different final answer map.
    pub fn with_answer_map(&self, answer_map: AnswerMap) -> Result<Self> {
        answer_map.validate(self.final_shape()).map_err(Error::AnswerSet)?;
        Ok(Self {
            answer_map,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l0(&self) -> usize {
        self.l0
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn unitaries(&self) -> &[UnitarySpec] {
        &self.unitaries
    }

    pub fn answer_map(&self) -> &AnswerMap {
        &self.answer_map
    }

    /// Shape of the memory after step `t` (`t = 0` is the initial shape).
    pub fn shape_after(&self, t: usize) -> RegisterShape {
        RegisterShape::new(self.n, self.schedule.workspace_after(t, self.l0)).expect("validated at construction")
    }

    pub fn final_shape(&self) -> RegisterShape {
        self.shape_after(self.schedule.tau())
    }
}

/// Knobs for [`run_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Branches lighter than this are dropped after each classical call.
    pub prune_tol: f64,
    /// Replace the ensemble by its spectral decomposition whenever it has
    /// more branches than the state dimension. Leaves every outcome
    /// probability unchanged up to round-off but drops branch histories.
    pub compress: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            prune_tol: DEFAULT_PRUNE_TOL,
            compress: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_ensemble: BranchEnsemble,
    pub pruned_mass: f64,
    pub answer_distribution: BTreeMap<u32, f64>,
}

impl RunResult {
    pub fn probability(&self, answer: u32) -> f64 {
        self.answer_distribution.get(&answer).copied().unwrap_or(0.0)
    }
}

pub fn run(alg: &HybridAlgorithm, x: &InputString, mode: OracleMode) -> Result<RunResult> {
    run_with(alg, x, mode, RunOptions::default())
}

pub fn run_with(alg: &HybridAlgorithm, x: &InputString, mode: OracleMode, opts: RunOptions) -> Result<RunResult> {
    x.ensure_matches(alg.initial_state.shape())?;
    let mut ensemble = BranchEnsemble::pure(alg.initial_state.clone());
    let mut pruned_mass = 0.0;
    for (kind, u) in alg.schedule.steps().iter().zip(&alg.unitaries) {
        ensemble = match (kind, mode) {
            (OracleKind::Classical, OracleMode::UseClassical) => oracles::apply_classical(x, &ensemble)?,
            (OracleKind::Quantum { target }, _) => oracles::apply_quantum(x, &ensemble, *target)?,
            _ => oracles::apply_pseudo_classical(x, &ensemble)?,
        };
        if kind.is_classical() {
            let pruned = oracles::prune(&ensemble, opts.prune_tol)?;
            pruned_mass += pruned.removed_mass;
            ensemble = pruned.ensemble;
            if opts.compress && ensemble.len() > ensemble.shape().dim() {
                ensemble = ensemble.spectral();
            }
        }
        let shape = ensemble.shape();
        let branches = par::try_map(ensemble.branches(), |b| {
            let mut b = b.clone();
            b.state = u.apply(&b.state)?;
            Ok::<_, Error>(b)
        })?;
        ensemble = BranchEnsemble::from_parts(shape, branches);
    }
    let shape = ensemble.shape();
    let mut answer_distribution = BTreeMap::new();
    for b in ensemble.branches() {
        for (p, z) in b.state.amplitudes().iter().enumerate() {
            let prob = b.weight * z.norm_sqr();
            if prob > 0.0 {
                *answer_distribution
                    .entry(alg.answer_map.answer(shape, p))
                    .or_insert(0.0) += prob;
            }
        }
    }
    Ok(RunResult {
        final_ensemble: ensemble,
        pruned_mass,
        answer_distribution,
    })
}

const COMPRESSED: RunOptions = RunOptions {
    prune_tol: DEFAULT_PRUNE_TOL,
    compress: true,
};

/// `Pr[answer = k | x^{(k)}]` for each `k = 0..n`.
pub fn finding_success_per_input(alg: &HybridAlgorithm, mode: OracleMode) -> Result<Vec<f64>> {
    if alg.answer_map.max_answer(alg.final_shape()) as usize >= alg.n {
        return Err(Error::AnswerSet(format!(
            "finding needs answers in 0..{}, answer map can produce {}",
            alg.n,
            alg.answer_map.max_answer(alg.final_shape())
        )));
    }
    par::try_map_range(alg.n, |k| {
        let x = InputString::marked(alg.n, k)?;
        Ok(run_with(alg, &x, mode, COMPRESSED)?.probability(k as u32))
    })
}

/// Average finding success over a uniformly random marked index.
pub fn success_finding(alg: &HybridAlgorithm, mode: OracleMode) -> Result<f64> {
    let per = finding_success_per_input(alg, mode)?;
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

/// `Pr[correct answer | x^{(κ)}]` for `κ = 0..=n`; the correct answer is 0
/// for the all-zero input and 1 otherwise.
pub fn detection_success_per_input(alg: &HybridAlgorithm, mode: OracleMode) -> Result<Vec<f64>> {
    if alg.answer_map.max_answer(alg.final_shape()) > 1 {
        return Err(Error::AnswerSet("detection needs answers in {0, 1}".into()));
    }
    par::try_map_range(alg.n + 1, |kappa| {
        let x = InputString::kappa(alg.n, kappa)?;
        Ok(run_with(alg, &x, mode, COMPRESSED)?.probability(u32::from(kappa > 0)))
    })
}

/// Worst-case detection success over `κ ∈ {0, …, n}`.
pub fn success_detection(alg: &HybridAlgorithm, mode: OracleMode) -> Result<f64> {
    let per = detection_success_per_input(alg, mode)?;
    Ok(per.into_iter().fold(f64::INFINITY, f64::min))
}
