//! Derivative-free search over permutation-symmetric hybrid algorithms.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::{householder_to_uniform, swap_matrix};
use crate::oracles::OracleKind;
use crate::progress::theorem_bounds;
use crate::runner::{success_finding, AnswerMap, HybridAlgorithm, OracleMode, Schedule, UnitarySpec};
use crate::statespace::{RegisterShape, StateVector};
use crate::{par, Error, Result, C64};

pub const DEFAULT_BUDGET: usize = 2000;
pub const RESTARTS: usize = 3;
pub const GOLDEN_TOL: f64 = 1e-7;
const GRID_POINTS: usize = 8;
/// Smallest bracket half-width of a local line search.
const MIN_REACH: f64 = 1e-4;

/// How classical steps are spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassicalPolicy {
    /// Query distinct indices in a seeded order, then run the rotations on
    /// the unqueried ones. Needs every classical step before any quantum one.
    FreshIndex,
    /// Query the current superposition and reflect about the uniform state
    /// on the not-found branch. Works with any interleaving.
    Coherent,
}

/// A schedule whose quantum steps are generalized diffusions `R(θ_t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamAlgorithm {
    n: usize,
    #[serde(serialize_with = "as_string")]
    schedule: Schedule,
    policy: ClassicalPolicy,
    seed: u64,
}

fn as_string<S: serde::Serializer>(s: &Schedule, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `I - (1 - e^{iθ}) u_S u_S*` on the index register.
fn rotation_on(n: usize, set: &[usize], angle: f64) -> DMatrix<C64> {
    let c = (real(1.0) - C64::from_polar(1.0, angle)) / set.len() as f64;
    let mut m = DMatrix::identity(n, n);
    for &i in set {
        for &j in set {
            m[(i, j)] -= c;
        }
    }
    m
}

fn controlled_on_all_zero(controls: &[usize], inner: UnitarySpec) -> UnitarySpec {
    controls
        .iter()
        .rev()
        .fold(inner, |acc, &c| UnitarySpec::ControlledOnZero {
            control: c,
            inner: Box::new(acc),
        })
}

impl ParamAlgorithm {
    /// Quantum steps must target qubit 0, which holds `e_-`.
    pub fn new(n: usize, schedule: Schedule, policy: ClassicalPolicy, seed: u64) -> Result<Self> {
        RegisterShape::new(n, 0)?;
        if let Some(t) = schedule
            .steps()
            .iter()
            .find(|k| matches!(k, OracleKind::Quantum { target } if *target != 0))
        {
            return Err(Error::InvalidSchedule(format!(
                "parameterized algorithms query with qubit 0 as target, found {t}"
            )));
        }
        if policy == ClassicalPolicy::FreshIndex {
            let first_q = schedule.quantum_steps().first().copied().unwrap_or(usize::MAX);
            if schedule.classical_steps().iter().any(|&t| t > first_q) {
                return Err(Error::InvalidSchedule(
                    "fresh-index policy needs all classical steps before quantum ones".into(),
                ));
            }
            if schedule.tau_c() >= n {
                return Err(Error::InvalidParameter(format!(
                    "fresh-index policy needs tau_c < n, got tau_c={}, n={n}",
                    schedule.tau_c()
                )));
            }
        }
        Ok(Self {
            n,
            schedule,
            policy,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn policy(&self) -> ClassicalPolicy {
        self.policy
    }

    /// Number of free angles (one per quantum step).
    pub fn dimension(&self) -> usize {
        self.schedule.tau_q()
    }

    /// Concrete algorithm for the given angles.
    pub fn build(&self, angles: &[f64]) -> Result<HybridAlgorithm> {
        if angles.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: angles.len(),
            });
        }
        let n = self.n;
        let h = 1.0 / 2f64.sqrt();
        let index_shape = RegisterShape::new(n, 0)?;
        let tau_c = self.schedule.tau_c();
        let mut angles = angles.iter();
        match self.policy {
            ClassicalPolicy::FreshIndex => {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
                let rest = &order[tau_c..];
                let start = if tau_c == 0 {
                    StateVector::uniform(index_shape)
                } else {
                    StateVector::basis(index_shape, order[0], 0)?
                };
                let mut unitaries = Vec::with_capacity(self.schedule.tau());
                for (t, kind) in self.schedule.steps().iter().enumerate() {
                    let t = t + 1;
                    unitaries.push(if kind.is_classical() {
                        let inner = if t < tau_c {
                            swap_matrix(n, order[t - 1], order[t])
                        } else {
                            householder_to_uniform(n, order[t - 1], rest)
                        };
                        UnitarySpec::ControlledOnZero {
                            control: t,
                            inner: Box::new(UnitarySpec::IndexMatrix(inner)),
                        }
                    } else {
                        UnitarySpec::IndexMatrix(rotation_on(n, rest, *angles.next().expect("length checked")))
                    });
                }
                HybridAlgorithm::new(
                    start.tensor_qubit(real(h), real(-h)),
                    self.schedule.clone(),
                    unitaries,
                    AnswerMap::Index,
                )
            }
            ClassicalPolicy::Coherent => {
                let mut controls = Vec::new();
                let mut unitaries = Vec::with_capacity(self.schedule.tau());
                for kind in self.schedule.steps() {
                    if kind.is_classical() {
                        controls.push(controls.len() + 1);
                        unitaries.push(controlled_on_all_zero(&controls, UnitarySpec::Diffusion));
                    } else {
                        let angle = *angles.next().expect("length checked");
                        unitaries.push(controlled_on_all_zero(&controls, UnitarySpec::PhaseRotation { angle }));
                    }
                }
                HybridAlgorithm::new(
                    StateVector::uniform(index_shape).tensor_qubit(real(h), real(-h)),
                    self.schedule.clone(),
                    unitaries,
                    AnswerMap::Index,
                )
            }
        }
    }

    /// Average finding success with pseudo-classical semantics.
    pub fn success(&self, angles: &[f64]) -> Result<f64> {
        success_finding(&self.build(angles)?, OracleMode::UsePseudoClassical)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_success: f64,
    /// `(2√τ_c + 2τ_q + 1)²/n`, unclamped.
    pub bound: f64,
    /// `best_success / min(1, bound)`.
    pub ratio: f64,
    pub evaluations: usize,
    /// Best value after each completed sweep of the winning restart.
    pub history: Vec<f64>,
    pub restart: usize,
}

struct Search<'a> {
    pa: &'a ParamAlgorithm,
    budget: usize,
    evaluations: usize,
    best: Vec<f64>,
    best_value: f64,
    history: Vec<f64>,
}

impl Search<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    /// Evaluates `base + t·dir`; `None` once the budget is spent.
    fn eval(&mut self, base: &[f64], dir: &[f64], t: f64) -> Result<Option<f64>> {
        if self.exhausted() {
            return Ok(None);
        }
        self.evaluations += 1;
        let x: Vec<f64> = base.iter().zip(dir).map(|(b, d)| (b + t * d).rem_euclid(TAU)).collect();
        let v = self.pa.success(&x)?;
        if v > self.best_value {
            self.best_value = v;
            self.best = x;
        }
        Ok(Some(v))
    }

    /// Golden-section search for a maximum of `t ↦ f(base + t·dir)` on `[lo, hi]`.
    fn golden(&mut self, base: &[f64], dir: &[f64], mut lo: f64, mut hi: f64, tol: f64) -> Result<()> {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let Some(mut f1) = self.eval(base, dir, x1)? else {
            return Ok(());
        };
        let Some(mut f2) = self.eval(base, dir, x2)? else {
            return Ok(());
        };
        while hi - lo > tol {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                let Some(v) = self.eval(base, dir, x1)? else {
                    return Ok(());
                };
                f1 = v;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                let Some(v) = self.eval(base, dir, x2)? else {
                    return Ok(());
                };
                f2 = v;
            }
        }
        Ok(())
    }

    /// Golden section along the unit direction `dir` within `±reach` of the
    /// current point, preceded by a coarse grid over a full turn when
    /// `reach` is `None`. Returns the gain.
    fn line_search(&mut self, dir: &[f64], reach: Option<f64>) -> Result<f64> {
        let before = self.best_value;
        let base = self.best.clone();
        let step = TAU / GRID_POINTS as f64;
        if let Some(r) = reach {
            self.golden(&base, dir, -r, r, GOLDEN_TOL)?;
            return Ok(self.best_value - before);
        }
        let mut centre = 0.0;
        let mut centre_value = self.best_value;
        for j in 1..GRID_POINTS {
            let t = j as f64 * step;
            match self.eval(&base, dir, t)? {
                Some(v) if v > centre_value => {
                    centre = t;
                    centre_value = v;
                }
                Some(_) => {}
                None => return Ok(self.best_value - before),
            }
        }
        self.golden(&base, dir, centre - step, centre + step, GOLDEN_TOL)?;
        Ok(self.best_value - before)
    }

    /// Starts from the coordinate axes; after each sweep the net move of
    /// the sweep is searched and replaces the direction that gained most.
    /// Directions reset to the axes every `dim + 1` sweeps.
    fn run(&mut self) -> Result<()> {
        let dim = self.best.len();
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut dirs = axes.clone();
        let mut sweep = 0;
        let mut reach = None;
        while !self.exhausted() {
            let before = self.best_value;
            let from = self.best.clone();
            let mut top = (0, 0.0);
            for (i, d) in dirs.clone().iter().enumerate() {
                let gain = self.line_search(d, reach)?;
                if gain > top.1 {
                    top = (i, gain);
                }
            }
            let net: Vec<f64> = self
                .best
                .iter()
                .zip(&from)
                .map(|(b, f)| (b - f + PI).rem_euclid(TAU) - PI)
                .collect();
            let len = net.iter().map(|d| d * d).sum::<f64>().sqrt();
            if dim > 1 && len > GOLDEN_TOL {
                let unit: Vec<f64> = net.iter().map(|d| d / len).collect();
                self.line_search(&unit, Some((4.0 * len).min(PI)))?;
                dirs[top.0] = unit;
            }
            sweep += 1;
            if sweep % (dim + 1) == 0 {
                dirs = axes.clone();
            }
            self.history.push(self.best_value);
            if self.best_value - before <= 1e-15 {
                if reach.is_none() {
                    break;
                }
                // A stalled local sweep gets one more chance with full grids.
                reach = None;
                continue;
            }
            reach = Some((4.0 * len).clamp(MIN_REACH, PI / GRID_POINTS as f64));
        }
        Ok(())
    }
}

fn start_point(seed: u64, restart: usize, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
    (0..dim).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Coordinate ascent with golden-section line searches, restarted from
/// [`RESTARTS`] seeded points that share `budget` evaluations.
pub fn optimize(pa: &ParamAlgorithm, budget: usize, seed: u64) -> Result<OptResult> {
    if budget == 0 {
        return Err(Error::InvalidParameter("optimizer budget must be at least 1".into()));
    }
    let (tau_c, tau_q) = (pa.schedule.tau_c(), pa.schedule.tau_q());
    let bound = theorem_bounds(pa.n, tau_c, tau_q, 0.0).success_bound;
    let dim = pa.dimension();
    let finish = |best_params: Vec<f64>, best_success: f64, evaluations, history, restart| OptResult {
        best_params,
        best_success,
        bound,
        ratio: best_success / bound.min(1.0),
        evaluations,
        history,
        restart,
    };
    if dim == 0 {
        let v = pa.success(&[])?;
        return Ok(finish(vec![], v, 1, vec![v], 0));
    }
    let restarts = RESTARTS.min(budget);
    let runs = par::try_map_range(restarts, |r| {
        let share = budget / restarts + usize::from(r < budget % restarts);
        let x0 = start_point(seed, r, dim);
        let v0 = pa.success(&x0)?;
        let mut s = Search {
            pa,
            budget: share,
            evaluations: 1,
            best: x0,
            best_value: v0,
            history: vec![v0],
        };
        s.run()?;
        Ok::<_, Error>(s)
    })?;
    let evaluations = runs.iter().map(|s| s.evaluations).sum();
    let (restart, winner) = runs
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.best_value > acc.1.best_value { cur } else { acc })
        .expect("at least one restart");
    Ok(finish(
        winner.best,
        winner.best_value,
        evaluations,
        winner.history,
        restart,
    ))
}

/// Angle of the standard Grover diffusion within the rotation family.
pub const GROVER_ANGLE: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{closed_form, grover_success, BaselineKind};

    #[test]
    fn grover_angle_reproduces_grover_and_hybrid_baselines() {
        for (c, q) in [(0, 1), (0, 3), (2, 1), (3, 2)] {
            let pa = ParamAlgorithm::new(
                9,
                Schedule::classical_then_quantum(c, q, 0),
                ClassicalPolicy::FreshIndex,
                0,
            )
            .unwrap();
            let got = pa.success(&vec![GROVER_ANGLE; q]).unwrap();
            let want = closed_form(BaselineKind::ClassicalThenGrover { tau_c: c, tau_q: q }, 9);
            assert!((got - want).abs() < 1e-12, "{c} {q}: {got} vs {want}");
        }
        let pa = ParamAlgorithm::new(
            9,
            Schedule::classical_then_quantum(0, 2, 0),
            ClassicalPolicy::Coherent,
            0,
        )
        .unwrap();
        assert!((pa.success(&[PI, PI]).unwrap() - grover_success(9, 2)).abs() < 1e-12);
    }

    #[test]
    fn coherent_classical_steps_follow_pseudo_classical_grover() {
        let pa = ParamAlgorithm::new(8, "PP".parse().unwrap(), ClassicalPolicy::Coherent, 0).unwrap();
        let want = closed_form(BaselineKind::GroverPseudoClassical { tau: 2 }, 8);
        assert!((pa.success(&[]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn empty_schedule_is_guessing() {
        let pa = ParamAlgorithm::new(5, Schedule::default(), ClassicalPolicy::FreshIndex, 0).unwrap();
        let r = optimize(&pa, 10, 0).unwrap();
        assert!((r.best_success - 0.2).abs() < 1e-15);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn recovers_one_iteration_grover_at_four() {
        let pa = ParamAlgorithm::new(4, "Q:0".parse().unwrap(), ClassicalPolicy::FreshIndex, 0).unwrap();
        let r = optimize(&pa, DEFAULT_BUDGET, 1).unwrap();
        assert!((r.best_success - 1.0).abs() < 1e-9);
        assert!(r.evaluations <= DEFAULT_BUDGET);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn invalid_configurations() {
        assert!(ParamAlgorithm::new(4, "Q:0P".parse().unwrap(), ClassicalPolicy::FreshIndex, 0).is_err());
        assert!(ParamAlgorithm::new(4, "PQ:1".parse().unwrap(), ClassicalPolicy::Coherent, 0).is_err());
        assert!(ParamAlgorithm::new(2, "PP".parse().unwrap(), ClassicalPolicy::FreshIndex, 0).is_err());
        let pa = ParamAlgorithm::new(4, "Q:0".parse().unwrap(), ClassicalPolicy::Coherent, 0).unwrap();
        assert!(optimize(&pa, 0, 0).is_err());
        assert!(pa.build(&[]).is_err());
    }
}
