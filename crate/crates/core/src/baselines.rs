//! Reference algorithms with known success probabilities.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::oracles::OracleKind;
use crate::runner::{AnswerMap, HybridAlgorithm, Schedule, UnitarySpec};
use crate::statespace::{RegisterShape, StateVector};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaselineKind {
    /// Grover's algorithm with `τ_q` quantum queries.
    GroverQuantum { tau_q: usize },
    /// Grover's iteration driven by the pseudo-classical oracle, `τ` queries.
    GroverPseudoClassical { tau: usize },
    /// Query `τ_c` distinct indices, then guess an unqueried one.
    ClassicalRandom { tau_c: usize },
    /// `τ_c` distinct classical queries, then Grover on the rest.
    ClassicalThenGrover { tau_c: usize, tau_q: usize },
}

/// Names accepted by [`BaselineKind::from_name`].
pub const BASELINE_NAMES: [&str; 4] = ["grover", "pc-grover", "classical", "hybrid"];

impl BaselineKind {
    /// Builds a kind from its short name and a query budget. `grover` uses
    /// `τ_q`, `pc-grover` and `classical` use `τ_c`, `hybrid` uses both.
    pub fn from_name(name: &str, tau_c: usize, tau_q: usize) -> Result<Self> {
        Ok(match name {
            "grover" => BaselineKind::GroverQuantum { tau_q },
            "pc-grover" => BaselineKind::GroverPseudoClassical { tau: tau_c },
            "classical" => BaselineKind::ClassicalRandom { tau_c },
            "hybrid" => BaselineKind::ClassicalThenGrover { tau_c, tau_q },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown baseline {other:?}, expected one of {}",
                    BASELINE_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::GroverQuantum { .. } => "grover",
            BaselineKind::GroverPseudoClassical { .. } => "pc-grover",
            BaselineKind::ClassicalRandom { .. } => "classical",
            BaselineKind::ClassicalThenGrover { .. } => "hybrid",
        }
    }

    /// `(τ_c, τ_q)`, with pseudo-classical queries counted as classical.
    pub fn budget(&self) -> (usize, usize) {
        match *self {
            BaselineKind::GroverQuantum { tau_q } => (0, tau_q),
            BaselineKind::GroverPseudoClassical { tau } => (tau, 0),
            BaselineKind::ClassicalRandom { tau_c } => (tau_c, 0),
            BaselineKind::ClassicalThenGrover { tau_c, tau_q } => (tau_c, tau_q),
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, q) = self.budget();
        write!(f, "{}(tau_c={c}, tau_q={q})", self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    /// Parses `name` or `name:tau_c:tau_q`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let mut num = |what: &str| -> Result<usize> {
            match parts.next() {
                None => Ok(0),
                Some(p) => p
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad {what} {p:?} in baseline {s:?}"))),
            }
        };
        let tau_c = num("tau_c")?;
        let tau_q = num("tau_q")?;
        Self::from_name(name, tau_c, tau_q)
    }
}

fn e_minus() -> (C64, C64) {
    let h = 1.0 / 2f64.sqrt();
    (C64::new(h, 0.0), C64::new(-h, 0.0))
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Permutation matrix exchanging two basis states of the index register.
pub(crate) fn swap_matrix(n: usize, a: usize, b: usize) -> DMatrix<C64> {
    let mut m = DMatrix::identity(n, n);
    if a != b {
        m[(a, a)] = real(0.0);
        m[(b, b)] = real(0.0);
        m[(a, b)] = real(1.0);
        m[(b, a)] = real(1.0);
    }
    m
}

/// Reflection `I - 2vv*/‖v‖²` with `v = e_a - u_S`, which maps `e_a` to the
/// uniform superposition over `set` (requires `a ∉ set`).
pub(crate) fn householder_to_uniform(n: usize, a: usize, set: &[usize]) -> DMatrix<C64> {
    let s = 1.0 / (set.len() as f64).sqrt();
    let mut v = nalgebra::DVector::<C64>::zeros(n);
    v[a] = real(1.0);
    for &i in set {
        v[i] -= real(s);
    }
    let vv = v.norm_squared();
    DMatrix::identity(n, n) - (&v * v.adjoint()) * real(2.0 / vv)
}

/// `2u_Su_S* - I` on the span of `set`, identity on its complement.
fn diffusion_on(n: usize, set: &[usize]) -> DMatrix<C64> {
    let mut m = DMatrix::identity(n, n);
    let inv = 1.0 / set.len() as f64;
    for &i in set {
        for &j in set {
            m[(i, j)] = real(2.0 * inv - if i == j { 1.0 } else { 0.0 });
        }
    }
    m
}

fn relabeling(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Builds a baseline with the default relabeling seed 0.
pub fn build(kind: BaselineKind, n: usize) -> Result<HybridAlgorithm> {
    build_seeded(kind, n, 0)
}

/// Builds a baseline; `seed` picks the query order of classical strategies.
pub fn build_seeded(kind: BaselineKind, n: usize, seed: u64) -> Result<HybridAlgorithm> {
    let index_shape = RegisterShape::new(n, 0)?;
    match kind {
        BaselineKind::GroverQuantum { tau_q } => {
            let (a, b) = e_minus();
            HybridAlgorithm::new(
                StateVector::uniform(index_shape).tensor_qubit(a, b),
                Schedule::classical_then_quantum(0, tau_q, 0),
                vec![UnitarySpec::Diffusion; tau_q],
                AnswerMap::Index,
            )
        }
        BaselineKind::GroverPseudoClassical { tau } => {
            let unitaries = (0..tau)
                .map(|t| UnitarySpec::ControlledOnZero {
                    control: t,
                    inner: Box::new(UnitarySpec::Diffusion),
                })
                .collect();
            HybridAlgorithm::new(
                StateVector::uniform(index_shape),
                Schedule::new(vec![OracleKind::PseudoClassical; tau]),
                unitaries,
                AnswerMap::Index,
            )
        }
        BaselineKind::ClassicalRandom { tau_c } => {
            let order = relabeling(n, seed);
            let unitaries = (1..=tau_c)
                .map(|t| {
                    if t < n {
                        UnitarySpec::ControlledOnZero {
                            control: t - 1,
                            inner: Box::new(UnitarySpec::IndexMatrix(swap_matrix(n, order[t - 1], order[t]))),
                        }
                    } else {
                        UnitarySpec::Identity
                    }
                })
                .collect();
            HybridAlgorithm::new(
                StateVector::basis(index_shape, order[0], 0)?,
                Schedule::classical_then_quantum(tau_c, 0, 0),
                unitaries,
                AnswerMap::Index,
            )
        }
        BaselineKind::ClassicalThenGrover { tau_c, tau_q } => {
            if tau_c >= n {
                return Err(Error::InvalidParameter(format!(
                    "classical-then-Grover needs tau_c < n, got tau_c={tau_c}, n={n}"
                )));
            }
            let order = relabeling(n, seed);
            let rest = &order[tau_c..];
            let (a, b) = e_minus();
            let initial = if tau_c == 0 {
                StateVector::uniform(index_shape).tensor_qubit(a, b)
            } else {
                StateVector::basis(index_shape, order[0], 0)?.tensor_qubit(a, b)
            };
            let mut unitaries = Vec::with_capacity(tau_c + tau_q);
            for t in 1..=tau_c {
                let inner = if t < tau_c {
                    swap_matrix(n, order[t - 1], order[t])
                } else {
                    householder_to_uniform(n, order[t - 1], rest)
                };
                unitaries.push(UnitarySpec::ControlledOnZero {
                    control: t,
                    inner: Box::new(UnitarySpec::IndexMatrix(inner)),
                });
            }
            let diffusion = diffusion_on(n, rest);
            unitaries.extend(std::iter::repeat_n(UnitarySpec::IndexMatrix(diffusion), tau_q));
            HybridAlgorithm::new(
                initial,
                Schedule::classical_then_quantum(tau_c, tau_q, 0),
                unitaries,
                AnswerMap::Index,
            )
        }
    }
}

/// `sin²((1 + 2τ_q) arcsin(1/√m))`.
pub fn grover_success(m: usize, tau_q: usize) -> f64 {
    ((1.0 + 2.0 * tau_q as f64) * (1.0 / (m as f64).sqrt()).asin())
        .sin()
        .powi(2)
}

/// Best finding success of any `τ_q`-query quantum algorithm:
/// `sin²((1 + 2τ_q) arcsin(1/√m))` while the angle stays below `π/2`, and 1
/// from there on, where a phase-adjusted iteration lands exactly on the
/// marked index.
pub fn optimal_quantum_success(m: usize, tau_q: usize) -> f64 {
    let angle = (1.0 + 2.0 * tau_q as f64) * (1.0 / (m as f64).sqrt()).asin();
    angle.min(std::f64::consts::FRAC_PI_2).sin().powi(2)
}

/// Exact success probability of the baseline as built above.
///
/// For the pseudo-classical Grover iteration this is
/// `1 - (1 - 1/n)(1 - 2/n)^{2τ}`: the first query finds the marked index
/// with probability `1/n`, and each diffusion followed by a query keeps
/// the not-found branch with probability `(1 - 2/n)²`, the last diffusion
/// leaving it on the marked index with the complementary weight.
pub fn closed_form(kind: BaselineKind, n: usize) -> f64 {
    let nf = n as f64;
    match kind {
        BaselineKind::GroverQuantum { tau_q } => grover_success(n, tau_q),
        BaselineKind::GroverPseudoClassical { tau } => 1.0 - (1.0 - 1.0 / nf) * (1.0 - 2.0 / nf).powi(2 * tau as i32),
        BaselineKind::ClassicalRandom { tau_c } => ((tau_c as f64 + 1.0) / nf).min(1.0),
        BaselineKind::ClassicalThenGrover { tau_c, tau_q } => {
            let found = tau_c as f64 / nf;
            found + (1.0 - found) * grover_success(n - tau_c, tau_q)
        }
    }
}

/// `1 - (1 - 1/n)²(1 - 2/n)^{2(τ-1)}` for `τ ≥ 1`.
///
/// This is `1 - A^{(τ)}` for the pseudo-classical Grover iteration, the
/// overlap-based quantity; it undercounts the success probability of the
/// iteration because it ignores the amplitude the final diffusion moves
/// onto the marked index.
pub fn pseudo_classical_grover_overlap_form(n: usize, tau: usize) -> f64 {
    let nf = n as f64;
    1.0 - (1.0 - 1.0 / nf).powi(2) * (1.0 - 2.0 / nf).powi(2 * (tau as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{success_finding, OracleMode};

    #[test]
    fn names_round_trip() {
        for name in BASELINE_NAMES {
            let k = BaselineKind::from_name(name, 2, 1).unwrap();
            assert_eq!(k.name(), name);
        }
        assert_eq!(
            "hybrid:3:2".parse::<BaselineKind>().unwrap(),
            BaselineKind::ClassicalThenGrover { tau_c: 3, tau_q: 2 }
        );
        assert!("nope".parse::<BaselineKind>().is_err());
        assert!("grover:x".parse::<BaselineKind>().is_err());
    }

    #[test]
    fn householder_and_diffusion_are_unitary() {
        let set = [1, 3, 4];
        for m in [householder_to_uniform(5, 0, &set), diffusion_on(5, &set)] {
            let d = m.adjoint() * &m - DMatrix::identity(5, 5);
            assert!(d.norm() < 1e-13);
        }
        let h = householder_to_uniform(5, 0, &set);
        let s = 1.0 / 3f64.sqrt();
        let col = h.column(0);
        for (i, z) in col.iter().enumerate() {
            let want = if set.contains(&i) { s } else { 0.0 };
            assert!((z - real(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn closed_form_spot_values() {
        assert!((closed_form(BaselineKind::GroverQuantum { tau_q: 1 }, 4) - 1.0).abs() < 1e-15);
        assert!((closed_form(BaselineKind::GroverQuantum { tau_q: 0 }, 9) - 1.0 / 9.0).abs() < 1e-15);
        assert!((closed_form(BaselineKind::GroverPseudoClassical { tau: 1 }, 4) - 13.0 / 16.0).abs() < 1e-15);
        assert!((pseudo_classical_grover_overlap_form(4, 1) - 7.0 / 16.0).abs() < 1e-15);
        assert!((closed_form(BaselineKind::ClassicalRandom { tau_c: 3 }, 8) - 0.5).abs() < 1e-15);
        assert_eq!(closed_form(BaselineKind::ClassicalRandom { tau_c: 9 }, 8), 1.0);
        for q in 0..4 {
            assert_eq!(
                closed_form(BaselineKind::ClassicalThenGrover { tau_c: 0, tau_q: q }, 16),
                closed_form(BaselineKind::GroverQuantum { tau_q: q }, 16)
            );
        }
    }

    #[test]
    fn small_simulations_match() {
        for kind in [
            BaselineKind::GroverQuantum { tau_q: 1 },
            BaselineKind::GroverPseudoClassical { tau: 2 },
            BaselineKind::ClassicalRandom { tau_c: 2 },
            BaselineKind::ClassicalThenGrover { tau_c: 2, tau_q: 1 },
        ] {
            let alg = build(kind, 5).unwrap();
            let got = success_finding(&alg, OracleMode::UseClassical).unwrap();
            assert!((got - closed_form(kind, 5)).abs() < 1e-12, "{kind}: {got}");
        }
    }

    #[test]
    fn hybrid_rejects_exhaustive_classical_phase() {
        assert!(build(BaselineKind::ClassicalThenGrover { tau_c: 4, tau_q: 0 }, 4).is_err());
    }
}
