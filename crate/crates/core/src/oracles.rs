//! The classical (`O`), pseudo-classical (`P`) and quantum (`Q`) oracles.
//!
//! Channels act branch-wise on a [`BranchEnsemble`]: each output branch
//! stores a renormalized state and carries its probability in the weight.
//! Output order is fixed by (input branch, outcome label), independent of
//! how the work is scheduled.
//!
//! Indices are 0-based throughout: the marked string with a one at
//! position `k` is [`InputString::marked`]`(n, k)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::par;
use crate::statespace::{Branch, BranchEnsemble, RegisterShape, StateVector};
use crate::{Error, Result, C64};

/// Default pruning tolerance applied after classical calls.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// An input `x ∈ {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputString {
    bits: Vec<bool>,
}

impl InputString {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.len() < 2 {
            return Err(Error::InvalidRegister(bits.len()));
        }
        Ok(Self { bits })
    }

    /// `0^n`.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_bits(vec![false; n])
    }

    /// The weight-one string marking index `k`.
    pub fn marked(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        let mut bits = vec![false; n];
        bits[k] = true;
        Self::from_bits(bits)
    }

    /// `κ = 0` is `0^n`; `κ = k + 1` marks index `k`.
    pub fn kappa(n: usize, kappa: usize) -> Result<Self> {
        match kappa {
            0 => Self::zeros(n),
            k => Self::marked(n, k - 1),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn hamming_weight(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub(crate) fn ensure_matches(&self, shape: RegisterShape) -> Result<()> {
        if self.n() != shape.n() {
            return Err(Error::DimensionMismatch {
                expected: shape.n(),
                got: self.n(),
            });
        }
        Ok(())
    }
}

impl FromStr for InputString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "input strings are binary, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(bits)
    }
}

impl fmt::Display for InputString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Which oracle a step calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OracleKind {
    Classical,
    PseudoClassical,
    /// The quantum oracle with the named existing workspace qubit as target.
    Quantum {
        target: usize,
    },
}

impl OracleKind {
    /// Classical and pseudo-classical calls both count towards `τ_c`.
    pub fn is_classical(&self) -> bool {
        !matches!(self, OracleKind::Quantum { .. })
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleKind::Classical => f.write_str("C"),
            OracleKind::PseudoClassical => f.write_str("P"),
            OracleKind::Quantum { target } => write!(f, "Q:{target}"),
        }
    }
}

/// `O_{x,i} = |i⟩⟨i| ⊗ |x_i⟩` as a `2n × n` matrix (target least significant).
pub fn kraus_classical(x: &InputString, i: usize) -> Result<DMatrix<C64>> {
    let n = x.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let mut m = DMatrix::zeros(2 * n, n);
    m[(2 * i + usize::from(x.bit(i)), i)] = C64::new(1.0, 0.0);
    Ok(m)
}

/// `P_{x,b} = Σ_{i: x_i = b} |i⟩⟨i| ⊗ |b⟩` as a `2n × n` matrix.
pub fn kraus_pseudo_classical(x: &InputString, b: bool) -> DMatrix<C64> {
    let n = x.n();
    let mut m = DMatrix::zeros(2 * n, n);
    for i in (0..n).filter(|&i| x.bit(i) == b) {
        m[(2 * i + usize::from(b), i)] = C64::new(1.0, 0.0);
    }
    m
}

/// `Q_x = Σ_{i,b} |i⟩⟨i| ⊗ |b ⊕ x_i⟩⟨b|` as a `2n × 2n` matrix.
pub fn quantum_unitary(x: &InputString) -> DMatrix<C64> {
    let n = x.n();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for b in 0..2 {
            let out = b ^ usize::from(x.bit(i));
            m[(2 * i + out, 2 * i + b)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// `P_{x,b} ψ` (unnormalized), with the new qubit appended.
pub fn pseudo_classical_component(x: &InputString, psi: &StateVector, b: bool) -> Result<StateVector> {
    let shape = psi.shape();
    x.ensure_matches(shape)?;
    let mut out = psi.clone();
    let w = shape.workspace_dim();
    for i in (0..shape.n()).filter(|&i| x.bit(i) != b) {
        out.amplitudes_mut().rows_mut(i * w, w).fill(C64::new(0.0, 0.0));
    }
    Ok(out.append_qubit(b))
}

/// `Q_x ψ` with the given workspace qubit as target.
pub fn quantum_apply(x: &InputString, psi: &StateVector, target: usize) -> Result<StateVector> {
    let shape = psi.shape();
    x.ensure_matches(shape)?;
    let mask = shape.qubit_mask(target)?;
    let w = shape.workspace_dim();
    let mut out = psi.clone();
    let amps = out.amplitudes_mut();
    for i in (0..shape.n()).filter(|&i| x.bit(i)) {
        for ws in (0..w).filter(|ws| ws & mask == 0) {
            amps.swap_rows(i * w + ws, i * w + (ws | mask));
        }
    }
    Ok(out)
}

fn renormalized(weight: f64, component: StateVector, parent: &Branch, label: u32) -> Option<Branch> {
    let mass = component.norm_squared();
    if mass == 0.0 {
        return None;
    }
    let mut history = parent.history.clone();
    history.push(label);
    let parent_mass = parent.state.norm_squared();
    if (mass - parent_mass).abs() <= 8.0 * f64::EPSILON * parent_mass {
        // nothing was projected away; keep amplitudes bit-for-bit
        return Some(Branch {
            weight,
            state: component,
            history,
        });
    }
    Some(Branch {
        weight: weight * mass,
        state: component.scaled(C64::new(1.0 / mass.sqrt(), 0.0)),
        history,
    })
}

fn split_branches<F>(e: &BranchEnsemble, split: F) -> Result<BranchEnsemble>
where
    F: Fn(&Branch) -> Result<Vec<Branch>> + Sync + Send,
{
    let parts = par::try_map(e.branches(), split)?;
    let shape = e.shape().with_qubit();
    Ok(BranchEnsemble::from_parts(shape, parts.into_iter().flatten().collect()))
}

/// The classical oracle: measures the index register and appends `|x_i⟩`.
///
/// Each branch splits into at most `n` branches ordered by measured index.
pub fn apply_classical(x: &InputString, e: &BranchEnsemble) -> Result<BranchEnsemble> {
    let shape = e.shape();
    x.ensure_matches(shape)?;
    split_branches(e, |b| {
        Ok((0..shape.n())
            .filter_map(|i| {
                let comp = b.state.project_index(i).append_qubit(x.bit(i));
                renormalized(b.weight, comp, b, i as u32)
            })
            .collect())
    })
}

/// The pseudo-classical oracle: appends `|x_i⟩` coherently and measures only
/// that qubit. Each branch splits into at most two (outcome 0 first).
pub fn apply_pseudo_classical(x: &InputString, e: &BranchEnsemble) -> Result<BranchEnsemble> {
    let shape = e.shape();
    x.ensure_matches(shape)?;
    split_branches(e, |b| {
        let mut out = Vec::with_capacity(2);
        for bit in [false, true] {
            let comp = pseudo_classical_component(x, &b.state, bit)?;
            out.extend(renormalized(b.weight, comp, b, u32::from(bit)));
        }
        Ok(out)
    })
}

/// The quantum oracle on the given target qubit; weights are unchanged.
pub fn apply_quantum(x: &InputString, e: &BranchEnsemble, target: usize) -> Result<BranchEnsemble> {
    let shape = e.shape();
    x.ensure_matches(shape)?;
    shape.qubit_mask(target)?;
    let branches = par::try_map(e.branches(), |b| {
        Ok(Branch {
            weight: b.weight,
            state: quantum_apply(x, &b.state, target)?,
            history: b.history.clone(),
        })
    })?;
    Ok(BranchEnsemble::from_parts(shape, branches))
}

/// Result of [`prune`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pruned {
    pub ensemble: BranchEnsemble,
    /// Total weight of the removed branches.
    pub removed_mass: f64,
}

/// Drops branches whose weight is below `tol`; surviving weights are not
/// renormalized.
pub fn prune(e: &BranchEnsemble, tol: f64) -> Result<Pruned> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "prune tolerance must be >= 0, got {tol}"
        )));
    }
    let mut removed_mass = 0.0;
    let mut kept = Vec::with_capacity(e.len());
    for b in e.branches() {
        let mass = b.weight * b.state.norm_squared();
        if mass < tol {
            removed_mass += mass;
        } else {
            kept.push(b.clone());
        }
    }
    Ok(Pruned {
        ensemble: BranchEnsemble::from_parts(e.shape(), kept),
        removed_mass,
    })
}
