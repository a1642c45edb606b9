//! Register bookkeeping, pure and mixed states, and state distances.
//!
//! Layout: the index register is the most significant tensor factor and
//! workspace qubits follow in creation order, each newly appended qubit
//! becoming the least significant one. The amplitude of `|i⟩ ⊗ |w⟩` sits at
//! position `i * 2^ℓ + w`, and workspace qubit `q` (0 = oldest) is bit
//! `ℓ - 1 - q` of `w`.

mod density;
mod ensemble;
mod vector;

use std::fmt;

use serde::Serialize;

use crate::{Error, Result};

pub use density::{ensemble_density, fidelity, fidelity_with_pure, trace_distance, DensityOperator};
pub use ensemble::{Branch, BranchEnsemble, EnsembleSummary};
pub use vector::{inner, StateVector};

/// Tolerance on Hermiticity, trace and eigenvalue checks.
pub const OPERATOR_TOL: f64 = 1e-10;

/// Shape of the memory: an `n`-dimensional index register plus
/// `workspace_qubits` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RegisterShape {
    n: usize,
    workspace_qubits: usize,
}

impl RegisterShape {
    pub fn new(n: usize, workspace_qubits: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRegister(n));
        }
        Ok(Self { n, workspace_qubits })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn workspace_qubits(&self) -> usize {
        self.workspace_qubits
    }

    #[inline]
    pub fn workspace_dim(&self) -> usize {
        1 << self.workspace_qubits
    }

    /// `n * 2^ℓ`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n << self.workspace_qubits
    }

    /// The shape after one more qubit is appended.
    pub fn with_qubit(&self) -> Self {
        Self {
            n: self.n,
            workspace_qubits: self.workspace_qubits + 1,
        }
    }

    #[inline]
    pub fn offset(&self, index: usize, workspace: usize) -> usize {
        index * self.workspace_dim() + workspace
    }

    /// Splits a flat position into `(index, workspace bits)`.
    #[inline]
    pub fn split(&self, position: usize) -> (usize, usize) {
        (position >> self.workspace_qubits, position & (self.workspace_dim() - 1))
    }

    /// Bit mask of workspace qubit `q` inside the workspace part of a position.
    pub fn qubit_mask(&self, q: usize) -> Result<usize> {
        if q >= self.workspace_qubits {
            return Err(Error::MissingQubit {
                target: q,
                available: self.workspace_qubits,
            });
        }
        Ok(1 << (self.workspace_qubits - 1 - q))
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                left: *self,
                right: *other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for RegisterShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, workspace={}", self.n, self.workspace_qubits)
    }
}
