use nalgebra::DMatrix;
use serde::Serialize;

use super::{RegisterShape, StateVector};
use crate::{Result, C64};

/// One weighted pure component of a mixed state.
///
/// `history` records the outcome label of every classical or
/// pseudo-classical call that produced this branch (the measured index for
/// the classical oracle, the measured bit for the pseudo-classical one).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub state: StateVector,
    pub history: Vec<u32>,
}

impl Branch {
    pub fn new(weight: f64, state: StateVector) -> Self {
        Self {
            weight,
            state,
            history: Vec::new(),
        }
    }
}

/// The mixed state `Σ w_i ψ_i ψ_i*` stored as its branches.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchEnsemble {
    shape: RegisterShape,
    branches: Vec<Branch>,
}

/// Flat summary of an ensemble, used in JSON traces.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub branches: usize,
    pub total_weight: f64,
}

impl BranchEnsemble {
    pub fn new(shape: RegisterShape, branches: Vec<Branch>) -> Result<Self> {
        for b in &branches {
            shape.ensure_same(&b.state.shape())?;
        }
        Ok(Self { shape, branches })
    }

    pub(crate) fn from_parts(shape: RegisterShape, branches: Vec<Branch>) -> Self {
        Self { shape, branches }
    }

    /// A single branch of weight one.
    pub fn pure(state: StateVector) -> Self {
        Self {
            shape: state.shape(),
            branches: vec![Branch::new(1.0, state)],
        }
    }

    #[inline]
    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    #[inline]
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn into_branches(self) -> Vec<Branch> {
        self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// `Σ w_i ‖ψ_i‖²`, the trace of the represented operator.
    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.weight * b.state.norm_squared()).sum()
    }

    pub fn summary(&self) -> EnsembleSummary {
        EnsembleSummary {
            branches: self.len(),
            total_weight: self.total_weight(),
        }
    }

    /// The same operator as at most `dim` orthogonal branches: the
    /// eigen-decomposition of `Σ w_i ψ_i ψ_i*`. Nonpositive round-off
    /// eigenvalues are dropped and histories are not kept.
    pub fn spectral(&self) -> Self {
        let dim = self.shape.dim();
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        for b in &self.branches {
            let a = b.state.amplitudes();
            rho.gerc(C64::new(b.weight, 0.0), a, a, C64::new(1.0, 0.0));
        }
        let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let eig = rho.symmetric_eigen();
        let branches = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.0)
            .map(|(j, &l)| {
                Branch::new(
                    l,
                    StateVector::from_parts(self.shape, eig.eigenvectors.column(j).into_owned()),
                )
            })
            .collect();
        Self {
            shape: self.shape,
            branches,
        }
    }

    /// Probability of each flat standard-basis outcome.
    pub fn outcome_probabilities(&self) -> Vec<f64> {
        let mut probs = vec![0.0; self.shape.dim()];
        for b in &self.branches {
            for (p, z) in b.state.amplitudes().iter().enumerate() {
                probs[p] += b.weight * z.norm_sqr();
            }
        }
        probs
    }
}
