use nalgebra::DVector;

use super::{RegisterShape, OPERATOR_TOL};
use crate::{Error, Result, C64};

/// A (possibly sub-normalized) pure state over index ⊗ workspace.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    shape: RegisterShape,
    amps: DVector<C64>,
}

/// `⟨u, v⟩`, conjugate-linear in `u`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<C64> {
    u.shape.ensure_same(&v.shape)?;
    Ok(u.amps.dotc(&v.amps))
}

impl StateVector {
    pub fn new(shape: RegisterShape, amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_dvector(shape, DVector::from_vec(amplitudes))
    }

    pub fn from_dvector(shape: RegisterShape, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                got: amps.len(),
            });
        }
        if let Some(pos) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let norm = amps.norm();
        if norm > 1.0 + OPERATOR_TOL {
            return Err(Error::NormTooLarge(norm));
        }
        Ok(Self { shape, amps })
    }

    /// Internal constructor for results of norm-non-increasing maps.
    pub(crate) fn from_parts(shape: RegisterShape, amps: DVector<C64>) -> Self {
        debug_assert_eq!(amps.len(), shape.dim());
        Self { shape, amps }
    }

    pub fn zero(shape: RegisterShape) -> Self {
        Self::from_parts(shape, DVector::zeros(shape.dim()))
    }

    /// `|index⟩ ⊗ |workspace⟩`.
    pub fn basis(shape: RegisterShape, index: usize, workspace: usize) -> Result<Self> {
        if index >= shape.n() {
            return Err(Error::IndexOutOfRange { index, n: shape.n() });
        }
        if workspace >= shape.workspace_dim() {
            return Err(Error::IndexOutOfRange {
                index: workspace,
                n: shape.workspace_dim(),
            });
        }
        let mut v = Self::zero(shape);
        v.amps[shape.offset(index, workspace)] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// Uniform superposition over the index register, workspace all zero.
    pub fn uniform(shape: RegisterShape) -> Self {
        let mut v = Self::zero(shape);
        let a = C64::new(1.0 / (shape.n() as f64).sqrt(), 0.0);
        for i in 0..shape.n() {
            v.amps[shape.offset(i, 0)] = a;
        }
        v
    }

    #[inline]
    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    #[inline]
    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn amplitude(&self, index: usize, workspace: usize) -> C64 {
        self.amps[self.shape.offset(index, workspace)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_parts(self.shape, &self.amps * factor)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self::from_parts(self.shape, &self.amps - &other.amps))
    }

    /// `‖Π_i ψ‖²` where `Π_i = |i⟩⟨i| ⊗ I`.
    pub fn index_weight(&self, index: usize) -> f64 {
        let w = self.shape.workspace_dim();
        let start = index * w;
        self.amps.rows(start, w).norm_squared()
    }

    /// Probabilities of the standard-basis outcomes of the index register.
    pub fn index_distribution(&self) -> Vec<f64> {
        (0..self.shape.n()).map(|i| self.index_weight(i)).collect()
    }

    /// `(|i⟩⟨i| ⊗ I) ψ`.
    pub fn project_index(&self, index: usize) -> Self {
        let w = self.shape.workspace_dim();
        let mut out = DVector::zeros(self.amps.len());
        out.rows_mut(index * w, w).copy_from(&self.amps.rows(index * w, w));
        Self::from_parts(self.shape, out)
    }

    /// `((I - |i⟩⟨i|) ⊗ I) ψ`.
    pub fn project_out_index(&self, index: usize) -> Self {
        let w = self.shape.workspace_dim();
        let mut out = self.amps.clone();
        out.rows_mut(index * w, w).fill(C64::new(0.0, 0.0));
        Self::from_parts(self.shape, out)
    }

    /// `ψ ⊗ (a|0⟩ + b|1⟩)`: appends a qubit as the new least significant factor.
    pub fn tensor_qubit(&self, a: C64, b: C64) -> Self {
        let shape = self.shape.with_qubit();
        let mut out = DVector::zeros(shape.dim());
        for (p, z) in self.amps.iter().enumerate() {
            out[2 * p] = z * a;
            out[2 * p + 1] = z * b;
        }
        Self::from_parts(shape, out)
    }

    /// `ψ ⊗ |bit⟩`.
    pub fn append_qubit(&self, bit: bool) -> Self {
        let shape = self.shape.with_qubit();
        let mut out = DVector::zeros(shape.dim());
        let b = usize::from(bit);
        for (p, z) in self.amps.iter().enumerate() {
            out[2 * p + b] = *z;
        }
        Self::from_parts(shape, out)
    }

    /// Projects workspace qubit `q` onto `|bit⟩`, keeping it in the register.
    pub fn project_qubit(&self, q: usize, bit: bool) -> Result<Self> {
        let mask = self.shape.qubit_mask(q)?;
        let mut out = self.amps.clone();
        for (p, z) in out.iter_mut().enumerate() {
            if ((p & mask) != 0) != bit {
                *z = C64::new(0.0, 0.0);
            }
        }
        Ok(Self::from_parts(self.shape, out))
    }
}
