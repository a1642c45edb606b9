use nalgebra::{DMatrix, DVector};

use super::{BranchEnsemble, RegisterShape, StateVector, OPERATOR_TOL};
use crate::{Error, Result, C64};

/// A positive semidefinite operator with trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    shape: RegisterShape,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Validates Hermiticity, trace and positivity (all at `1e-10`), then
    /// symmetrizes.
    pub fn new(shape: RegisterShape, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != shape.dim() || matrix.ncols() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        if let Some(pos) = matrix.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > OPERATOR_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let matrix = symmetrize(&matrix);
        let tr = matrix.trace().re;
        if !(-OPERATOR_TOL..=1.0 + OPERATOR_TOL).contains(&tr) {
            return Err(Error::InvalidTrace(tr));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -OPERATOR_TOL {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self { shape, matrix })
    }

    /// Trusted constructor for outputs of CPTP maps built inside the crate.
    pub(crate) fn from_parts(shape: RegisterShape, matrix: DMatrix<C64>) -> Self {
        Self {
            shape,
            matrix: symmetrize(&matrix),
        }
    }

    /// `ψψ*`.
    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        Self {
            shape: state.shape(),
            matrix: a * a.adjoint(),
        }
    }

    #[inline]
    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Diagonal of the matrix: standard-basis outcome probabilities.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `Tr[Π ρ]` for the rank-one projector `Π = ψψ*/‖ψ‖²`.
    pub fn projector_probability(&self, psi: &StateVector) -> Result<f64> {
        self.shape.ensure_same(&psi.shape())?;
        let a = psi.amplitudes();
        let nrm = a.norm_squared();
        if nrm == 0.0 {
            return Ok(0.0);
        }
        Ok(a.dotc(&(&self.matrix * a)).re / nrm)
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetrize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues below this multiple of `dim · ε · λ_max` are round-off and
/// are set to zero before taking square roots.
const EIGEN_FLOOR: f64 = 16.0;

fn floored_sqrt(eigs: &DVector<f64>) -> DVector<f64> {
    let top = eigs.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let floor = EIGEN_FLOOR * eigs.len() as f64 * f64::EPSILON * top;
    eigs.map(|l| if l > floor { l.sqrt() } else { 0.0 })
}

/// Positive square root of a PSD matrix; round-off eigenvalues are clipped
/// to zero.
fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = symmetrize(m).symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&floored_sqrt(&eig.eigenvalues).map(|l| C64::new(l, 0.0)));
    v * d * v.adjoint()
}

/// `D(ρ, σ) = Tr|ρ - σ| / 2`, via the eigenvalues of `ρ - σ`.
pub fn trace_distance(r: &DensityOperator, s: &DensityOperator) -> Result<f64> {
    r.shape.ensure_same(&s.shape)?;
    let diff = &r.matrix - &s.matrix;
    let dev = hermitian_deviation(&diff);
    if dev > OPERATOR_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let eigs = symmetrize(&diff).symmetric_eigenvalues();
    let d = eigs.iter().map(|l| l.abs()).sum::<f64>() / 2.0;
    Ok(d.clamp(0.0, 1.0))
}

/// `F(ρ, σ) = (Tr √(√ρ σ √ρ))²`.
pub fn fidelity(r: &DensityOperator, s: &DensityOperator) -> Result<f64> {
    r.shape.ensure_same(&s.shape)?;
    let sr = psd_sqrt(&r.matrix);
    let m = symmetrize(&(&sr * &s.matrix * &sr));
    let root_trace: f64 = floored_sqrt(&m.symmetric_eigenvalues()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `F(ρ, ψψ*) = ψ*ρψ`.
pub fn fidelity_with_pure(r: &DensityOperator, psi: &StateVector) -> Result<f64> {
    r.shape.ensure_same(&psi.shape())?;
    let a = psi.amplitudes();
    Ok(a.dotc(&(&r.matrix * a)).re.clamp(0.0, 1.0))
}

/// `Σ w_i ψ_i ψ_i*`.
pub fn ensemble_density(e: &BranchEnsemble) -> Result<DensityOperator> {
    let shape = e.shape();
    let dim = shape.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for b in e.branches() {
        shape.ensure_same(&b.state.shape())?;
        let a = b.state.amplitudes();
        m.gerc(C64::new(b.weight, 0.0), a, a, C64::new(1.0, 0.0));
    }
    Ok(DensityOperator::from_parts(shape, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::Branch;

    fn shape(n: usize) -> RegisterShape {
        RegisterShape::new(n, 0).unwrap()
    }

    fn pure(n: usize, k: usize) -> DensityOperator {
        DensityOperator::from_pure(&StateVector::basis(shape(n), k, 0).unwrap())
    }

    #[test]
    fn identical_states() {
        let u = DensityOperator::from_pure(&StateVector::uniform(shape(4)));
        assert!(trace_distance(&u, &u).unwrap() < 1e-12);
        assert!((fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = pure(4, 0);
        let b = pure(4, 1);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityOperator::new(shape(2), m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_negative_eigenvalue_and_bad_trace() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(1.2, 0.0);
        m[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(matches!(
            DensityOperator::new(shape(2), m.clone()),
            Err(Error::NotPsd(_))
        ));
        m[(1, 1)] = C64::new(0.2, 0.0);
        assert!(matches!(DensityOperator::new(shape(2), m), Err(Error::InvalidTrace(_))));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = pure(2, 0);
        let b = pure(3, 0);
        assert!(trace_distance(&a, &b).is_err());
        assert!(fidelity(&a, &b).is_err());
    }

    #[test]
    fn single_branch_is_rank_one_projector() {
        let s = shape(3);
        let u = StateVector::uniform(s);
        let e = BranchEnsemble::pure(u.clone());
        let rho = ensemble_density(&e).unwrap();
        assert!((rho.matrix() - DensityOperator::from_pure(&u).matrix()).norm() < 1e-15);
        let sq = rho.matrix() * rho.matrix();
        assert!((sq - rho.matrix()).norm() < 1e-14);
    }

    #[test]
    fn orthogonal_branches_give_maximally_mixed_span() {
        let s = shape(4);
        let e = BranchEnsemble::new(
            s,
            vec![
                Branch::new(0.5, StateVector::basis(s, 1, 0).unwrap()),
                Branch::new(0.5, StateVector::basis(s, 2, 0).unwrap()),
            ],
        )
        .unwrap();
        let rho = ensemble_density(&e).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert_eq!(rho.diagonal_probabilities(), vec![0.0, 0.5, 0.5, 0.0]);
        assert_eq!(rho.matrix()[(1, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn ensemble_density_is_hermitian_for_complex_states() {
        let s = shape(2);
        let psi = StateVector::new(s, vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let rho = ensemble_density(&BranchEnsemble::pure(psi.clone())).unwrap();
        // ρ_{01} = ψ_0 ψ_1^* = 0.6 * (-0.8i)
        assert!((rho.matrix()[(0, 1)] - C64::new(0.0, -0.48)).norm() < 1e-15);
        assert!((rho.matrix()[(1, 0)] - C64::new(0.0, 0.48)).norm() < 1e-15);
    }
}
