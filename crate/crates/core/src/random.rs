//! Seeded generators for states, unitaries and whole hybrid algorithms.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::oracles::OracleKind;
use crate::runner::{AnswerMap, HybridAlgorithm, Schedule, UnitarySpec};
use crate::statespace::{DensityOperator, RegisterShape, StateVector};
use crate::{Result, C64};

/// Unitaries up to this dimension are drawn as one dense Haar matrix.
pub const MAX_DENSE_DIM: usize = 64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal pushed back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Uniformly random unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, shape: RegisterShape) -> StateVector {
    let v = DVector::from_fn(shape.dim(), |_, _| gaussian(rng));
    let v = &v / C64::new(v.norm(), 0.0);
    StateVector::from_parts(shape, v)
}

/// Random density operator of the given rank with unit trace.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, shape: RegisterShape, rank: usize) -> Result<DensityOperator> {
    let g = gaussian_matrix(rng, shape.dim(), rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(shape, m / C64::new(tr, 0.0))
}

/// Random unitary for the given shape: a dense Haar matrix when the full
/// dimension is small, otherwise two layers each acting on the index
/// register and up to three randomly chosen workspace qubits.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, shape: RegisterShape) -> UnitarySpec {
    if shape.dim() <= MAX_DENSE_DIM {
        return UnitarySpec::Explicit(haar_unitary(rng, shape.dim()));
    }
    let l = shape.workspace_qubits();
    let mut width = l.min(3);
    while width > 0 && shape.n() << width > MAX_DENSE_DIM {
        width -= 1;
    }
    let layers = (0..2)
        .map(|_| {
            let qubits = sample(rng, l, width).into_vec();
            let matrix = haar_unitary(rng, shape.n() << width);
            UnitarySpec::Embedded { qubits, matrix }
        })
        .collect();
    UnitarySpec::Sequence(layers)
}

/// Random oracle-kind string of length `tau`, each step classical or
/// quantum with equal probability; quantum targets are uniform over the
/// qubits existing at that point.
pub fn random_schedule<R: Rng + ?Sized>(rng: &mut R, tau: usize, l0: usize) -> Schedule {
    let mut qubits = l0;
    let mut steps = Vec::with_capacity(tau);
    for _ in 0..tau {
        if qubits == 0 || rng.random_bool(0.5) {
            steps.push(OracleKind::Classical);
            qubits += 1;
        } else {
            steps.push(OracleKind::Quantum {
                target: rng.random_range(0..qubits),
            });
        }
    }
    Schedule::new(steps)
}

/// Random finding algorithm: random initial state on `ℓ_0` workspace
/// qubits, random schedule of length `tau`, random unitaries, index answer.
pub fn random_algorithm<R: Rng + ?Sized>(rng: &mut R, n: usize, l0: usize, tau: usize) -> Result<HybridAlgorithm> {
    let shape = RegisterShape::new(n, l0)?;
    let initial = random_state(rng, shape);
    let schedule = random_schedule(rng, tau, l0);
    let mut cur = shape;
    let mut unitaries = Vec::with_capacity(tau);
    for kind in schedule.steps() {
        if kind.is_classical() {
            cur = cur.with_qubit();
        }
        unitaries.push(random_unitary(rng, cur));
    }
    HybridAlgorithm::new(initial, schedule, unitaries, AnswerMap::Index)
}
