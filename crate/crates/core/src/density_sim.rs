//! Reference simulator that evolves the full density matrix through
//! Kraus sums. Slow and memory hungry, but it shares no code path with the
//! branch simulator beyond the unitary matrices themselves.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::oracles::{InputString, OracleKind};
use crate::runner::{HybridAlgorithm, OracleMode};
use crate::statespace::{DensityOperator, RegisterShape};
use crate::{Error, Result, C64};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Kraus operators of one oracle call lifted to the full memory of `shape`.
/// Classical calls map `n 2^ℓ` to `n 2^{ℓ+1}` dimensions.
pub fn lifted_kraus(
    x: &InputString,
    shape: RegisterShape,
    kind: OracleKind,
    mode: OracleMode,
) -> Result<Vec<DMatrix<C64>>> {
    let n = shape.n();
    let w = shape.workspace_dim();
    if x.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.n(),
        });
    }
    let bit = |i: usize| usize::from(x.bit(i));
    match (kind, mode) {
        (OracleKind::Quantum { target }, _) => {
            let mask = shape.qubit_mask(target)?;
            let mut m = DMatrix::zeros(n * w, n * w);
            for i in 0..n {
                for ws in 0..w {
                    let out = if x.bit(i) { ws ^ mask } else { ws };
                    m[(i * w + out, i * w + ws)] = one();
                }
            }
            Ok(vec![m])
        }
        (OracleKind::Classical, OracleMode::UseClassical) => Ok((0..n)
            .map(|i| {
                let mut m = DMatrix::zeros(2 * n * w, n * w);
                for ws in 0..w {
                    m[(i * 2 * w + 2 * ws + bit(i), i * w + ws)] = one();
                }
                m
            })
            .collect()),
        _ => Ok((0..2)
            .map(|b| {
                let mut m = DMatrix::zeros(2 * n * w, n * w);
                for i in (0..n).filter(|&i| bit(i) == b) {
                    for ws in 0..w {
                        m[(i * 2 * w + 2 * ws + b, i * w + ws)] = one();
                    }
                }
                m
            })
            .collect()),
    }
}

/// Final density operator of `alg` on input `x`.
pub fn final_density(alg: &HybridAlgorithm, x: &InputString, mode: OracleMode) -> Result<DensityOperator> {
    let psi = alg.initial_state().amplitudes();
    let mut rho = psi * psi.adjoint();
    let mut shape = alg.initial_state().shape();
    for (kind, u) in alg.schedule().steps().iter().zip(alg.unitaries()) {
        let kraus = lifted_kraus(x, shape, *kind, mode)?;
        let out_dim = kraus[0].nrows();
        let mut next = DMatrix::zeros(out_dim, out_dim);
        for k in &kraus {
            next += k * &rho * k.adjoint();
        }
        if kind.is_classical() {
            shape = shape.with_qubit();
        }
        let um = u.to_matrix(shape)?;
        rho = &um * next * um.adjoint();
    }
    DensityOperator::new(shape, rho)
}

/// Answer distribution read off the diagonal of the final density matrix.
pub fn answer_distribution(alg: &HybridAlgorithm, x: &InputString, mode: OracleMode) -> Result<BTreeMap<u32, f64>> {
    let rho = final_density(alg, x, mode)?;
    let shape = rho.shape();
    let mut dist = BTreeMap::new();
    for (p, prob) in rho.diagonal_probabilities().into_iter().enumerate() {
        *dist.entry(alg.answer_map().answer(shape, p)).or_insert(0.0) += prob;
    }
    Ok(dist)
}

/// Average finding success computed from density matrices.
pub fn success_finding(alg: &HybridAlgorithm, mode: OracleMode) -> Result<f64> {
    let n = alg.n();
    let mut total = 0.0;
    for k in 0..n {
        let dist = answer_distribution(alg, &InputString::marked(n, k)?, mode)?;
        total += dist.get(&(k as u32)).copied().unwrap_or(0.0);
    }
    Ok(total / n as f64)
}

/// Worst-case detection success computed from density matrices.
pub fn success_detection(alg: &HybridAlgorithm, mode: OracleMode) -> Result<f64> {
    let n = alg.n();
    let mut worst = f64::INFINITY;
    for kappa in 0..=n {
        let dist = answer_distribution(alg, &InputString::kappa(n, kappa)?, mode)?;
        worst = worst.min(dist.get(&u32::from(kappa > 0)).copied().unwrap_or(0.0));
    }
    Ok(worst)
}
