use nalgebra::{DMatrix, DVector};

use crate::statespace::{RegisterShape, StateVector};
use crate::{Result, C64};

/// Deviation tolerated when checking that a matrix is unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// An input-independent unitary applied after an oracle call.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitarySpec {
    Identity,
    /// `(2uu* - I) ⊗ I` with `u` the uniform superposition on the index register.
    Diffusion,
    /// `(I - (1 - e^{iθ}) uu*) ⊗ I`: multiplies the uniform direction by
    /// `e^{iθ}` and leaves its complement alone. Acts nontrivially only on
    /// the plane spanned by `u` and the state's component orthogonal to `u`;
    /// `θ = π` is the Grover diffusion up to a global sign.
    PhaseRotation {
        angle: f64,
    },
    /// `M ⊗ I` for an `n × n` unitary `M`.
    IndexMatrix(DMatrix<C64>),
    /// A full `n 2^ℓ × n 2^ℓ` unitary.
    Explicit(DMatrix<C64>),
    /// A unitary on the index register together with the listed workspace
    /// qubits (index most significant, then qubits in list order).
    Embedded {
        qubits: Vec<usize>,
        matrix: DMatrix<C64>,
    },
    /// Applies `inner` on the subspace where workspace qubit `control` is
    /// `|0⟩`, identity elsewhere. `inner` must not act on `control`.
    ControlledOnZero {
        control: usize,
        inner: Box<UnitarySpec>,
    },
    /// Applies the elements in order.
    Sequence(Vec<UnitarySpec>),
}

fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let d = m.adjoint() * m - DMatrix::identity(m.nrows(), m.ncols());
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_unitary(m: &DMatrix<C64>, dim: usize, what: &str) -> std::result::Result<(), String> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(format!("{what} must be {dim}x{dim}, got {}x{}", m.nrows(), m.ncols()));
    }
    let dev = unitarity_deviation(m);
    if dev > UNITARY_TOL {
        return Err(format!("{what} is not unitary (deviation {dev:e})"));
    }
    Ok(())
}

/// Precomputed workspace offsets for an embedded operator.
struct EmbeddedLayout {
    sub: Vec<usize>,
    rest: Vec<usize>,
}

impl EmbeddedLayout {
    fn new(shape: RegisterShape, qubits: &[usize]) -> Result<Self> {
        let masks = qubits
            .iter()
            .map(|&q| shape.qubit_mask(q))
            .collect::<Result<Vec<_>>>()?;
        let m = masks.len();
        let sub = (0..1usize << m)
            .map(|s| (0..m).filter(|j| s >> (m - 1 - j) & 1 == 1).map(|j| masks[j]).sum())
            .collect();
        let used: usize = masks.iter().sum();
        let rest = (0..shape.workspace_dim()).filter(|w| w & used == 0).collect();
        Ok(Self { sub, rest })
    }
}

impl UnitarySpec {
    /// Whether the operator can change workspace qubit `q`.
    pub fn touches_qubit(&self, q: usize) -> bool {
        match self {
            UnitarySpec::Identity
            | UnitarySpec::Diffusion
            | UnitarySpec::PhaseRotation { .. }
            | UnitarySpec::IndexMatrix(_) => false,
            UnitarySpec::Explicit(_) => true,
            UnitarySpec::Embedded { qubits, .. } => qubits.contains(&q),
            UnitarySpec::ControlledOnZero { control, inner } => *control == q || inner.touches_qubit(q),
            UnitarySpec::Sequence(items) => items.iter().any(|u| u.touches_qubit(q)),
        }
    }

    /// Checks dimensions and unitarity for a state of the given shape.
    pub fn validate(&self, shape: RegisterShape) -> std::result::Result<(), String> {
        match self {
            UnitarySpec::Identity | UnitarySpec::Diffusion => Ok(()),
            UnitarySpec::PhaseRotation { angle } => {
                if angle.is_finite() {
                    Ok(())
                } else {
                    Err(format!("phase rotation angle {angle} is not finite"))
                }
            }
            UnitarySpec::IndexMatrix(m) => check_unitary(m, shape.n(), "index matrix"),
            UnitarySpec::Explicit(m) => check_unitary(m, shape.dim(), "explicit matrix"),
            UnitarySpec::Embedded { qubits, matrix } => {
                for (j, q) in qubits.iter().enumerate() {
                    if *q >= shape.workspace_qubits() {
                        return Err(format!(
                            "embedded qubit {q} does not exist ({} available)",
                            shape.workspace_qubits()
                        ));
                    }
                    if qubits[..j].contains(q) {
                        return Err(format!("embedded qubit {q} listed twice"));
                    }
                }
                check_unitary(matrix, shape.n() << qubits.len(), "embedded matrix")
            }
            UnitarySpec::ControlledOnZero { control, inner } => {
                if *control >= shape.workspace_qubits() {
                    return Err(format!(
                        "control qubit {control} does not exist ({} available)",
                        shape.workspace_qubits()
                    ));
                }
                if inner.touches_qubit(*control) {
                    return Err(format!("controlled operator acts on its own control qubit {control}"));
                }
                inner.validate(shape)
            }
            UnitarySpec::Sequence(items) => items.iter().try_for_each(|u| u.validate(shape)),
        }
    }

    /// Applies the operator to a state. The operator must be valid for the
    /// state's shape.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let shape = psi.shape();
        let n = shape.n();
        let w = shape.workspace_dim();
        let amps = psi.amplitudes();
        let out: DVector<C64> = match self {
            UnitarySpec::Identity => amps.clone(),
            UnitarySpec::Diffusion | UnitarySpec::PhaseRotation { .. } => {
                let factor = match self {
                    UnitarySpec::Diffusion => C64::new(2.0, 0.0),
                    UnitarySpec::PhaseRotation { angle } => C64::new(1.0, 0.0) - C64::from_polar(1.0, *angle),
                    _ => unreachable!(),
                };
                let sign = if matches!(self, UnitarySpec::Diffusion) {
                    -1.0
                } else {
                    1.0
                };
                let mut out = amps.clone();
                for ws in 0..w {
                    let s: C64 = (0..n).map(|i| amps[i * w + ws]).sum::<C64>() / n as f64;
                    for i in 0..n {
                        let p = i * w + ws;
                        // diffusion: 2s - ψ; rotation: ψ - (1 - e^{iθ}) s
                        out[p] = if sign < 0.0 {
                            factor * s - amps[p]
                        } else {
                            amps[p] - factor * s
                        };
                    }
                }
                out
            }
            UnitarySpec::IndexMatrix(m) => {
                let a = DMatrix::from_column_slice(w, n, amps.as_slice());
                let r = a * m.transpose();
                DVector::from_column_slice(r.as_slice())
            }
            UnitarySpec::Explicit(m) => m * amps,
            UnitarySpec::Embedded { qubits, matrix } => {
                let layout = EmbeddedLayout::new(shape, qubits)?;
                let sub_dim = layout.sub.len();
                let mut out = DVector::zeros(amps.len());
                let mut gathered = DVector::<C64>::zeros(n * sub_dim);
                for &r in &layout.rest {
                    for i in 0..n {
                        for (s, off) in layout.sub.iter().enumerate() {
                            gathered[i * sub_dim + s] = amps[i * w + off + r];
                        }
                    }
                    let mapped = matrix * &gathered;
                    for i in 0..n {
                        for (s, off) in layout.sub.iter().enumerate() {
                            out[i * w + off + r] = mapped[i * sub_dim + s];
                        }
                    }
                }
                out
            }
            UnitarySpec::ControlledOnZero { control, inner } => {
                let zero = psi.project_qubit(*control, false)?;
                let one = psi.project_qubit(*control, true)?;
                inner.apply(&zero)?.into_amplitudes() + one.into_amplitudes()
            }
            UnitarySpec::Sequence(items) => {
                let mut cur = psi.clone();
                for u in items {
                    cur = u.apply(&cur)?;
                }
                cur.into_amplitudes()
            }
        };
        Ok(StateVector::from_parts(shape, out))
    }

    /// Dense matrix of the operator, assembled from Kronecker products
    /// rather than through [`UnitarySpec::apply`] wherever the structure
    /// allows it.
    pub fn to_matrix(&self, shape: RegisterShape) -> Result<DMatrix<C64>> {
        let n = shape.n();
        let w = shape.workspace_dim();
        let dim = shape.dim();
        let id_w = DMatrix::<C64>::identity(w, w);
        let uniform_proj = DMatrix::<C64>::from_element(n, n, C64::new(1.0 / n as f64, 0.0));
        Ok(match self {
            UnitarySpec::Identity => DMatrix::identity(dim, dim),
            UnitarySpec::Diffusion => {
                let d = uniform_proj * C64::new(2.0, 0.0) - DMatrix::identity(n, n);
                d.kronecker(&id_w)
            }
            UnitarySpec::PhaseRotation { angle } => {
                let r = DMatrix::identity(n, n) - uniform_proj * (C64::new(1.0, 0.0) - C64::from_polar(1.0, *angle));
                r.kronecker(&id_w)
            }
            UnitarySpec::IndexMatrix(m) => m.kronecker(&id_w),
            UnitarySpec::Explicit(m) => m.clone(),
            UnitarySpec::Embedded { .. } => {
                let mut m = DMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let (i, ws) = shape.split(col);
                    let e = StateVector::basis(shape, i, ws)?;
                    m.set_column(col, self.apply(&e)?.amplitudes());
                }
                m
            }
            UnitarySpec::ControlledOnZero { control, inner } => {
                let mask = shape.qubit_mask(*control)?;
                let p0 = DMatrix::from_diagonal(&DVector::from_fn(dim, |p, _| {
                    C64::new(if p & mask == 0 { 1.0 } else { 0.0 }, 0.0)
                }));
                let p1 = DMatrix::<C64>::identity(dim, dim) - &p0;
                &p0 * inner.to_matrix(shape)? * &p0 + p1
            }
            UnitarySpec::Sequence(items) => {
                let mut m = DMatrix::identity(dim, dim);
                for u in items {
                    m = u.to_matrix(shape)? * m;
                }
                m
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(n: usize, l: usize) -> RegisterShape {
        RegisterShape::new(n, l).unwrap()
    }

    fn test_state(s: RegisterShape) -> StateVector {
        let raw: Vec<C64> = (0..s.dim())
            .map(|p| C64::new((p as f64 * 0.7).sin(), (p as f64 * 1.3).cos()))
            .collect();
        let nrm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        StateVector::new(s, raw.into_iter().map(|z| z / nrm).collect()).unwrap()
    }

    fn swap2() -> DMatrix<C64> {
        // swap the two basis states of a 2-level system
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn apply_agrees_with_matrix_for_every_variant() {
        let s = shape(3, 2);
        let psi = test_state(s);
        let perm = {
            let mut m = DMatrix::zeros(3, 3);
            m[(1, 0)] = C64::new(1.0, 0.0);
            m[(2, 1)] = C64::new(1.0, 0.0);
            m[(0, 2)] = C64::new(0.0, 1.0);
            m
        };
        let embedded = UnitarySpec::Embedded {
            qubits: vec![1],
            matrix: perm.kronecker(&swap2()),
        };
        let specs = vec![
            UnitarySpec::Identity,
            UnitarySpec::Diffusion,
            UnitarySpec::PhaseRotation { angle: 0.9 },
            UnitarySpec::IndexMatrix(perm.clone()),
            embedded.clone(),
            UnitarySpec::ControlledOnZero {
                control: 0,
                inner: Box::new(UnitarySpec::Diffusion),
            },
            UnitarySpec::Sequence(vec![UnitarySpec::Diffusion, embedded]),
        ];
        for u in specs {
            u.validate(s).unwrap();
            let m = u.to_matrix(s).unwrap();
            assert!(unitarity_deviation(&m) < 1e-12, "{u:?}");
            let direct = u.apply(&psi).unwrap();
            assert!((direct.amplitudes() - &m * psi.amplitudes()).norm() < 1e-12, "{u:?}");
        }
    }

    #[test]
    fn rotation_by_pi_is_negated_diffusion() {
        let s = shape(5, 1);
        let d = UnitarySpec::Diffusion.to_matrix(s).unwrap();
        let r = UnitarySpec::PhaseRotation {
            angle: std::f64::consts::PI,
        }
        .to_matrix(s)
        .unwrap();
        assert!((d + r).norm() < 1e-12);
    }

    #[test]
    fn validation_failures() {
        let s = shape(2, 1);
        let bad = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(UnitarySpec::IndexMatrix(bad).validate(s).is_err());
        assert!(UnitarySpec::Explicit(DMatrix::identity(2, 2)).validate(s).is_err());
        assert!(UnitarySpec::ControlledOnZero {
            control: 1,
            inner: Box::new(UnitarySpec::Identity)
        }
        .validate(s)
        .is_err());
        assert!(UnitarySpec::ControlledOnZero {
            control: 0,
            inner: Box::new(UnitarySpec::Explicit(DMatrix::identity(4, 4)))
        }
        .validate(s)
        .is_err());
        assert!(UnitarySpec::Embedded {
            qubits: vec![0, 0],
            matrix: DMatrix::identity(8, 8)
        }
        .validate(s)
        .is_err());
        assert!(UnitarySpec::PhaseRotation { angle: f64::NAN }.validate(s).is_err());
    }

    #[test]
    fn diffusion_reflects_about_uniform() {
        let s = shape(4, 0);
        let u = StateVector::uniform(s);
        let du = UnitarySpec::Diffusion.apply(&u).unwrap();
        assert!((du.amplitudes() - u.amplitudes()).norm() < 1e-15);
        let e = StateVector::basis(s, 1, 0).unwrap();
        let de = UnitarySpec::Diffusion.apply(&e).unwrap();
        // 2u⟨u,e⟩ - e = (1/2, -1/2, 1/2, 1/2) at n = 4
        let expected = [0.5, -0.5, 0.5, 0.5];
        for (z, x) in de.amplitudes().iter().zip(expected) {
            assert!((z - C64::new(x, 0.0)).norm() < 1e-15);
        }
    }
}
