use serde::Serialize;

use super::ComponentTrace;
use crate::oracles::OracleKind;
use crate::runner::Schedule;
use crate::statespace::inner;
use crate::{Error, Result, C64};

/// Components shorter than this count as zero for `A_k` and `B_k`.
pub const ZERO_NORM: f64 = 1e-14;
/// Threshold below which `γ_k` or `1 - γ_k` is treated as degenerate.
pub const DEGENERATE_GAMMA: f64 = 1e-14;
/// Round-off tolerated when checking `w_t ≤ b_{t-1}`.
pub const WITNESS_TOL: f64 = 1e-12;

/// Progress measures at one time step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepMeasures {
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub h_k: Vec<f64>,
    pub a_k: Vec<f64>,
    pub b_k: Vec<f64>,
    pub alpha_k: Vec<f64>,
    pub norm_k: Vec<f64>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn step_measures(tr: &ComponentTrace, t: usize) -> StepMeasures {
    let n = tr.n();
    let psi0 = tr.psi0(t);
    let mut m = StepMeasures {
        h: 0.0,
        a: 0.0,
        b: 0.0,
        h_k: Vec::with_capacity(n),
        a_k: Vec::with_capacity(n),
        b_k: Vec::with_capacity(n),
        alpha_k: Vec::with_capacity(n),
        norm_k: Vec::with_capacity(n),
    };
    for k in 0..n {
        let psik = tr.psi_marked(t, k);
        let diff = psik.sub(psi0).expect("trace states share a shape");
        let norm = psik.norm();
        let overlap = inner(psi0, psik).expect("trace states share a shape").norm();
        let (a, b, alpha) = if norm < ZERO_NORM {
            (0.0, 0.0, 0.0)
        } else {
            let a = overlap * overlap;
            ((a), (norm * norm - a).max(0.0), (overlap / norm).min(1.0).acos())
        };
        m.h_k.push(diff.norm_squared());
        m.a_k.push(a);
        m.b_k.push(b);
        m.alpha_k.push(alpha);
        m.norm_k.push(norm);
    }
    m.h = mean(&m.h_k);
    m.a = mean(&m.a_k);
    m.b = mean(&m.b_k);
    m
}

/// Measures for every `t = 0..=τ`.
pub fn measures(tr: &ComponentTrace) -> Vec<StepMeasures> {
    (0..=tr.tau()).map(|t| step_measures(tr, t)).collect()
}

/// `H^{(t)}` for `t = 0..=τ`.
pub fn progress_h(tr: &ComponentTrace) -> Vec<f64> {
    measures(tr).into_iter().map(|m| m.h).collect()
}

/// `(A^{(t)}, B^{(t)})` sequences for `t = 0..=τ`.
pub fn progress_ab(tr: &ComponentTrace) -> (Vec<f64>, Vec<f64>) {
    measures(tr).into_iter().map(|m| (m.a, m.b)).unzip()
}

/// `B^{(t-1)} - Σ_k ‖ζ_k^⊥‖²/n` before clamping, for a classical step `t`.
pub fn witness_raw(tr: &ComponentTrace, t: usize) -> Result<f64> {
    if t == 0 || t > tr.tau() || !tr.schedule().kind(t).is_classical() {
        return Err(Error::InvalidParameter(format!("step {t} is not a classical step")));
    }
    let n = tr.n();
    let psi0 = tr.psi0(t - 1);
    let b_prev = step_measures(tr, t - 1).b;
    let mut zeta_perp = 0.0;
    for k in 0..n {
        let psik = tr.psi_marked(t - 1, k);
        let c = inner(psi0, psik)?;
        let align = if c.norm() > 0.0 {
            c.conj() / c.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let psik = psik.scaled(align);
        let along0 = inner(psi0, &psik)?;
        let mut zeta = psik.sub(&psi0.scaled(along0))?;
        let in_k = psi0.project_index(k);
        let gamma = in_k.norm_squared();
        if 1.0 - gamma < DEGENERATE_GAMMA {
            continue;
        }
        if gamma >= DEGENERATE_GAMMA {
            let out_k = psi0.project_out_index(k);
            let bar = in_k
                .scaled(C64::new(((1.0 - gamma) / gamma).sqrt(), 0.0))
                .sub(&out_k.scaled(C64::new((gamma / (1.0 - gamma)).sqrt(), 0.0)))?;
            let along_bar = inner(&bar, &psik)?;
            zeta = zeta.sub(&bar.scaled(along_bar))?;
        }
        zeta_perp += zeta.project_out_index(k).norm_squared();
    }
    Ok(b_prev - zeta_perp / n as f64)
}

/// The witness `w_t`, clamped to `[0, B^{(t-1)}]`.
pub fn witness_w(tr: &ComponentTrace, t: usize) -> Result<f64> {
    let b_prev = step_measures(tr, t.saturating_sub(1)).b;
    Ok(witness_raw(tr, t)?.clamp(0.0, b_prev))
}

/// `w_t` for every step, `None` on quantum steps; index `t - 1`.
pub fn witnesses(tr: &ComponentTrace) -> Result<Vec<Option<f64>>> {
    (1..=tr.tau())
        .map(|t| {
            if tr.schedule().kind(t).is_classical() {
                witness_w(tr, t).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

/// The comparison sequences `a_t`, `b_t` for `t = 0..=τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recursion {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Runs the recursion. `witnesses` holds one value per classical step in
/// schedule order.
pub fn ab_recursion(schedule: &Schedule, witnesses: &[f64], n: usize) -> Result<Recursion> {
    recursion(schedule, witnesses, n, true)
}

/// Like [`ab_recursion`] but clamps each witness into `[0, b_{t-1}]`
/// instead of failing.
pub(super) fn ab_recursion_clamped(schedule: &Schedule, witnesses: &[f64], n: usize) -> Result<Recursion> {
    recursion(schedule, witnesses, n, false)
}

fn recursion(schedule: &Schedule, witnesses: &[f64], n: usize, strict: bool) -> Result<Recursion> {
    if witnesses.len() != schedule.tau_c() {
        return Err(Error::DimensionMismatch {
            expected: schedule.tau_c(),
            got: witnesses.len(),
        });
    }
    let nf = n as f64;
    let mut a = vec![1.0];
    let mut b = vec![0.0];
    let mut ws = witnesses.iter();
    for (idx, kind) in schedule.steps().iter().enumerate() {
        let (ap, bp) = (a[idx], b[idx]);
        match kind {
            OracleKind::Quantum { .. } => {
                let d = 4.0 / nf + 4.0 * (bp / nf).sqrt();
                a.push(ap - d);
                b.push(bp + d);
            }
            _ => {
                let mut w = *ws.next().expect("length checked");
                if w > bp + WITNESS_TOL || w < -WITNESS_TOL {
                    if strict {
                        return Err(Error::WitnessExceedsBudget { t: idx + 1, w, b: bp });
                    }
                    w = w.clamp(0.0, bp.max(0.0));
                }
                a.push(ap - 2.0 / nf - 2.0 * (w.max(0.0) / nf).sqrt());
                b.push(bp + 1.0 / nf - w);
            }
        }
    }
    Ok(Recursion { a, b })
}
