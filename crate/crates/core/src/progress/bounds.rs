use serde::Serialize;

/// Closed-form bounds for a query budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremBounds {
    pub n: usize,
    pub tau_c: usize,
    pub tau_q: usize,
    pub epsilon: f64,
    /// `τ_c + 4√n τ_q`, the left side of the high-success lower bounds.
    pub query_cost: f64,
    /// `n(1 - 2√ε - 4/n^{1/4})` for the finding version.
    pub finding_cost_bound: f64,
    pub finding_vacuous: bool,
    /// `(2√τ_c + 2τ_q + 1)²/n`, unclamped.
    pub success_bound: f64,
    /// `min(1, success_bound)`.
    pub success_bound_clamped: f64,
    pub success_vacuous: bool,
    /// `n(1 - 4√ε)` for the detection version.
    pub detection_cost_bound: f64,
    pub detection_vacuous: bool,
    /// `1 - 4√ε`, the final `H` needed for detection with error `ε`.
    pub detection_h_bound: f64,
    /// `(√τ_c + 2τ_q)²/n`.
    pub b_final_bound: f64,
    /// `τ_q(√τ_c + τ_q - 1)/n`.
    pub quantum_b_sum_bound: f64,
    /// `(τ_c + 2√τ_c τ_q)/n`.
    pub witness_sum_bound: f64,
}

pub fn theorem_bounds(n: usize, tau_c: usize, tau_q: usize, epsilon: f64) -> TheoremBounds {
    let nf = n as f64;
    let (c, q) = (tau_c as f64, tau_q as f64);
    let eps = epsilon.clamp(0.0, 1.0);
    let success_bound = (2.0 * c.sqrt() + 2.0 * q + 1.0).powi(2) / nf;
    let finding_cost_bound = nf * (1.0 - 2.0 * eps.sqrt() - 4.0 / nf.powf(0.25));
    let detection_cost_bound = nf * (1.0 - 4.0 * eps.sqrt());
    TheoremBounds {
        n,
        tau_c,
        tau_q,
        epsilon: eps,
        query_cost: c + 4.0 * nf.sqrt() * q,
        finding_cost_bound,
        finding_vacuous: finding_cost_bound <= 0.0,
        success_bound,
        success_bound_clamped: success_bound.min(1.0),
        success_vacuous: success_bound >= 1.0,
        detection_cost_bound,
        detection_vacuous: detection_cost_bound <= 0.0,
        detection_h_bound: 1.0 - 4.0 * eps.sqrt(),
        b_final_bound: (c.sqrt() + 2.0 * q).powi(2) / nf,
        quantum_b_sum_bound: q * (c.sqrt() + q - 1.0) / nf,
        witness_sum_bound: (c + 2.0 * c.sqrt() * q) / nf,
    }
}

/// `max(0, A - 1/n - 2√(B/n))`, a lower bound on average failure.
pub fn failure_lower_bound(a: f64, b: f64, n: usize) -> f64 {
    let nf = n as f64;
    (a - 1.0 / nf - 2.0 * (b.max(0.0) / nf).sqrt()).max(0.0)
}
