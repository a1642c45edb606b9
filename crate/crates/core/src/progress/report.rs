use serde::Serialize;

use super::measures::{Recursion, StepMeasures};
use super::ComponentTrace;

/// Column order of [`SummaryRow`] when written as CSV.
pub const SUMMARY_COLUMNS: [&str; 12] = [
    "n",
    "tau_c",
    "tau_q",
    "seed",
    "success_avg",
    "bound_thm_B",
    "H_final",
    "A_final",
    "B_final",
    "a_final",
    "b_final",
    "all_claims_pass",
];

/// Progress measures over time, indexed by `t = 0..=τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgressTrace {
    pub n: usize,
    pub schedule: String,
    pub h: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub h_k: Vec<Vec<f64>>,
    pub a_k: Vec<Vec<f64>>,
    pub b_k: Vec<Vec<f64>>,
    pub alpha_k: Vec<Vec<f64>>,
    /// `w_t` on classical steps; `None` at `t = 0` and on quantum steps.
    pub witness: Vec<Option<f64>>,
    /// The witness before clamping into `[0, B^{(t-1)}]`.
    pub witness_raw: Vec<Option<f64>>,
    pub a_rec: Vec<f64>,
    pub b_rec: Vec<f64>,
}

impl ProgressTrace {
    pub fn new(
        tr: &ComponentTrace,
        m: &[StepMeasures],
        witnesses: &[Option<f64>],
        raw: &[Option<f64>],
        rec: &Recursion,
    ) -> Self {
        let shifted = |v: &[Option<f64>]| std::iter::once(None).chain(v.iter().copied()).collect();
        Self {
            n: tr.n(),
            schedule: tr.schedule().to_string(),
            h: m.iter().map(|s| s.h).collect(),
            a: m.iter().map(|s| s.a).collect(),
            b: m.iter().map(|s| s.b).collect(),
            h_k: m.iter().map(|s| s.h_k.clone()).collect(),
            a_k: m.iter().map(|s| s.a_k.clone()).collect(),
            b_k: m.iter().map(|s| s.b_k.clone()).collect(),
            alpha_k: m.iter().map(|s| s.alpha_k.clone()).collect(),
            witness: shifted(witnesses),
            witness_raw: shifted(raw),
            a_rec: rec.a.clone(),
            b_rec: rec.b.clone(),
        }
    }
}

/// One CSV line per verified algorithm; see [`SUMMARY_COLUMNS`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub tau_c: usize,
    pub tau_q: usize,
    pub seed: u64,
    pub success_avg: f64,
    #[serde(rename = "bound_thm_B")]
    pub bound_thm_b: f64,
    #[serde(rename = "H_final")]
    pub h_final: f64,
    #[serde(rename = "A_final")]
    pub a_final: f64,
    #[serde(rename = "B_final")]
    pub b_final: f64,
    #[serde(rename = "a_final")]
    pub a_rec_final: f64,
    #[serde(rename = "b_final")]
    pub b_rec_final: f64,
    pub all_claims_pass: bool,
}
