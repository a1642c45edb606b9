use serde::Serialize;

use super::bounds::{failure_lower_bound, theorem_bounds};
use super::measures::{ab_recursion, ab_recursion_clamped, measures, witness_raw, witnesses, Recursion, StepMeasures};
use super::report::{ProgressTrace, SummaryRow};
use super::{dominant_components, dominant_components_with_fault, ComponentTrace, Fault};
use crate::runner::{detection_success_per_input, finding_success_per_input, AnswerMap, HybridAlgorithm, OracleMode};
use crate::statespace::{DensityOperator, RegisterShape, StateVector};
use crate::{Error, Result, C64, CHECK_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub step: Option<usize>,
    pub relation: Relation,
    pub achieved: f64,
    pub bound: f64,
    pub pass: bool,
    /// The bound holds for trivial reasons (e.g. a probability bound ≥ 1).
    pub vacuous: bool,
}

impl BoundEntry {
    pub fn at_most(name: &str, step: Option<usize>, achieved: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            step,
            relation: Relation::AtMost,
            achieved,
            bound,
            pass: achieved <= bound + CHECK_SLACK,
            vacuous: false,
        }
    }

    pub fn at_least(name: &str, step: Option<usize>, achieved: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            step,
            relation: Relation::AtLeast,
            achieved,
            bound,
            pass: achieved >= bound - CHECK_SLACK,
            vacuous: false,
        }
    }

    pub fn vacuous(mut self, vacuous: bool) -> Self {
        self.vacuous = vacuous;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn get(&self, name: &str) -> impl Iterator<Item = &BoundEntry> {
        let name = name.to_string();
        self.entries.iter().filter(move |e| e.name == name)
    }
}

/// Per-step `H` increments against `1/n` (classical) and `4/√n` (quantum).
pub fn check_h_steps(tr: &ComponentTrace, m: &[StepMeasures]) -> Vec<BoundEntry> {
    let nf = tr.n() as f64;
    (1..=tr.tau())
        .map(|t| {
            let delta = m[t].h - m[t - 1].h;
            if tr.schedule().kind(t).is_classical() {
                BoundEntry::at_most("h_step.classical", Some(t), delta, 1.0 / nf)
            } else {
                BoundEntry::at_most("h_step.quantum", Some(t), delta, 4.0 / nf.sqrt())
            }
        })
        .collect()
}

/// Per-step `A`/`B` changes; `witnesses[t - 1]` must be set on classical steps.
pub fn check_ab_steps(tr: &ComponentTrace, m: &[StepMeasures], witnesses: &[Option<f64>]) -> Vec<BoundEntry> {
    let nf = tr.n() as f64;
    let mut out = Vec::with_capacity(2 * tr.tau());
    for t in 1..=tr.tau() {
        let (a0, b0) = (m[t - 1].a, m[t - 1].b);
        if tr.schedule().kind(t).is_classical() {
            let w = witnesses[t - 1].unwrap_or(0.0);
            out.push(BoundEntry::at_least(
                "ab_step.a.classical",
                Some(t),
                m[t].a,
                a0 - 2.0 / nf - 2.0 * (w / nf).sqrt(),
            ));
            out.push(BoundEntry::at_most(
                "ab_step.b.classical",
                Some(t),
                m[t].b,
                b0 - w + 1.0 / nf,
            ));
        } else {
            let d = 4.0 / nf + 4.0 * (b0 / nf).sqrt();
            out.push(BoundEntry::at_least("ab_step.a.quantum", Some(t), m[t].a, a0 - d));
            out.push(BoundEntry::at_most("ab_step.b.quantum", Some(t), m[t].b, b0 + d));
        }
    }
    out
}

/// `A^{(t)} ≥ a_t` and `B^{(t)} ≤ b_t` for every `t`.
pub fn check_recursion(m: &[StepMeasures], rec: &Recursion) -> Vec<BoundEntry> {
    let mut out = Vec::with_capacity(2 * m.len());
    for (t, s) in m.iter().enumerate() {
        out.push(BoundEntry::at_least("recursion.a", Some(t), s.a, rec.a[t]));
        out.push(BoundEntry::at_most("recursion.b", Some(t), s.b, rec.b[t]));
    }
    out
}

/// `H_k ≥ 1 + ‖ψ_k‖² - 2‖ψ_k‖cos α_k`, worst `k` per step.
pub fn check_h_relation(m: &[StepMeasures]) -> Vec<BoundEntry> {
    m.iter()
        .enumerate()
        .map(|(t, s)| {
            let gap = (0..s.h_k.len())
                .map(|k| {
                    let r = s.norm_k[k];
                    s.h_k[k] - (1.0 + r * r - 2.0 * r * s.alpha_k[k].cos())
                })
                .fold(f64::INFINITY, f64::min);
            BoundEntry::at_least("h_relation", Some(t), gap, 0.0)
        })
        .collect()
}

/// `A ≥ max{0, 1 - √H}²` at every step. Without the clamp the relation
/// fails once `H > 1`.
pub fn check_a_vs_h(m: &[StepMeasures]) -> Vec<BoundEntry> {
    m.iter()
        .enumerate()
        .map(|(t, s)| BoundEntry::at_least("a_vs_h", Some(t), s.a, (1.0 - s.h.sqrt()).max(0.0).powi(2)))
        .collect()
}

fn answer_projection(psi: &StateVector, map: &AnswerMap, k: usize, keep: bool) -> StateVector {
    let shape = psi.shape();
    let mut out = psi.clone();
    let amps = out.amplitudes_mut();
    for p in 0..shape.dim() {
        if (map.answer(shape, p) as usize == k) != keep {
            amps[p] = C64::new(0.0, 0.0);
        }
    }
    out
}

/// Pointwise failure bound `‖Π_k^⊥ψ_k‖ ≥ max{0, ‖ψ_k‖cos(α_k + θ_k)}` on the
/// final components, for the answer projectors of `map` (worst `k`).
pub fn check_answer_failure(tr: &ComponentTrace, final_m: &StepMeasures, map: &AnswerMap, name: &str) -> BoundEntry {
    let t = tr.tau();
    let psi0 = tr.psi0(t);
    let gap = (0..tr.n())
        .map(|k| {
            let psik = tr.psi_marked(t, k);
            let theta = answer_projection(psi0, map, k, true).norm().min(1.0).asin();
            let lhs = answer_projection(psik, map, k, false).norm();
            let rhs = (final_m.norm_k[k] * (final_m.alpha_k[k] + theta).cos()).max(0.0);
            lhs - rhs
        })
        .fold(f64::INFINITY, f64::min);
    BoundEntry::at_least(name, Some(t), gap, 0.0)
}

/// Which extra runs [`verify_with`] performs.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Classical-oracle runs are skipped when `n^{τ_c}` exceeds this many
    /// branches; 0 disables them.
    pub classical_branch_cap: usize,
    /// Answer map for an additional detection check on the same circuit.
    pub detection_map: Option<AnswerMap>,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            classical_branch_cap: 4096,
            detection_map: None,
            fault: None,
        }
    }
}

/// Everything computed while verifying one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub n: usize,
    pub tau_c: usize,
    pub tau_q: usize,
    /// Average finding success with pseudo-classical semantics.
    pub success_avg: f64,
    pub success_worst: f64,
    pub success_avg_classical: Option<f64>,
    pub detection_success: Option<f64>,
    pub trace: ProgressTrace,
    pub report: BoundReport,
}

impl Verification {
    pub fn summary_row(&self, seed: u64) -> SummaryRow {
        let last = self.trace.h.len() - 1;
        SummaryRow {
            n: self.n,
            tau_c: self.tau_c,
            tau_q: self.tau_q,
            seed,
            success_avg: self.success_avg,
            bound_thm_b: theorem_bounds(self.n, self.tau_c, self.tau_q, 0.0).success_bound,
            h_final: self.trace.h[last],
            a_final: self.trace.a[last],
            b_final: self.trace.b[last],
            a_rec_final: self.trace.a_rec[last],
            b_rec_final: self.trace.b_rec[last],
            all_claims_pass: self.report.all_pass(),
        }
    }
}

pub fn verify(alg: &HybridAlgorithm) -> Result<Verification> {
    verify_with(alg, &VerifyOptions::default())
}

/// Runs the algorithm, builds its progress trace and checks every per-step
/// claim and final bound. The answer map must be a finding map.
pub fn verify_with(alg: &HybridAlgorithm, opts: &VerifyOptions) -> Result<Verification> {
    let n = alg.n();
    let nf = n as f64;
    let schedule = alg.schedule();
    let (tau_c, tau_q) = (schedule.tau_c(), schedule.tau_q());
    let tr = match opts.fault {
        Some(f) => dominant_components_with_fault(alg, f)?,
        None => dominant_components(alg)?,
    };
    let m = measures(&tr);
    let ws = witnesses(&tr)?;
    let raw: Vec<Option<f64>> = (1..=tr.tau())
        .map(|t| schedule.kind(t).is_classical().then(|| witness_raw(&tr, t)).transpose())
        .collect::<Result<_>>()?;
    let wlist: Vec<f64> = ws.iter().flatten().copied().collect();

    let mut report = BoundReport::default();
    let rec = match ab_recursion(schedule, &wlist, n) {
        Ok(r) => r,
        Err(Error::WitnessExceedsBudget { t, w, b }) => {
            report
                .entries
                .push(BoundEntry::at_most("witness.budget", Some(t), w, b));
            ab_recursion_clamped(schedule, &wlist, n)?
        }
        Err(e) => return Err(e),
    };

    report.entries.extend(check_h_steps(&tr, &m));
    report.entries.extend(check_ab_steps(&tr, &m, &ws));
    report.entries.extend(check_recursion(&m, &rec));
    report.entries.extend(check_h_relation(&m));
    report.entries.extend(check_a_vs_h(&m));

    let bounds = theorem_bounds(n, tau_c, tau_q, 0.0);
    let tau = schedule.tau();
    report.entries.push(BoundEntry::at_most(
        "b_budget.final",
        Some(tau),
        rec.b[tau],
        bounds.b_final_bound,
    ));
    let quantum_sum: f64 = schedule
        .quantum_steps()
        .iter()
        .map(|&t| (rec.b[t - 1].max(0.0) / nf).sqrt())
        .sum();
    report.entries.push(BoundEntry::at_most(
        "b_budget.quantum_sum",
        None,
        quantum_sum,
        bounds.quantum_b_sum_bound,
    ));
    let witness_sum: f64 = wlist.iter().map(|w| (w / nf).sqrt()).sum();
    report.entries.push(BoundEntry::at_most(
        "witness.sum",
        None,
        witness_sum,
        bounds.witness_sum_bound,
    ));

    let per_input = finding_success_per_input(alg, OracleMode::UsePseudoClassical)?;
    let success_avg = per_input.iter().sum::<f64>() / nf;
    let success_worst = per_input.iter().copied().fold(f64::INFINITY, f64::min);
    let last = &m[tau];
    report.entries.push(BoundEntry::at_least(
        "failure_lower_bound",
        Some(tau),
        1.0 - success_avg,
        failure_lower_bound(last.a, last.b, n),
    ));
    report.entries.push(BoundEntry::at_most(
        "recursion.success",
        Some(tau),
        success_avg,
        1.0 - rec.a[tau] + 1.0 / nf + 2.0 * (rec.b[tau].max(0.0) / nf).sqrt(),
    ));
    let dominance = (0..n)
        .map(|k| {
            let tail = answer_projection(tr.psi_marked(tau, k), alg.answer_map(), k, false).norm_squared();
            (1.0 - per_input[k]) - tail
        })
        .fold(f64::INFINITY, f64::min);
    report
        .entries
        .push(BoundEntry::at_least("dominance", Some(tau), dominance, 0.0));
    report.entries.push(check_answer_failure(
        &tr,
        last,
        alg.answer_map(),
        "answer_failure.answer",
    ));
    report.entries.push(check_answer_failure(
        &tr,
        last,
        &AnswerMap::Index,
        "answer_failure.index",
    ));

    report.entries.push(
        BoundEntry::at_most("success_bound.pseudo", None, success_avg, bounds.success_bound)
            .vacuous(bounds.success_vacuous),
    );
    let classical_ok = opts.classical_branch_cap > 0
        && (n as f64).powi(tau_c as i32) <= opts.classical_branch_cap as f64
        && opts.fault.is_none();
    let success_avg_classical = if classical_ok {
        let per = finding_success_per_input(alg, OracleMode::UseClassical)?;
        let avg = per.iter().sum::<f64>() / nf;
        report.entries.push(
            BoundEntry::at_most("success_bound.classical", None, avg, bounds.success_bound)
                .vacuous(bounds.success_vacuous),
        );
        Some(avg)
    } else {
        None
    };
    for (name, eps) in [
        ("finding_cost.worst", 1.0 - success_worst),
        ("finding_cost.average", 1.0 - success_avg),
    ] {
        let b = theorem_bounds(n, tau_c, tau_q, eps);
        report
            .entries
            .push(BoundEntry::at_least(name, None, b.query_cost, b.finding_cost_bound).vacuous(b.finding_vacuous));
    }

    let detection_success = match &opts.detection_map {
        Some(map) => {
            let det = alg.with_answer_map(map.clone())?;
            let worst = detection_success_per_input(&det, OracleMode::UsePseudoClassical)?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let b = theorem_bounds(n, tau_c, tau_q, 1.0 - worst);
            report.entries.push(BoundEntry::at_least(
                "detection.h",
                Some(tau),
                last.h,
                b.detection_h_bound,
            ));
            report.entries.push(
                BoundEntry::at_least("detection.cost", None, b.query_cost, b.detection_cost_bound)
                    .vacuous(b.detection_vacuous),
            );
            Some(worst)
        }
        None => None,
    };

    Ok(Verification {
        n,
        tau_c,
        tau_q,
        success_avg,
        success_worst,
        success_avg_classical,
        detection_success,
        trace: ProgressTrace::new(&tr, &m, &ws, &raw, &rec),
        report,
    })
}

/// Two traces with equal `H` but different distinguishability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitationDemo {
    pub n: usize,
    /// `H^{(1)}` after one simulated Grover step.
    pub h_grover: f64,
    /// `H` for `ψ_0 = ψ`, `ψ_k = (1 - 2/√n)ψ`.
    pub h_shrunk: f64,
    /// `tr[Π_0^⊥ ρ_k]` with `Π_0 = ψψ*`, averaged over `k`.
    pub distinguish_probability: f64,
    /// `(4/√n - 4/n)(1 - 1/n)`.
    pub distinguish_closed_form: f64,
}

/// Shows that `H` alone cannot bound small success probabilities.
pub fn limitation_demo(n: usize) -> Result<LimitationDemo> {
    let nf = n as f64;
    let shape = RegisterShape::new(n, 0)?;
    let h = 1.0 / 2f64.sqrt();
    let init = StateVector::uniform(shape).tensor_qubit(C64::new(h, 0.0), C64::new(-h, 0.0));
    let grover = HybridAlgorithm::new(
        init,
        "Q:0".parse()?,
        vec![crate::runner::UnitarySpec::Identity],
        AnswerMap::Index,
    )?;
    let h_grover = measures(&dominant_components(&grover)?)[1].h;

    let psi = StateVector::uniform(shape);
    let shrink = 1.0 - 2.0 / nf.sqrt();
    let psik = psi.scaled(C64::new(shrink, 0.0));
    let h_shrunk = psik.sub(&psi)?.norm_squared();
    let mut total = 0.0;
    for k in 0..n {
        let pk = psik.amplitudes();
        let mut rho = pk * pk.adjoint();
        rho[(k, k)] += C64::new(1.0 - psik.norm_squared(), 0.0);
        let rho = DensityOperator::new(shape, rho)?;
        total += rho.trace() - rho.projector_probability(&psi)?;
    }
    Ok(LimitationDemo {
        n,
        h_grover,
        h_shrunk,
        distinguish_probability: total / nf,
        distinguish_closed_form: (4.0 / nf.sqrt() - 4.0 / nf) * (1.0 - 1.0 / nf),
    })
}
