use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hsl_core::baselines::{self, BaselineKind};
use hsl_core::optimizer::{self, ClassicalPolicy, OptResult, ParamAlgorithm};
use hsl_core::progress::{
    theorem_bounds, verify_with, BoundEntry, BoundReport, Fault, ProgressTrace, SummaryRow, VerifyOptions,
};
use hsl_core::random::random_algorithm;
use hsl_core::runner::{finding_success_per_input, success_finding, AnswerMap, Schedule};
use hsl_core::{par, CHECK_SLACK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::config::Scenario;
use crate::{
    grid, CliError, Common, Format, OptimizeArgs, PolicyArg, ReportArgs, RunArgs, SweepArgs, Verdict, VerifyArgs,
};

fn json_text<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Writes to `--out` when given, stdout otherwise.
fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fault(inject: bool) -> Option<Fault> {
    inject.then_some(Fault::PhaseOnClassical)
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    origin: &'a str,
    n: usize,
    l0: usize,
    schedule: String,
    baseline: Option<&'a str>,
    oracle_mode: &'static str,
    seed: u64,
    tau_c: usize,
    tau_q: usize,
    success_avg: f64,
    success_worst: f64,
    success_per_input: Vec<f64>,
    success_avg_pseudo: f64,
    success_avg_classical: Option<f64>,
    detection_success: Option<f64>,
    closed_form: Option<f64>,
    bound_thm_b: f64,
    all_claims_pass: bool,
    report: &'a BoundReport,
    trace: &'a ProgressTrace,
}

fn resolve(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

pub fn run(a: &RunArgs) -> Result<Verdict, CliError> {
    let mut s = match &a.config {
        Some(p) => Scenario::load(p)?,
        None => Scenario::from_flags(a.n.ok_or_else(|| CliError::Invalid("--n is required without --config".into()))?),
    };
    let c = &mut s.config;
    if let Some(n) = a.n {
        c.n = n;
    }
    if let Some(t) = a.tau_c {
        c.tau_c = t;
    }
    if let Some(t) = a.tau_q {
        c.tau_q = t;
    }
    if let Some(sch) = &a.schedule {
        c.schedule = sch.clone();
    }
    if let Some(seed) = a.seed {
        c.seed = seed;
    }
    if let Some(b) = &a.baseline {
        c.baseline = Some(b.clone());
    }
    if let Some(m) = a.oracle_mode {
        c.oracle_mode = m;
    }
    let kind = s.baseline()?;
    let alg = s.algorithm()?;
    let c = &s.config;
    let opts = VerifyOptions {
        detection_map: s.detection_map(),
        fault: fault(a.inject_fault),
        ..VerifyOptions::default()
    };
    let v = verify_with(&alg, &opts)?;
    let per_input = finding_success_per_input(&alg, c.oracle_mode.mode())?;
    let success_avg = per_input.iter().sum::<f64>() / alg.n() as f64;
    let mut row = v.summary_row(c.seed);
    row.success_avg = success_avg;

    let record = RunRecord {
        origin: &s.origin,
        n: alg.n(),
        l0: alg.l0(),
        schedule: alg.schedule().to_string(),
        baseline: kind.as_ref().map(BaselineKind::name),
        oracle_mode: c.oracle_mode.name(),
        seed: c.seed,
        tau_c: v.tau_c,
        tau_q: v.tau_q,
        success_avg,
        success_worst: per_input.iter().copied().fold(f64::INFINITY, f64::min),
        success_per_input: per_input,
        success_avg_pseudo: v.success_avg,
        success_avg_classical: v.success_avg_classical,
        detection_success: v.detection_success,
        closed_form: kind.map(|k| baselines::closed_form(k, alg.n())),
        bound_thm_b: row.bound_thm_b,
        all_claims_pass: v.report.all_pass(),
        report: &v.report,
        trace: &v.trace,
    };

    let base = a.config.as_deref().and_then(Path::parent);
    let (trace_path, summary_path) = match &a.common.out {
        Some(dir) => (Some(dir.join("trace.json")), Some(dir.join("summary.csv"))),
        None => (
            c.outputs.trace.as_deref().map(|p| resolve(base, p)),
            c.outputs.summary.as_deref().map(|p| resolve(base, p)),
        ),
    };
    let summary = csv_text(&[&row])?;
    if let Some(p) = &trace_path {
        write_file(p, &json_text(&record)?)?;
    }
    if let Some(p) = &summary_path {
        write_file(p, &summary)?;
    }
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => print!("{summary}"),
        Format::Json => print!("{}", json_text(&record)?),
    }
    Ok(verdict(record.all_claims_pass))
}

#[derive(Serialize)]
struct TrialRecord {
    n: usize,
    seed: u64,
    schedule: String,
    tau_c: usize,
    tau_q: usize,
    success_avg: f64,
    success_avg_classical: Option<f64>,
    all_pass: bool,
    report: BoundReport,
    #[serde(skip)]
    summary: SummaryRow,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    n: &'a [usize],
    tau_max: usize,
    trials: usize,
    seed: u64,
    algorithms: usize,
    checks: usize,
    failures: usize,
    results: &'a [TrialRecord],
}

pub fn verify(a: &VerifyArgs) -> Result<Verdict, CliError> {
    if a.trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    if a.n.is_empty() {
        return Err(CliError::Invalid("--n needs at least one value".into()));
    }
    let scenario = a.config.as_deref().map(Scenario::load).transpose()?;
    let detection_map = scenario
        .as_ref()
        .and_then(Scenario::detection_map)
        .or_else(|| a.detection.then_some(AnswerMap::AnyWorkspaceOne));
    let opts = VerifyOptions {
        detection_map,
        fault: fault(a.inject_fault),
        ..VerifyOptions::default()
    };
    let record = |alg: &hsl_core::runner::HybridAlgorithm, seed: u64| -> hsl_core::Result<TrialRecord> {
        let v = verify_with(alg, &opts)?;
        Ok(TrialRecord {
            n: v.n,
            seed,
            schedule: alg.schedule().to_string(),
            tau_c: v.tau_c,
            tau_q: v.tau_q,
            success_avg: v.success_avg,
            success_avg_classical: v.success_avg_classical,
            all_pass: v.report.all_pass(),
            summary: v.summary_row(seed),
            report: v.report,
        })
    };
    let results = match &scenario {
        Some(s) => vec![record(&s.algorithm()?, s.config.seed)?],
        None => {
            for &n in &a.n {
                if n < 2 {
                    return Err(CliError::Invalid(format!("--n values must be at least 2, got {n}")));
                }
            }
            let cases: Vec<(usize, u64)> =
                a.n.iter()
                    .flat_map(|&n| (0..a.trials as u64).map(move |j| (n, a.seed.wrapping_add(j))))
                    .collect();
            par::try_map(&cases, |&(n, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let tau = rng.random_range(0..=a.tau_max);
                let alg = random_algorithm(&mut rng, n, a.l0, tau)?;
                record(&alg, seed)
            })?
        }
    };

    let checks = results.iter().map(|r| r.report.entries.len()).sum();
    let failed: Vec<(&TrialRecord, &BoundEntry)> = results
        .iter()
        .flat_map(|r| r.report.failures().map(move |e| (r, e)))
        .collect();
    eprintln!(
        "verified {} algorithms: {checks} checks, {} failures",
        results.len(),
        failed.len()
    );
    for (r, e) in failed.iter().take(10) {
        eprintln!(
            "  n={} seed={} {} step {:?}: {} vs {}",
            r.n, r.seed, e.name, e.step, e.achieved, e.bound
        );
    }
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_text(&results.iter().map(|r| &r.summary).collect::<Vec<_>>())?,
        Format::Json => json_text(&VerifySummary {
            n: &a.n,
            tau_max: a.tau_max,
            trials: a.trials,
            seed: a.seed,
            algorithms: results.len(),
            checks,
            failures: failed.len(),
            results: &results,
        })?,
    };
    emit(&a.common, &text)?;
    Ok(verdict(failed.is_empty()))
}

#[derive(Serialize)]
struct SweepRow {
    baseline: &'static str,
    n: usize,
    tau_c: usize,
    tau_q: usize,
    oracle_mode: &'static str,
    success_avg: f64,
    closed_form: f64,
    #[serde(rename = "bound_thm_B")]
    bound: f64,
    bound_clamped: f64,
    ratio: f64,
    bound_vacuous: bool,
    within_bound: bool,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    baseline: &'a str,
    oracle_mode: &'static str,
    seed: u64,
    rows: &'a [SweepRow],
}

pub fn sweep(a: &SweepArgs) -> Result<Verdict, CliError> {
    let ns = grid::parse("n", &a.n)?;
    let tcs = grid::parse("tau-c", &a.tau_c)?;
    let tqs = grid::parse("tau-q", &a.tau_q)?;
    let mut points = Vec::with_capacity(ns.len() * tcs.len() * tqs.len());
    for &n in &ns {
        for &c in &tcs {
            for &q in &tqs {
                points.push((n, c, q));
            }
        }
    }
    if points.is_empty() {
        return Err(CliError::Invalid("sweep grid is empty".into()));
    }
    BaselineKind::from_name(&a.baseline, 0, 0)?;
    let mode = a.oracle_mode;
    let rows = par::try_map(&points, |&(n, c, q)| -> Result<SweepRow, CliError> {
        let kind = BaselineKind::from_name(&a.baseline, c, q)?;
        let alg = baselines::build_seeded(kind, n, a.seed)
            .map_err(|e| CliError::Invalid(format!("grid point n={n} tau_c={c} tau_q={q}: {e}")))?;
        let success = success_finding(&alg, mode.mode())?;
        let (bc, bq) = kind.budget();
        let b = theorem_bounds(n, bc, bq, 0.0);
        Ok(SweepRow {
            baseline: kind.name(),
            n,
            tau_c: bc,
            tau_q: bq,
            oracle_mode: mode.name(),
            success_avg: success,
            closed_form: baselines::closed_form(kind, n),
            bound: b.success_bound,
            bound_clamped: b.success_bound_clamped,
            ratio: success / b.success_bound_clamped,
            bound_vacuous: b.success_vacuous,
            within_bound: success <= b.success_bound + CHECK_SLACK,
        })
    })?;
    let pass = rows.iter().all(|r| r.within_bound);
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_text(&rows)?,
        Format::Json => json_text(&SweepSummary {
            baseline: &a.baseline,
            oracle_mode: mode.name(),
            seed: a.seed,
            rows: &rows,
        })?,
    };
    emit(&a.common, &text)?;
    Ok(verdict(pass))
}

#[derive(Serialize)]
struct OptimizeRecord<'a> {
    n: usize,
    schedule: String,
    policy: ClassicalPolicy,
    budget: usize,
    seed: u64,
    result: &'a OptResult,
}

#[derive(Serialize)]
struct OptimizeRow {
    n: usize,
    schedule: String,
    policy: ClassicalPolicy,
    budget: usize,
    seed: u64,
    best_success: f64,
    #[serde(rename = "bound_thm_B")]
    bound: f64,
    ratio: f64,
    evaluations: usize,
    restart: usize,
}

pub fn optimize(a: &OptimizeArgs) -> Result<Verdict, CliError> {
    let schedule: Schedule = match &a.schedule {
        Some(s) => s.parse()?,
        None => Schedule::classical_then_quantum(a.tau_c, a.tau_q, 0),
    };
    let policy = match a.policy {
        PolicyArg::Fresh => ClassicalPolicy::FreshIndex,
        PolicyArg::Coherent => ClassicalPolicy::Coherent,
    };
    if a.budget == 0 {
        return Err(CliError::Invalid("--budget must be at least 1".into()));
    }
    let pa = ParamAlgorithm::new(a.n, schedule, policy, a.seed)?;
    let result = optimizer::optimize(&pa, a.budget, a.seed)?;
    let schedule = pa.schedule().to_string();
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&OptimizeRecord {
            n: a.n,
            schedule,
            policy,
            budget: a.budget,
            seed: a.seed,
            result: &result,
        })?,
        Format::Csv => csv_text(&[OptimizeRow {
            n: a.n,
            schedule,
            policy,
            budget: a.budget,
            seed: a.seed,
            best_success: result.best_success,
            bound: result.bound,
            ratio: result.ratio,
            evaluations: result.evaluations,
            restart: result.restart,
        }])?,
    };
    emit(&a.common, &text)?;
    Ok(verdict(result.best_success <= result.bound + CHECK_SLACK))
}

#[derive(Serialize, Default)]
struct VerifyGroup {
    n: usize,
    algorithms: usize,
    checks: usize,
    failures: usize,
    /// Largest `success_avg / min(1, bound)`.
    max_ratio: f64,
}

#[derive(Serialize)]
struct VerifyDigest {
    kind: &'static str,
    groups: Vec<VerifyGroup>,
    failing_checks: BTreeMap<String, usize>,
}

#[derive(Serialize, Default)]
struct SweepGroup {
    baseline: String,
    n: usize,
    points: usize,
    max_ratio: f64,
    over_bound: usize,
    vacuous: usize,
}

#[derive(Serialize)]
struct SweepDigest {
    kind: &'static str,
    groups: Vec<SweepGroup>,
}

fn field<'a>(v: &'a Value, key: &str, origin: &str) -> Result<&'a Value, CliError> {
    v.get(key)
        .ok_or_else(|| CliError::Invalid(format!("{origin}: missing field {key:?}")))
}

fn uint(v: &Value, key: &str, origin: &str) -> Result<usize, CliError> {
    field(v, key, origin)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| CliError::Invalid(format!("{origin}: field {key:?} is not an unsigned integer")))
}

fn float(v: &Value, key: &str, origin: &str) -> Result<f64, CliError> {
    field(v, key, origin)?
        .as_f64()
        .ok_or_else(|| CliError::Invalid(format!("{origin}: field {key:?} is not a number")))
}

fn array<'a>(v: &'a Value, key: &str, origin: &str) -> Result<&'a Vec<Value>, CliError> {
    field(v, key, origin)?
        .as_array()
        .ok_or_else(|| CliError::Invalid(format!("{origin}: field {key:?} is not an array")))
}

fn digest_verify(v: &Value, origin: &str) -> Result<(VerifyDigest, bool), CliError> {
    let mut groups: BTreeMap<usize, VerifyGroup> = BTreeMap::new();
    let mut failing = BTreeMap::new();
    for r in array(v, "results", origin)? {
        let n = uint(r, "n", origin)?;
        let b = theorem_bounds(n, uint(r, "tau_c", origin)?, uint(r, "tau_q", origin)?, 0.0);
        let g = groups.entry(n).or_insert_with(|| VerifyGroup {
            n,
            ..Default::default()
        });
        g.algorithms += 1;
        g.max_ratio = g
            .max_ratio
            .max(float(r, "success_avg", origin)? / b.success_bound_clamped);
        for e in array(field(r, "report", origin)?, "entries", origin)? {
            g.checks += 1;
            if field(e, "pass", origin)?.as_bool() != Some(true) {
                g.failures += 1;
                let name = field(e, "name", origin)?.as_str().unwrap_or("?").to_string();
                *failing.entry(name).or_insert(0) += 1;
            }
        }
    }
    let pass = failing.is_empty();
    Ok((
        VerifyDigest {
            kind: "verify",
            groups: groups.into_values().collect(),
            failing_checks: failing,
        },
        pass,
    ))
}

fn digest_sweep(v: &Value, origin: &str) -> Result<(SweepDigest, bool), CliError> {
    let mut groups: BTreeMap<(String, usize), SweepGroup> = BTreeMap::new();
    for r in array(v, "rows", origin)? {
        let baseline = field(r, "baseline", origin)?.as_str().unwrap_or("?").to_string();
        let n = uint(r, "n", origin)?;
        let g = groups.entry((baseline.clone(), n)).or_insert_with(|| SweepGroup {
            baseline,
            n,
            ..Default::default()
        });
        g.points += 1;
        g.max_ratio = g.max_ratio.max(float(r, "ratio", origin)?);
        g.over_bound += usize::from(field(r, "within_bound", origin)?.as_bool() != Some(true));
        g.vacuous += usize::from(field(r, "bound_vacuous", origin)?.as_bool() == Some(true));
    }
    let pass = groups.values().all(|g| g.over_bound == 0);
    Ok((
        SweepDigest {
            kind: "sweep",
            groups: groups.into_values().collect(),
        },
        pass,
    ))
}

pub fn report(a: &ReportArgs) -> Result<Verdict, CliError> {
    let origin = a.input.display().to_string();
    let text = std::fs::read_to_string(&a.input).map_err(|e| CliError::Invalid(format!("{origin}: {e}")))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{origin}:{}:{}: invalid JSON", e.line(), e.column())))?;
    let format = a.common.format.unwrap_or(Format::Json);
    let (out, pass) = if v.get("results").is_some() {
        let (d, pass) = digest_verify(&v, &origin)?;
        let out = match format {
            Format::Json => json_text(&d)?,
            Format::Csv => csv_text(&d.groups)?,
        };
        (out, pass)
    } else if v.get("rows").is_some() {
        let (d, pass) = digest_sweep(&v, &origin)?;
        let out = match format {
            Format::Json => json_text(&d)?,
            Format::Csv => csv_text(&d.groups)?,
        };
        (out, pass)
    } else {
        return Err(CliError::Invalid(format!(
            "{origin}: expected the JSON output of verify (\"results\") or sweep (\"rows\")"
        )));
    };
    emit(&a.common, &out)?;
    Ok(verdict(pass))
}
