//! Randomized two-sided verification of catalog identities.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::catalog::{self, Constraint, Domain, Expr, Identity};
use crate::series::{termination_index, Binding, Value};

pub const TOOL_VERSION: &str = concat!("foxwright ", env!("CARGO_PKG_VERSION"));
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;
/// Fraction of failing trials at which an identity is flagged as a
/// systematic discrepancy.
pub const DISCREPANCY_FRACTION: f64 = 0.9;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("no admissible binding for `{identity}` (trial {trial_index}) after {attempts} attempts: {last_reason}")]
    SamplingExhausted {
        identity: String,
        trial_index: u64,
        attempts: usize,
        last_reason: String,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot encode report: {0}")]
    Encode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for SamplingBox {
    fn default() -> Self {
        SamplingBox {
            re_min: -3.0,
            re_max: 3.0,
            im_min: -1.0,
            im_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub identity: String,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub n_max: u64,
    pub m_max: u64,
    pub sampling_box: SamplingBox,
    pub pole_distance: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            identity: String::new(),
            trials: 100,
            seed: 0,
            tol: 1e-8,
            n_max: 12,
            m_max: 4,
            sampling_box: SamplingBox::default(),
            pole_distance: 1e-3,
        }
    }
}

impl TrialConfig {
    pub fn for_identity(name: &str) -> Self {
        TrialConfig {
            identity: name.to_string(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.to_string()));
        let b = &self.sampling_box;
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol must be positive");
        }
        if self.pole_distance.is_nan() || self.pole_distance < 0.0 {
            return bad("pole_distance must be nonnegative");
        }
        if !(b.re_min <= b.re_max && b.im_min <= b.im_max) || ![b.re_min, b.re_max, b.im_min, b.im_max].iter().all(|x| x.is_finite()) {
            return bad("sampling box bounds must be finite and ordered");
        }
        Ok(())
    }
}

/// Per-trial generator: one ChaCha stream per trial index under the seed.
fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn integer_range(id: &Identity, symbol: &str, cfg: &TrialConfig) -> u64 {
    let mut hi = if symbol == "m" { cfg.m_max } else { cfg.n_max };
    for c in &id.constraints {
        if let Constraint::AtMost { symbol: s, bound } = c {
            if s == symbol {
                hi = hi.min((*bound).max(0) as u64);
            }
        }
    }
    hi
}

/// Draws an admissible binding; deterministic in `(cfg.seed, trial_index)`.
pub fn sample_binding(id: &Identity, cfg: &TrialConfig, trial_index: u64) -> Result<Binding, HarnessError> {
    let mut rng = trial_rng(cfg.seed, trial_index);
    let bx = cfg.sampling_box;
    let mut last_reason = String::new();
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let mut b = Binding::new();
        for (name, domain) in &id.symbols {
            if id.is_pinned(name) {
                continue;
            }
            match domain {
                Domain::NonnegInt => {
                    let hi = integer_range(id, name, cfg);
                    b.set_int(name, rng.gen_range(0..=hi) as i64);
                }
                Domain::Complex => {
                    let re = uniform(&mut rng, bx.re_min, bx.re_max);
                    let im = uniform(&mut rng, bx.im_min, bx.im_max);
                    b.set_complex(name, Complex64::new(re, im));
                }
            }
        }
        let b = match id.complete_binding(&b) {
            Ok(b) => b,
            Err(e) => {
                last_reason = e.to_string();
                continue;
            }
        };
        match id.screen(&b, cfg.pole_distance) {
            Ok(None) => return Ok(b),
            Ok(Some(reason)) => last_reason = reason,
            Err(e) => last_reason = e.to_string(),
        }
    }
    Err(HarnessError::SamplingExhausted {
        identity: id.name.clone(),
        trial_index,
        attempts: MAX_SAMPLING_ATTEMPTS,
        last_reason,
    })
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Pass,
    Fail,
    Error,
}

/// Scientific notation with 17 significant digits, `null` when not finite.
fn sci<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x.filter(|x| x.is_finite()) {
        None => s.serialize_none(),
        Some(v) => {
            let raw = serde_json::value::RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub binding: Option<Binding>,
    #[serde(with = "crate::serde_complex::option")]
    pub lhs: Option<Complex64>,
    #[serde(with = "crate::serde_complex::option")]
    pub rhs: Option<Complex64>,
    #[serde(serialize_with = "sci")]
    pub rel_err: Option<f64>,
    pub status: TrialStatus,
    pub error: Option<String>,
    /// Largest number of terms summed by any series in the LHS.
    pub termination_length: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    PaperDiscrepancy,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::PaperDiscrepancy => "PAPER-DISCREPANCY",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub pass_count: usize,
    pub fail_count: usize,
    pub error_count: usize,
    #[serde(serialize_with = "sci")]
    pub max_rel_err: Option<f64>,
    #[serde(serialize_with = "sci")]
    pub mean_rel_err: Option<f64>,
    pub discrepancy: bool,
    pub verdict: Verdict,
}

impl Aggregate {
    /// Recomputes the aggregate from records. `verdict` is `Pass` or `Fail`
    /// here; the discrepancy label is applied by [`verify_all`].
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let pass_count = records.iter().filter(|r| r.status == TrialStatus::Pass).count();
        let fail_count = records.iter().filter(|r| r.status == TrialStatus::Fail).count();
        let error_count = records.iter().filter(|r| r.status == TrialStatus::Error).count();
        let errs: Vec<f64> = records
            .iter()
            .filter_map(|r| r.rel_err)
            .filter(|x| x.is_finite())
            .collect();
        let max_rel_err = errs.iter().copied().reduce(f64::max);
        let mean_rel_err = (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64);
        let trials = records.len();
        let failing = fail_count + error_count;
        Aggregate {
            trials,
            pass_count,
            fail_count,
            error_count,
            max_rel_err,
            mean_rel_err,
            discrepancy: trials > 0 && failing as f64 >= DISCREPANCY_FRACTION * trials as f64,
            verdict: if failing == 0 { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub config: TrialConfig,
    pub provenance: String,
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub wall_time_ms: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.aggregate.verdict == Verdict::Pass
    }
}

fn series_length(e: &Expr, b: &Binding) -> Option<u64> {
    match e {
        Expr::Series(spec) => termination_index(spec, b).ok().flatten().map(|k| k + 1),
        Expr::Sum { var, upper, body } => {
            let hi = upper.eval_index(b).ok()?;
            let mut inner = b.clone();
            (0..=hi)
                .filter_map(|i| {
                    inner.set_int(var, i as i64);
                    series_length(body, &inner)
                })
                .max()
        }
        Expr::Pow(x, _) | Expr::Neg(x) => series_length(x, b),
        Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
            match (series_length(x, b), series_length(y, b)) {
                (Some(p), Some(q)) => Some(p.max(q)),
                (p, q) => p.or(q),
            }
        }
        _ => None,
    }
}

fn run_trial(id: &Identity, cfg: &TrialConfig, trial_index: u64) -> TrialRecord {
    let binding = match sample_binding(id, cfg, trial_index) {
        Ok(b) => b,
        Err(e) => {
            return TrialRecord {
                trial_index,
                binding: None,
                lhs: None,
                rhs: None,
                rel_err: None,
                status: TrialStatus::Error,
                error: Some(e.to_string()),
                termination_length: None,
            }
        }
    };
    let termination_length = series_length(&id.lhs, &binding);
    match id.check(&binding, cfg.tol) {
        Ok(rec) => TrialRecord {
            trial_index,
            binding: Some(binding),
            lhs: Some(rec.lhs),
            rhs: Some(rec.rhs),
            rel_err: Some(rec.rel_err),
            status: if rec.pass { TrialStatus::Pass } else { TrialStatus::Fail },
            error: None,
            termination_length,
        },
        Err(e) => TrialRecord {
            trial_index,
            binding: Some(binding),
            lhs: None,
            rhs: None,
            rel_err: None,
            status: TrialStatus::Error,
            error: Some(e.to_string()),
            termination_length,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Verifies an identity record that need not be in the registry.
pub fn verify_definition(id: &Identity, cfg: &TrialConfig, exec: Execution) -> Result<VerificationReport, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let indices = 0..cfg.trials as u64;
    let records: Vec<TrialRecord> = match exec {
        Execution::Serial => indices.map(|t| run_trial(id, cfg, t)).collect(),
        Execution::Parallel => indices.into_par_iter().map(|t| run_trial(id, cfg, t)).collect(),
    };
    let aggregate = Aggregate::from_records(&records);
    Ok(VerificationReport {
        tool_version: TOOL_VERSION.to_string(),
        config: TrialConfig {
            identity: id.name.clone(),
            ..cfg.clone()
        },
        provenance: id.provenance.clone(),
        records,
        aggregate,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn verify_identity(cfg: &TrialConfig) -> Result<VerificationReport, HarnessError> {
    verify_identity_with(cfg, Execution::Parallel)
}

pub fn verify_identity_with(cfg: &TrialConfig, exec: Execution) -> Result<VerificationReport, HarnessError> {
    let id = catalog::lookup(&cfg.identity).map_err(|_| HarnessError::UnknownIdentity(cfg.identity.clone()))?;
    verify_definition(id, cfg, exec)
}

/// Identities related by specialization or limit; used to decide whether a
/// systematic failure points at the stated formula rather than the engine.
pub fn neighbors(name: &str) -> &'static [&'static str] {
    match name {
        "whipple" => &["whipple-terminating"],
        "whipple-terminating" => &["whipple", "thm1"],
        "dougall" => &["dougall-terminating", "dougall-4f3-limit"],
        "dougall-terminating" => &["dougall", "thm1"],
        "dougall-4f3-limit" => &["dougall"],
        "dixon" => &["sixf5-transform", "sixf5-evaluation"],
        "sixf5-transform" => &["dixon", "sixf5-evaluation"],
        "sixf5-evaluation" => &["sixf5-transform", "thm5"],
        "chu-shift-denominator" => &["whipple-terminating", "thm2"],
        "chu-shift-numerator" => &["whipple-terminating", "thm3"],
        "thm1" => &["thm2", "thm3", "whipple-terminating"],
        "example1" | "example2" => &["thm1"],
        "thm2" | "thm3" => &["thm1"],
        "cor1" => &["example3", "example4"],
        "example3" | "example4" => &["cor1"],
        "cor2" => &["example5", "example6"],
        "example5" | "example6" => &["cor2"],
        "thm4" => &["cor3"],
        "cor3" => &["thm4", "cor4"],
        "cor4" => &["cor3"],
        "thm5" => &["cor5", "sixf5-evaluation"],
        "cor5" => &["thm5"],
        _ => &[],
    }
}

/// Applies the discrepancy policy across a set of reports: a flagged
/// identity whose verified neighbors all pass is labelled PAPER-DISCREPANCY.
pub fn label_discrepancies(reports: &mut [VerificationReport]) {
    let passing: Vec<(String, bool)> = reports
        .iter()
        .map(|r| (r.config.identity.clone(), r.all_pass()))
        .collect();
    for r in reports.iter_mut() {
        if !r.aggregate.discrepancy {
            continue;
        }
        let verified: Vec<bool> = neighbors(&r.config.identity)
            .iter()
            .filter_map(|n| passing.iter().find(|(name, _)| name == n).map(|(_, ok)| *ok))
            .collect();
        let all_near_pass = !verified.is_empty() && verified.iter().all(|ok| *ok);
        if all_near_pass {
            r.aggregate.verdict = Verdict::PaperDiscrepancy;
        }
    }
}

/// One report per registry entry, alphabetical, all sharing `base.seed`.
pub fn verify_all(base: &TrialConfig) -> Result<Vec<VerificationReport>, HarnessError> {
    verify_all_with(base, Execution::Parallel)
}

pub fn verify_all_with(base: &TrialConfig, exec: Execution) -> Result<Vec<VerificationReport>, HarnessError> {
    let mut reports = catalog::list_identities()
        .iter()
        .map(|id| verify_definition(id, base, exec))
        .collect::<Result<Vec<_>, _>>()?;
    label_discrepancies(&mut reports);
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

pub fn render_json<T: Serialize + ?Sized>(value: &T) -> Result<String, HarnessError> {
    serde_json::to_string_pretty(value).map_err(|e| HarnessError::Encode(e.to_string()))
}

pub const CSV_HEADER: [&str; 10] = [
    "identity",
    "trial_index",
    "status",
    "rel_err",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "termination_length",
    "binding",
];

fn fmt_binding(b: &Binding) -> String {
    b.iter()
        .map(|(k, v)| match v {
            Value::Int(i) => format!("{k}={i}"),
            Value::Complex(z) => format!("{k}={:.17e}{:+.17e}i", z.re, z.im),
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn render_csv(reports: &[VerificationReport]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| HarnessError::Encode(e.to_string());
    w.write_record(CSV_HEADER).map_err(enc)?;
    for r in reports {
        for t in &r.records {
            let status = match t.status {
                TrialStatus::Pass => "pass",
                TrialStatus::Fail => "fail",
                TrialStatus::Error => "error",
            };
            w.write_record([
                r.config.identity.clone(),
                t.trial_index.to_string(),
                status.to_string(),
                opt_sci(t.rel_err),
                opt_sci(t.lhs.map(|z| z.re)),
                opt_sci(t.lhs.map(|z| z.im)),
                opt_sci(t.rhs.map(|z| z.re)),
                opt_sci(t.rhs.map(|z| z.im)),
                t.termination_length.map(|k| k.to_string()).unwrap_or_default(),
                t.binding.as_ref().map(fmt_binding).unwrap_or_default(),
            ])
            .map_err(enc)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Encode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Encode(e.to_string()))
}

pub fn summary_line(r: &VerificationReport) -> String {
    let a = &r.aggregate;
    format!(
        "{}: {}/{} passed, max rel_err {}, {}",
        r.config.identity,
        a.pass_count,
        a.trials,
        a.max_rel_err.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "n/a".into()),
        a.verdict.label()
    )
}

pub fn render_table(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<24} {:>7} {:>7} {:>7} {:>12} {:>12}  verdict", "identity", "trials", "pass", "error", "max_rel_err", "mean_rel_err");
    for r in reports {
        let a = &r.aggregate;
        let e = |x: Option<f64>| x.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<24} {:>7} {:>7} {:>7} {:>12} {:>12}  {}",
            r.config.identity,
            a.trials,
            a.pass_count,
            a.error_count,
            e(a.max_rel_err),
            e(a.mean_rel_err),
            a.verdict.label()
        );
    }
    for r in reports {
        for t in r.records.iter().filter(|t| t.status != TrialStatus::Pass) {
            let _ = writeln!(
                out,
                "  {} trial {}: {} rel_err={} {}",
                r.config.identity,
                t.trial_index,
                match t.status {
                    TrialStatus::Fail => "FAIL",
                    _ => "ERROR",
                },
                opt_sci(t.rel_err),
                t.error.clone().unwrap_or_else(|| t.binding.as_ref().map(fmt_binding).unwrap_or_default())
            );
        }
    }
    let passed: usize = reports.iter().map(|r| r.aggregate.pass_count).sum();
    let total: usize = reports.iter().map(|r| r.aggregate.trials).sum();
    let ok = reports.iter().filter(|r| r.all_pass()).count();
    let _ = writeln!(
        out,
        "summary: {passed}/{total} trials passed; {ok}/{} identities PASS",
        reports.len()
    );
    out
}

pub fn render(reports: &[VerificationReport], format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Json if reports.len() == 1 => render_json(&reports[0]),
        ReportFormat::Json => render_json(reports),
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Table => Ok(render_table(reports)),
    }
}

pub fn write_report(report: &VerificationReport, path: &Path, format: ReportFormat) -> Result<(), HarnessError> {
    write_reports(std::slice::from_ref(report), path, format)
}

/// Writes several reports to one file (a JSON array when more than one).
pub fn write_reports(reports: &[VerificationReport], path: &Path, format: ReportFormat) -> Result<(), HarnessError> {
    let text = render(reports, format)?;
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
