//! Output records, JSON/CSV encoding and atomic file writes.

use std::io::Write;
use std::path::Path;

use frachardy::quadrature::QuadratureSpec;
use frachardy::verify::{SuiteSummary, VerificationReport};
use frachardy::{Estimate, HardyParams, SobolevParams, VERSION};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Fixed column order of report CSVs.
pub const REPORT_COLUMNS: [&str; 15] = [
    "theorem_id",
    "d",
    "s",
    "p",
    "k",
    "alpha",
    "beta",
    "q",
    "lhs",
    "hardy",
    "constant",
    "rhs",
    "margin",
    "sigma",
    "pass",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub std_error: f64,
}

impl From<Estimate> for EstimateRecord {
    fn from(e: Estimate) -> Self {
        Self { value: e.value, std_error: e.std_error }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub d: usize,
    pub s: f64,
    pub p: f64,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl ParamsRecord {
    pub fn new(hp: &HardyParams, sob: Option<&SobolevParams>) -> Self {
        Self {
            d: hp.d(),
            s: hp.s(),
            p: hp.p(),
            k: hp.k(),
            alpha: hp.alpha(),
            beta: hp.beta(),
            q: sob.map(|s| s.q()),
            theta: sob.map(|s| s.theta()),
        }
    }
}

/// One verification report in the output schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub theorem_id: String,
    pub params: ParamsRecord,
    pub function: String,
    pub lhs: EstimateRecord,
    pub hardy: EstimateRecord,
    pub constant: f64,
    pub constant_error: f64,
    pub rhs: EstimateRecord,
    pub remainder_constant: f64,
    pub margin: f64,
    pub sigma: f64,
    pub pass: bool,
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_radius: Option<f64>,
    pub seed: u64,
    pub spec: QuadratureSpec,
    pub version: String,
}

impl ReportRecord {
    /// `spec` is the run's spec; its seed is replaced by the report's.
    pub fn new(r: &VerificationReport, spec: &QuadratureSpec) -> Self {
        Self {
            theorem_id: r.theorem_id.as_str().to_string(),
            params: ParamsRecord::new(&r.params, r.sobolev.as_ref()),
            function: r.function.clone(),
            lhs: r.lhs.into(),
            hardy: r.hardy_term.into(),
            constant: r.constant,
            constant_error: r.constant_error,
            rhs: r.remainder_or_rhs.into(),
            remainder_constant: r.remainder_constant,
            margin: r.margin,
            sigma: r.sigma,
            pass: r.pass,
            skipped: r.skipped,
            empirical_ratio: r.empirical_ratio,
            ratio_sigma: r.ratio_sigma,
            log_radius: r.log_radius,
            seed: r.seed,
            spec: spec.with_seed(r.seed),
            version: VERSION.to_string(),
        }
    }
}

/// One suite in the output schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub name: String,
    pub theorem_id: String,
    pub params: ParamsRecord,
    pub all_pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ratio_lower: Option<f64>,
    pub reports: Vec<ReportRecord>,
}

impl SuiteRecord {
    pub fn new(s: &SuiteSummary, spec: &QuadratureSpec) -> Self {
        Self {
            name: s.name.clone(),
            theorem_id: s.theorem_id.as_str().to_string(),
            params: ParamsRecord::new(&s.params, s.sobolev.as_ref()),
            all_pass: s.all_pass,
            min_ratio: s.min_ratio,
            median_ratio: s.median_ratio,
            min_ratio_lower: s.min_ratio_lower,
            reports: s.reports.iter().map(|r| ReportRecord::new(r, spec)).collect(),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// CSV with the given header and rows.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// One CSV row per report, in [`REPORT_COLUMNS`] order.
pub fn report_rows(records: &[ReportRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            let p = &r.params;
            vec![
                r.theorem_id.clone(),
                p.d.to_string(),
                num(p.s),
                num(p.p),
                p.k.to_string(),
                num(p.alpha),
                num(p.beta),
                p.q.map(num).unwrap_or_default(),
                num(r.lhs.value),
                num(r.hardy.value),
                num(r.constant),
                num(r.rhs.value),
                num(r.margin),
                num(r.sigma),
                r.pass.to_string(),
            ]
        })
        .collect()
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()));
    };
    let fail = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
