//! Command-line front end: parses flags and `key = value` config files,
//! runs constants, functionals, checks and studies, and writes JSON or CSV.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration error (including inadmissible parameters).

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frachardy::constants::{sharp_constant_flat, sharp_constant_point, transverse_prefactor};
use frachardy::functions::{default_supercritical_eta, make_bump, make_radial, Profile, TestFunction};
use frachardy::params::Regime;
use frachardy::quadrature::{gagliardo, EngineKind, QuadratureSpec, DEFAULT_REL_TOL, DEFAULT_SAMPLES, DEFAULT_SEED};
use frachardy::verify::{
    check_ground_state_identity, check_hardy, check_hardy_sobolev, check_hsm, check_remainder_p_ge2,
    check_remainder_p_lt2, default_suites, hsm_failure_study, sharpness_study, CounterexampleStudy, HardySobolevForm,
    SharpnessStudy, SuiteDef, SuiteKind, SuiteSummary, TheoremId, VerificationReport, DEFAULT_SUITE_SIZE,
};
use frachardy::{HardyParams, SobolevParams, SobolevVariant, VERSION};
use serde::{Deserialize, Serialize};

use crate::config::{parse_list, resolve_seed, ConfigFile, SEED_ENV};
use crate::output::{
    num, report_rows, to_csv, to_json, write_output, EstimateRecord, ParamsRecord, ReportRecord, SuiteRecord,
    REPORT_COLUMNS,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Params(#[from] frachardy::Error),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "frachardy",
    version,
    about = "Sharp constants and inequality checks for fractional Hardy inequalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sharp constants C and C_1 of a tuple.
    Constant {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Weighted Gagliardo seminorm of one test function.
    Seminorm {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Checks one inequality on a function, or on a seeded bump suite.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Ratio Gagliardo/Hardy along the sequence u_N = eta * phi_N.
    Sharpness {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated N values.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<f64>>,
        /// Radius of the transverse bump phi.
        #[arg(long)]
        phi_radius: Option<f64>,
        #[arg(long)]
        phi_m: Option<u32>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Failure of the Hardy-Sobolev-Maz'ya inequality for k = d.
    Counterexample {
        #[command(flatten)]
        params: ParamArgs,
        /// Sobolev exponent; defaults to dp/(d - sp).
        #[arg(long)]
        q: Option<f64>,
        /// Comma-separated eps values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eps: Option<Vec<f64>>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Runs the default suites.
    Suite {
        /// Only suites whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
        /// Members per suite.
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Mc,
    Radial,
    Adaptive,
}

impl From<Engine> for EngineKind {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Mc => EngineKind::MonteCarlo,
            Engine::Radial => EngineKind::RadialReduction,
            Engine::Adaptive => EngineKind::Adaptive1d,
        }
    }
}

/// Options shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (written atomically); stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// RNG seed; falls back to the config file, then FRACHARDY_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Codimension of the singular set; defaults to d.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

/// A bump `(1 - |x-c|^2/r^2)_+^m` at `--center`, or the radial bump at the
/// origin with `--radial`.
#[derive(Debug, Clone, Default, Args)]
pub struct FunctionArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub radial: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CheckArgs {
    /// One of hardy, remainder_p_ge2, remainder_p_lt2, ground_state_identity,
    /// hardy_sobolev_ineq1, hardy_sobolev_ineq2, hsm_flat, hsm_log.
    #[arg(long)]
    pub theorem: Option<String>,
    /// Sobolev exponent; defaults to dp/(d - sp) for the hsm checks.
    #[arg(long)]
    pub q: Option<f64>,
    /// Exponent r of the W_r form.
    #[arg(long)]
    pub wr: Option<f64>,
    /// R of the logarithmic weight; defaults to twice the support radius.
    #[arg(long)]
    pub log_radius: Option<f64>,
    /// Suite size when no function is given.
    #[arg(long)]
    pub count: Option<usize>,
}

/// Resolved output settings.
struct Sink {
    format: Format,
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match execute(&cli.command, env_seed.as_deref()) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs a parsed command; `Ok(pass)` after the output is written.
pub fn execute(command: &Command, env_seed: Option<&str>) -> Result<bool, CliError> {
    match command {
        Command::Constant { params, run } => {
            let (file, sink) = prepare(run)?;
            let hp = resolve_params(params, &file)?;
            let spec = resolve_spec(run, &file, env_seed, EngineKind::Adaptive1d)?;
            constant(&hp, &spec, &sink)
        }
        Command::Seminorm { params, function, run } => {
            let (file, sink) = prepare(run)?;
            let hp = resolve_params(params, &file)?;
            let u = resolve_function(function, &file, &hp)?
                .unwrap_or(make_radial(hp.d(), Profile::Bump { radius: 1.0, m: 2 })?);
            let default =
                if hp.k() == hp.d() && u.is_radial() { EngineKind::RadialReduction } else { EngineKind::MonteCarlo };
            let spec = resolve_spec(run, &file, env_seed, default)?;
            seminorm(&hp, &u, &spec, &sink)
        }
        Command::Verify { params, function, check, run } => {
            let (file, sink) = prepare(run)?;
            let hp = resolve_params(params, &file)?;
            let u = resolve_function(function, &file, &hp)?;
            let spec = resolve_spec(run, &file, env_seed, EngineKind::MonteCarlo)?;
            verify(&hp, u.as_ref(), check, &file, &spec, &sink)
        }
        Command::Sharpness { params, n_list, phi_radius, phi_m, run } => {
            let (file, sink) = prepare(run)?;
            let hp = resolve_params(params, &file)?;
            let spec = resolve_spec(run, &file, env_seed, EngineKind::MonteCarlo)?;
            let n_list = file.get_list(n_list.clone(), "n_list")?.unwrap_or_else(|| vec![1.0, 4.0, 16.0, 64.0]);
            let radius = file.get(*phi_radius, "phi_radius")?.unwrap_or(1.0);
            let m = file.get(*phi_m, "phi_m")?.unwrap_or(2);
            let study = sharpness_study(&hp, &default_supercritical_eta(), radius, m, &n_list, &spec)?;
            sharpness(study, &spec, &sink)
        }
        Command::Counterexample { params, q, eps, run } => {
            let (file, sink) = prepare(run)?;
            let hp = resolve_params(params, &file)?;
            if hp.k() != hp.d() {
                return Err(CliError::Config("the counterexample study requires k = d".into()));
            }
            let spec = resolve_spec(run, &file, env_seed, EngineKind::Adaptive2d)?;
            let sob = match file.get(*q, "q")? {
                Some(q) => SobolevParams::new(hp, q, SobolevVariant::Log)?,
                None => SobolevParams::critical(hp, SobolevVariant::Log)?,
            };
            let eps = file.get_list(eps.clone(), "eps")?.unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]);
            let study = hsm_failure_study(&hp, &sob, &eps, spec.rel_tol)?;
            counterexample(study, &spec, &sink)
        }
        Command::Suite { filter, count, run } => {
            let (file, sink) = prepare(run)?;
            let spec = resolve_spec(run, &file, env_seed, EngineKind::MonteCarlo)?;
            let filter = file.get(filter.clone(), "filter")?;
            let count = file.get(*count, "count")?.unwrap_or(DEFAULT_SUITE_SIZE);
            let suites: Vec<SuiteDef> = default_suites()
                .into_iter()
                .filter(|s| filter.as_deref().is_none_or(|f| s.name.contains(f)))
                .map(|s| s.with_size(count))
                .collect();
            suite(&suites, &spec, &sink)
        }
    }
}

fn prepare(run: &RunArgs) -> Result<(ConfigFile, Sink), CliError> {
    let file = match &run.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let format = match (run.format, file.raw("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => Format::from_str(v, true).map_err(|_| CliError::Config(format!("invalid format '{v}'")))?,
        (None, None) => Format::Json,
    };
    let output = file.get(run.output.clone(), "output")?;
    Ok((file, Sink { format, output }))
}

fn resolve_params(args: &ParamArgs, file: &ConfigFile) -> Result<HardyParams, CliError> {
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| CliError::Config(format!("missing parameter {key}")));
    let d = file.get(args.d, "d")?.ok_or_else(|| CliError::Config("missing parameter d".into()))?;
    let k = file.get(args.k, "k")?.unwrap_or(d);
    let s = need(file.get(args.s, "s")?, "s")?;
    let p = need(file.get(args.p, "p")?, "p")?;
    let alpha = file.get(args.alpha, "alpha")?.unwrap_or(0.0);
    let beta = file.get(args.beta, "beta")?.unwrap_or(0.0);
    Ok(HardyParams::new(d, s, p, k, alpha, beta)?)
}

fn resolve_spec(
    run: &RunArgs,
    file: &ConfigFile,
    env_seed: Option<&str>,
    default_engine: EngineKind,
) -> Result<QuadratureSpec, CliError> {
    let engine = match (run.engine, file.raw("engine")) {
        (Some(e), _) => e.into(),
        (None, Some(v)) => {
            Engine::from_str(v, true).map_err(|_| CliError::Config(format!("invalid engine '{v}'")))?.into()
        }
        (None, None) => default_engine,
    };
    let spec = QuadratureSpec {
        engine,
        rel_tol: file.get(run.rel_tol, "rel_tol")?.unwrap_or(DEFAULT_REL_TOL),
        samples: file.get(run.samples, "samples")?.unwrap_or(DEFAULT_SAMPLES),
        seed: resolve_seed(run.seed, file, env_seed, DEFAULT_SEED)?,
        proposal_exponent: None,
    };
    spec.validate()?;
    Ok(spec)
}

fn resolve_function(
    args: &FunctionArgs,
    file: &ConfigFile,
    hp: &HardyParams,
) -> Result<Option<TestFunction>, CliError> {
    let center = match (&args.center, file.raw("center")) {
        (Some(c), _) => Some(c.clone()),
        (None, Some(v)) => Some(parse_list(v, "center")?),
        (None, None) => None,
    };
    let radial = file.get_bool(args.radial, "radial")?;
    let radius = file.get(args.radius, "radius")?.unwrap_or(if radial { 1.0 } else { 0.5 });
    let m = file.get(args.m, "m")?.unwrap_or(2);
    match (center, radial) {
        (Some(_), true) => Err(CliError::Config("--center and --radial are exclusive".into())),
        (Some(c), false) => {
            if c.len() != hp.d() {
                return Err(CliError::Config(format!("center has {} coordinates but d = {}", c.len(), hp.d())));
            }
            Ok(Some(make_bump(c, radius, m)?))
        }
        (None, true) => Ok(Some(make_radial(hp.d(), Profile::Bump { radius, m })?)),
        (None, false) => Ok(None),
    }
}

fn emit<T: Serialize>(sink: &Sink, json: &T, csv: impl FnOnce() -> Result<Vec<u8>, CliError>) -> Result<(), CliError> {
    let bytes = match sink.format {
        Format::Json => to_json(json)?,
        Format::Csv => csv()?,
    };
    write_output(sink.output.as_deref(), &bytes)
}

#[derive(Debug, Serialize, Deserialize)]
struct ConstantOutput {
    command: String,
    params: ParamsRecord,
    constant: EstimateRecord,
    point_constant: EstimateRecord,
    prefactor: f64,
    gamma: f64,
    regime: Regime,
    seed: u64,
    spec: QuadratureSpec,
    version: String,
}

fn constant(hp: &HardyParams, spec: &QuadratureSpec, sink: &Sink) -> Result<bool, CliError> {
    let c = sharp_constant_flat(hp)?;
    let c1 = sharp_constant_point(hp.k(), hp.s(), hp.p(), hp.alpha(), hp.beta())?;
    let pre = transverse_prefactor(hp.d(), hp.k(), hp.s(), hp.p())?;
    let out = ConstantOutput {
        command: "constant".into(),
        params: ParamsRecord::new(hp, None),
        constant: c.into(),
        point_constant: c1.into(),
        prefactor: pre,
        gamma: hp.gamma(),
        regime: hp.regime(),
        seed: spec.seed,
        spec: *spec,
        version: VERSION.into(),
    };
    emit(sink, &out, || {
        let header = [
            "d",
            "s",
            "p",
            "k",
            "alpha",
            "beta",
            "constant",
            "constant_error",
            "point_constant",
            "point_constant_error",
            "prefactor",
        ];
        let row = vec![
            hp.d().to_string(),
            num(hp.s()),
            num(hp.p()),
            hp.k().to_string(),
            num(hp.alpha()),
            num(hp.beta()),
            num(c.value),
            num(c.std_error),
            num(c1.value),
            num(c1.std_error),
            num(pre),
        ];
        to_csv(&header, &[row])
    })?;
    Ok(true)
}

#[derive(Debug, Serialize, Deserialize)]
struct SeminormOutput {
    command: String,
    params: ParamsRecord,
    function: String,
    seminorm: EstimateRecord,
    samples_used: u64,
    seed: u64,
    spec: QuadratureSpec,
    version: String,
}

fn seminorm(hp: &HardyParams, u: &TestFunction, spec: &QuadratureSpec, sink: &Sink) -> Result<bool, CliError> {
    let g = gagliardo(u, hp, spec)?;
    let out = SeminormOutput {
        command: "seminorm".into(),
        params: ParamsRecord::new(hp, None),
        function: u.describe(),
        seminorm: g.into(),
        samples_used: g.samples_used,
        seed: spec.seed,
        spec: *spec,
        version: VERSION.into(),
    };
    emit(sink, &out, || {
        let header = ["d", "s", "p", "k", "alpha", "beta", "function", "value", "std_error"];
        let row = vec![
            hp.d().to_string(),
            num(hp.s()),
            num(hp.p()),
            hp.k().to_string(),
            num(hp.alpha()),
            num(hp.beta()),
            out.function.clone(),
            num(g.value),
            num(g.std_error),
        ];
        to_csv(&header, &[row])
    })?;
    Ok(true)
}

/// Sobolev parameters for the checks that need `q`.
fn sobolev_for(hp: &HardyParams, id: TheoremId, q: Option<f64>) -> Result<Option<SobolevParams>, CliError> {
    let variant = match id {
        TheoremId::HardySobolevIneq1 | TheoremId::HardySobolevIneq2 | TheoremId::HsmFlat => SobolevVariant::Flat,
        TheoremId::HsmLog => SobolevVariant::Log,
        _ => return Ok(None),
    };
    let sob = match (q, id) {
        (Some(q), _) => SobolevParams::new(*hp, q, variant)?,
        (None, TheoremId::HsmFlat | TheoremId::HsmLog) => SobolevParams::critical(*hp, variant)?,
        (None, _) => return Err(CliError::Config(format!("{id} needs --q"))),
    };
    Ok(Some(sob))
}

fn suite_kind(id: TheoremId, wr: f64) -> Result<SuiteKind, CliError> {
    Ok(match id {
        TheoremId::Hardy => SuiteKind::Hardy,
        TheoremId::RemainderPGe2 => SuiteKind::RemainderPGe2,
        TheoremId::RemainderPLt2 => SuiteKind::RemainderPLt2 { nonnegative_constant: true },
        TheoremId::GroundStateIdentity => SuiteKind::GroundStateIdentity,
        TheoremId::HardySobolevIneq1 => SuiteKind::HardySobolev { form: HardySobolevForm::Ineq1 },
        TheoremId::HardySobolevIneq2 => SuiteKind::HardySobolev { form: HardySobolevForm::Ineq2 { r: wr } },
        TheoremId::HsmFlat => SuiteKind::Hsm { log_variant: false },
        TheoremId::HsmLog => SuiteKind::Hsm { log_variant: true },
        TheoremId::LogHardySobolev => {
            return Err(CliError::Config("log_hardy_sobolev has no numerical check".into()));
        }
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct VerifySuiteOutput {
    command: String,
    theorem_id: String,
    params: ParamsRecord,
    all_pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    median_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_ratio_lower: Option<f64>,
    results: Vec<ReportRecord>,
    seed: u64,
    spec: QuadratureSpec,
    version: String,
}

fn verify(
    hp: &HardyParams,
    u: Option<&TestFunction>,
    check: &CheckArgs,
    file: &ConfigFile,
    spec: &QuadratureSpec,
    sink: &Sink,
) -> Result<bool, CliError> {
    let name = file.get(check.theorem.clone(), "theorem")?.unwrap_or_else(|| "hardy".into());
    let id = TheoremId::parse(&name).ok_or_else(|| CliError::Config(format!("unknown theorem '{name}'")))?;
    let sob = sobolev_for(hp, id, file.get(check.q, "q")?)?;
    let wr = file.get(check.wr, "wr")?.unwrap_or(2.0);
    let kind = suite_kind(id, wr)?;
    let Some(u) = u else {
        let count = file.get(check.count, "count")?.unwrap_or(DEFAULT_SUITE_SIZE);
        let mut def = SuiteDef::new(format!("verify {name}"), kind, *hp).with_size(count);
        if let Some(s) = sob {
            def = def.with_sobolev(s);
        }
        let summary = def.run(spec)?;
        let results: Vec<ReportRecord> = summary.reports.iter().map(|r| ReportRecord::new(r, spec)).collect();
        let out = VerifySuiteOutput {
            command: "verify".into(),
            theorem_id: id.as_str().into(),
            params: ParamsRecord::new(hp, sob.as_ref()),
            all_pass: summary.all_pass,
            min_ratio: summary.min_ratio,
            median_ratio: summary.median_ratio,
            min_ratio_lower: summary.min_ratio_lower,
            results,
            seed: spec.seed,
            spec: *spec,
            version: VERSION.into(),
        };
        emit(sink, &out, || to_csv(&REPORT_COLUMNS, &report_rows(&out.results)))?;
        return Ok(summary.all_pass);
    };
    let log_radius = file.get(check.log_radius, "log_radius")?;
    let report: VerificationReport = match kind {
        SuiteKind::Hardy => check_hardy(u, hp, spec)?,
        SuiteKind::RemainderPGe2 => check_remainder_p_ge2(u, hp, spec)?,
        SuiteKind::RemainderPLt2 { .. } => check_remainder_p_lt2(u, hp, spec)?,
        SuiteKind::GroundStateIdentity => check_ground_state_identity(u, hp, spec)?,
        SuiteKind::HardySobolev { form } => check_hardy_sobolev(u, sob.as_ref().expect("q"), spec, form)?,
        SuiteKind::Hsm { log_variant } => check_hsm(u, sob.as_ref().expect("q"), spec, log_variant, log_radius)?,
    };
    let record = ReportRecord::new(&report, spec);
    emit(sink, &record, || to_csv(&REPORT_COLUMNS, &report_rows(std::slice::from_ref(&record))))?;
    let ratio_ok = report.skipped || report.ratio_lower_bound().is_none_or(|v| v > 0.0);
    Ok(report.pass && ratio_ok)
}

#[derive(Debug, Serialize)]
struct StudyOutput<'a, T> {
    command: &'a str,
    pass: bool,
    study: &'a T,
    seed: u64,
    spec: QuadratureSpec,
    version: &'a str,
}

fn sharpness(study: SharpnessStudy, spec: &QuadratureSpec, sink: &Sink) -> Result<bool, CliError> {
    let pass = study.pass();
    let out = StudyOutput { command: "sharpness", pass, study: &study, seed: spec.seed, spec: *spec, version: VERSION };
    emit(sink, &out, || {
        let header = ["n", "lhs", "lhs_error", "hardy", "ratio", "ratio_sigma", "margin", "margin_sigma", "i1p", "i2p"];
        let rows: Vec<Vec<String>> = study
            .rows
            .iter()
            .map(|r| {
                vec![
                    num(r.n),
                    num(r.lhs.value),
                    num(r.lhs.std_error),
                    num(r.hardy.value),
                    num(r.ratio),
                    num(r.ratio_sigma),
                    num(r.margin),
                    num(r.margin_sigma),
                    num(r.i1p.value),
                    num(r.i2p.value),
                ]
            })
            .collect();
        to_csv(&header, &rows)
    })?;
    Ok(pass)
}

fn counterexample(study: CounterexampleStudy, spec: &QuadratureSpec, sink: &Sink) -> Result<bool, CliError> {
    let pass = study.pass();
    let out =
        StudyOutput { command: "counterexample", pass, study: &study, seed: spec.seed, spec: *spec, version: VERSION };
    emit(sink, &out, || {
        let rows: Vec<Vec<String>> =
            study.rows.iter().map(|r| vec![num(r.eps), num(r.psi), num(study.slope)]).collect();
        to_csv(&["eps", "psi", "slope"], &rows)
    })?;
    Ok(pass)
}

#[derive(Debug, Serialize, Deserialize)]
struct SuiteOutput {
    command: String,
    all_pass: bool,
    results: Vec<SuiteRecord>,
    seed: u64,
    spec: QuadratureSpec,
    version: String,
}

fn suite(suites: &[SuiteDef], spec: &QuadratureSpec, sink: &Sink) -> Result<bool, CliError> {
    let summaries: Vec<SuiteSummary> = suites.iter().map(|s| s.run(spec)).collect::<Result<_, _>>()?;
    let all_pass = summaries.iter().all(|s| s.all_pass);
    let out = SuiteOutput {
        command: "suite".into(),
        all_pass,
        results: summaries.iter().map(|s| SuiteRecord::new(s, spec)).collect(),
        seed: spec.seed,
        spec: *spec,
        version: VERSION.into(),
    };
    emit(sink, &out, || {
        let records: Vec<ReportRecord> = out.results.iter().flat_map(|s| s.reports.iter().cloned()).collect();
        to_csv(&REPORT_COLUMNS, &report_rows(&records))
    })?;
    Ok(all_pass)
}
