//! Experiment configuration, orchestration, exponent fitting and the
//! acceptance suite. Everything here is deterministic given the
//! configuration and seed: outputs carry no timestamps or timings.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dilation::{ExponentSpec, ExponentStructure, NormalizationSequence};
use crate::error::{invalid, Error, Result};
use crate::lattice::Site;
use crate::occupation::{self, ProfileF, Restriction};
use crate::par::Execution;
use crate::stablelaw::{self, LimitLaw};
use crate::steplaw::{LawSpec, StepLaw};
use crate::varconst::{self, Domain};
use crate::wreath::{self, LampGroupModel};

/// Version tag every configuration file must carry.
pub const CONFIG_VERSION: u32 = 1;

/// sha256 of the canonical JSON form of a configuration.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_string(config).expect("configuration serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn check_version(v: u32) -> Result<()> {
    if v != CONFIG_VERSION {
        return Err(Error::Config(format!("configuration version {v} is not supported (expected {CONFIG_VERSION})")));
    }
    Ok(())
}

/// Path lengths to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    List(Vec<u64>),
    Geometric { start: u64, factor: u64, count: usize },
}

impl Schedule {
    pub fn values(&self) -> Result<Vec<u64>> {
        let v = match self {
            Schedule::List(v) => v.clone(),
            Schedule::Geometric { start, factor, count } => {
                if *factor < 2 {
                    return Err(Error::Config("geometric schedule needs factor ≥ 2".into()));
                }
                let mut out = Vec::with_capacity(*count);
                let mut n = *start;
                for _ in 0..*count {
                    out.push(n);
                    n = n.checked_mul(*factor).ok_or_else(|| Error::Config("schedule overflows".into()))?;
                }
                out
            }
        };
        if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("schedule must be nonempty and strictly increasing".into()));
        }
        Ok(v)
    }
}

/// Endpoint restriction ‖B_{a_n}⁻¹ X_n‖ ≤ radius, with a_n solved from the
/// profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictSpec {
    pub radius: f64,
    pub exponent: ExponentSpec,
}

/// Where the values of an experiment come from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    /// Monte Carlo E[exp(-Σ F(l(n,x)))].
    Laplace {
        profile: ProfileF,
        #[serde(default)]
        restrict: Option<RestrictSpec>,
    },
    /// Exact E[exp(-ν D_n)] from the range dynamic program.
    RangeDp { nu: f64 },
    /// Exact value by enumerating all paths.
    EnumeratePaths { profile: ProfileF },
    /// Monte Carlo q^(n)((e, g)) through the occupation identity.
    WreathMc {
        lamp: LampGroupModel,
        #[serde(default = "yes")]
        exact_lstar: bool,
        #[serde(default = "default_lamp_cap")]
        lamp_cap: u64,
        #[serde(default)]
        endpoint: Vec<i64>,
    },
    /// Exact q^(n)(e) on Z_2≀Z.
    WreathZ2z,
}

fn yes() -> bool {
    true
}

fn default_lamp_cap() -> u64 {
    256
}

fn default_replicas() -> u64 {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub predicted: f64,
    #[serde(default)]
    pub log_correction: Option<f64>,
    /// Inclusive range of n; defaults to the top half of the schedule.
    #[serde(default)]
    pub window: Option<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub version: u32,
    pub law: LawSpec,
    pub source: Source,
    pub schedule: Schedule,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fit: Option<FitSpec>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version)?;
        self.schedule.values()?;
        StepLaw::new(self.law.clone())?;
        let mc = matches!(self.source, Source::Laplace { .. } | Source::WreathMc { .. });
        if mc && self.replicas < 2 {
            return Err(Error::Config("Monte Carlo runs need at least two replicas".into()));
        }
        match &self.source {
            Source::Laplace { profile, .. } | Source::EnumeratePaths { profile } => profile.validate()?,
            Source::WreathMc { lamp, .. } => lamp.validate()?,
            Source::RangeDp { nu } if !(*nu >= 0.0) => return Err(invalid("ν must be nonnegative")),
            _ => {}
        }
        Ok(())
    }

    fn is_exact(&self) -> bool {
        matches!(self.source, Source::RangeDp { .. } | Source::EnumeratePaths { .. } | Source::WreathZ2z)
    }
}

/// One row of an experiment table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub n: u64,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub exact: bool,
    pub skipped: Option<String>,
}

fn skippable(e: &Error) -> bool {
    matches!(e, Error::CapExceeded(_) | Error::FrequencyBox(_) | Error::NoScalingRoot { .. })
}

/// One row per scheduled n. Rows whose oracle hits a cap are kept and
/// marked skipped.
pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<Row>> {
    spec.validate()?;
    let law = StepLaw::new(spec.law.clone())?;
    let schedule = spec.schedule.values()?;
    let exact = spec.is_exact();
    let lamp_profile = match &spec.source {
        Source::WreathMc { lamp, lamp_cap, .. } => Some(lamp.profile(*lamp_cap)?),
        _ => None,
    };
    let restrict_ns = match &spec.source {
        Source::Laplace { restrict: Some(r), profile } => {
            let ns = NormalizationSequence::floor(ExponentStructure::from_spec(&r.exponent)?);
            Some((varconst::solve_scaling(profile, &ns)?, r.radius))
        }
        _ => None,
    };
    let one = |n: u64| -> Result<(f64, Option<f64>)> {
        match &spec.source {
            Source::Laplace { profile, .. } => {
                let restriction = match &restrict_ns {
                    Some((sol, radius)) => Some(Restriction {
                        radius: *radius,
                        normalization: sol.normalization.clone(),
                        a_n: sol.a_n(n.max(1))?,
                    }),
                    None => None,
                };
                let e = occupation::estimate_laplace(&law, n, profile, spec.replicas, spec.seed, restriction.as_ref(), exec)?;
                Ok((e.mean, Some(e.stderr)))
            }
            Source::RangeDp { nu } => Ok((occupation::range_laplace(&law, n, *nu, exec)?.value, None)),
            Source::EnumeratePaths { profile } => Ok((occupation::enumerate_paths(&law, n, profile)?.value, None)),
            Source::WreathMc { exact_lstar, endpoint, .. } => {
                let g = if endpoint.is_empty() { Site::ORIGIN } else { Site::from_slice(endpoint) };
                let e = wreath::wreath_return_estimate(
                    &law,
                    lamp_profile.as_ref().unwrap(),
                    n,
                    &g,
                    spec.replicas,
                    spec.seed,
                    *exact_lstar,
                    exec,
                )?;
                Ok((e.mean, Some(e.stderr)))
            }
            Source::WreathZ2z => Ok((wreath::wreath_exact_z2z(&law, n)?, None)),
        }
    };
    let results = exec.map(schedule.len(), |i| one(schedule[i]));
    let mut rows = Vec::with_capacity(schedule.len());
    for (n, r) in schedule.iter().zip(results) {
        match r {
            Ok((v, se)) => rows.push(Row { n: *n, value: Some(v), stderr: se, exact, skipped: None }),
            Err(e) if skippable(&e) => {
                rows.push(Row { n: *n, value: None, stderr: None, exact, skipped: Some(e.to_string()) })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with a leading `# config_sha256=` comment.
pub fn rows_to_csv(rows: &[Row], hash: &str) -> String {
    let mut s = format!("# config_sha256={hash}\nn,value,stderr,exact,skipped\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.n,
            fmt_opt(r.value),
            fmt_opt(r.stderr),
            r.exact,
            csv_field(r.skipped.as_deref().unwrap_or(""))
        );
    }
    s
}

/// (n, value) pairs from a CSV written by [`rows_to_csv`]; skipped rows
/// are left out.
pub fn rows_from_csv(text: &str) -> Result<Vec<(u64, f64)>> {
    let mut out = Vec::new();
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let ni = cols.iter().position(|c| *c == "n").ok_or_else(|| Error::Config("CSV lacks an n column".into()))?;
    let vi = cols.iter().position(|c| *c == "value").ok_or_else(|| Error::Config("CSV lacks a value column".into()))?;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let n: u64 = f.get(ni).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Config(format!("bad row: {line}")))?;
        match f.get(vi).map(|s| s.trim()) {
            Some("") | None => continue,
            Some(v) => out.push((n, v.parse().map_err(|_| Error::Config(format!("bad value: {line}")))?)),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub predicted: f64,
    pub slope_error: f64,
    /// (-log value)/(n^predicted (log n)^c) at the largest n in the window.
    pub constant_at_last: f64,
    pub window: (u64, u64),
    pub rows_used: usize,
    pub residual_rms: f64,
}

/// Least squares of log(-log value) on log n, after subtracting
/// c·log log n when a log correction exponent c is given.
pub fn fit_exponent(
    rows: &[(u64, f64)],
    predicted: f64,
    log_correction: Option<f64>,
    window: Option<(u64, u64)>,
) -> Result<FitResult> {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.0);
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            if sorted.is_empty() {
                return Err(invalid("no rows to fit"));
            }
            let half = (sorted.len() / 2).min(sorted.len().saturating_sub(4));
            (sorted[half].0, sorted.last().unwrap().0)
        }
    };
    let used: Vec<(u64, f64)> = sorted.into_iter().filter(|r| r.0 >= lo && r.0 <= hi).collect();
    if used.len() < 4 {
        return Err(invalid("the fit window needs at least four rows"));
    }
    let c = log_correction.unwrap_or(0.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(n, v) in &used {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(format!("value {v} at n = {n} is outside (0, 1)")));
        }
        let ln = (n as f64).ln();
        xs.push(ln);
        let mut y = (-v.ln()).ln();
        if c != 0.0 {
            if ln <= 1.0 {
                return Err(invalid("log correction needs n > e"));
            }
            y -= c * ln.ln();
        }
        ys.push(y);
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    let &(n_last, v_last) = used.last().unwrap();
    let ln_last = (n_last as f64).ln();
    let constant_at_last = -v_last.ln() / ((n_last as f64).powf(predicted) * ln_last.powf(c));
    Ok(FitResult {
        slope,
        intercept,
        predicted,
        slope_error: (slope - predicted).abs(),
        constant_at_last,
        window: (used[0].0, n_last),
        rows_used: used.len(),
        residual_rms: rms,
    })
}

// ---------------------------------------------------------------------
// command configurations

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub version: u32,
    pub law: LawSpec,
    pub n: u64,
    #[serde(default = "one")]
    pub paths: u64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> u64 {
    1
}

/// Limit law given directly or as the attractor of a step law.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSpec {
    AttractorOf(LawSpec),
    SymmetricStable { alpha: f64, scale: f64 },
    AxisSeparable { terms: Vec<(f64, f64)> },
    Isotropic { dim: usize, alpha: f64, k: f64 },
}

impl LimitSpec {
    pub fn build(&self) -> Result<LimitLaw> {
        match self {
            LimitSpec::AttractorOf(l) => LimitLaw::attractor_of(&StepLaw::new(l.clone())?),
            LimitSpec::SymmetricStable { alpha, scale } => LimitLaw::symmetric_stable(*alpha, *scale),
            LimitSpec::AxisSeparable { terms } => LimitLaw::axis_separable(terms),
            LimitSpec::Isotropic { dim, alpha, k } => LimitLaw::isotropic(*dim, *alpha, *k),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LltConfig {
    pub version: u32,
    pub law: LawSpec,
    pub schedule: Schedule,
    /// Normalization exponent; defaults to the exponent of the attractor.
    #[serde(default)]
    pub exponent: Option<ExponentSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenConfig {
    pub version: u32,
    pub limit: LimitSpec,
    #[serde(default)]
    pub domain: Option<Domain>,
    pub basis_sizes: Vec<usize>,
    #[serde(default)]
    pub lambda_theta: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "snake_case")]
pub enum ConstantRequest {
    DvTheta { theta: f64, tr_e: f64, lambda1: f64 },
    WreathZd { alpha: f64, d: u32, lambda_theta: f64, lamp_dim: u32 },
    SchmidtGamma { gamma: f64, a: f64, c: f64 },
    Nonamenable { rho: f64 },
    CustomRayleigh { limit: LimitSpec, theta: f64, basis_size: usize },
    Iterated { alphas: Vec<f64>, dims: Vec<u32>, #[serde(default)] lattice_lamps: bool },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub version: u32,
    pub requests: Vec<ConstantRequest>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub version: u32,
    pub profile: ProfileF,
    pub exponent: ExponentSpec,
    pub schedule: Schedule,
    #[serde(default = "two")]
    pub lambda: f64,
}

fn two() -> f64 {
    2.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub version: u32,
    pub input: PathBuf,
    pub predicted: f64,
    #[serde(default)]
    pub log_correction: Option<f64>,
    #[serde(default)]
    pub window: Option<(u64, u64)>,
}

/// Subcommands of the command-line tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Laplace,
    WreathReturn,
    LltCheck,
    Eigen,
    Constants,
    Scaling,
    Fit,
    Accept,
}

/// Files written by a command.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Every scheduled row was skipped.
    pub skipped_only: bool,
    /// Acceptance criteria that failed without being known failures.
    pub unexpected_failures: Vec<u32>,
    /// Human-readable lines for the terminal.
    pub lines: Vec<String>,
}

/// Run-wide options shared by every command.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub exec: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: None, workers: 0, out_dir: PathBuf::from("."), exec: Execution::Parallel }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(config: Option<&str>) -> Result<T> {
    let text = config.ok_or_else(|| Error::Config("this command needs --config".into()))?;
    Ok(serde_json::from_str(text)?)
}

fn write(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    std::fs::write(&p, contents)?;
    files.push(p);
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Runs a command from the text of its JSON configuration.
pub fn run_command(cmd: Command, config: Option<&str>, opts: &RunOptions) -> Result<Outcome> {
    let exec = opts.exec;
    opts.exec.install(opts.workers, || run_command_inner(cmd, config, opts, exec))
}

fn run_command_inner(cmd: Command, config: Option<&str>, opts: &RunOptions, exec: Execution) -> Result<Outcome> {
    let dir = &opts.out_dir;
    let mut out = Outcome::default();
    match cmd {
        Command::Simulate => {
            let mut c: SimulateConfig = parse(config)?;
            check_version(c.version)?;
            if let Some(s) = opts.seed {
                c.seed = s;
            }
            let law = StepLaw::new(c.law.clone())?;
            let d = law.dim();
            let hash = config_hash(&c);
            let recs = exec.map(c.paths as usize, |i| {
                let mut rng = crate::rng::replica_stream(c.seed, i as u64);
                occupation::simulate(&law, c.n, &mut rng)
            });
            let mut s = format!("# config_sha256={hash}\npath,n,range,origin_visits,max_visits,endpoint\n");
            for (i, r) in recs.iter().enumerate() {
                let end: Vec<String> = r.endpoint.coords(d).iter().map(|v| v.to_string()).collect();
                let _ = writeln!(
                    s,
                    "{i},{},{},{},{},{}",
                    r.n,
                    r.range(),
                    r.count(&Site::ORIGIN),
                    r.counts.values().max().copied().unwrap_or(0),
                    end.join(" ")
                );
            }
            write(dir, "simulate.csv", &s, &mut out.files)?;
        }
        Command::Laplace | Command::WreathReturn => {
            let mut spec: ExperimentSpec = parse(config)?;
            let wreath_kind = matches!(spec.source, Source::WreathMc { .. } | Source::WreathZ2z);
            if wreath_kind != (cmd == Command::WreathReturn) {
                return Err(Error::Config("source kind does not match the subcommand".into()));
            }
            if let Some(s) = opts.seed {
                spec.seed = s;
            }
            let hash = config_hash(&spec);
            let rows = run_experiment(&spec, exec)?;
            out.skipped_only = rows.iter().all(|r| r.skipped.is_some());
            let name = if cmd == Command::Laplace { "laplace.csv" } else { "wreath_return.csv" };
            write(dir, name, &rows_to_csv(&rows, &hash), &mut out.files)?;
            if let (Some(fit), false) = (&spec.fit, out.skipped_only) {
                let pts: Vec<(u64, f64)> = rows.iter().filter_map(|r| r.value.map(|v| (r.n, v))).collect();
                let f = fit_exponent(&pts, fit.predicted, fit.log_correction, fit.window)?;
                let report = serde_json::json!({ "config_sha256": hash, "fit": f });
                write(dir, "fit.json", &to_json(&report), &mut out.files)?;
            }
        }
        Command::LltCheck => {
            let c: LltConfig = parse(config)?;
            check_version(c.version)?;
            let hash = config_hash(&c);
            let law = StepLaw::new(c.law.clone())?;
            let ll = LimitLaw::attractor_of(&law)?;
            let es = match &c.exponent {
                Some(e) => ExponentStructure::from_spec(e)?,
                None => ll.exponent().clone(),
            };
            let ns = NormalizationSequence::floor(es);
            let schedule = c.schedule.values()?;
            let mut s = format!("# config_sha256={hash}\nn,side,det_bn,sup_error,wrapped,skipped\n");
            let mut skipped = 0;
            for n in &schedule {
                match stablelaw::llt_error(&law, &ll, &ns, *n) {
                    Ok(r) => {
                        let _ = writeln!(s, "{},{},{:e},{:e},{},", r.n, r.side, r.det_bn, r.sup_error, r.wrapped);
                    }
                    Err(e) if skippable(&e) => {
                        skipped += 1;
                        let _ = writeln!(s, "{n},,,,,{}", csv_field(&e.to_string()));
                    }
                    Err(e) => return Err(e),
                }
            }
            out.skipped_only = skipped == schedule.len();
            write(dir, "llt.csv", &s, &mut out.files)?;
        }
        Command::Eigen => {
            let c: EigenConfig = parse(config)?;
            check_version(c.version)?;
            let ll = c.limit.build()?;
            let mut results = Vec::new();
            if let Some(dom) = &c.domain {
                for &m in &c.basis_sizes {
                    results.push(varconst::eigen_rayleigh(&ll, dom, m, exec)?);
                }
            }
            let lt = if c.lambda_theta {
                let m = c.basis_sizes.last().copied().ok_or_else(|| Error::Config("basis_sizes is empty".into()))?;
                Some(varconst::lambda_theta(&ll, m, exec)?)
            } else {
                None
            };
            let report = serde_json::json!({ "config_sha256": config_hash(&c), "ladder": results, "lambda_theta": lt });
            write(dir, "eigen.json", &to_json(&report), &mut out.files)?;
        }
        Command::Constants => {
            let c: ConstantsConfig = parse(config)?;
            check_version(c.version)?;
            let mut reports = Vec::new();
            for r in &c.requests {
                let v = match r {
                    ConstantRequest::DvTheta { theta, tr_e, lambda1 } => {
                        serde_json::to_value(varconst::constant_dv_theta(*theta, *tr_e, *lambda1)?)?
                    }
                    ConstantRequest::WreathZd { alpha, d, lambda_theta, lamp_dim } => {
                        serde_json::to_value(varconst::constant_wreath_zd(*alpha, *d, *lambda_theta, *lamp_dim)?)?
                    }
                    ConstantRequest::SchmidtGamma { gamma, a, c } => {
                        let mut rep = varconst::constant_schmidt(*gamma, *a, *c)?;
                        let m = varconst::schmidt_minimization(*gamma, *a, *c)?;
                        rep.residuals.insert("profile_minimization".into(), m);
                        rep.residuals.insert("relative_gap".into(), rep.value / m - 1.0);
                        serde_json::to_value(rep)?
                    }
                    ConstantRequest::Nonamenable { rho } => serde_json::to_value(varconst::constant_nonamenable(*rho)?)?,
                    ConstantRequest::CustomRayleigh { limit, theta, basis_size } => serde_json::to_value(
                        varconst::constant_custom_rayleigh(&limit.build()?, *theta, *basis_size, exec)?,
                    )?,
                    ConstantRequest::Iterated { alphas, dims, lattice_lamps } => {
                        serde_json::to_value(varconst::iterated_exponents(alphas, dims, *lattice_lamps)?)?
                    }
                };
                reports.push(v);
            }
            let report = serde_json::json!({ "config_sha256": config_hash(&c), "constants": reports });
            write(dir, "constants.json", &to_json(&report), &mut out.files)?;
        }
        Command::Scaling => {
            let c: ScalingConfig = parse(config)?;
            check_version(c.version)?;
            let hash = config_hash(&c);
            let ns = NormalizationSequence::floor(ExponentStructure::from_spec(&c.exponent)?);
            let sol = varconst::solve_scaling(&c.profile, &ns)?;
            let schedule = c.schedule.values()?;
            let dev = varconst::regular_variation_a(&sol, c.lambda, &schedule)?;
            let mut s = format!("# config_sha256={hash}\nn,a_n,a_real,residual,rv_deviation\n");
            for (n, dv) in schedule.iter().zip(dev) {
                let _ = writeln!(s, "{n},{},{:e},{:e},{:e}", sol.a_n(*n)?, sol.a_real(*n)?, sol.residual(*n)?, dv);
            }
            write(dir, "scaling.csv", &s, &mut out.files)?;
            let report = serde_json::json!({
                "config_sha256": hash, "gamma": sol.gamma, "kappa": sol.kappa, "tau": sol.tau, "ftilde_at_1": sol.ftilde_at_1
            });
            write(dir, "scaling.json", &to_json(&report), &mut out.files)?;
        }
        Command::Fit => {
            let c: FitConfig = parse(config)?;
            check_version(c.version)?;
            let text = std::fs::read_to_string(&c.input)?;
            let rows = rows_from_csv(&text)?;
            let f = fit_exponent(&rows, c.predicted, c.log_correction, c.window)?;
            let report = serde_json::json!({ "config_sha256": config_hash(&c), "fit": f });
            write(dir, "fit.json", &to_json(&report), &mut out.files)?;
        }
        Command::Accept => {
            let seed = opts.seed.unwrap_or(DEFAULT_ACCEPT_SEED);
            let run = run_acceptance(seed, exec)?;
            for (name, body) in run.report.files() {
                write(dir, &name, &body, &mut out.files)?;
            }
            for (c, t) in run.report.criteria.iter().zip(&run.timings) {
                out.lines.push(c.line(*t));
                if !c.passed && c.known_failure.is_none() {
                    out.unexpected_failures.push(c.id);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// acceptance suite

pub const DEFAULT_ACCEPT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
    /// Analysis for criteria that cannot pass as stated.
    pub known_failure: Option<String>,
    #[serde(skip)]
    pub budget: Duration,
}

impl CriterionResult {
    fn new(id: u32, title: &str, budget_secs: u64) -> Self {
        Self {
            id,
            title: title.into(),
            passed: false,
            detail: String::new(),
            metrics: BTreeMap::new(),
            known_failure: None,
            budget: Duration::from_secs(budget_secs),
        }
    }

    fn metric(&mut self, k: &str, v: f64) {
        self.metrics.insert(k.into(), v);
    }

    /// One line: verdict, id, title, detail and runtime against budget.
    pub fn line(&self, elapsed: Duration) -> String {
        let verdict = if self.passed && elapsed <= self.budget { "PASS" } else { "FAIL" };
        let note = if self.known_failure.is_some() && !self.passed { " [known]" } else { "" };
        format!(
            "{verdict}{note} criterion {:>2}: {} | {} | {:.2}s of {}s",
            self.id,
            self.title,
            self.detail,
            elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub config_sha256: String,
    pub criteria: Vec<CriterionResult>,
    /// CSV series by file name.
    pub series: BTreeMap<String, String>,
}

impl AcceptanceReport {
    /// Output files (name, contents): the JSON report and every series.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut v = vec![("acceptance.json".to_string(), to_json(self))];
        v.extend(self.series.iter().map(|(k, s)| (k.clone(), s.clone())));
        v
    }
}

pub struct AcceptanceRun {
    pub report: AcceptanceReport,
    /// Wall time per criterion, same order as the report.
    pub timings: Vec<Duration>,
}

#[derive(Serialize)]
struct AcceptanceKey {
    suite: &'static str,
    version: u32,
    seed: u64,
}

/// Criteria 1–11, then a repeat of them on a two-thread pool compared
/// byte for byte (criterion 12).
pub fn run_acceptance(seed: u64, exec: Execution) -> Result<AcceptanceRun> {
    let (mut report, mut timings) = acceptance_core(seed, exec)?;
    let t = Instant::now();
    let mut c = CriterionResult::new(12, "determinism of the accept outputs", 600);
    let first = report.files();
    let (again, _) = exec.install(2, || acceptance_core(seed, exec))?;
    let second = again.files();
    let same = first == second;
    c.passed = same;
    c.detail = format!("{} output files, repeat identical: {same}", first.len());
    c.metric("files", first.len() as f64);
    report.criteria.push(c);
    timings.push(t.elapsed());
    Ok(AcceptanceRun { report, timings })
}

type Check = fn(u64, Execution, &mut BTreeMap<String, String>, &str) -> Result<CriterionResult>;

fn acceptance_core(seed: u64, exec: Execution) -> Result<(AcceptanceReport, Vec<Duration>)> {
    let hash = config_hash(&AcceptanceKey { suite: "acceptance", version: CONFIG_VERSION, seed });
    let checks: [Check; 11] = [
        crit_mass_identity,
        crit_oracle_triangle,
        crit_donsker_varadhan,
        crit_lamplighter_oracle,
        crit_lamplighter_scaling,
        crit_local_limit,
        crit_density,
        crit_eigen,
        crit_scaling,
        crit_schmidt,
        crit_homogeneity,
    ];
    let mut series = BTreeMap::new();
    let mut criteria = Vec::new();
    let mut timings = Vec::new();
    for check in checks {
        let t = Instant::now();
        criteria.push(check(seed, exec, &mut series, &hash)?);
        timings.push(t.elapsed());
    }
    Ok((AcceptanceReport { seed, config_sha256: hash, criteria, series }, timings))
}

fn lazy_srw() -> Result<StepLaw> {
    StepLaw::new(LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 })
}

fn srw() -> Result<StepLaw> {
    StepLaw::new(LawSpec::simple_random_walk())
}

fn crit_mass_identity(seed: u64, exec: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(1, "mass identity Σ_x l(n,x) = n+1", 10);
    let laws = [
        LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 },
        LawSpec::Radial { dim: 1, alpha: 1.0 },
        LawSpec::AxisProduct { alphas: vec![1.5, 0.8] },
    ];
    let n = 200u64;
    let paths = 10_000usize;
    let mut bad = 0usize;
    for (li, spec) in laws.iter().enumerate() {
        let law = StepLaw::new(spec.clone())?;
        let ok = exec.map(paths, |i| {
            let mut rng = crate::rng::replica_stream(seed ^ (li as u64 + 1), i as u64);
            let rec = occupation::simulate(&law, n, &mut rng);
            rec.total() == n + 1 && rec.count(&Site::ORIGIN) >= 1
        });
        bad += ok.iter().filter(|v| !**v).count();
    }
    c.passed = bad == 0;
    c.detail = format!("{} paths of length {n} over 3 laws, violations: {bad}", 3 * paths);
    c.metric("violations", bad as f64);
    Ok(c)
}

fn crit_oracle_triangle(seed: u64, exec: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(2, "enumeration ≡ range DP; MC within 3σ", 120);
    let law = lazy_srw()?;
    let f = ProfileF::Indicator { nu: 0.3 };
    let mut worst = 0.0f64;
    let mut exact16 = 0.0;
    for n in 0..=16u64 {
        let e = occupation::enumerate_paths(&law, n, &f)?;
        let dp = occupation::range_dp(&law, n, 1.0, None, exec)?.range_law();
        for k in 0..dp.len().max(e.range_law.len()) {
            let a = dp.get(k).copied().unwrap_or(0.0);
            let b = e.range_law.get(k).copied().unwrap_or(0.0);
            worst = worst.max((a - b).abs());
        }
        if n == 16 {
            exact16 = e.value;
        }
    }
    let est = occupation::estimate_laplace(&law, 16, &f, 100_000, seed, None, exec)?;
    let z = (est.mean - exact16).abs() / est.stderr;
    c.passed = worst < 1e-12 && z <= 3.0;
    c.detail = format!("max |ΔP(D_n=k)| = {worst:.1e}; MC {:.6} vs exact {exact16:.6}, {z:.2}σ", est.mean);
    c.metric("max_range_law_gap", worst);
    c.metric("mc_sigma_distance", z);
    Ok(c)
}

fn series_rows(ns: &[u64], values: &[f64]) -> Vec<Row> {
    ns.iter().zip(values).map(|(n, v)| Row { n: *n, value: Some(*v), stderr: None, exact: true, skipped: None }).collect()
}

const DV_SCHEDULE: [u64; 4] = [250, 500, 1000, 2000];

fn crit_donsker_varadhan(_: u64, exec: Execution, series: &mut BTreeMap<String, String>, hash: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(3, "Donsker–Varadhan exponent of E[e^{-D_n}]", 600);
    let law = srw()?;
    let values: Vec<f64> =
        DV_SCHEDULE.iter().map(|&n| occupation::range_laplace(&law, n, 1.0, exec).map(|r| r.value)).collect::<Result<_>>()?;
    let pts: Vec<(u64, f64)> = DV_SCHEDULE.iter().copied().zip(values.iter().copied()).collect();
    let fit = fit_exponent(&pts, 1.0 / 3.0, None, Some((250, 2000)))?;
    let k = varconst::constant_dv_theta(1.0, 0.5, PI * PI / 2.0)?.value;
    let ratio = fit.constant_at_last / k;
    c.passed = (0.28..=0.39).contains(&fit.slope) && (ratio - 1.0).abs() <= 0.30;
    c.detail = format!("slope {:.4}; (-log E)/n^(1/3) at 2000 = {:.4} vs k = {k:.4} (ratio {ratio:.3})", fit.slope, fit.constant_at_last);
    c.metric("slope", fit.slope);
    c.metric("constant_ratio", ratio);
    series.insert("dv_range.csv".into(), rows_to_csv(&series_rows(&DV_SCHEDULE, &values), hash));
    Ok(c)
}

fn crit_lamplighter_oracle(seed: u64, exec: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(4, "Z_2≀Z enumeration ≡ range formula; MC within 3σ", 300);
    let z2 = LampGroupModel::uniform_z2();
    let mut worst = 0.0f64;
    let mut at8 = (0.0, 0.0);
    for law in [srw()?, lazy_srw()?] {
        for n in 1..=10u64 {
            let e = wreath::wreath_exact_enum(&law, &z2, n)?.get(&0).copied().unwrap_or(0.0);
            let f = wreath::wreath_exact_z2z(&law, n)?;
            worst = worst.max((e - f).abs());
            if n == 8 && law.nearest_neighbor_weights().map(|w| w.1) == Some(0.0) {
                at8 = (e, f);
            }
        }
    }
    let prof = z2.profile(16)?;
    let est = wreath::wreath_return_estimate(&srw()?, &prof, 8, &Site::ORIGIN, 100_000, seed, true, exec)?;
    let z_enum = (est.mean - at8.0).abs() / est.stderr;
    let z_formula = (est.mean - at8.1).abs() / est.stderr;
    c.passed = worst < 1e-12 && z_enum <= 3.0 && z_formula <= 3.0;
    c.detail = format!("max gap {worst:.1e} for n ≤ 10; MC at n=8 {:.6} vs exact {:.6}, {z_enum:.2}σ", est.mean, at8.0);
    c.metric("max_gap", worst);
    c.metric("mc_sigma_distance", z_enum.max(z_formula));
    Ok(c)
}

fn crit_lamplighter_scaling(_: u64, _: Execution, series: &mut BTreeMap<String, String>, hash: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(5, "Z_2≀Z return exponent and constant", 600);
    let law = srw()?;
    let values: Vec<f64> = DV_SCHEDULE.iter().map(|&n| wreath::wreath_exact_z2z(&law, n)).collect::<Result<_>>()?;
    let pts: Vec<(u64, f64)> = DV_SCHEDULE.iter().copied().zip(values.iter().copied()).collect();
    let fit = fit_exponent(&pts, 1.0 / 3.0, None, Some((250, 2000)))?;
    let k = varconst::constant_dv_theta(2f64.ln(), 0.5, PI * PI / 2.0)?.value;
    let ratio = fit.constant_at_last / k;
    c.passed = (0.28..=0.39).contains(&fit.slope) && (ratio - 1.0).abs() <= 0.35;
    c.detail = format!("slope {:.4}; (-log q)/n^(1/3) at 2000 = {:.4} vs k = {k:.4} (ratio {ratio:.3})", fit.slope, fit.constant_at_last);
    c.metric("slope", fit.slope);
    c.metric("constant_ratio", ratio);
    series.insert("z2z_return.csv".into(), rows_to_csv(&series_rows(&DV_SCHEDULE, &values), hash));
    Ok(c)
}

fn crit_local_limit(_: u64, _: Execution, series: &mut BTreeMap<String, String>, hash: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(6, "local limit error decreases", 300);
    let mut csv = format!("# config_sha256={hash}\nlaw,n,side,sup_error,wrapped\n");
    let mut ok = true;
    let mut parts = Vec::new();
    let cases: [(&str, LawSpec, f64, [u64; 2]); 2] = [
        ("lazy_srw", LawSpec::LazyNearestNeighbor { dim: 1, hold: 0.5 }, 2.0, [32, 256]),
        ("radial_alpha1", LawSpec::Radial { dim: 1, alpha: 1.0 }, 1.0, [64, 1024]),
    ];
    for (name, spec, alpha, [lo, hi]) in cases {
        let law = StepLaw::new(spec)?;
        let ll = LimitLaw::attractor_of(&law)?;
        let ns = NormalizationSequence::floor(ExponentStructure::diagonal(&[alpha])?);
        let mut errs = Vec::new();
        let mut n = lo;
        while n <= hi {
            let r = stablelaw::llt_error(&law, &ll, &ns, n)?;
            let _ = writeln!(csv, "{name},{n},{},{:e},{}", r.side, r.sup_error, r.wrapped);
            errs.push(r.sup_error);
            n *= 2;
        }
        let (first, last) = (errs[0], *errs.last().unwrap());
        ok &= last < first;
        parts.push(format!("{name} {first:.2e} → {last:.2e}"));
        c.metric(&format!("{name}_first"), first);
        c.metric(&format!("{name}_last"), last);
    }
    c.passed = ok;
    c.detail = parts.join("; ");
    series.insert("llt.csv".into(), csv);
    Ok(c)
}

fn crit_density(_: u64, _: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(7, "density inversion of Cauchy and Gaussian laws", 60);
    let xs: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
    let cauchy = LimitLaw::symmetric_stable(1.0, 1.0)?.density_grid(1.0, 5.0)?;
    let gauss = LimitLaw::symmetric_stable(2.0, 0.5)?.density_grid(1.0, 5.0)?;
    let mut ec = 0.0f64;
    let mut eg = 0.0f64;
    for &x in &xs {
        ec = ec.max((cauchy.eval(&[x]) - 1.0 / (PI * (1.0 + x * x))).abs());
        eg = eg.max((gauss.eval(&[x]) - (-0.5 * x * x).exp() / (2.0 * PI).sqrt()).abs());
    }
    c.passed = ec < 1e-6 && eg < 1e-6;
    c.detail = format!("max error Cauchy {ec:.1e}, Gaussian {eg:.1e} at 21 points");
    c.metric("cauchy_error", ec);
    c.metric("gaussian_error", eg);
    Ok(c)
}

/// Relative slack allowed when a basis ladder is flat in exact arithmetic.
pub const LADDER_ROUNDOFF: f64 = 1e-10;

fn crit_eigen(_: u64, exec: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(8, "Dirichlet eigenvalue solver", 60);
    let lap = LimitLaw::symmetric_stable(2.0, 1.0)?;
    let cauchy = LimitLaw::symmetric_stable(1.0, 1.0)?;
    let unit = Domain::Interval { lo: 0.0, hi: 1.0 };
    let l64 = varconst::eigen_rayleigh(&lap, &unit, 64, exec)?.lambda;
    let rel = (l64 / (PI * PI) - 1.0).abs();
    let mut monotone = true;
    let mut ladder = Vec::new();
    for ll in [&lap, &cauchy] {
        let vals: Vec<f64> =
            [16, 32, 64, 128].iter().map(|&m| varconst::eigen_rayleigh(ll, &unit, m, exec).map(|r| r.lambda)).collect::<Result<_>>()?;
        // Θ=ξ² is diagonal in the sine basis, so its ladder is flat up to roundoff.
        monotone &= vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + LADDER_ROUNDOFF));
        ladder.push(vals);
    }
    let mut nested = true;
    for ll in [&lap, &cauchy] {
        let vals: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&h| varconst::eigen_rayleigh(ll, &Domain::Interval { lo: 0.0, hi: h }, 32, exec).map(|r| r.lambda))
            .collect::<Result<_>>()?;
        nested &= vals.windows(2).all(|w| w[1] < w[0]);
    }
    c.passed = rel < 0.005 && monotone && nested;
    c.detail = format!(
        "λ(ξ², basis 64) = {l64:.8} (rel {rel:.1e}); |ξ| ladder {:.6} → {:.6}; nested intervals ordered: {nested}",
        ladder[1][0], ladder[1][3]
    );
    c.metric("laplacian_relative_error", rel);
    c.metric("cauchy_lambda_128", ladder[1][3]);
    Ok(c)
}

fn crit_scaling(_: u64, _: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(9, "scaling solver κ and regular variation", 60);
    let exponents: [(f64, Vec<f64>); 3] = [(0.5, vec![2.0]), (1.0, vec![1.0]), (1.75, vec![1.0, 4.0 / 3.0])];
    let n = 1_000_000u64;
    let mut worst_kappa = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for g in [0.0, 0.25, 0.5, 0.75] {
        for (tau, alphas) in &exponents {
            let ns = NormalizationSequence::floor(ExponentStructure::diagonal(alphas)?);
            let sol = varconst::solve_scaling(&ProfileF::Power { nu: 1.0, gamma: g }, &ns)?;
            let closed = (1.0 - g) / (1.0 + tau * (1.0 - g));
            let ratio = sol.a_real(2 * n)? / sol.a_real(n)?;
            let empirical = ratio.ln() / 2f64.ln();
            worst_kappa = worst_kappa.max((sol.kappa - closed).abs()).max((empirical - closed).abs());
            worst_ratio = worst_ratio.max((ratio / 2f64.powf(closed) - 1.0).abs());
        }
    }
    c.passed = worst_kappa < 1e-9 && worst_ratio < 0.01;
    c.detail = format!("max |κ - closed form| = {worst_kappa:.1e}; max |a(2n)/a(n) / 2^κ - 1| = {worst_ratio:.1e}");
    c.metric("kappa_gap", worst_kappa);
    c.metric("ratio_gap", worst_ratio);
    Ok(c)
}

fn crit_schmidt(_: u64, _: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(10, "closed-form γ constant vs profile minimization", 60);
    let (a, cc) = (0.5, 1.0);
    let mut worst = 0.0f64;
    let mut worst_doubled = 0.0f64;
    for g in [0.3, 0.5, 0.7] {
        let closed = varconst::constant_schmidt(g, a, cc)?.value;
        let min = varconst::schmidt_minimization(g, a, cc)?;
        let min2 = varconst::schmidt_minimization(g, 2.0 * a, cc)?;
        worst = worst.max((closed / min - 1.0).abs());
        worst_doubled = worst_doubled.max((closed / min2 - 1.0).abs());
    }
    c.passed = worst < 0.005;
    c.detail = format!(
        "max relative gap {worst:.4} (ratio 2^((1-γ)/(3-γ))); with a doubled in the minimization the gap is {worst_doubled:.1e}"
    );
    c.metric("relative_gap", worst);
    c.metric("relative_gap_doubled_a", worst_doubled);
    if !c.passed {
        c.known_failure = Some(
            "the displayed closed form equals the minimum of 2a∫|f′|² + c∫|f|^{2γ}, not of a∫|f′|² + c∫|f|^{2γ}; \
             the ratio is exactly 2^((1-γ)/(3-γ))"
                .into(),
        );
    }
    Ok(c)
}

fn crit_homogeneity(_: u64, _: Execution, _: &mut BTreeMap<String, String>, _: &str) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(11, "homogeneity of the closed-form constants", 1);
    let mut worst = 0.0f64;
    let mut check = |lhs: f64, rhs: f64| worst = worst.max((lhs / rhs - 1.0).abs());
    let lam = PI * PI / 2.0;
    for (theta, tau, s) in [(1.0, 0.5, 3.0), (0.7, 1.75, 0.2), (2f64.ln(), 1.0, 10.0)] {
        let k1 = varconst::constant_dv_theta(theta, tau, lam)?.value;
        let k2 = varconst::constant_dv_theta(s * theta, tau, lam)?.value;
        check(k2 / k1, s.powf(1.0 / (tau + 1.0)));
    }
    for (alpha, d, dd) in [(2.0, 1u32, 1u32), (1.0, 2, 3), (1.5, 1, 2)] {
        let c1 = varconst::constant_wreath_zd(alpha, d, lam, dd)?.value;
        let c2 = varconst::constant_wreath_zd(alpha, d, lam, 2 * dd)?.value;
        check(c2 / c1, 2f64.powf(alpha / (d as f64 + alpha)));
        let dv = varconst::constant_dv_theta(dd as f64 / 2.0, d as f64 / alpha, lam)?.value;
        check(c1, dv);
    }
    for (g, cc) in [(0.3, 2.0), (0.5, 0.1), (0.7, 7.0)] {
        let k1 = varconst::constant_schmidt(g, 0.5, 1.0)?.value;
        let kc = varconst::constant_schmidt(g, 0.5, cc)?.value;
        check(kc / k1, cc.powf(2.0 / (3.0 - g)));
    }
    for (r1, r2) in [(0.5, 0.5), (0.3, 0.9), (0.99, 0.1)] {
        let k12 = varconst::constant_nonamenable(r1 * r2)?.value;
        let k1 = varconst::constant_nonamenable(r1)?.value;
        let k2 = varconst::constant_nonamenable(r2)?.value;
        check(k12, k1 + k2);
    }
    c.passed = worst < 1e-12;
    c.detail = format!("max relative deviation {worst:.1e} over θ, D, c and ρ identities");
    c.metric("max_deviation", worst);
    Ok(c)
}
