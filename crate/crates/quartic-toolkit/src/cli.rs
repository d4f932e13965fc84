//! Command-line dispatcher.
//!
//! Settings resolve as defaults < config file < `QUARTIC_*` environment < flags.

use std::collections::BTreeMap;
use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::asym_enum::{asymptotic_count_with_omega, lambda_star, ratio_to_exact, DEFAULT_OMEGA};
use crate::detkit::{beta_det, exp_det_factorization, rational_to_f64, shifted_factorial_det, vandermonde_log};
use crate::error::Error;
use crate::exact_count::{count_row_sums_capped, RowSumSpec, DEFAULT_STATE_CAP};
use crate::orthopoly::{gamma_quarter_det, quartic_r_sequence, r_band, u_bound, u_coefficients};
use crate::partition::{
    z_free, z_mc_eigen, z_mc_matrix, z_mc_zero_kinetic, z_weak, z_weak_prefactored, z_zero_kinetic, KineticSpectrum,
    MATRIX_MC_MAX_N,
};
use crate::polytope::{applicability, asymptotic_volume, exact_volume_n3, exact_volume_n4, mc_volume, mc_volume_sequential, DiagonalSpec};
use crate::quadrature::pearcey_eval;
use crate::verify;

pub const ENV_PREFIX: &str = "QUARTIC_";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
pub const TOLERANCE_KEYS: &[&str] = &["state_cap", "omega"];

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!("unknown format '{other}' (json, csv, text)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub mc_samples: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: DEFAULT_SEED, mc_samples: DEFAULT_MC_SAMPLES, tolerances: BTreeMap::new(), output_format: OutputFormat::Text }
    }
}

impl RunConfig {
    /// Applies one `key=value` setting; `tol.<name>` sets a tolerance.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let bad = |what: &str| format!("invalid {what} '{value}'");
        match key.as_str() {
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "mc_samples" | "samples" => self.mc_samples = value.parse().map_err(|_| bad("sample count"))?,
            "format" | "output_format" => self.output_format = OutputFormat::parse(value)?,
            k => {
                let name = k.strip_prefix("tol.").or_else(|| k.strip_prefix("tol_")).ok_or_else(|| format!("unknown setting '{k}'"))?;
                if !TOLERANCE_KEYS.contains(&name) {
                    return Err(format!("unknown tolerance '{name}' (known: {})", TOLERANCE_KEYS.join(", ")));
                }
                self.tolerances.insert(name.to_string(), value.parse().map_err(|_| bad("tolerance"))?);
            }
        }
        Ok(())
    }

    pub fn apply_file_text(&mut self, text: &str) -> Result<(), String> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            self.set(k, v).map_err(|e| format!("config line {}: {e}", i + 1))?;
        }
        Ok(())
    }

    /// Applies `QUARTIC_<KEY>` variables; `QUARTIC_TOL_<NAME>` sets a tolerance.
    pub fn apply_env(&mut self, vars: &[(String, String)]) -> Result<(), String> {
        for (k, v) in vars {
            let Some(key) = k.strip_prefix(ENV_PREFIX) else { continue };
            if key == "CONFIG" {
                continue;
            }
            self.set(key, v).map_err(|e| format!("{k}: {e}"))?;
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }
}

#[derive(Debug, Parser)]
#[command(name = "quartic", version, about = "Enumeration, polytope volumes, quartic orthogonal polynomials and saddle-point checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Random seed for Monte Carlo estimates.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// key=value configuration file.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Tolerance override `name=value` (repeatable).
    #[arg(long = "tol", global = true)]
    tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact number of symmetric zero-diagonal matrices with given row sums.
    Count(CountArgs),
    /// Asymptotic estimate of the row-sum count.
    Asym(AsymArgs),
    /// Volume of the symmetric stochastic polytope with fixed diagonal.
    Volume(VolumeArgs),
    /// Recursion coefficients for the weight exp(-x^4).
    Orthopoly(OrthoArgs),
    /// Determinant identities.
    Det(DetArgs),
    /// Pearcey-type integral and its saddle-point approximation.
    Pearcey(PearceyArgs),
    /// Partition function of the quartic matrix model.
    Partition(PartitionArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct CountArgs {
    /// Matrix size; with a single row sum, every row uses it.
    #[arg(long)]
    n: Option<usize>,
    /// Row sums, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<u64>,
}

#[derive(Debug, Args)]
struct AsymArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<u64>,
    /// Contour parameter; defaults to the average entry.
    #[arg(long)]
    lambda: Option<f64>,
    /// Also compute the exact count and the ratio.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct VolumeArgs {
    /// Diagonal entries, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    h: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrthoTableKind {
    R,
    U,
}

#[derive(Debug, Args)]
struct OrthoArgs {
    /// Highest index.
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, value_enum, default_value_t = OrthoTableKind::R)]
    table: OrthoTableKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetKind {
    Vandermonde,
    Exp,
    Beta,
    Shifted,
    Gamma,
}

#[derive(Debug, Args)]
struct DetArgs {
    #[arg(long, value_enum)]
    kind: DetKind,
    /// Size for beta, shifted, gamma, and exp with the default nodes k n^(-7/4).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    /// Real kernel constant for exp.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    c: f64,
}

#[derive(Debug, Args)]
struct PearceyArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 0)]
    k: u32,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    /// Kinetic eigenvalues, comma separated.
    #[arg(long, value_delimiter = ',')]
    e: Vec<f64>,
    /// Matrix size for the zero-kinetic case (no --e).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    g: f64,
    /// Skip Monte Carlo estimates.
    #[arg(long)]
    no_mc: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Restrict to one suite: count, asym, volume, orthopoly, det, pearcey, partition, utilities.
    #[arg(long)]
    suite: Option<String>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    command: &'static str,
    records: Vec<Value>,
    passed: bool,
    text: Option<String>,
}

impl Report {
    fn new(command: &'static str, records: Vec<Value>) -> Self {
        Report { command, records, passed: true, text: None }
    }
}

fn usage(msg: impl Into<String>) -> Outcome {
    Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {}\n", msg.into()) }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Dimension { .. } => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `argv` (including the program name), resolves configuration from
/// `file_reader` and `env`, and runs the command.
pub fn dispatch<F>(argv: &[String], env: &[(String, String)], file_reader: F) -> Outcome
where
    F: Fn(&str) -> std::io::Result<String>,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut cfg = RunConfig::default();
    let config_path = cli.global.config.clone().or_else(|| env.iter().find(|(k, _)| k == "QUARTIC_CONFIG").map(|(_, v)| v.clone()));
    if let Some(path) = config_path {
        match file_reader(&path) {
            Ok(text) => {
                if let Err(e) = cfg.apply_file_text(&text) {
                    return usage(format!("{path}: {e}"));
                }
            }
            Err(e) => return usage(format!("cannot read config {path}: {e}")),
        }
    }
    if let Err(e) = cfg.apply_env(env) {
        return usage(e);
    }
    if let Some(f) = cli.global.format {
        cfg.output_format = f;
    }
    if let Some(s) = cli.global.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.global.samples {
        cfg.mc_samples = s;
    }
    for t in &cli.global.tol {
        let Some((k, v)) = t.split_once('=') else { return usage(format!("--tol expects name=value, got '{t}'")) };
        if let Err(e) = cfg.set(&format!("tol.{k}"), v) {
            return usage(e);
        }
    }
    if cfg.mc_samples == 0 {
        return usage("sample count must be positive");
    }
    match run_command(&cli.command, &cfg) {
        Ok(report) => {
            let stdout = render(&report, &cfg);
            let code = if report.passed { EXIT_PASS } else { EXIT_NUMERIC };
            let stderr = if report.passed { String::new() } else { format!("{}: numerical check failed\n", report.command) };
            Outcome { code, stdout, stderr }
        }
        Err(e) => Outcome { code: error_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Reads the process arguments and environment.
pub fn main_entry() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let env: Vec<(String, String)> = std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    let out = dispatch(&argv, &env, |p| fs::read_to_string(p));
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

fn row_sums(n: Option<usize>, t: &[u64]) -> crate::Result<RowSumSpec> {
    match (n, t.len()) {
        (Some(n), 1) => RowSumSpec::uniform(n, t[0]),
        (Some(n), len) if n != len => Err(Error::Dimension { expected: n, got: len }),
        _ => RowSumSpec::new(t.to_vec()),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn run_command(cmd: &Command, cfg: &RunConfig) -> crate::Result<Report> {
    match cmd {
        Command::Count(a) => {
            let spec = row_sums(a.n, &a.t)?;
            let v = count_row_sums_capped(&spec, cfg.tolerance("state_cap", DEFAULT_STATE_CAP))?;
            let mut r = Report::new("count", vec![json!({"n": spec.n(), "t": join(&spec.t), "count": v.to_string()})]);
            r.text = Some(format!("{v}\n"));
            Ok(r)
        }
        Command::Asym(a) => {
            let spec = row_sums(a.n, &a.t)?;
            let lambda = match a.lambda {
                Some(l) => l,
                None => lambda_star(&spec)?,
            };
            let est = asymptotic_count_with_omega(&spec, lambda, cfg.tolerance("omega", DEFAULT_OMEGA))?;
            let mut rec = json!({
                "n": spec.n(),
                "t": join(&spec.t),
                "lambda": lambda,
                "estimate": est.value.to_f64(),
                "ln_estimate": est.value.log_abs,
                "in_window": est.in_window,
            });
            if a.exact {
                let exact = count_row_sums_capped(&spec, cfg.tolerance("state_cap", DEFAULT_STATE_CAP))?;
                rec["exact"] = json!(exact.to_string());
                rec["ratio"] = json!(ratio_to_exact(&est, &exact));
            }
            Ok(Report::new("asym", vec![rec]))
        }
        Command::Volume(a) => {
            let spec = DiagonalSpec::new(a.h.clone())?;
            let n = spec.n();
            let exact = match n {
                3 => Some(exact_volume_n3(&spec)?),
                4 => Some(exact_volume_n4(&spec)?),
                _ => None,
            };
            let mc = match n {
                0..=3 => None,
                4 => Some(mc_volume(&spec, cfg.mc_samples, cfg.seed)?),
                _ => Some(mc_volume_sequential(&spec, cfg.mc_samples, cfg.seed)?),
            };
            let asym = asymptotic_volume(&spec).ok().map(|v| v.to_f64());
            Ok(Report::new(
                "volume",
                vec![json!({
                    "n": n,
                    "dimension": spec.dimension(),
                    "exact": exact,
                    "mc": mc.map(|m| m.estimate),
                    "mc_std_error": mc.map(|m| m.std_error),
                    "asymptotic": asym,
                    "applicability": applicability(&spec),
                    "seed": cfg.seed,
                    "samples": cfg.mc_samples,
                })],
            ))
        }
        Command::Orthopoly(a) => match a.table {
            OrthoTableKind::R => {
                let t = quartic_r_sequence(a.n)?;
                let recs = (1..=a.n)
                    .map(|m| {
                        let (lo, hi) = r_band(m);
                        let r = t.r_at(m);
                        json!({"m": m, "r": r, "band_lower": lo, "band_upper": hi, "in_band": lo < r && r < hi, "h": t.h[m]})
                    })
                    .collect();
                Ok(Report::new("orthopoly", recs))
            }
            OrthoTableKind::U => {
                let u = u_coefficients(a.n)?;
                let mut recs = Vec::new();
                for (m, row) in u.iter().enumerate() {
                    for (k, &v) in row.iter().enumerate() {
                        recs.push(json!({"m": m, "k": k, "u": v, "bound": u_bound(m, k)}));
                    }
                }
                Ok(Report::new("orthopoly", recs))
            }
        },
        Command::Det(a) => run_det(a),
        Command::Pearcey(a) => {
            let p = pearcey_eval(a.a, a.b, a.k);
            let unit = Complex64::new(0.0, 1.0).powu(a.k);
            Ok(Report::new(
                "pearcey",
                vec![json!({
                    "a": a.a,
                    "b": a.b,
                    "k": a.k,
                    "direct": (p.direct / unit).re,
                    "saddle": p.saddle.map(|s| (s / unit).re),
                    "ratio": p.ratio,
                    "direct_complex": complex(p.direct),
                    "saddle_complex": p.saddle.map(complex),
                })],
            ))
        }
        Command::Partition(a) => run_partition(a, cfg),
        Command::Verify(a) => {
            let ids = verify::suite_ids(a.suite.as_deref())?;
            let results = verify::run(&ids, cfg.seed);
            let passed = results.iter().all(|r| r.passed);
            let records = results.iter().map(check_json).collect();
            let mut report = Report::new("verify", records);
            report.passed = passed;
            report.text = Some(verify_text(&results));
            Ok(report)
        }
    }
}

fn run_det(a: &DetArgs) -> crate::Result<Report> {
    let need_n = || a.n.ok_or_else(|| Error::Domain("--n is required for this kind".into()));
    let rec = match a.kind {
        DetKind::Vandermonde => {
            let v = vandermonde_log(&a.x);
            json!({"kind": "vandermonde", "x": join(&a.x), "value": v.to_f64(), "ln_abs": v.log_abs, "sign": v.sign})
        }
        DetKind::Exp => {
            let (x, y) = if a.x.is_empty() {
                let n = need_n()?;
                let x: Vec<f64> = (1..=n).map(|k| k as f64 * (n as f64).powf(-1.75)).collect();
                (x.clone(), x)
            } else {
                let y = if a.y.is_empty() { a.x.clone() } else { a.y.clone() };
                (a.x.clone(), y)
            };
            if x.len() != y.len() {
                return Err(Error::Dimension { expected: x.len(), got: y.len() });
            }
            let r = exp_det_factorization(&x, &y, Complex64::new(a.c, 0.0));
            json!({"kind": "exp", "n": x.len(), "c": a.c, "exact": r.exact.re, "factored": r.factored.re, "ratio": r.ratio.re})
        }
        DetKind::Beta => {
            let n = need_n()?;
            let v = beta_det(n as u64);
            json!({"kind": "beta", "n": n, "value": v.to_string(), "approx": rational_to_f64(&v)})
        }
        DetKind::Shifted => {
            let n = need_n()?;
            let v = shifted_factorial_det(n as u64);
            json!({"kind": "shifted", "n": n, "value": v.to_string(), "approx": rational_to_f64(&v)})
        }
        DetKind::Gamma => {
            let n = need_n()?;
            let g = gamma_quarter_det(n)?;
            json!({"kind": "gamma", "n": n, "direct": g.direct.to_f64(), "via_norms": g.via_norms.to_f64(), "rel_diff": g.rel_diff})
        }
    };
    Ok(Report::new("det", vec![rec]))
}

fn run_partition(a: &PartitionArgs, cfg: &RunConfig) -> crate::Result<Report> {
    let mc_json = |v: crate::Result<crate::partition::McValue>| -> crate::Result<(Value, Value)> {
        let v = v?;
        Ok((json!(v.estimate), json!(v.std_error)))
    };
    if a.e.is_empty() {
        let n = a.n.ok_or_else(|| Error::Domain("give --e or --n".into()))?;
        let z = z_zero_kinetic(n, a.g)?;
        let mut rec = json!({"n": n, "g": a.g, "z_zero_kinetic": z.to_f64(), "ln_z": z.log_abs});
        if !a.no_mc && n <= MATRIX_MC_MAX_N {
            let (m, s) = mc_json(z_mc_zero_kinetic(n, a.g, cfg.mc_samples, cfg.seed))?;
            rec["z_mc_matrix"] = m;
            rec["z_mc_matrix_std_error"] = s;
        }
        return Ok(Report::new("partition", vec![rec]));
    }
    if a.n.is_some_and(|n| n != a.e.len()) {
        return Err(Error::Dimension { expected: a.n.unwrap(), got: a.e.len() });
    }
    let spec = KineticSpectrum::new(a.e.clone(), a.g)?;
    let mut rec = json!({
        "n": spec.n(),
        "g": a.g,
        "e": join(&spec.e),
        "z_free": z_free(&spec).to_f64(),
        "z_weak": z_weak(&spec).to_f64(),
        "z_weak_prefactored": z_weak_prefactored(&spec).to_f64(),
    });
    if !a.no_mc {
        if spec.n() <= MATRIX_MC_MAX_N {
            let (m, s) = mc_json(z_mc_matrix(&spec, cfg.mc_samples, cfg.seed))?;
            rec["z_mc_matrix"] = m;
            rec["z_mc_matrix_std_error"] = s;
        }
        let (m, s) = mc_json(z_mc_eigen(&spec, cfg.mc_samples, cfg.seed))?;
        rec["z_mc_eigen"] = m;
        rec["z_mc_eigen_std_error"] = s;
    }
    Ok(Report::new("partition", vec![rec]))
}

fn check_json(r: &verify::CheckResult) -> Value {
    json!({
        "id": r.id,
        "name": r.name,
        "reference": r.reference,
        "passed": r.passed,
        "detail": r.detail,
        "checks": r.checks.iter().map(|c| json!({
            "label": c.label,
            "observed": c.observed,
            "expected": c.expected,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
    })
}

pub fn verify_line(r: &verify::CheckResult) -> String {
    format!("{:>2} {} {} | reference: {} | {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.reference, r.detail)
}

fn verify_text(results: &[verify::CheckResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&verify_line(r));
        s.push('\n');
        for c in r.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("     - {}: observed {}, expected {}\n", c.label, c.observed, c.expected));
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    s.push_str(&format!("{passed}/{} criteria pass\n", results.len()));
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => v.to_string(),
        other => other.to_string(),
    }
}

fn flat_fields(rec: &Value) -> Vec<(String, String)> {
    let empty = Map::new();
    rec.as_object()
        .unwrap_or(&empty)
        .iter()
        .filter(|(k, _)| k.as_str() != "checks")
        .map(|(k, v)| (k.clone(), scalar(v)))
        .collect()
}

fn render(report: &Report, cfg: &RunConfig) -> String {
    match cfg.output_format {
        OutputFormat::Json => {
            let doc = json!({
                "command": report.command,
                "seed": cfg.seed,
                "passed": report.passed,
                "results": report.records,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(first) = report.records.first() {
                let header: Vec<String> = flat_fields(first).into_iter().map(|(k, _)| k).collect();
                w.write_record(&header).expect("in-memory write");
                for rec in &report.records {
                    let fields = flat_fields(rec);
                    w.write_record(fields.iter().map(|(_, v)| v)).expect("in-memory write");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        OutputFormat::Text => {
            if let Some(t) = &report.text {
                return t.clone();
            }
            let rows: Vec<Vec<(String, String)>> = report.records.iter().map(flat_fields).collect();
            let Some(first) = rows.first() else { return String::new() };
            let header: Vec<String> = first.iter().map(|(k, _)| k.clone()).collect();
            let mut widths: Vec<usize> = header.iter().map(String::len).collect();
            for r in &rows {
                for (i, (_, v)) in r.iter().enumerate() {
                    widths[i] = widths[i].max(v.len());
                }
            }
            let line = |cells: Vec<&str>| {
                cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect::<Vec<_>>().join("  ").trim_end().to_string() + "\n"
            };
            let mut s = line(header.iter().map(String::as_str).collect());
            for r in &rows {
                s.push_str(&line(r.iter().map(|(_, v)| v.as_str()).collect()));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        run_env(args, &[])
    }

    fn run_env(args: &[&str], env: &[(&str, &str)]) -> Outcome {
        let argv: Vec<String> = std::iter::once("quartic").chain(args.iter().copied()).map(String::from).collect();
        let env: Vec<(String, String)> = env.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        dispatch(&argv, &env, |p| if p == "test.cfg" { Ok("seed = 9\nformat=csv\n# comment\ntol.omega=0.05\n".into()) } else { Err(std::io::Error::other("missing")) })
    }

    #[test]
    fn count_prints_value() {
        let o = run(&["count", "--n", "5", "--t", "6,6,6,7,7"]);
        assert_eq!((o.code, o.stdout.as_str()), (0, "795\n"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["count", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(run(&["nosuch"]).code, EXIT_USAGE);
        assert_eq!(run(&["verify", "--suite", "nosuch"]).code, EXIT_USAGE);
        assert_eq!(run(&["count", "--n", "3", "--t", "1,2"]).code, EXIT_USAGE);
        assert_eq!(run(&["count", "--t", "1,2", "--config", "other.cfg"]).code, EXIT_USAGE);
        assert_eq!(run_env(&["count", "--t", "1,1"], &[("QUARTIC_SEED", "x")]).code, EXIT_USAGE);
        assert_eq!(run(&["count", "--t", "1,1", "--tol", "nosuch=1"]).code, EXIT_USAGE);
        assert_eq!(run(&["--help"]).code, EXIT_PASS);
    }

    #[test]
    fn numeric_failure_exit_code() {
        let o = run(&["count", "--n", "9", "--t", "20"]);
        assert_eq!(o.code, EXIT_NUMERIC);
        assert!(o.stderr.contains("error"));
    }

    #[test]
    fn config_precedence() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.seed, 42);
        cfg.apply_file_text("seed=5\nsamples=100\n").unwrap();
        cfg.apply_env(&[("QUARTIC_SEED".into(), "6".into()), ("OTHER".into(), "1".into())]).unwrap();
        assert_eq!((cfg.seed, cfg.mc_samples), (6, 100));
        assert!(cfg.apply_file_text("nonsense").is_err());
        let o = run_env(&["count", "--t", "1,1", "--config", "test.cfg", "--format", "json"], &[("QUARTIC_SEED", "11")]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["seed"], 11);
        let o = run_env(&["count", "--t", "1,1"], &[("QUARTIC_CONFIG", "test.cfg")]);
        assert_eq!(o.stdout, "n,t,count\n2,\"1,1\",1\n");
    }

    #[test]
    fn pearcey_json() {
        let o = run(&["pearcey", "--a", "-24", "--b", "14", "--k", "0", "--format", "json"]);
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let r = &v["results"][0];
        assert!((r["direct"].as_f64().unwrap() / 1.01e-5 - 1.0).abs() < 0.02);
        assert!((r["saddle"].as_f64().unwrap() / 1.047e-5 - 1.0).abs() < 0.01);
        assert!((r["ratio"].as_f64().unwrap() - 1.03).abs() < 0.01);
    }

    #[test]
    fn deterministic_output() {
        let args = ["volume", "--h", "0.5,0.5,0.5,0.5,0.5", "--samples", "20000", "--format", "json"];
        assert_eq!(run(&args), run(&args));
        let other = run(&["volume", "--h", "0.5,0.5,0.5,0.5,0.5", "--samples", "20000", "--format", "json", "--seed", "1"]);
        assert_ne!(run(&args).stdout, other.stdout);
    }
}
