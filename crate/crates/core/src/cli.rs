//! Command-line front end: flag and config merging, dispatch, CSV/JSON tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::frobenius::{self, corpus_scan, parse_corpus, quadratic_corpus, ScanOptions, ScanReport, Shape};
use crate::leastprime::{
    default_c3, lower_bound_m, optimize_b, published_recipe, rounded_case_bounds, LowerBoundConstants,
    Optimized,
};
use crate::numerics::{round_sig, Rounding};
use crate::profiles::{builtin_profiles, least_prime_profiles, profile_for, DegreeProfile};
use crate::repulsion::optimize_all;
use crate::selfcheck;
use crate::turan::run_trials;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default discriminant height for the quadratic scan.
pub const DEFAULT_HEIGHT: u64 = 100_000;

/// c₆ used by the lower-bound defaults (the global c₃ ceiling).
pub const LOWER_BOUND_C6: f64 = 11.7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => EXIT_FAILURE,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "chebotarev", version, about = "Explicit least-prime constants and Frobenius verification")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key = value` defaults; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct ProfileArgs {
    /// Single degree n₀.
    #[arg(long, conflicts_with = "all")]
    profile: Option<u32>,
    /// Every built-in profile (the default).
    #[arg(long)]
    all: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Repulsion constants c₁…c₃ per degree.
    Repulsion {
        #[command(flatten)]
        profiles: ProfileArgs,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Least-prime exponent B per degree.
    LeastPrime {
        #[command(flatten)]
        profiles: ProfileArgs,
        /// Search every parameter (the default).
        #[arg(long, conflicts_with = "published")]
        optimize: bool,
        /// Published parameter choices; only θ and ε₂ are searched.
        #[arg(long = "paper-params")]
        published: bool,
    },
    /// Density m(a) of primes in [x, ax].
    LowerBound {
        #[arg(long)]
        a: Option<f64>,
        /// `key = value` file with c35, c39, c40, c41, c6ext.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Random power-sum witness trials.
    Turan {
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Least Frobenius primes for every quadratic field with |d| ≤ H.
    VerifyQuadratic {
        /// Discriminant height (default 100000).
        #[arg(long)]
        height: Option<u64>,
        #[arg(long)]
        ceiling: Option<u64>,
        /// One row per field and automorphism.
        #[arg(long)]
        detail: bool,
    },
    /// Least Frobenius primes for a corpus file.
    VerifyCorpus {
        file: Option<PathBuf>,
        #[arg(long)]
        ceiling: Option<u64>,
        #[arg(long)]
        detail: bool,
    },
    /// The full property suite.
    Selfcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Optimize,
    Published,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Repulsion,
    LeastPrime,
    LowerBound,
    Turan,
    VerifyQuadratic,
    VerifyCorpus,
    Selfcheck,
}

/// Fully merged settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// None means every profile.
    pub profile: Option<u32>,
    pub eta: f64,
    pub mode: Mode,
    pub a: Option<f64>,
    pub constants: Option<PathBuf>,
    pub trials: usize,
    pub height: u64,
    pub ceiling: u64,
    pub corpus: Option<PathBuf>,
    pub detail: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    fn defaults(command: CommandKind) -> Self {
        Self {
            command,
            profile: None,
            eta: 1.0,
            mode: Mode::Optimize,
            a: None,
            constants: None,
            trials: 10_000,
            height: DEFAULT_HEIGHT,
            ceiling: frobenius::DEFAULT_CEILING,
            corpus: None,
            detail: false,
            format: Format::Csv,
            out: None,
            seed: frobenius::DEFAULT_SEED,
        }
    }
}

/// Parses `key = value` lines, skipping blanks and '#' comments.
pub fn parse_key_values(text: &str, path: &str) -> Result<Vec<(usize, String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config {
                path: path.into(),
                line: i + 1,
                msg: format!("expected `key = value`, found `{line}`"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(CliError::Config {
                path: path.into(),
                line: i + 1,
                msg: "empty key or value".into(),
            });
        }
        out.push((i + 1, k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn parse_value<T: std::str::FromStr>(v: &str, path: &str, line: usize, key: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config {
        path: path.into(),
        line,
        msg: format!("bad value `{v}` for `{key}`"),
    })
}

fn parse_bool(v: &str, path: &str, line: usize, key: &str) -> Result<bool, CliError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config { path: path.into(), line, msg: format!("bad boolean `{v}` for `{key}`") }),
    }
}

fn apply_config(cfg: &mut RunConfig, path: &Path) -> Result<(), CliError> {
    let text = read_text(path)?;
    let p = path.display().to_string();
    // relative paths inside a config file are taken from its directory
    let base = path.parent().unwrap_or(Path::new(""));
    let rel = |v: &str| base.join(v);
    for (line, key, v) in parse_key_values(&text, &p)? {
        match key.as_str() {
            "profile" => cfg.profile = Some(parse_value(&v, &p, line, &key)?),
            "all" => {
                if parse_bool(&v, &p, line, &key)? {
                    cfg.profile = None;
                }
            }
            "eta" => cfg.eta = parse_value(&v, &p, line, &key)?,
            "mode" => {
                cfg.mode = match v.as_str() {
                    "optimize" => Mode::Optimize,
                    "paper-params" => Mode::Published,
                    _ => return Err(CliError::Config { path: p, line, msg: format!("bad mode `{v}`") }),
                }
            }
            "a" => cfg.a = Some(parse_value(&v, &p, line, &key)?),
            "constants" => cfg.constants = Some(rel(&v)),
            "trials" => cfg.trials = parse_value(&v, &p, line, &key)?,
            "height" => cfg.height = parse_value(&v, &p, line, &key)?,
            "ceiling" => cfg.ceiling = parse_value(&v, &p, line, &key)?,
            "corpus" => cfg.corpus = Some(rel(&v)),
            "detail" => cfg.detail = parse_bool(&v, &p, line, &key)?,
            "format" => {
                cfg.format = match v.as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(CliError::Config { path: p, line, msg: format!("bad format `{v}`") }),
                }
            }
            "out" => cfg.out = Some(rel(&v)),
            "seed" => cfg.seed = parse_value(&v, &p, line, &key)?,
            _ => return Err(CliError::Config { path: p, line, msg: format!("unknown key `{key}`") }),
        }
    }
    Ok(())
}

fn apply_profiles(cfg: &mut RunConfig, pa: &ProfileArgs) {
    if pa.all {
        cfg.profile = None;
    } else if pa.profile.is_some() {
        cfg.profile = pa.profile;
    }
}

/// Builds the run configuration: defaults, then the config file, then flags.
pub fn resolve<I, T>(args: I) -> Result<RunConfig, Result<String, CliError>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return Err(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => Err(CliError::Usage(e.to_string())),
            });
        }
    };
    let kind = match &cli.command {
        Command::Repulsion { .. } => CommandKind::Repulsion,
        Command::LeastPrime { .. } => CommandKind::LeastPrime,
        Command::LowerBound { .. } => CommandKind::LowerBound,
        Command::Turan { .. } => CommandKind::Turan,
        Command::VerifyQuadratic { .. } => CommandKind::VerifyQuadratic,
        Command::VerifyCorpus { .. } => CommandKind::VerifyCorpus,
        Command::Selfcheck => CommandKind::Selfcheck,
    };
    let mut cfg = RunConfig::defaults(kind);
    if let Some(path) = &cli.config {
        apply_config(&mut cfg, path).map_err(Err)?;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match &cli.command {
        Command::Repulsion { profiles, eta } => {
            apply_profiles(&mut cfg, profiles);
            cfg.eta = eta.unwrap_or(cfg.eta);
        }
        Command::LeastPrime { profiles, optimize, published } => {
            apply_profiles(&mut cfg, profiles);
            if *optimize {
                cfg.mode = Mode::Optimize;
            } else if *published {
                cfg.mode = Mode::Published;
            }
        }
        Command::LowerBound { a, constants } => {
            cfg.a = a.or(cfg.a);
            if constants.is_some() {
                cfg.constants = constants.clone();
            }
        }
        Command::Turan { trials } => cfg.trials = trials.unwrap_or(cfg.trials),
        Command::VerifyQuadratic { height, ceiling, detail } => {
            cfg.height = height.unwrap_or(cfg.height);
            cfg.ceiling = ceiling.unwrap_or(cfg.ceiling);
            cfg.detail |= *detail;
        }
        Command::VerifyCorpus { file, ceiling, detail } => {
            if file.is_some() {
                cfg.corpus = file.clone();
            }
            cfg.ceiling = ceiling.unwrap_or(cfg.ceiling);
            cfg.detail |= *detail;
        }
        Command::Selfcheck => {}
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Ten significant digits, plain decimal, trailing zeros dropped.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let places = (9 - mag).max(0) as usize;
    let mut s = format!("{x:.places$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                let v: f64 = format_num(*x).parse().expect("formatted number");
                serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
            }
            Cell::Num(_) => serde_json::Value::Null,
            Cell::Int(i) => (*i).into(),
            Cell::Text(t) => t.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

/// A named-column table; `rounding` records each value's safe-rounding direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let quote = |s: String| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s
            }
        };
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| quote(c.text())).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("json");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn select(table: &[DegreeProfile], n0: Option<u32>) -> Result<Vec<DegreeProfile>, CliError> {
    match n0 {
        None => Ok(table.to_vec()),
        Some(n) => profile_for(n, table).map(|p| vec![p]).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn repulsion_table(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    if !(cfg.eta > 0.0) {
        return Err(CliError::Usage(format!("--eta must be positive, got {}", cfg.eta)));
    }
    let profiles = select(&builtin_profiles(), cfg.profile)?;
    let fits = optimize_all(&profiles, cfg.eta).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut t = Table::new(&[
        "n0", "d0", "c1", "c2", "c1p", "c2p", "c1pp", "c2pp", "c3", "eps", "sigma", "sigma_p", "sigma_pp",
        "sigma_c3", "eta", "rounding",
    ]);
    for f in &fits {
        let r = &f.rounded;
        t.push(vec![
            f.n0.into(),
            f.d0.as_str().into(),
            r.c1.into(),
            r.c2.into(),
            r.c1p.into(),
            r.c2p.into(),
            r.c1pp.into(),
            r.c2pp.into(),
            r.c3.into(),
            f.eps.into(),
            f.sigma[0].into(),
            f.sigma[1].into(),
            f.sigma[2].into(),
            f.sigma_c3.into(),
            f.eta.into(),
            "c1..c2pp down 4 sig; c3 up 4 sig; eps sigma eta exact".into(),
        ]);
    }
    Ok((t, true))
}

/// c₃ for the extremely small case of degree n₀, from the repulsion profile of that degree.
fn c3_for(n0: u32) -> Result<f64, CliError> {
    let p = profile_for(n0, &builtin_profiles()).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(default_c3(&p))
}

fn least_prime_table(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let profiles = select(&least_prime_profiles(), cfg.profile)?;
    let mode = cfg.mode;
    let results: Vec<Result<Optimized, String>> = profiles
        .par_iter()
        .map(|p| {
            let c3 = c3_for(p.n0()).map_err(|e| e.to_string())?;
            let r = match mode {
                Mode::Optimize => optimize_b(p, c3),
                Mode::Published => published_recipe(p, c3),
            };
            r.map_err(|e| format!("n0 = {}: {e}", p.n0()))
        })
        .collect();
    let mut t = Table::new(&[
        "n0", "d0", "B_ne", "B_med", "B_small", "B_vsmall", "B_xsmall", "B", "c3", "feasible", "rounding",
    ]);
    let mut ok = true;
    for r in results {
        let o = r.map_err(CliError::Failed)?;
        let cases = rounded_case_bounds(&o.evaluation);
        let feasible = o.evaluation.feasible();
        ok &= feasible;
        let mut row: Vec<Cell> = vec![o.n0.into(), o.d0.as_str().into()];
        row.extend(cases.iter().map(|&b| Cell::Num(b)));
        row.extend([
            o.b.into(),
            o.evaluation.c3.into(),
            feasible.into(),
            "case bounds up 4 dp; B up 4 sig; c3 up 4 sig".into(),
        ]);
        t.push(row);
    }
    Ok((t, ok))
}

/// Lower-bound constants from a `key = value` file; missing keys fall back to the approximations.
pub fn load_lower_bound_constants(path: &Path, a: f64) -> Result<LowerBoundConstants, CliError> {
    let text = read_text(path)?;
    let p = path.display().to_string();
    let kv = parse_key_values(&text, &p)?;
    let c6ext = match kv.iter().find(|(_, k, _)| k == "c6ext") {
        Some((line, k, v)) => parse_value(v, &p, *line, k)?,
        None => LOWER_BOUND_C6,
    };
    let mut k = LowerBoundConstants::approximate(a, c6ext);
    let mut seen = 0;
    for (line, key, v) in &kv {
        let x: f64 = parse_value(v, &p, *line, key)?;
        match key.as_str() {
            "c35" => k.c35 = x,
            "c39" => k.c39 = x,
            "c40" => k.c40 = x,
            "c41" => k.c41 = x,
            "c6ext" => {}
            _ => {
                return Err(CliError::Config {
                    path: p.clone(),
                    line: *line,
                    msg: format!("unknown key `{key}`"),
                })
            }
        }
        seen += 1;
    }
    k.approximate = seen < 5;
    Ok(k)
}

fn lower_bound_table(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let a = cfg.a.ok_or_else(|| CliError::Usage("lower-bound needs --a".into()))?;
    let k = match &cfg.constants {
        Some(path) => load_lower_bound_constants(path, a)?,
        None => LowerBoundConstants::approximate(a, LOWER_BOUND_C6),
    };
    let lb = lower_bound_m(a, &k).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut t = Table::new(&["a", "c43", "m", "approximate", "rounding"]);
    t.push(vec![
        a.into(),
        round_sig(lb.c43, 6, Rounding::Down).into(),
        round_sig(lb.m, 6, Rounding::Down).into(),
        lb.approximate.into(),
        "c43 m down 6 sig".into(),
    ]);
    Ok((t, lb.m > 0.0))
}

fn turan_table(cfg: &RunConfig) -> (Table, bool) {
    let s = run_trials(cfg.trials, cfg.seed);
    let mut t = Table::new(&["trials", "seed", "failures", "max_j0", "max_ratio", "passed", "rounding"]);
    let passed = s.failures == 0;
    t.push(vec![
        s.trials.into(),
        cfg.seed.into(),
        s.failures.into(),
        s.max_j0.into(),
        s.max_ratio.into(),
        passed.into(),
        "exact".into(),
    ]);
    (t, passed)
}

const VERIFY_COLUMNS: [&str; 9] = ["degree", "shape", "disc", "sigma", "p", "A", "B", "C", "rounding"];

/// Worst-case rows per degree (one per shape, then the combined maxima), or every row with `detail`.
pub fn verify_table(report: &ScanReport, detail: bool) -> Table {
    let mut t = Table::new(&VERIFY_COLUMNS);
    let nearest = || Cell::from("nearest");
    if detail {
        for r in &report.rows {
            t.push(vec![
                r.degree.into(),
                "".into(),
                r.disc.as_str().into(),
                r.sigma.into(),
                r.p.into(),
                r.exponents.a.into(),
                r.exponents.b.into(),
                r.exponents.c.into(),
                nearest(),
            ]);
        }
        return t;
    }
    let mut degrees: Vec<usize> = report.worst.iter().map(|w| w.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for d in degrees {
        let mut max = [f64::NAN; 3];
        for (i, shape) in [Shape::A, Shape::B, Shape::C].into_iter().enumerate() {
            let Some(w) = report.worst.iter().find(|w| w.degree == d && w.shape == shape) else {
                continue;
            };
            max[i] = w.value;
            let row = report
                .rows
                .iter()
                .find(|r| r.degree == d && r.disc == w.disc && r.sigma == w.sigma)
                .expect("worst case comes from a row");
            t.push(vec![
                d.into(),
                format!("{shape:?}").into(),
                w.disc.as_str().into(),
                w.sigma.into(),
                w.p.into(),
                row.exponents.a.into(),
                row.exponents.b.into(),
                row.exponents.c.into(),
                nearest(),
            ]);
        }
        t.push(vec![
            d.into(),
            "max".into(),
            "".into(),
            "".into(),
            "".into(),
            max[0].into(),
            max[1].into(),
            max[2].into(),
            nearest(),
        ]);
    }
    t
}

fn scan(corpus: &[frobenius::FieldSpec], cfg: &RunConfig, err: &mut dyn Write) -> (Table, bool) {
    let report = corpus_scan(corpus, &ScanOptions { ceiling: cfg.ceiling, seed: cfg.seed });
    for f in &report.failures {
        let _ = writeln!(err, "degree {} disc {} sigma {}: {}", f.degree, f.disc, f.sigma, f.error);
    }
    (verify_table(&report, cfg.detail), report.failures.is_empty())
}

fn selfcheck_table(cfg: &RunConfig) -> (Table, bool) {
    let results = selfcheck::run_all(cfg.seed);
    let mut t = Table::new(&["check", "passed", "detail", "rounding"]);
    let ok = results.iter().all(|r| r.passed);
    for r in results {
        t.push(vec![r.name.into(), r.passed.into(), r.detail.into(), "exact".into()]);
    }
    (t, ok)
}

/// Runs one configured command; returns the table and whether everything passed.
pub fn execute(cfg: &RunConfig, err: &mut dyn Write) -> Result<(Table, bool), CliError> {
    match cfg.command {
        CommandKind::Repulsion => repulsion_table(cfg),
        CommandKind::LeastPrime => least_prime_table(cfg),
        CommandKind::LowerBound => lower_bound_table(cfg),
        CommandKind::Turan => Ok(turan_table(cfg)),
        CommandKind::VerifyQuadratic => {
            let corpus = quadratic_corpus(cfg.height).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(scan(&corpus, cfg, err))
        }
        CommandKind::VerifyCorpus => {
            let path =
                cfg.corpus.as_ref().ok_or_else(|| CliError::Usage("verify-corpus needs FILE".into()))?;
            let text = read_text(path)?;
            let corpus = parse_corpus(&text).map_err(|e| match e {
                frobenius::FrobeniusError::Parse { line, msg } => {
                    CliError::Config { path: path.display().to_string(), line, msg }
                }
                other => CliError::Usage(other.to_string()),
            })?;
            Ok(scan(&corpus, cfg, err))
        }
        CommandKind::Selfcheck => Ok(selfcheck_table(cfg)),
    }
}

/// Entry point with injectable streams; returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match resolve(args) {
        Ok(c) => c,
        Err(Ok(help)) => {
            let _ = write!(out, "{help}");
            return EXIT_OK;
        }
        Err(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let (table, ok) = match execute(&cfg, err) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let text = table.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
