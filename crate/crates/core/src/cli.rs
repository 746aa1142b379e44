//! Command-line front end.
//!
//! A run is described by an [`ExperimentSpec`], assembled from command-line
//! flags and an optional flat TOML config file whose keys mirror the long
//! flag names (`n`, `m`, `k`, `k-range`, `rho-sum-db`, `precoder`, ...).
//! Flags win over file values. Results are emitted as CSV or JSON records
//! with the columns listed in [`COLUMNS`].

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotics::RateDecomposition;
use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::experiments::{
    antenna_increment_sweep, evaluate_point, figure3_harness, optimal_k, SweepAxis, SweepPoint,
};
use crate::precoders::PrecoderKind;

pub const COLUMNS: [&str; 13] = [
    "axis",
    "axis_value",
    "N",
    "M",
    "K",
    "rho_sum_db",
    "precoder",
    "sim_rate",
    "sim_stderr",
    "asym_rate",
    "i1_term",
    "i2_term",
    "regime_flag",
];

const DEFAULT_TRIALS: usize = 500;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_EXTRA_ANTENNAS: usize = 10;
const DEFAULT_RHO_SUM_DB: &str = "20";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Asymptotic,
    OptimizeK,
    AntennaSweep,
    Figure3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Inclusive user-count range `a:b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl KRange {
    pub fn single(k: usize) -> Self {
        Self { start: k, end: k }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for KRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("k-range '{s}' must look like a:b with 1 <= a <= b"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let start: usize = a.trim().parse().map_err(|_| bad())?;
        let end: usize = b.trim().parse().map_err(|_| bad())?;
        if start == 0 || end < start {
            return Err(bad());
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

/// Inclusive dB grid `a:step:b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbRange {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl DbRange {
    pub fn single(db: f64) -> Self {
        Self { start: db, step: 1.0, end: db }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for DbRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidConfig(format!("rho-sum-db '{s}': {why}"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad("expected numbers")))
            .collect::<Result<Vec<f64>>>()?;
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(bad("values must be finite"));
        }
        match nums.as_slice() {
            [x] => Ok(Self::single(*x)),
            [a, step, b] => {
                if !(*step > 0.0) {
                    return Err(bad("step must be positive"));
                }
                if b < a {
                    return Err(bad("range is empty (end below start)"));
                }
                Ok(Self { start: *a, step: *step, end: *b })
            }
            _ => Err(bad("expected a:step:b or a single value")),
        }
    }
}

impl fmt::Display for DbRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.step, self.end)
        }
    }
}

/// Flat key-value contents of a config file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_sum_db: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precoder: Option<Vec<PrecoderKind>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_var: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config file: {e}")))
    }

    /// Values of `over` replace those of `self`. Giving either `k` or
    /// `k-range` in `over` discards both from `self`.
    pub fn overridden_by(mut self, over: FileConfig) -> Self {
        if over.k.is_some() || over.k_range.is_some() {
            self.k = over.k;
            self.k_range = over.k_range.clone();
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(command, n, m, rho_sum_db, precoder, trials, seed, extra, noise_var, workers, out, format);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: CommandKind,
    pub n_bs: usize,
    pub m_user: usize,
    /// `None` selects the command's default (all `1..=floor(N/M)`, or
    /// `floor(N/M)` for the antenna sweep).
    pub users: Option<KRange>,
    pub rho_sum_db: DbRange,
    pub precoders: Vec<PrecoderKind>,
    pub trials: usize,
    pub seed: u64,
    pub extra_antennas: usize,
    pub noise_var: f64,
    pub workers: Option<usize>,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentSpec {
    pub fn from_file_config(fc: FileConfig) -> Result<Self> {
        let missing = |key: &str| Error::InvalidConfig(format!("missing required field '{key}'"));
        let command = fc.command.ok_or_else(|| missing("command"))?;
        let n_bs = fc.n.ok_or_else(|| missing("n"))?;
        let m_user = fc.m.ok_or_else(|| missing("m"))?;
        let users = match (fc.k, fc.k_range.as_deref()) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("give either 'k' or 'k-range', not both".into()))
            }
            (Some(0), None) => return Err(Error::InvalidConfig("k must be at least 1".into())),
            (Some(k), None) => Some(KRange::single(k)),
            (None, Some(r)) => Some(r.parse()?),
            (None, None) => None,
        };
        let rho_sum_db: DbRange = fc.rho_sum_db.as_deref().unwrap_or(DEFAULT_RHO_SUM_DB).parse()?;
        let mut precoders = fc.precoder.unwrap_or_else(|| PrecoderKind::ALL.to_vec());
        if precoders.is_empty() {
            return Err(Error::InvalidConfig("precoder list is empty".into()));
        }
        precoders.dedup();
        let trials = fc.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        let spec = Self {
            command,
            n_bs,
            m_user,
            users,
            rho_sum_db,
            precoders,
            trials,
            seed: fc.seed.unwrap_or(DEFAULT_SEED),
            extra_antennas: fc.extra.unwrap_or(DEFAULT_EXTRA_ANTENNAS),
            noise_var: fc.noise_var.unwrap_or(1.0),
            workers: fc.workers,
            out: fc.out,
            format: fc.format.unwrap_or_default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_file_config(&self) -> FileConfig {
        let (k, k_range) = match self.users {
            Some(r) if r.start == r.end => (Some(r.start), None),
            Some(r) => (None, Some(r.to_string())),
            None => (None, None),
        };
        FileConfig {
            command: Some(self.command),
            n: Some(self.n_bs),
            m: Some(self.m_user),
            k,
            k_range,
            rho_sum_db: Some(self.rho_sum_db.to_string()),
            precoder: Some(self.precoders.clone()),
            trials: Some(self.trials),
            seed: Some(self.seed),
            extra: Some(self.extra_antennas),
            noise_var: Some(self.noise_var),
            workers: self.workers,
            out: self.out.clone(),
            format: Some(self.format),
        }
    }

    /// Config-file text that parses back into this spec.
    pub fn to_config_string(&self) -> String {
        toml::to_string(&self.to_file_config()).expect("flat config serializes")
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        Self::from_file_config(FileConfig::parse(text)?)
    }

    /// User counts evaluated by the command.
    pub fn user_counts(&self) -> Vec<usize> {
        let k_max = if self.m_user == 0 { 0 } else { self.n_bs / self.m_user };
        match (self.command, self.users) {
            (CommandKind::OptimizeK, _) => (1..=k_max).collect(),
            (_, Some(r)) => r.values(),
            (CommandKind::AntennaSweep, None) => vec![k_max],
            (_, None) => (1..=k_max).collect(),
        }
    }

    pub fn rho_sum_db_values(&self) -> Vec<f64> {
        self.rho_sum_db.values()
    }

    /// Configuration for one sweep point.
    pub fn system(&self, k_users: usize, rho_sum_db: f64) -> Result<SystemConfig> {
        let rho_sum = db_to_linear(rho_sum_db);
        SystemConfig::new(self.n_bs, self.m_user, k_users, self.noise_var, rho_sum * self.noise_var, self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bs == 0 || self.m_user == 0 {
            return Err(Error::InvalidConfig("n and m must be positive".into()));
        }
        if self.n_bs < self.m_user {
            return Err(Error::InvalidConfig(format!(
                "n = {} is below m = {}: not even one user fits",
                self.n_bs, self.m_user
            )));
        }
        if !(self.noise_var > 0.0) {
            return Err(Error::InvalidConfig("noise-var must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        let first_db = self.rho_sum_db.start;
        for k in self.user_counts() {
            self.system(k, first_db).map_err(|e| match e {
                Error::InvalidConfig(msg) => Error::InvalidConfig(format!("sweep point K={k}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    fn axis(&self) -> SweepAxis {
        match self.command {
            CommandKind::OptimizeK => SweepAxis::Snr,
            CommandKind::AntennaSweep => SweepAxis::BsAntennas,
            _ if self.user_counts().len() == 1 && self.rho_sum_db_values().len() > 1 => SweepAxis::Snr,
            _ => SweepAxis::Users,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub n_bs: usize,
    pub m_user: usize,
    pub k_users: usize,
    pub rho_sum_db: f64,
    pub precoder: PrecoderKind,
    pub sim_rate: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub asymptotic: Option<RateDecomposition<f64>>,
}

impl Record {
    fn from_point(axis: SweepAxis, axis_value: f64, rho_sum_db: f64, precoder: PrecoderKind, p: &SweepPoint) -> Self {
        Self {
            axis,
            axis_value,
            n_bs: p.n_bs,
            m_user: p.m_user,
            k_users: p.k_users,
            rho_sum_db,
            precoder,
            sim_rate: p.simulated.as_ref().map(|s| s.sum_mean),
            sim_stderr: p.simulated.as_ref().map(|s| s.sum_stderr),
            asymptotic: p.asymptotic,
        }
    }

    /// Cells in [`COLUMNS`] order; empty strings for absent values.
    pub fn cells(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(format_g12).unwrap_or_default();
        vec![
            self.axis.name().to_string(),
            format_g12(self.axis_value),
            self.n_bs.to_string(),
            self.m_user.to_string(),
            self.k_users.to_string(),
            format_g12(self.rho_sum_db),
            self.precoder.name().to_string(),
            opt(self.sim_rate),
            opt(self.sim_stderr),
            opt(self.asymptotic.map(|a| a.total)),
            opt(self.asymptotic.map(|a| a.dim_excess)),
            opt(self.asymptotic.map(|a| a.array_gain)),
            self.asymptotic.map(|a| a.regime.name().to_string()).unwrap_or_default(),
        ]
    }

    fn json(&self) -> serde_json::Value {
        use serde_json::{Map, Value};
        let mut obj = Map::new();
        for (col, cell) in COLUMNS.iter().zip(self.cells()) {
            let v = match *col {
                "axis" | "precoder" | "regime_flag" => {
                    if cell.is_empty() {
                        Value::Null
                    } else {
                        Value::String(cell)
                    }
                }
                "N" | "M" | "K" => Value::from(cell.parse::<u64>().expect("integer cell")),
                _ if cell.is_empty() => Value::Null,
                _ => cell
                    .parse::<f64>()
                    .ok()
                    .and_then(serde_json::Number::from_f64)
                    .map(Value::Number)
                    .unwrap_or(Value::String(cell)),
            };
            obj.insert(col.to_string(), v);
        }
        Value::Object(obj)
    }
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros removed.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    fn trim(s: &str) -> &str {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.')
        } else {
            s
        }
    }
    if exp < -4 || exp >= DIGITS {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim(&fixed).to_string()
    }
}

/// Computes every record the spec asks for.
pub fn run_spec(spec: &ExperimentSpec) -> Result<Vec<Record>> {
    spec.validate()?;
    let axis = spec.axis();
    let users = spec.user_counts();
    let dbs = spec.rho_sum_db_values();
    let mut records = Vec::new();
    match spec.command {
        CommandKind::Simulate | CommandKind::Asymptotic => {
            let (trials, asym) = match spec.command {
                CommandKind::Simulate => (Some(spec.trials), false),
                _ => (None, true),
            };
            for &db in &dbs {
                for &k in &users {
                    let cfg = spec.system(k, db)?;
                    let axis_value = if axis == SweepAxis::Snr { db } else { k as f64 };
                    let points = evaluate_point(&cfg, &spec.precoders, axis_value, trials, asym, spec.workers)?;
                    for (&kind, p) in spec.precoders.iter().zip(&points) {
                        records.push(Record::from_point(axis, axis_value, db, kind, p));
                    }
                }
            }
        }
        CommandKind::Figure3 => {
            for &db in &dbs {
                let grid = users.iter().map(|&k| spec.system(k, db)).collect::<Result<Vec<_>>>()?;
                for sweep in figure3_harness(&grid, &spec.precoders, spec.trials, spec.workers)? {
                    for p in &sweep.points {
                        let axis_value = if axis == SweepAxis::Snr { db } else { p.k_users as f64 };
                        records.push(Record::from_point(axis, axis_value, db, sweep.precoder, p));
                    }
                }
            }
        }
        CommandKind::OptimizeK => {
            for &db in &dbs {
                let base = spec.system(1, db)?;
                for &kind in &spec.precoders {
                    let (k_star, curve) = optimal_k(&base, kind, base.rho_sum())?;
                    let best = curve.points.iter().find(|p| p.k_users == k_star).expect("K* on curve");
                    records.push(Record::from_point(SweepAxis::Snr, db, db, kind, best));
                }
            }
        }
        CommandKind::AntennaSweep => {
            for &db in &dbs {
                for &k in &users {
                    let base = spec.system(k, db)?;
                    for &kind in &spec.precoders {
                        let sweep = antenna_increment_sweep(&base, kind, spec.extra_antennas)?;
                        for p in &sweep.points {
                            records.push(Record::from_point(axis, p.n_bs as f64, db, kind, p));
                        }
                    }
                }
            }
        }
    }
    Ok(records)
}

pub fn write_csv<W: Write>(records: &[Record], out: W) -> Result<()> {
    let io_err = |e: csv::Error| Error::Output(e.to_string());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS).map_err(io_err)?;
    for r in records {
        w.write_record(r.cells()).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

pub fn write_json<W: Write>(records: &[Record], mut out: W) -> Result<()> {
    let values: Vec<serde_json::Value> = records.iter().map(Record::json).collect();
    serde_json::to_writer_pretty(&mut out, &values).map_err(|e| Error::Output(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| Error::Output(e.to_string()))
}

/// Renders the records in the spec's format.
pub fn render(records: &[Record], format: OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(records, &mut buf)?,
        OutputFormat::Json => write_json(records, &mut buf)?,
    }
    Ok(buf)
}

/// Writes the records to the spec's output path, or stdout when none is set.
pub fn emit_results(records: &[Record], spec: &ExperimentSpec) -> Result<()> {
    let bytes = render(records, spec.format)?;
    match &spec.out {
        Some(path) => write_file(path, &bytes),
        None => io::stdout().lock().write_all(&bytes).map_err(|e| Error::Output(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Output(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(name = "bd-mimo", version, about = "Block-diagonalization MU-MIMO sum-rate lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Monte Carlo sum rates.
    Simulate(Flags),
    /// Large-system sum rates.
    Asymptotic(Flags),
    /// Sum-rate-optimal number of users per SNR point.
    OptimizeK(Flags),
    /// Asymptotic sum rate as antennas are added at the base station.
    AntennaSweep(Flags),
    /// Simulated and asymptotic sum rates side by side over K.
    Figure3(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Base-station antennas.
    #[arg(long)]
    pub n: Option<usize>,
    /// Antennas per user.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of users.
    #[arg(long, conflicts_with = "k_range")]
    pub k: Option<usize>,
    /// Inclusive user range a:b.
    #[arg(long = "k-range", value_name = "A:B")]
    pub k_range: Option<String>,
    /// Total SNR grid in dB, a:step:b or a single value.
    #[arg(long = "rho-sum-db", value_name = "A:STEP:B", allow_hyphen_values = true)]
    pub rho_sum_db: Option<String>,
    /// Inner precoder (repeatable): svd, zf, rzf.
    #[arg(long = "precoder")]
    pub precoder: Vec<String>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Antennas added by antenna-sweep.
    #[arg(long)]
    pub extra: Option<usize>,
    /// Noise variance (the total power is scaled with it).
    #[arg(long = "noise-var")]
    pub noise_var: Option<f64>,
    /// Worker threads for Monte Carlo (results do not depend on it).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Flat key-value config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Flags {
    fn to_file_config(&self, command: CommandKind) -> Result<FileConfig> {
        let precoder = if self.precoder.is_empty() {
            None
        } else {
            Some(self.precoder.iter().map(|p| p.parse()).collect::<Result<Vec<PrecoderKind>>>()?)
        };
        Ok(FileConfig {
            command: Some(command),
            n: self.n,
            m: self.m,
            k: self.k,
            k_range: self.k_range.clone(),
            rho_sum_db: self.rho_sum_db.clone(),
            precoder,
            trials: self.trials,
            seed: self.seed,
            extra: self.extra,
            noise_var: self.noise_var,
            workers: self.workers,
            out: self.out.clone(),
            format: self.format,
        })
    }
}

impl Cli {
    /// Resolves flags and the optional config file into a validated spec.
    pub fn into_spec(self) -> Result<ExperimentSpec> {
        let (kind, flags) = match self.command {
            CliCommand::Simulate(f) => (CommandKind::Simulate, f),
            CliCommand::Asymptotic(f) => (CommandKind::Asymptotic, f),
            CliCommand::OptimizeK(f) => (CommandKind::OptimizeK, f),
            CliCommand::AntennaSweep(f) => (CommandKind::AntennaSweep, f),
            CliCommand::Figure3(f) => (CommandKind::Figure3, f),
        };
        let from_file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
                FileConfig::parse(&text)?
            }
            None => FileConfig::default(),
        };
        ExperimentSpec::from_file_config(from_file.overridden_by(flags.to_file_config(kind)?))
    }
}

/// Parses command-line arguments (including the program name) into a spec.
pub fn parse_spec<I, S>(args: I) -> Result<ExperimentSpec>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    cli.into_spec()
}
