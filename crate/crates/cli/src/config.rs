use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use zeta_floor::verify::{DEFAULT_N_MAX, DEFAULT_TARGET_RADIUS};
use zeta_floor::{PrecisionPolicy, RationalExponent, TailKind};

#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

impl UsageError {
    pub fn new(msg: impl Into<String>) -> Self {
        UsageError(msg.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Enclose a tail quantity at one n.
    /// CSV columns: kind,n,s,midpoint,radius,lower,upper,midpoint_text,method,precision_bits
    Tail,
    /// Decide the floor identity at one n.
    /// CSV columns: n,lhs_floor,rhs_floor,verdict,precision_used
    Verify,
    /// Decide the floor identity for n = 1..n-max.
    /// CSV columns: n,lhs_floor,rhs_floor,verdict,precision_used
    Scan,
    /// Integer points on C_m with -y_bound-1 <= y <= y_bound (all m when --m is absent).
    /// CSV columns: p,m,x,y
    Curve,
    /// Exceptional indices n <= n-max for each p, with the injection check.
    /// CSV columns: p,n,a,m
    Exceptions,
    /// Exact coefficient certificate of the degree-19 expansion plus grid checks.
    /// CSV columns: alpha_degree,computed,expected,matches
    Certify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    A,
    B,
    ZetaTail,
    ZetaTailReciprocalScaled,
}

impl From<KindArg> for TailKind {
    fn from(k: KindArg) -> TailKind {
        match k {
            KindArg::A => TailKind::A,
            KindArg::B => TailKind::B,
            KindArg::ZetaTail => TailKind::ZetaTail,
            KindArg::ZetaTailReciprocalScaled => TailKind::ZetaTailReciprocalScaled,
        }
    }
}

/// Certified computations around the floor of the reciprocal zeta tail.
///
/// Exit status: 0 success, 1 a Fails verdict (or a failed certificate or
/// check), 2 an Undecided verdict and no Fails, 3 usage error.
#[derive(Debug, Parser)]
#[command(name = "zeta-floor", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// JSON file with any of the fields below; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Exponent as a fraction q/p with q in {1, 2}
    #[arg(long, global = true)]
    pub s: Option<String>,

    #[arg(long, global = true)]
    pub n: Option<u64>,

    #[arg(long = "n-max", global = true)]
    pub n_max: Option<u64>,

    /// Odd root index; repeat or comma-separate for several
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Vec<u32>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m: Option<i64>,

    #[arg(long = "y-bound", global = true)]
    pub y_bound: Option<u64>,

    /// Tail quantity for `tail`
    #[arg(long, global = true, value_enum)]
    pub kind: Option<KindArg>,

    #[arg(long = "target-radius", global = true)]
    pub target_radius: Option<f64>,

    /// Precision cap in bits
    #[arg(long = "max-bits", global = true)]
    pub max_bits: Option<u32>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit the timestamp header line
    #[arg(long = "no-header", global = true)]
    pub no_header: bool,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// Config file contents; every field optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub s: Option<String>,
    pub n: Option<u64>,
    pub n_max: Option<u64>,
    #[serde(default)]
    pub p: Vec<u32>,
    pub m: Option<i64>,
    pub y_bound: Option<u64>,
    pub kind: Option<KindArg>,
    pub target_radius: Option<f64>,
    pub max_bits: Option<u32>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub no_header: Option<bool>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError::new(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError::new(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved settings of one run; embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<RationalExponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindArg>,
    pub target_radius: f64,
    pub max_bits: u32,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub no_header: bool,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

pub const DEFAULT_Y_BOUND: u64 = 10_000;
pub const DEFAULT_CERTIFY_P: [u32; 4] = [5, 7, 9, 11];

fn need<T>(v: Option<T>, flag: &str, command: Command) -> Result<T, UsageError> {
    v.ok_or_else(|| UsageError::new(format!("{} needs --{flag}", command_name(command))))
}

fn positive<T: PartialOrd + Default + Copy + std::fmt::Display>(v: Option<T>, flag: &str) -> Result<Option<T>, UsageError> {
    match v {
        Some(x) if x <= T::default() => Err(UsageError::new(format!("--{flag} must be positive, got {x}"))),
        other => Ok(other),
    }
}

pub fn command_name(c: Command) -> &'static str {
    match c {
        Command::Tail => "tail",
        Command::Verify => "verify",
        Command::Scan => "scan",
        Command::Curve => "curve",
        Command::Exceptions => "exceptions",
        Command::Certify => "certify",
    }
}

impl RunConfig {
    /// Merges flags over the optional config file and checks the fields the
    /// command needs.
    pub fn resolve(cli: Cli) -> Result<RunConfig, UsageError> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let command = cli
            .command
            .or(file.command)
            .ok_or_else(|| UsageError::new("no command given (flag or config \"command\")"))?;
        let s_text = cli.s.or(file.s);
        let s = s_text
            .map(|t| t.parse::<RationalExponent>().map_err(|e| UsageError::new(format!("--s: {}", e.message()))))
            .transpose()?;
        let p = if cli.p.is_empty() { file.p } else { cli.p };
        let cfg = RunConfig {
            command,
            s,
            n: positive(cli.n.or(file.n), "n")?,
            n_max: positive(cli.n_max.or(file.n_max), "n-max")?,
            p,
            m: cli.m.or(file.m),
            y_bound: positive(cli.y_bound.or(file.y_bound), "y-bound")?,
            kind: cli.kind.or(file.kind),
            target_radius: positive(cli.target_radius.or(file.target_radius), "target-radius")?
                .unwrap_or(DEFAULT_TARGET_RADIUS),
            max_bits: positive(cli.max_bits.or(file.max_bits), "max-bits")?
                .unwrap_or(PrecisionPolicy::default().max_bits),
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.or(file.out),
            no_header: cli.no_header || file.no_header.unwrap_or(false),
            jobs: positive(cli.jobs.or(file.jobs), "jobs")?,
        };
        if !cfg.target_radius.is_finite() {
            return Err(UsageError::new("--target-radius must be finite"));
        }
        cfg.with_command_defaults()
    }

    fn with_command_defaults(mut self) -> Result<RunConfig, UsageError> {
        let c = self.command;
        match c {
            Command::Tail => {
                need(self.s, "s", c)?;
                let n = need(self.n, "n", c)?;
                if self.kind.is_none() {
                    self.kind = Some(KindArg::ZetaTailReciprocalScaled);
                }
                match self.kind {
                    Some(KindArg::A) if n % 2 == 1 => return Err(UsageError::new("--kind a needs an even --n")),
                    Some(KindArg::B) if n % 2 == 0 => return Err(UsageError::new("--kind b needs an odd --n")),
                    _ => {}
                }
            }
            Command::Verify => {
                need(self.s, "s", c)?;
                need(self.n, "n", c)?;
            }
            Command::Scan => {
                need(self.s, "s", c)?;
                self.n_max.get_or_insert(DEFAULT_N_MAX);
            }
            Command::Curve => {
                if self.p.len() != 1 {
                    return Err(UsageError::new("curve needs exactly one --p"));
                }
                self.y_bound.get_or_insert(DEFAULT_Y_BOUND);
            }
            Command::Exceptions => {
                if self.p.is_empty() {
                    return Err(UsageError::new("exceptions needs --p"));
                }
                self.n_max.get_or_insert(DEFAULT_N_MAX);
            }
            Command::Certify => {
                if self.p.is_empty() {
                    self.p = DEFAULT_CERTIFY_P.to_vec();
                }
            }
        }
        Ok(self)
    }

    pub fn policy(&self) -> Result<PrecisionPolicy, UsageError> {
        let initial = self.max_bits.min(64);
        PrecisionPolicy::new(initial, self.max_bits, 2).map_err(|e| UsageError::new(e.message().to_string()))
    }
}
