//! Flag, config-file and default merging.
//!
//! Precedence: command-line flag, then the JSON config file, then the
//! built-in default. Config keys are the long flag names with dashes
//! replaced by underscores (`tol_real`, `k_points`, ...).

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use ptqkr::{Error, ResonanceParams};

/// Failure of a CLI run: usage problems exit with 2, library errors map by
/// kind.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(values)) => Ok(Self { values }),
            Ok(_) => Err(CliError::Usage(
                "config file must hold a JSON object".into(),
            )),
            Err(e) => Err(CliError::Usage(format!("config {}: {e}", path.display()))),
        }
    }

    /// Flag value if given, else the config entry under `key`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
        }
    }

    pub fn or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    /// As [`ConfigFile::pick`] but fails with a usage error when absent.
    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?.ok_or_else(|| {
            CliError::Usage(format!(
                "missing required value --{}",
                key.replace('_', "-")
            ))
        })
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Resonance numerator N (hbar_eff = 4πN/M).
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// Resonance period M.
    #[arg(long = "M")]
    pub m: Option<u32>,
    /// Period multiplier b of the magnetic term.
    #[arg(long = "b")]
    pub b: Option<u32>,
    /// Magnetic-term numerator a (gamma_eff = 2πa/(bM)).
    #[arg(long = "a")]
    pub a: Option<u32>,
    /// Kick strength k.
    #[arg(long = "k")]
    pub k: Option<f64>,
    /// Imaginary-potential strength lambda.
    #[arg(long = "lambda")]
    pub lambda: Option<f64>,
    /// Bloch number q.
    #[arg(long = "q", allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Threshold on |Im ε| for a real quasi-energy.
    #[arg(long = "tol-real")]
    pub tol_real: Option<f64>,
    /// Random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Spectrum cache directory.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Values resolved from [`CommonArgs`] and the config file.
#[derive(Debug, Clone)]
pub struct Common {
    pub cfg: ConfigFile,
    pub tol_real: f64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub cache: Option<PathBuf>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<Common> {
        let cfg = ConfigFile::load(self.config.as_deref())?;
        Ok(Common {
            tol_real: cfg.or(self.tol_real, "tol_real", ptqkr::spectrum::DEFAULT_TOL_REAL)?,
            seed: cfg.or(self.seed, "seed", 0)?,
            workers: cfg.or(self.workers, "workers", 1)?,
            out: cfg.or(self.out.clone(), "out", PathBuf::from("out"))?,
            cache: cfg.pick(self.cache.clone(), "cache")?,
            cfg,
        })
    }

    /// Model parameters; `N`, `M` and `k` are required.
    pub fn params(&self, cfg: &ConfigFile) -> Result<ResonanceParams> {
        let p = ResonanceParams {
            hbar_num: cfg.require(self.n, "N")?,
            period: cfg.require(self.m, "M")?,
            cell_mult: cfg.or(self.b, "b", 1)?,
            gamma_num: cfg.or(self.a, "a", 0)?,
            kick: cfg.require(self.k, "k")?,
            lambda: cfg.or(self.lambda, "lambda", 0.0)?,
            bloch_q: cfg.or(self.q, "q", 0.0)?,
        };
        p.validate()?;
        Ok(p)
    }
}
