//! Run configuration: a flat `key = value` file overridden by flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sinegordon_core::spectra::FULL_DIM_CAP;
use sinegordon_core::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Diag,
    Bethe,
    Dispersion,
    Vacuum,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Diag => "diag",
            Command::Bethe => "bethe",
            Command::Dispersion => "dispersion",
            Command::Vacuum => "vacuum",
            Command::Scan => "scan",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Mass,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Bethe,
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Logderiv,
    Local,
}

macro_rules! keyword {
    ($t:ty, $($name:literal => $v:expr),+) => {
        impl FromStr for $t {
            type Err = anyhow::Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok($v),)+
                    other => bail!("unknown value '{other}' (expected one of: {})", [$($name),+].join(", ")),
                }
            }
        }
    };
}

keyword!(Command, "check" => Command::Check, "diag" => Command::Diag, "bethe" => Command::Bethe,
    "dispersion" => Command::Dispersion, "vacuum" => Command::Vacuum, "scan" => Command::Scan);
keyword!(Observable, "mass" => Observable::Mass, "energy" => Observable::Energy);
keyword!(Source, "bethe" => Source::Bethe, "continuum" => Source::Continuum);
keyword!(Convention, "logderiv" => Convention::Logderiv, "local" => Convention::Local);

/// Fully resolved configuration. Everything here except `out` and
/// `workers` enters the config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub eta: f64,
    pub theta: f64,
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(rename = "M")]
    pub magnetization: usize,
    pub theta_grid: Vec<f64>,
    pub eta_grid: Vec<f64>,
    #[serde(rename = "L_grid")]
    pub sites_grid: Vec<usize>,
    pub tol: f64,
    pub seed: u64,
    pub observable: Observable,
    pub source: Source,
    pub convention: Convention,
    pub dim_cap: usize,
    pub levels: usize,
    pub samples: usize,
    pub dump_operator: bool,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub workers: usize,
}

/// Raw key/value settings before defaults are applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "command",
    "eta",
    "theta",
    "L",
    "M",
    "theta_grid",
    "eta_grid",
    "L_grid",
    "tol",
    "out",
    "workers",
    "seed",
    "observable",
    "source",
    "convention",
    "dim_cap",
    "levels",
    "samples",
    "dump_operator",
];

impl Settings {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                anyhow!("line {}: expected key = value, got '{}'", n + 1, raw.trim())
            })?;
            s.set(k.trim(), v.trim())
                .with_context(|| format!("line {}", n + 1))?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown key '{key}'");
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Later settings win.
    pub fn merge(mut self, over: Settings) -> Self {
        self.values.extend(over.values);
        self
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{key} = '{v}': {e}")))
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => parse_list(v)
                .map(Some)
                .with_context(|| format!("{key} = '{v}'")),
        }
    }

    /// Apply per-command defaults and validate.
    pub fn resolve(&self) -> Result<RunConfig> {
        let command: Command = self
            .get("command")?
            .ok_or_else(|| anyhow!("no command given"))?;
        let eta = self.get("eta")?.unwrap_or(2.0 * PI / 5.0);
        let sites_default = match command {
            Command::Check | Command::Diag | Command::Bethe => 8,
            _ => 256,
        };
        let sites: usize = self.get("L")?.unwrap_or(sites_default);
        let theta_default = match command {
            Command::Dispersion => 6.0,
            _ => 1.0,
        };
        let theta_grid_default: Vec<f64> = match command {
            Command::Check => vec![0.5, 1.0, 2.0],
            Command::Scan if self.get::<Observable>("observable")? == Some(Observable::Energy) => {
                (0..21).map(|k| 3.0 + 0.25 * f64::from(k)).collect()
            }
            _ => (4..=8).map(f64::from).collect(),
        };
        let cfg = RunConfig {
            command,
            eta,
            theta: self.get("theta")?.unwrap_or(theta_default),
            sites,
            magnetization: self.get("M")?.unwrap_or(sites / 2),
            theta_grid: self.list("theta_grid")?.unwrap_or(theta_grid_default),
            eta_grid: self
                .list("eta_grid")?
                .unwrap_or_else(|| vec![0.5, 2.0 * PI / 5.0, 2.0]),
            sites_grid: self.list("L_grid")?.unwrap_or_else(|| vec![4, 6, 8]),
            tol: self.get("tol")?.unwrap_or(1e-12),
            seed: self.get("seed")?.unwrap_or(1),
            observable: self.get("observable")?.unwrap_or(Observable::Mass),
            source: self.get("source")?.unwrap_or(Source::Bethe),
            convention: self.get("convention")?.unwrap_or(Convention::Logderiv),
            dim_cap: self.get("dim_cap")?.unwrap_or(FULL_DIM_CAP),
            levels: self.get("levels")?.unwrap_or(10),
            samples: self.get("samples")?.unwrap_or(100),
            dump_operator: self.get("dump_operator")?.unwrap_or(false),
            out: self
                .get::<String>("out")?
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(format!("runs/{}", command))),
            workers: self.get("workers")?.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Comma-separated values, or `start:stop:count` for an inclusive linear grid.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let parse = |s: &str| {
        s.trim()
            .parse::<T>()
            .map_err(|e| anyhow!("'{}': {e}", s.trim()))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|e| anyhow!("{e}"))?;
        let b: f64 = parts[1].trim().parse().map_err(|e| anyhow!("{e}"))?;
        let n: usize = parts[2].trim().parse().map_err(|e| anyhow!("{e}"))?;
        if n < 2 {
            bail!("a range needs at least 2 points");
        }
        return (0..n)
            .map(|k| parse(&format!("{}", a + (b - a) * k as f64 / (n - 1) as f64)))
            .collect();
    }
    let out: Vec<T> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse)
        .collect::<Result<_>>()?;
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.eta, self.theta, self.sites, self.magnetization)?;
        for &eta in &self.eta_grid {
            ModelParams::new(eta, self.theta, 4, 2)?;
        }
        for &theta in &self.theta_grid {
            ModelParams::new(self.eta, theta, 4, 2)?;
        }
        for &l in &self.sites_grid {
            ModelParams::new(self.eta, self.theta, l, 0)?;
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            bail!("tol = {} must lie in (0, 1)", self.tol);
        }
        if self.command == Command::Vacuum
            || (self.command == Command::Scan && self.observable == Observable::Energy)
        {
            if let Some(t) = self.theta_grid.iter().find(|&&t| t <= 0.0) {
                bail!("theta grid value {t} must be > 0 for the vacuum integral");
            }
        }
        if self.levels == 0 || self.samples == 0 {
            bail!("levels and samples must be positive");
        }
        Ok(())
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            eta: self.eta,
            theta: self.theta,
            sites: self.sites,
            magnetization: self.magnetization,
        }
    }

    /// Hex SHA-256 of the canonical JSON snapshot.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex(&Sha256::digest(&bytes))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
