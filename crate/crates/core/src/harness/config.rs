//! Sweep configuration and its flat `key = value` text form.
//!
//! ```text
//! # two copies of the GHZ state at two values of alpha
//! state = ghz
//! n = 1, 2
//! alpha = 1.5, 2
//! delta = 0.1
//! samples = 3
//! seed = 42
//! format = csv
//! ```
//!
//! `state` is a builtin name (`ghz`, `max-entangled-AR`, `product`), `random`
//! (with optional `rank` and `state_seed`), or `file:PATH`. Sizes are automatic
//! unless `size_mode = explicit`, which requires `log2_F` and optionally takes
//! `log2_M`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::ExpBase;
use crate::error::{Error, Result};
use crate::protocol::{DEFAULT_DELTA, DEFAULT_U_CANDIDATES};
use crate::states::Builtin;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSource {
    Builtin(Builtin),
    /// Random qubit `ρ^{ABR}` of the given rank. Without a seed, each record
    /// draws its own state from its derived seed.
    Random { rank: usize, seed: Option<u64> },
    File(PathBuf),
}

impl fmt::Display for StateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSource::Builtin(b) => write!(f, "{}", b.name()),
            StateSource::Random { rank, seed: Some(s) } => write!(f, "random(rank={rank},seed={s})"),
            StateSource::Random { rank, seed: None } => write!(f, "random(rank={rank})"),
            StateSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMode {
    Auto,
    Explicit { log2_f: f64, log2_m: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter(format!("unknown output format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub state: StateSource,
    pub n_list: Vec<usize>,
    pub alpha_list: Vec<f64>,
    pub delta: f64,
    pub sizes: SizeMode,
    pub num_u_candidates: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Fill `duration_ms`; off by default so output files are reproducible.
    pub timing: bool,
    pub base: ExpBase,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            state: StateSource::Builtin(Builtin::Ghz),
            n_list: vec![1],
            alpha_list: vec![2.0],
            delta: DEFAULT_DELTA,
            sizes: SizeMode::Auto,
            num_u_candidates: DEFAULT_U_CANDIDATES,
            samples: 1,
            master_seed: 0,
            output: None,
            format: OutputFormat::Csv,
            timing: false,
            base: ExpBase::Two,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.alpha_list.is_empty() {
            return Err(Error::InvalidParameter("n and alpha lists must be non-empty".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        if self.num_u_candidates == 0 {
            return Err(Error::InvalidParameter("num_U_candidates must be positive".into()));
        }
        if let StateSource::Random { rank, .. } = self.state {
            if rank == 0 || rank > 8 {
                return Err(Error::InvalidParameter(format!("random state rank {rank} outside 1..=8")));
            }
        }
        Ok(())
    }

    /// Parse the flat text form; missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        let mut state: Option<(usize, String)> = None;
        let mut rank = 8usize;
        let mut state_seed = None;
        let mut mode: Option<String> = None;
        let (mut log2_f, mut log2_m) = (None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "state" => state = Some((line_no, value.to_string())),
                "rank" => rank = parse_value(value).map_err(err)?,
                "state_seed" => state_seed = Some(parse_value(value).map_err(err)?),
                "n" => cfg.n_list = parse_list(value).map_err(err)?,
                "alpha" => cfg.alpha_list = parse_list(value).map_err(err)?,
                "delta" => cfg.delta = parse_value(value).map_err(err)?,
                "size_mode" => mode = Some(value.to_string()),
                "log2_F" => log2_f = Some(parse_value(value).map_err(err)?),
                "log2_M" => log2_m = Some(parse_value(value).map_err(err)?),
                "num_U_candidates" => cfg.num_u_candidates = parse_value(value).map_err(err)?,
                "samples" => cfg.samples = parse_value(value).map_err(err)?,
                "seed" => cfg.master_seed = parse_value(value).map_err(err)?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                "format" => cfg.format = value.parse().map_err(|e: Error| err(e.to_string()))?,
                "timing" => cfg.timing = parse_value(value).map_err(err)?,
                "base" => {
                    cfg.base = ExpBase::parse(value).ok_or_else(|| err(format!("unknown base `{value}`")))?
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if let Some((line, name)) = state {
            cfg.state = parse_state_source(&name, rank, state_seed).map_err(|message| Error::Parse { line, message })?;
        } else if state_seed.is_some() {
            cfg.state = StateSource::Random { rank, seed: state_seed };
        }
        cfg.sizes = match (mode.as_deref(), log2_f) {
            (None | Some("auto"), None) if log2_m.is_none() => SizeMode::Auto,
            (None | Some("explicit"), Some(f)) => SizeMode::Explicit { log2_f: f, log2_m },
            (Some("auto"), _) => {
                return Err(Error::InvalidParameter("size_mode = auto does not take log2_F / log2_M".into()))
            }
            (Some("explicit") | None, None) => {
                return Err(Error::InvalidParameter("explicit sizes need log2_F".into()))
            }
            (Some(other), _) => return Err(Error::InvalidParameter(format!("unknown size_mode `{other}`"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<SweepConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = SweepConfig::parse(&text)?;
        // relative state paths are resolved against the config file
        if let StateSource::File(p) = &cfg.state {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.state = StateSource::File(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }
}

pub fn parse_state_source(name: &str, rank: usize, seed: Option<u64>) -> std::result::Result<StateSource, String> {
    if let Some(path) = name.strip_prefix("file:") {
        return Ok(StateSource::File(PathBuf::from(path.trim())));
    }
    if name == "random" {
        return Ok(StateSource::Random { rank, seed });
    }
    Builtin::parse(name)
        .map(StateSource::Builtin)
        .ok_or_else(|| format!("unknown state `{name}`"))
}

fn parse_value<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse `{s}`"))
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|x| parse_value(x.trim())).collect()
}
