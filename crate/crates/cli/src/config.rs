//! Run configuration: a key=value or JSON file, flag overrides on top, and
//! per-command grid defaults for anything left unset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Environment variable that overrides the output directory unless `--out` is given.
pub const OUT_ENV: &str = "COVQM_OUT";
pub const DEFAULT_OUT: &str = "covqm-out";

/// Settings read from a config file or flags; every field optional.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub grid_dim: Option<usize>,
    #[serde(rename = "box")]
    pub box_length: Option<f64>,
    pub kappa: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl Overrides {
    /// `other` wins wherever it sets a value.
    pub fn merged(mut self, other: Overrides) -> Overrides {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(grid_n, grid_dim, box_length, kappa, c, d, lambda, seed, out);
        self.tolerances.extend(other.tolerances);
        self
    }
}

/// Parse a config file. JSON when the first non-blank character is `{`,
/// otherwise `key = value` lines with `#` comments and `tol.NAME = value`
/// entries for tolerances.
pub fn parse_config(text: &str) -> Result<Overrides, CliError> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| CliError::Config(format!("config JSON: {e}")));
    }
    let mut map = Map::new();
    let mut tols = Map::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        let val = val.trim();
        if let Some(name) = key.strip_prefix("tol.") {
            let v: f64 = val
                .parse()
                .map_err(|_| CliError::Config(format!("config line {}: bad tolerance `{val}`", lineno + 1)))?;
            tols.insert(name.to_string(), Value::from(v));
            continue;
        }
        let v = if key == "out" {
            Value::from(val)
        } else if let Ok(i) = val.parse::<u64>() {
            Value::from(i)
        } else if let Ok(x) = val.parse::<f64>() {
            Value::from(x)
        } else {
            return Err(CliError::Config(format!("config line {}: `{val}` is not a number", lineno + 1)));
        };
        map.insert(key, v);
    }
    if !tols.is_empty() {
        map.insert("tolerances".into(), Value::Object(tols));
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(format!("config: {e}")))
}

pub fn load_config(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// `KEY=VAL` from `--tol-override`.
pub fn parse_tolerance(arg: &str) -> Result<(String, f64), CliError> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("tolerance override `{arg}` is not KEY=VAL")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("tolerance override `{arg}` has a non-numeric value")))?;
    Ok((k.trim().to_string(), v))
}

/// Fully resolved configuration, recorded in every output header.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub grid_n: usize,
    pub grid_dim: usize,
    #[serde(rename = "box")]
    pub box_length: f64,
    pub kappa: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: f64,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    /// Not part of the header so that reruns into other directories match.
    #[serde(skip)]
    pub out: PathBuf,
}

/// Grid used by a command when the flags leave it open: `(dim, N, L)`.
pub fn default_grid(command: &str) -> (usize, usize, f64) {
    match command {
        "vn-check" => (1, 128, 32.0),
        "circle-spectrum" => (1, 64, 2.0 * std::f64::consts::PI),
        "cocycle-table" => (2, 128, 32.0),
        "spin-demo" => (3, 32, 8.0),
        _ => (1, 512, 64.0),
    }
}

impl RunConfig {
    /// Apply defaults and validate. `known_tolerances` holds the command's
    /// tolerance keys with their default values.
    pub fn resolve(
        command: &str,
        o: Overrides,
        env_out: Option<PathBuf>,
        flag_out: Option<PathBuf>,
        known_tolerances: &[(&str, f64)],
    ) -> Result<Self, CliError> {
        let (dim, n, l) = default_grid(command);
        let mut tolerances: BTreeMap<String, f64> =
            known_tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in &o.tolerances {
            if !tolerances.contains_key(k) {
                let names: Vec<&str> = known_tolerances.iter().map(|(k, _)| *k).collect();
                return Err(CliError::Config(format!(
                    "unknown tolerance `{k}` for {command}; known: {}",
                    names.join(", ")
                )));
            }
            if !(*v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!("tolerance `{k}` must be positive, got {v}")));
            }
            tolerances.insert(k.clone(), *v);
        }
        let out = flag_out.or(env_out).or(o.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let cfg = RunConfig {
            command: command.to_string(),
            grid_n: o.grid_n.unwrap_or(n),
            grid_dim: o.grid_dim.unwrap_or(dim),
            box_length: o.box_length.unwrap_or(l),
            kappa: o.kappa.unwrap_or(1.0),
            c: o.c.unwrap_or(1.0),
            d: o.d.unwrap_or(0.0),
            lambda: o.lambda.unwrap_or(1.0),
            seed: o.seed.unwrap_or(0),
            tolerances,
            out,
        };
        if !(1..=3).contains(&cfg.grid_dim) {
            return Err(CliError::Config(format!("grid dimension must be 1, 2 or 3, got {}", cfg.grid_dim)));
        }
        for (name, v) in [("box", cfg.box_length), ("c", cfg.c), ("lambda", cfg.lambda)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if cfg.kappa == 0.0 || !cfg.kappa.is_finite() || !cfg.d.is_finite() {
            return Err(CliError::Config("kappa must be finite and nonzero, d finite".into()));
        }
        Ok(cfg)
    }

    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }
}
