//! Output files: every file starts with a one-line JSON header carrying the
//! resolved config, the seed and the artifact version.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub const ARTIFACT: &str = "covqm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn header(cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("artifact".into(), json!(ARTIFACT));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(cfg.command));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("config".into(), serde_json::to_value(cfg).unwrap_or(Value::Null));
    m
}

/// Collects the files a command writes, in order.
pub struct Writer<'a> {
    cfg: &'a RunConfig,
    pub written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(&cfg.out)?;
        Ok(Self { cfg, written: Vec::new() })
    }

    /// Write `body` verbatim; it must already start with a header line.
    pub fn raw(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.cfg.out.join(name);
        fs::write(&path, body)?;
        self.written.push(path);
        Ok(())
    }

    /// Header line followed by `body`.
    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let mut s = Value::Object(header(self.cfg)).to_string();
        s.push('\n');
        s.push_str(body);
        self.raw(name, &s)
    }

    /// Header line followed by pretty-printed JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }
}

/// A measured quantity with its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, measured: f64, tolerance: f64) -> Self {
        // NaN never passes
        Self { name: name.into(), measured, tolerance, pass: measured <= tolerance }
    }
}
