//! Output files, their metadata headers, and exit codes.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use ismquant::table::Table;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const TOOL: &str = concat!("ismquant ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 3,
        }
    }

    pub fn from_passed(passed: bool) -> Status {
        if passed {
            Status::Ok
        } else {
            Status::CheckFailed
        }
    }
}

/// Failures writing output exit with 1; everything else is a rejected input.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
        if let Some(ismquant::Error::Io(_)) = cause.downcast_ref::<ismquant::Error>() {
            return 1;
        }
    }
    2
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Where results go: files under `--out`, or stdout when no directory is given.
pub struct Sink {
    dir: Option<PathBuf>,
    meta: Vec<(&'static str, Value)>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, config_sha256: String, seed: u64) -> Result<Sink> {
        if let Some(dir) = &dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let meta = vec![
            ("tool", Value::from(TOOL)),
            ("config_sha256", Value::from(config_sha256)),
            ("seed", Value::from(seed)),
        ];
        Ok(Sink { dir, meta })
    }

    fn emit(&self, name: &str, bytes: &[u8]) -> Result<()> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
            }
            None => std::io::stdout().lock().write_all(bytes).context("writing to stdout"),
        }
    }

    /// `extra` is appended to the common header, typically resolution certificates.
    pub fn table(&self, name: &str, table: &Table, extra: &[(&str, String)]) -> Result<()> {
        let mut meta: Vec<(String, String)> = self
            .meta
            .iter()
            .map(|(k, v)| (k.to_string(), v.as_str().map_or_else(|| v.to_string(), str::to_string)))
            .collect();
        meta.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        let text = table.to_csv_string(&meta)?;
        self.emit(name, text.as_bytes())
    }

    /// Writes `body` with a leading `meta` object holding the header fields.
    pub fn json(&self, name: &str, body: Value, extra: &[(&str, Value)]) -> Result<()> {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.to_string(), v.clone());
        }
        for (k, v) in extra {
            meta.insert(k.to_string(), v.clone());
        }
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        match body {
            Value::Object(fields) => doc.extend(fields),
            other => {
                doc.insert("result".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
        text.push('\n');
        self.emit(name, text.as_bytes())
    }

    pub fn text(&self, name: &str, text: &str) -> Result<()> {
        self.emit(name, text.as_bytes())
    }
}
