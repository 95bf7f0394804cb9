//! CSV tables with `#` metadata lines, and JSON records.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance written at the top of every output.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

pub struct Table {
    meta: Meta,
    extra: Vec<(String, String)>,
    columns: Vec<String>,
    body: String,
}

impl Table {
    pub fn new(meta: &Meta, columns: &[&str]) -> Self {
        Self {
            meta: meta.clone(),
            extra: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            body: String::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.extra.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.columns.len());
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            match c {
                Cell::F(v) => write!(self.body, "{v:e}").unwrap(),
                Cell::I(v) => write!(self.body, "{v}").unwrap(),
                Cell::B(v) => write!(self.body, "{v}").unwrap(),
            }
        }
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# microcavity {}", self.meta.version).unwrap();
        writeln!(s, "# command: {}", self.meta.command).unwrap();
        writeln!(s, "# config_sha256: {}", self.meta.config_sha256).unwrap();
        writeln!(s, "# seed: {}", self.meta.seed).unwrap();
        for (k, v) in &self.extra {
            writeln!(s, "# {k}: {v}").unwrap();
        }
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        s.push_str(&self.body);
        s
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable record");
    s.push('\n');
    s
}
