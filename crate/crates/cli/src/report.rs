//! Reports and their renderings.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub tolerances: Map<String, Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub provenance: Provenance,
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(CliError::internal)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.csv(),
            Format::Text => Ok(self.text()),
        }
    }

    /// Results flattened to `key,value` rows, followed by provenance.
    fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).map_err(CliError::internal)?;
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        flatten("provenance", &serde_json::to_value(&self.provenance).map_err(CliError::internal)?, &mut rows);
        for (k, v) in rows {
            w.write_record([k, v]).map_err(CliError::internal)?;
        }
        String::from_utf8(w.into_inner().map_err(CliError::internal)?).map_err(CliError::internal)
    }

    fn text(&self) -> String {
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = format!("qalloc {} (v{}, seed {})\n", self.command, self.provenance.version, self.provenance.seed);
        for (k, v) in rows {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        out.push_str(&format!("  wall time {:.3} s\n", self.wall_time_seconds));
        out
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = a.iter().map(scalar).collect();
            rows.push((prefix.to_string(), joined.join(" ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(CliError::internal)
        }
    }
}
