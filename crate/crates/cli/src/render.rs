//! Output rendering: every command answers with a header (command name plus
//! the semantic flags it ran with) and a payload object, serialized as a
//! single JSON line, key/value CSV, or aligned text. Multi-line outputs
//! (scan, classify) bypass this and render their own streams.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use permbin::{Error, Result};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A single-object command result.
pub struct Report {
    pub command: &'static str,
    pub flags: BTreeMap<String, String>,
    pub payload: Value,
}

impl Report {
    pub fn new(command: &'static str, flags: BTreeMap<String, String>, payload: Value) -> Self {
        Report { command, flags, payload }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        let payload = match &self.payload {
            Value::Object(map) => map.clone(),
            other => {
                return Err(Error::Internal(format!("non-object payload: {other}")));
            }
        };
        let out = match format {
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("command".into(), Value::String(self.command.into()));
                let flags: Map<String, Value> = self
                    .flags
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect();
                obj.insert("flags".into(), Value::Object(flags));
                for (k, v) in payload {
                    obj.insert(k, v);
                }
                format!("{}\n", Value::Object(obj))
            }
            Format::Csv => {
                let mut s = String::from("key,value\n");
                s.push_str(&csv_row("command", self.command));
                for (k, v) in &self.flags {
                    s.push_str(&csv_row(&format!("flag.{k}"), v));
                }
                for (k, v) in &payload {
                    s.push_str(&csv_row(k, &plain(v)));
                }
                s
            }
            Format::Text => {
                let mut s = format!("command: {}\n", self.command);
                let flags: Vec<String> =
                    self.flags.iter().map(|(k, v)| format!("{k}={v}")).collect();
                s.push_str(&format!("flags: {}\n", flags.join(" ")));
                for (k, v) in &payload {
                    s.push_str(&format!("{k}: {}\n", plain(v)));
                }
                s
            }
        };
        Ok(out.into_bytes())
    }
}

/// Flat rendering of a JSON value: scalars bare, scalar arrays space-joined,
/// anything nested as compact JSON.
pub fn plain(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            items.iter().map(plain).collect::<Vec<_>>().join(" ")
        }
        nested => nested.to_string(),
    }
}

pub fn csv_row(k: &str, v: &str) -> String {
    format!("{},{}\n", csv_cell(k), csv_cell(v))
}

pub fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the rendered bytes to --out or stdout.
pub fn emit(out: Option<&Path>, rendered: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, rendered).map_err(Error::from),
        // A reader hanging up mid-stream is not an error for the producer.
        None => match io::stdout().write_all(rendered) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::from(e)),
            _ => Ok(()),
        },
    }
}
