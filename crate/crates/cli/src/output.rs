use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
    JsonLines,
}

/// Integers too wide for a JSON number are written as strings.
pub fn wide(v: u128) -> Value {
    u64::try_from(v).map_or_else(|_| Value::String(v.to_string()), Value::from)
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let sep = if items.iter().any(Value::is_array) { " / " } else { " " };
            items.iter().map(plain).collect::<Vec<_>>().join(sep)
        }
        other => other.to_string(),
    }
}

/// Writes records in the selected format. Records are JSON objects whose
/// key order is kept.
pub struct Emitter {
    format: Format,
    header: Option<Vec<String>>,
    blocks: usize,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format, header: None, blocks: 0 }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    /// A standalone result: `key: value` lines in text mode.
    pub fn record(&mut self, v: Value) -> io::Result<()> {
        if self.format != Format::Text {
            return self.row(v);
        }
        let mut out = io::stdout().lock();
        if self.blocks > 0 {
            writeln!(out)?;
        }
        self.blocks += 1;
        self.header = None;
        if let Value::Object(map) = &v {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, val) in map {
                writeln!(out, "{k:<width$}  {}", plain(val))?;
            }
        }
        Ok(())
    }

    /// One row of a table: a header line whenever the columns change.
    pub fn row(&mut self, v: Value) -> io::Result<()> {
        let mut out = io::stdout().lock();
        let Value::Object(map) = &v else {
            return writeln!(out, "{}", plain(&v));
        };
        if self.format == Format::JsonLines {
            return writeln!(out, "{v}");
        }
        let keys: Vec<String> = map.keys().cloned().collect();
        let sep = if self.format == Format::Tsv { "\t" } else { "  " };
        if self.header.as_ref() != Some(&keys) {
            if self.blocks > 0 && self.format == Format::Text {
                writeln!(out)?;
            }
            self.blocks += 1;
            writeln!(out, "{}", keys.join(sep))?;
            self.header = Some(keys);
        }
        let cells: Vec<String> = map.values().map(plain).collect();
        writeln!(out, "{}", cells.join(sep))
    }
}
