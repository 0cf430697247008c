//! Structured-text output documents and CSV columns.
//!
//! Floats are written with 17 significant digits so every emitted number
//! parses back to the identical `f64`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Floats(Vec<f64>),
    Pairs(Vec<(f64, f64)>),
    Strs(Vec<String>),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Str(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Str(x)
    }
}

impl From<Vec<f64>> for Value {
    fn from(x: Vec<f64>) -> Self {
        Value::Floats(x)
    }
}

impl From<Vec<(f64, f64)>> for Value {
    fn from(x: Vec<(f64, f64)>) -> Self {
        Value::Pairs(x)
    }
}

impl From<Vec<String>> for Value {
    fn from(x: Vec<String>) -> Self {
        Value::Strs(x)
    }
}

pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn render(v: &Value) -> String {
    match v {
        Value::Float(x) => float(*x),
        Value::Int(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => quote(s),
        Value::Floats(xs) => format!("[{}]", xs.iter().map(|x| float(*x)).collect::<Vec<_>>().join(", ")),
        Value::Pairs(ps) => format!(
            "[{}]",
            ps.iter()
                .map(|(a, b)| format!("[{}, {}]", float(*a), float(*b)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Value::Strs(ss) => format!("[{}]", ss.iter().map(|s| quote(s)).collect::<Vec<_>>().join(", ")),
    }
}

type Section = Vec<(String, Value)>;

/// Output document: echoed inputs, result, certification flags, warnings.
#[derive(Debug, Default)]
pub struct Document {
    command: String,
    warnings: Vec<String>,
    inputs: Section,
    result: Section,
    certification: Section,
}

impl Document {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.push((key.to_string(), v.into()));
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.result.push((key.to_string(), v.into()));
        self
    }

    pub fn cert(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.certification.push((key.to_string(), v.into()));
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }

    pub fn warn_all(&mut self, ws: &[String]) -> &mut Self {
        self.warnings.extend(ws.iter().cloned());
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command = {}", quote(&self.command)).unwrap();
        writeln!(out, "warnings = {}", render(&Value::Strs(self.warnings.clone()))).unwrap();
        for (name, sec) in [
            ("inputs", &self.inputs),
            ("result", &self.result),
            ("certification", &self.certification),
        ] {
            writeln!(out, "\n[{name}]").unwrap();
            for (k, v) in sec {
                writeln!(out, "{k} = {}", render(v)).unwrap();
            }
        }
        out
    }
}

/// Writes `header` and rows of floats as comma-separated columns.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.iter().map(|x| float(*x)).collect::<Vec<_>>().join(","))?;
    }
    w.flush()?;
    Ok(())
}
