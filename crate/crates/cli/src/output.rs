//! Structured command results and their serialisation.

use std::path::Path;

use npk_core::numfmt::sig9;
use npk_core::Sym2;
use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliError;

pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => sig9(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Table { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // writing to a Vec cannot fail
        w.write_record(&self.header).expect("csv header");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
    }
}

/// Result of one subcommand.
pub struct Output {
    pub command: &'static str,
    pub summary: Value,
    pub tables: Vec<Table>,
    /// Extra text artifacts (file name, content).
    pub files: Vec<(String, String)>,
}

/// Rounds every float in a JSON value to 9 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            sig9(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn sym(a: &Sym2) -> Value {
    json!([a.xx, a.xy, a.yy])
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

impl Output {
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&round_json(self.summary.clone())).expect("json");
        s.push('\n');
        s
    }

    /// Prints to stdout, or writes `<command>.json`, one CSV per table and
    /// the extra files into `out`.
    pub fn emit(&self, out: Option<&Path>, format: Format) -> Result<(), CliError> {
        match out {
            None => {
                match format {
                    Format::Json => print!("{}", self.json_text()),
                    Format::Csv => match self.tables.first() {
                        Some(t) => print!("{}", t.to_csv()),
                        None => return Err(CliError::Config(format!("field `format`: `{}` has no CSV output", self.command))),
                    },
                }
                Ok(())
            }
            Some(dir) => {
                std::fs::create_dir_all(dir)
                    .map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
                let mut written = Vec::new();
                let p = dir.join(format!("{}.json", self.command));
                write(&p, &self.json_text())?;
                written.push(p);
                for t in &self.tables {
                    let p = dir.join(format!("{}.csv", t.name));
                    write(&p, &t.to_csv())?;
                    written.push(p);
                }
                for (name, content) in &self.files {
                    let p = dir.join(name);
                    write(&p, content)?;
                    written.push(p);
                }
                for p in written {
                    println!("{}", p.display());
                }
                Ok(())
            }
        }
    }
}
