//! Report model and its bit-stable CSV/JSON serialisation.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::config::Format;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        i128::try_from(v)
            .map(Cell::Int)
            .unwrap_or_else(|_| Cell::Text(v.to_string()))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

/// Rounds to 6 significant digits.
pub fn round6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Shortest decimal form of the 6-significant-digit rounding.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round6(x);
        if r == 0.0 {
            "0".into()
        } else {
            format!("{r}")
        }
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match (i64::try_from(*v), u64::try_from(*v)) {
                (Ok(i), _) => Value::from(i),
                (_, Ok(u)) => Value::from(u),
                _ => Value::String(v.to_string()),
            },
            Cell::Float(v) => float_value(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

fn float_value(v: f64) -> Value {
    serde_json::Number::from_f64(round6(v))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Rows under a fixed header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Some values are bounds because a budget or table limit was reached.
    Degraded,
}

/// Self-describing result of one run. Wall time is kept out so reports stay reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config_hash: String,
    pub task: String,
    pub status: Status,
    pub warnings: Vec<String>,
    pub table: Table,
    pub result: Value,
}

/// Rounds every float in a JSON value; object keys are kept sorted by `serde_json::Map`.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => float_value(n.as_f64().expect("f64")),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_json_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v)
        .map(normalize)
        .map_err(|e| Error::Invariant(format!("report serialisation failed: {e}")))
}

impl RunReport {
    pub fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        m.insert("tool_version".into(), Value::from(TOOL_VERSION));
        m.insert("config_hash".into(), Value::from(self.config_hash.clone()));
        m.insert("task".into(), Value::from(self.task.clone()));
        m.insert(
            "status".into(),
            serde_json::to_value(self.status).expect("status"),
        );
        m.insert("warnings".into(), Value::from(self.warnings.clone()));
        m.insert("columns".into(), Value::from(self.table.columns.clone()));
        let rows = self
            .table
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        m.insert("rows".into(), Value::Array(rows));
        m.insert("result".into(), normalize(self.result.clone()));
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json())
                    .map_err(|e| Error::Invariant(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut out = format!(
                    "# endim report schema={SCHEMA_VERSION} tool={TOOL_VERSION} task={} status={} config={}\n",
                    self.task,
                    match self.status {
                        Status::Ok => "ok",
                        Status::Degraded => "degraded",
                    },
                    self.config_hash
                );
                for w in &self.warnings {
                    out.push_str(&format!("# warning: {w}\n"));
                }
                let mut wtr = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Io(e.to_string());
                wtr.write_record(&self.table.columns).map_err(io)?;
                for r in &self.table.rows {
                    wtr.write_record(r.iter().map(Cell::text)).map_err(io)?;
                }
                let bytes = wtr.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                out.push_str(
                    &String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))?,
                );
                Ok(out)
            }
        }
    }

    /// Writes the rendered report to `path`, or to standard output when `path` is `None`.
    pub fn emit(&self, format: Format, path: Option<&std::path::Path>) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text).map_err(Error::from),
            None => {
                use std::io::Write;
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(Error::from)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_float(std::f64::consts::LN_2), "0.693147");
        assert_eq!(fmt_float(1234567.0), "1234570");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.000123456789), "-0.000123457");
    }

    #[test]
    fn rendering_is_stable() {
        let mut t = Table::new(&["n", "x", "note"]);
        t.push(vec![
            Cell::from(3usize),
            Cell::from(1.0f64 / 3.0),
            Cell::from("a,b"),
        ]);
        t.push(vec![
            Cell::from(u128::MAX),
            Cell::Empty,
            Cell::from(Some(true)),
        ]);
        let r = RunReport {
            config_hash: "h".into(),
            task: "complexity".into(),
            status: Status::Ok,
            warnings: vec![],
            table: t,
            result: serde_json::json!({"b": 0.1 + 0.2, "a": [1.0e-10]}),
        };
        let csv = r.render(Format::Csv).unwrap();
        assert!(csv.contains("n,x,note\n3,0.333333,\"a,b\"\n"));
        assert!(csv.contains(&u128::MAX.to_string()));
        let json = r.render(Format::Json).unwrap();
        assert_eq!(json, r.render(Format::Json).unwrap());
        assert!(json.find("\"a\"").unwrap() < json.find("\"b\"").unwrap());
        assert!(json.contains("0.3,") || json.contains("0.3\n"));
    }
}
