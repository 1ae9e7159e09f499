//! Report documents: canonical JSON with sorted keys, flat CSV tables and a
//! structural schema check run before anything is written.

use std::io::Write;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};
use vc2reg::model::exact::{format_rational, parse_rational, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i128),
    Bool(bool),
    Text(String),
    Rat(Rational),
    Null,
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
impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&Rational> for Cell {
    fn from(v: &Rational) -> Self {
        Cell::Rat(v.clone())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

pub fn rational_value(r: &Rational) -> Value {
    json!({ "decimal": to_f64(r), "exact": format_rational(r) })
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(x) => json!(x),
                Err(_) => json!(v.to_string()),
            },
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Rat(r) => rational_value(r),
            Cell::Null => Value::Null,
        }
    }
}

/// A named table of rows.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Table { name: name.to_string(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> =
                        self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.to_json())).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    /// CSV with rational columns expanded to a decimal column and an
    /// `_exact` column.
    fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let rational: Vec<bool> =
            (0..self.columns.len()).map(|c| self.rows.iter().any(|r| matches!(r[c], Cell::Rat(_)))).collect();
        let mut out = csv::Writer::from_writer(w);
        let mut header = Vec::new();
        for (c, name) in self.columns.iter().enumerate() {
            header.push(name.to_string());
            if rational[c] {
                header.push(format!("{name}_exact"));
            }
        }
        out.write_record(&header)?;
        for row in &self.rows {
            let mut rec = Vec::new();
            for (c, cell) in row.iter().enumerate() {
                match cell {
                    Cell::Int(v) => rec.push(v.to_string()),
                    Cell::Bool(b) => rec.push(b.to_string()),
                    Cell::Text(s) => rec.push(s.clone()),
                    Cell::Rat(r) => {
                        rec.push(to_f64(r).to_string());
                        rec.push(format_rational(r));
                        continue;
                    }
                    Cell::Null => rec.push(String::new()),
                }
                if rational[c] {
                    rec.push(String::new());
                }
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// The document every command emits.
#[derive(Debug)]
pub struct ReportDocument {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
    pub timing: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        ReportDocument {
            command: command.to_string(),
            parameters,
            seed,
            results: Map::new(),
            tables: Vec::new(),
            warnings: Vec::new(),
            timing: None,
        }
    }

    pub fn result<T: Serialize>(&mut self, key: &str, v: &T) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(v)?);
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        let mut tables = Map::new();
        for t in &self.tables {
            tables.insert(t.name.clone(), t.to_json());
        }
        let mut doc = json!({
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "results": self.results,
            "tables": tables,
            "warnings": self.warnings,
            "version": env!("CARGO_PKG_VERSION"),
        });
        if let Some(t) = self.timing {
            doc["timing"] = json!({ "seconds": t });
        }
        doc
    }

    /// Validates, then renders in `format`.
    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        let v = self.to_value();
        validate_document(&v)?;
        match format {
            Format::Json => Ok(canonical_json(&v)),
            Format::Csv => {
                let mut buf = Vec::new();
                let mut summary = Table::new("summary", &["key", "value"]);
                summary.push(vec!["command".to_string().into(), self.command.clone().into()]);
                summary.push(vec!["seed".to_string().into(), self.seed.into()]);
                flatten("parameters", &self.parameters, &mut summary);
                flatten("results", &Value::Object(self.results.clone()), &mut summary);
                for w in &self.warnings {
                    summary.push(vec!["warning".to_string().into(), w.clone().into()]);
                }
                for (k, t) in std::iter::once(&summary).chain(&self.tables).enumerate() {
                    if k > 0 {
                        buf.push(b'\n');
                    }
                    writeln!(buf, "# {}", t.name)?;
                    t.write_csv(&mut buf)?;
                }
                Ok(buf)
            }
        }
    }
}

/// Leaves of a JSON value as `path = value` rows; rationals stay exact.
fn flatten(prefix: &str, v: &Value, out: &mut Table) {
    match v {
        Value::Object(m) if is_rational(m) => {
            let exact = m["exact"].as_str().unwrap_or_default();
            out.push(vec![prefix.to_string().into(), exact.to_string().into()]);
        }
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::Array(a) => {
            for (k, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::String(s) => out.push(vec![prefix.to_string().into(), s.clone().into()]),
        other => out.push(vec![prefix.to_string().into(), other.to_string().into()]),
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical_json(v: &Value) -> Vec<u8> {
    // `serde_json::Map` is ordered by key, so serializing a `Value` sorts keys.
    let mut out = serde_json::to_vec_pretty(v).expect("values serialize");
    out.push(b'\n');
    out
}

pub fn canonical<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    Ok(canonical_json(&serde_json::to_value(v)?))
}

fn is_rational(m: &Map<String, Value>) -> bool {
    m.len() == 2 && m.contains_key("exact") && m.contains_key("decimal")
}

/// Structural schema of a report document.
pub fn validate_document(v: &Value) -> Result<()> {
    let Some(obj) = v.as_object() else { bail!("report is not an object") };
    for (key, ok) in [
        ("command", obj.get("command").is_some_and(Value::is_string)),
        ("parameters", obj.get("parameters").is_some_and(Value::is_object)),
        ("seed", obj.get("seed").is_some_and(|s| s.is_null() || s.is_u64())),
        ("results", obj.get("results").is_some_and(Value::is_object)),
        ("tables", obj.get("tables").is_some_and(Value::is_object)),
        ("version", obj.get("version").is_some_and(Value::is_string)),
        (
            "warnings",
            obj.get("warnings").and_then(Value::as_array).is_some_and(|a| a.iter().all(Value::is_string)),
        ),
    ] {
        if !ok {
            bail!("report schema: field `{key}` missing or of the wrong type");
        }
    }
    for (name, t) in obj["tables"].as_object().expect("checked") {
        let rows = t.as_array().with_context(|| format!("report schema: table `{name}` is not an array"))?;
        if rows.iter().any(|r| !r.is_object()) {
            bail!("report schema: table `{name}` has a non-object row");
        }
    }
    check_rationals("$", v)
}

fn check_rationals(path: &str, v: &Value) -> Result<()> {
    match v {
        Value::Object(m) => {
            if m.contains_key("exact") && m.contains_key("decimal") {
                let exact = m["exact"].as_str();
                let decimal_ok = m["decimal"].is_number() || m["decimal"].is_null();
                match exact {
                    Some(e) if decimal_ok && parse_rational(e).is_ok() => {}
                    _ => bail!("report schema: malformed rational at {path}"),
                }
            }
            for (k, x) in m {
                check_rationals(&format!("{path}.{k}"), x)?;
            }
        }
        Value::Array(a) => {
            for (k, x) in a.iter().enumerate() {
                check_rationals(&format!("{path}[{k}]"), x)?;
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use vc2reg::model::exact::ratio;

    #[test]
    fn keys_are_sorted_and_schema_holds() {
        let mut d = ReportDocument::new("x", json!({"b": 1, "a": 2}), Some(3));
        d.result("r", &json!({"z": 1, "y": rational_value(&ratio(1, 3))})).unwrap();
        let text = String::from_utf8(d.render(Format::Json).unwrap()).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"y\"").unwrap() < text.find("\"z\"").unwrap());
        let mut bad = d.to_value();
        bad["results"]["r"]["y"]["exact"] = json!("1/x");
        assert!(validate_document(&bad).is_err());
    }

    #[test]
    fn csv_expands_rationals() {
        let mut t = Table::new("t", &["a", "r"]);
        t.push(vec![1usize.into(), (&ratio(1, 4)).into()]);
        t.push(vec![2usize.into(), Cell::Null]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,r,r_exact\n1,0.25,1/4\n2,,\n");
    }
}
