//! Tabular outputs with a metadata header, written as CSV or JSON and read
//! back from either.
//!
//! CSV files start with one `# eml-meta: {json}` line, then a header row and
//! data rows. JSON files hold `{"meta": {...}, "columns": [...], "rows":
//! [[...], ...]}`. Floats are written in shortest round-trip form, so
//! reading a file reproduces the values exactly.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

pub const META_PREFIX: &str = "# eml-meta: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format `{other}` (expected csv or json)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    /// An undefined value, written as an empty CSV field or JSON null.
    Missing,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Missing => Ok(()),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

/// One output artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub meta: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(meta: Value, columns: &[&str]) -> Self {
        Document {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut out = Vec::new();
                writeln!(out, "{META_PREFIX}{}", serde_json::to_string(&self.meta)?)?;
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| c.to_string()))?;
                }
                w.flush()?;
                drop(w);
                Ok(String::from_utf8(out)?)
            }
            Format::Json => {
                let rows: Vec<Vec<Value>> = self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect()).collect();
                let doc = json!({ "meta": self.meta, "columns": self.columns, "rows": rows });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }

    /// Writes to `path`, or to standard output when `None`.
    pub fn write(&self, path: Option<&Path>, format: Format) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// A document read back from disk, with every cell as text.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub meta: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Parsed {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Accepts either output format; CSV without a metadata line is fine.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Self::parse_json(text);
        }
        let mut meta = Value::Null;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix(META_PREFIX) {
                meta = serde_json::from_str(rest).context("bad metadata line")?;
                break;
            }
            if !line.starts_with('#') {
                break;
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns = reader.headers()?.iter().map(str::to_string).collect();
        let rows = reader
            .records()
            .map(|r| Ok(r?.iter().map(str::to_string).collect()))
            .collect::<Result<_>>()?;
        Ok(Parsed { meta, columns, rows })
    }

    fn parse_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        let columns: Vec<String> = serde_json::from_value(doc["columns"].clone()).context("missing `columns`")?;
        let raw: Vec<Vec<Value>> = serde_json::from_value(doc["rows"].clone()).context("missing `rows`")?;
        let rows = raw
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|v| match v {
                        Value::Null => String::new(),
                        Value::String(s) => s,
                        other => other.to_string(),
                    })
                    .collect()
            })
            .collect();
        Ok(Parsed {
            meta: doc["meta"].clone(),
            columns,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column; empty cells become `None`.
    pub fn floats(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.column(name).with_context(|| format!("no `{name}` column"))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let cell = row.get(i).map(String::as_str).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse()
                        .map(Some)
                        .with_context(|| format!("row {}: `{cell}` is not a number", r + 1))
                }
            })
            .collect()
    }

    pub fn texts(&self, name: &str) -> Result<Vec<String>> {
        let i = self.column(name).with_context(|| format!("no `{name}` column"))?;
        Ok(self.rows.iter().map(|row| row.get(i).cloned().unwrap_or_default()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut d = Document::new(json!({"command": "test"}), &["rank", "node_label", "score"]);
        d.push(vec![1usize.into(), "a".into(), 0.1f64.into()]);
        d.push(vec![2usize.into(), "b".into(), (1.0 / 3.0f64).into()]);
        d.push(vec![3usize.into(), "c".into(), Cell::Missing]);
        d
    }

    #[test]
    fn csv_round_trip() {
        let text = sample().render(Format::Csv).unwrap();
        assert!(text.starts_with("# eml-meta: {\"command\":\"test\"}\nrank,node_label,score\n1,a,0.1\n"));
        let p = Parsed::parse(&text).unwrap();
        assert_eq!(p.meta["command"], "test");
        assert_eq!(p.floats("score").unwrap(), vec![Some(0.1), Some(1.0 / 3.0), None]);
        assert_eq!(p.texts("node_label").unwrap(), vec!["a", "b", "c"]);
    }

    #[test]
    fn json_round_trip() {
        let text = sample().render(Format::Json).unwrap();
        let p = Parsed::parse(&text).unwrap();
        assert_eq!(p.columns, vec!["rank", "node_label", "score"]);
        assert_eq!(p.floats("score").unwrap(), vec![Some(0.1), Some(1.0 / 3.0), None]);
        assert_eq!(p.floats("rank").unwrap()[2], Some(3.0));
    }

    #[test]
    fn plain_csv_without_meta() {
        let p = Parsed::parse("node_label,mean_influence\nx,2.5\n").unwrap();
        assert_eq!(p.meta, Value::Null);
        assert_eq!(p.floats("mean_influence").unwrap(), vec![Some(2.5)]);
        assert!(p.floats("score").is_err());
    }
}
