//! One table model rendered as aligned text, CSV or JSON with identical fields.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// A field value. Integers are exact decimal strings of any size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(String),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    pub fn int(v: impl ToString) -> Cell {
        Cell::Int(v.to_string())
    }

    pub fn text(v: impl ToString) -> Cell {
        Cell::Text(v.to_string())
    }

    pub fn opt_int<T: ToString>(v: Option<T>) -> Cell {
        v.map_or(Cell::Null, Cell::int)
    }

    /// The CSV/table rendering; JSON carries the same text as a number,
    /// boolean, string or null.
    fn as_text(&self) -> String {
        match self {
            Cell::Int(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(s) => Value::Number(s.parse::<Number>().expect("exact decimal integer")),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Table => self.render_text(out),
            Format::Csv => self.render_csv(out),
            Format::Json => self.render_json(out),
        }
    }

    fn render_text(&self, out: &mut impl Write) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::as_text).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |fields: Vec<&str>| {
            let padded: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(self.columns.clone()))?;
        for r in &cells {
            writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn render_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::as_text))?;
        }
        w.flush()
    }

    fn render_json(&self, out: &mut impl Write) -> io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.to_json())).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *out, &Value::Array(rows))?;
        writeln!(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "value", "flag", "note"]);
        t.push(vec![Cell::int(3), Cell::int("123456789012345678901234567890"), Cell::Bool(true), Cell::text("a,b")]);
        t.push(vec![Cell::int(4), Cell::Null, Cell::Bool(false), Cell::text("")]);
        t
    }

    #[test]
    fn csv_and_json_agree_field_by_field() {
        let t = sample();
        let mut csv_out = Vec::new();
        t.render(Format::Csv, &mut csv_out).unwrap();
        let mut json_out = Vec::new();
        t.render(Format::Json, &mut json_out).unwrap();
        let json: Vec<Map<String, Value>> = serde_json::from_slice(&json_out).unwrap();
        let mut rdr = csv::Reader::from_reader(csv_out.as_slice());
        let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
        for (rec, obj) in rdr.records().zip(&json) {
            let rec = rec.unwrap();
            for (h, field) in header.iter().zip(rec.iter()) {
                let v = &obj[h];
                let as_text = match v {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                };
                assert_eq!(as_text, field, "column {h}");
            }
        }
    }

    #[test]
    fn big_integers_stay_exact_in_json() {
        let mut out = Vec::new();
        sample().render(Format::Json, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.contains("123456789012345678901234567890"));
        assert!(!s.contains("e+"));
    }
}
