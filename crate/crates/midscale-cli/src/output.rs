use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One cell of a result row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Json(Value),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.16e}", x)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Json(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Json(v) => v.clone(),
            Cell::Empty => Value::Null,
        }
    }

    pub fn json_of<T: Serialize>(v: &T) -> Cell {
        Cell::Json(serde_json::to_value(v).expect("serializable record"))
    }
}

enum Sink<'a> {
    Csv(Box<csv::Writer<&'a mut dyn Write>>),
    Json(&'a mut dyn Write),
}

/// Streams rows with a fixed column list: CSV with a header row, or one
/// JSON object per line.
pub struct RowWriter<'a> {
    columns: Vec<&'static str>,
    sink: Sink<'a>,
}

impl<'a> RowWriter<'a> {
    pub fn new(columns: &[&'static str], format: Format, out: &'a mut dyn Write) -> Result<Self, CliError> {
        let sink = match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
                w.write_record(columns)?;
                Sink::Csv(Box::new(w))
            }
            Format::Json => Sink::Json(out),
        };
        Ok(Self { columns: columns.to_vec(), sink })
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> Result<(), CliError> {
        assert_eq!(cells.len(), self.columns.len(), "row width does not match schema");
        match &mut self.sink {
            Sink::Csv(w) => {
                w.write_record(cells.iter().map(Cell::csv))?;
                w.flush()?;
            }
            Sink::Json(w) => {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(&cells).map(|(c, v)| (c.to_string(), v.json())).collect();
                writeln!(w, "{}", Value::Object(obj))?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(), CliError> {
        match self.sink {
            Sink::Csv(mut w) => w.flush()?,
            Sink::Json(w) => w.flush()?,
        }
        Ok(())
    }
}
