//! Tabular output as CSV or JSON.

use std::io::{self, Write};

use serde_json::{Map, Value};

/// One output cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Self::Text(s.into())
    }

    pub fn num(&self) -> Option<f64> {
        match self {
            Self::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Self::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Self::Empty, Self::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Rows whose computation failed.
    pub failures: usize,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new(), failures: 0 }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, `NaN` for non-numeric cells.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let k = self.column(name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[k].num().unwrap_or(f64::NAN)).collect()
    }

    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// `{"config": …, "columns": […], "rows": [{…}, …]}`
    pub fn to_json(&self, config: Value) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    m.insert(name.clone(), json_cell(cell));
                }
                Value::Object(m)
            })
            .collect();
        let mut top = Map::new();
        top.insert("config".into(), config);
        top.insert("columns".into(), Value::from(self.columns.clone()));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }
}

/// Round-trip float text: 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // no negative zero in the text
        format!("{:.16e}", if x == 0.0 { 0.0 } else { x })
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_float(*x),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) if x.is_finite() => Value::from(*x),
        Cell::Num(_) | Cell::Empty => Value::Null,
        Cell::Text(s) => Value::from(s.as_str()),
    }
}
