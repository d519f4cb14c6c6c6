//! Table emission for the command-line surface: CSV with `# key=value`
//! metadata comment lines, or JSON with the same metadata under `meta`.
//! Floats are printed with 17 significant digits so a round trip through
//! text is exact in binary64.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

/// A column-oriented table with ordered metadata.
#[derive(Debug, Clone, Default)]
pub struct TableDoc {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl TableDoc {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

/// 17 significant digits: enough for an exact binary64 round trip.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Float(x) => fmt_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Float(x) => {
            if x.is_nan() {
                Value::String("nan".to_string())
            } else {
                json!(x)
            }
        }
        Cell::Int(i) => json!(i),
        Cell::Text(s) => json!(s),
    }
}

pub fn to_csv(table: &TableDoc) -> String {
    let mut out = String::new();
    for (k, v) in &table.meta {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(cell_text).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(table: &TableDoc) -> String {
    let mut meta = Map::new();
    for (k, v) in &table.meta {
        meta.insert(k.clone(), Value::String(v.clone()));
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| Value::Array(row.iter().map(cell_json).collect()))
        .collect();
    let doc = json!({
        "meta": Value::Object(meta),
        "columns": table.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("tables are always serializable");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn render(table: &TableDoc, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Json => to_json(table),
    }
}
