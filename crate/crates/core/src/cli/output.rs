//! Output records and their text, CSV and JSON renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Number(f64),
    Text(String),
}

impl Cell {
    /// A numeric cell; non-finite values are stored as text so that JSON
    /// output stays parseable.
    pub fn num(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Number(x)
        } else {
            Cell::Text(x.to_string())
        }
    }

    pub fn int(x: usize) -> Cell {
        Cell::Int(x as i64)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(x) => Some(*x as f64),
            Cell::Number(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self, precision: usize) -> String {
        match self {
            Cell::Number(x) => {
                let s = format!("{x:.precision$}");
                // Avoid printing "-0.0000".
                if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
                    s[1..].to_string()
                } else {
                    s
                }
            }
            Cell::Int(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Everything a command prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tables: Vec<Table>,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        OutputRecord {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed: None,
            tables: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn table(&self, title: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.title == title)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("record serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(precision),
            Format::Text => self.render_text(precision),
        }
    }

    fn render_csv(&self, precision: usize) -> String {
        let mut out = String::new();
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(|c| c.render(precision)))
                    .expect("in-memory write");
            }
            let bytes = w.into_inner().expect("in-memory flush");
            out.push_str(&String::from_utf8(bytes).expect("utf-8 cells"));
        }
        out
    }

    fn render_text(&self, precision: usize) -> String {
        let mut out = format!("command: {}\n", self.command);
        if !self.parameters.is_empty() {
            let params: Vec<String> = self
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            out.push_str(&format!("parameters: {}\n", params.join(" ")));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for table in &self.tables {
            out.push('\n');
            out.push_str(&table.title);
            out.push('\n');
            let cells: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| r.iter().map(|c| c.render(precision)).collect())
                .collect();
            let widths: Vec<usize> = (0..table.columns.len())
                .map(|j| {
                    cells
                        .iter()
                        .map(|r| r[j].len())
                        .chain(std::iter::once(table.columns[j].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |values: Vec<(String, bool)>| {
                let parts: Vec<String> = values
                    .into_iter()
                    .zip(&widths)
                    .map(|((v, right), &w)| {
                        if right {
                            format!("{v:>w$}")
                        } else {
                            format!("{v:<w$}")
                        }
                    })
                    .collect();
                format!("{}\n", parts.join("  ").trim_end())
            };
            let numeric: Vec<bool> = (0..table.columns.len())
                .map(|j| {
                    !table.rows.is_empty()
                        && table.rows.iter().all(|r| !matches!(r[j], Cell::Text(_)))
                })
                .collect();
            out.push_str(&line(
                table
                    .columns
                    .iter()
                    .cloned()
                    .zip(numeric.iter().copied())
                    .collect(),
            ));
            for row in cells {
                out.push_str(&line(row.into_iter().zip(numeric.iter().copied()).collect()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new("predict pgg");
        r.param("n", 40);
        r.seed = Some(9);
        let mut t = Table::new("prediction", &["structure", "value"]);
        t.push(vec![Cell::text("selfish"), Cell::num(1.0 / 3.0)]);
        t.push(vec![Cell::text("fully_cooperative"), Cell::num(-0.0)]);
        r.tables.push(t);
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back = OutputRecord::from_json(&r.render(Format::Json, 4)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_and_csv() {
        let r = sample();
        let text = r.render(Format::Text, 4);
        assert!(text.contains("seed: 9"));
        let rows: Vec<Vec<&str>> = text
            .lines()
            .skip_while(|l| *l != "prediction")
            .skip(2)
            .map(|l| l.split_whitespace().collect())
            .collect();
        assert_eq!(rows, vec![vec!["selfish", "0.3333"], vec!["fully_cooperative", "0.0000"]]);
        let widths: Vec<usize> = text.lines().rev().take(2).map(str::len).collect();
        assert_eq!(widths[0], widths[1]);
        let csv = r.render(Format::Csv, 2);
        assert_eq!(csv, "# seed: 9\nstructure,value\nselfish,0.33\nfully_cooperative,0.00\n");
    }

    #[test]
    fn non_finite_cells_are_text() {
        assert_eq!(Cell::num(f64::INFINITY), Cell::text("inf"));
    }
}
