//! Minimal numeric CSV: a `#` comment header, one column-name row, then rows of
//! floats at full double precision. Missing values are empty fields.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push(row.iter().copied().map(Some).collect());
    }

    pub fn render(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(v) = cell {
                    write!(out, "{}", number(*v)).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column names and rows of a parsed table.
pub type Parsed = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Parses a rendered table back into column names and rows; comment lines are skipped.
pub fn parse(text: &str) -> Option<Parsed> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns = lines.next()?.split(',').map(str::to_string).collect::<Vec<_>>();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| if c.is_empty() { Ok(None) } else { c.parse().map(Some) })
                .collect::<Result<Vec<_>, _>>()
                .ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((columns, rows))
}
