use std::io::{Read, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: expected {expected} fields, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Number { row: usize, column: String, value: String },
    #[error("missing header row")]
    NoHeader,
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
}

/// Shortest decimal that parses back to the same `f64`; plain notation for
/// moderate magnitudes, exponent notation elsewhere. `NaN`, `inf`, `-inf`
/// as Rust spells them.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Numeric table with named columns, the unit of every CSV artefact.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to(&self, w: impl Write) -> Result<(), TableError> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|x| format_number(*x)))?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    pub fn read_from(r: impl Read) -> Result<Table, TableError> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(r);
        let mut records = rd.records();
        let header = records.next().ok_or(TableError::NoHeader)??;
        let columns: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(TableError::DuplicateColumn(c.clone()));
            }
        }
        let mut rows = Vec::new();
        for (k, rec) in records.enumerate() {
            let rec = rec?;
            let row = k + 1;
            if rec.len() != columns.len() {
                return Err(TableError::Ragged { row, expected: columns.len(), found: rec.len() });
            }
            let vals = rec
                .iter()
                .zip(&columns)
                .map(|(v, c)| {
                    v.trim().parse::<f64>().map_err(|_| TableError::Number {
                        row,
                        column: c.clone(),
                        value: v.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(vals);
        }
        Ok(Table { columns, rows })
    }
}
