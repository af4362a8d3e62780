//! Numeric CSV tables: header row, `,` separator, `\n` line ends.
//!
//! Values are written with 17 significant digits so a table read back and
//! written again is byte-identical. Empty cells stand for missing values.

use std::io::{Read, Write};

use fracdecomp::Series;

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}, column {column}: cannot parse `{text}` as a number")]
    Number { row: usize, column: usize, text: String },
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Grid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn format_value(v: f64) -> String {
    format!("{:.16e}", v)
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Builds a table from equally long columns.
    pub fn from_columns(header: &[&str], columns: &[&[f64]]) -> Result<Self, CsvError> {
        if header.len() != columns.len() {
            return Err(CsvError::Shape(format!("{} headers for {} columns", header.len(), columns.len())));
        }
        let n = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != n) {
            return Err(CsvError::Shape("columns differ in length".into()));
        }
        let mut table = Self::new(header);
        table.rows = (0..n).map(|i| columns.iter().map(|c| Some(c[i])).collect()).collect();
        Ok(table)
    }

    pub fn read(reader: impl Read) -> Result<Self, CsvError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .enumerate()
                .map(|(c, text)| {
                    if text.is_empty() {
                        return Ok(None);
                    }
                    text.parse::<f64>().map(Some).map_err(|_| CsvError::Number {
                        row: r + 2,
                        column: c + 1,
                        text: text.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn write(&self, writer: impl Write) -> Result<(), CsvError> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        wtr.write_record(&self.header)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(|v| v.map(format_value).unwrap_or_default()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<(), CsvError> {
        self.write(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    /// Column `c` with every cell present.
    pub fn column(&self, c: usize) -> Result<Vec<f64>, CsvError> {
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.get(c)
                    .copied()
                    .flatten()
                    .ok_or_else(|| CsvError::Shape(format!("row {} has no value in column {}", r + 2, c + 1)))
            })
            .collect()
    }
}

/// Reads a `t,value` table on a uniform grid starting at `t = 0`.
pub fn read_uniform_series(table: &CsvTable) -> Result<Series, CsvError> {
    if table.header.len() != 2 {
        return Err(CsvError::Shape(format!("expected 2 columns `t,value`, got {}", table.header.len())));
    }
    let t = table.column(0)?;
    let v = table.column(1)?;
    if t.len() < 2 {
        return Err(CsvError::Grid("need at least two samples to infer the grid step".into()));
    }
    if t[0] != 0.0 {
        return Err(CsvError::Grid(format!("grid must start at t = 0, got {}", t[0])));
    }
    let n = t.len() - 1;
    let h = t[n] / n as f64;
    if !(h > 0.0 && h.is_finite()) {
        return Err(CsvError::Grid("time column must increase".into()));
    }
    for (i, &ti) in t.iter().enumerate() {
        let expected = i as f64 * h;
        if (ti - expected).abs() > 1e-9 * h.max(expected) {
            return Err(CsvError::Grid(format!(
                "non-uniform grid at row {}: t = {}, expected {}",
                i + 2,
                ti,
                expected
            )));
        }
    }
    Series::new(h, v).map_err(|e| CsvError::Grid(e.to_string()))
}
