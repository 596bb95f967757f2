//! Space file formats.
//!
//! * JSON: `{"n": 3, "d": [d12, d13, d23]}` with the upper-triangular
//!   coordinates in lexicographic pair order.
//! * CSV: the full symmetric matrix with a zero diagonal, one row per line,
//!   no header.
//!
//! Both readers validate every invariant, including the triangle inequality.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metric_core::{DistanceVector, FiniteMetricSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFormat {
    Json,
    Csv,
}

impl SpaceFormat {
    /// `.csv` selects CSV, anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SpaceFormat::Csv,
            _ => SpaceFormat::Json,
        }
    }
}

pub fn parse_space_json(text: &str) -> Result<FiniteMetricSpace> {
    let dvec: DistanceVector = serde_json::from_str(text)?;
    FiniteMetricSpace::from_dvec(&dvec)
}

pub fn parse_space_csv(text: &str) -> Result<FiniteMetricSpace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| {
                    Error::InvalidSpace(format!("row {line}: cannot parse {cell:?} as a number"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    FiniteMetricSpace::from_matrix(&rows)
}

/// Parses either format, sniffing JSON by a leading `{`.
pub fn parse_space(text: &str) -> Result<FiniteMetricSpace> {
    if text.trim_start().starts_with('{') {
        parse_space_json(text)
    } else {
        parse_space_csv(text)
    }
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    let text = std::fs::read_to_string(path)?;
    match SpaceFormat::from_path(path) {
        SpaceFormat::Csv => parse_space_csv(&text),
        SpaceFormat::Json => parse_space(&text),
    }
}

pub fn space_to_json(space: &FiniteMetricSpace) -> Result<String> {
    Ok(serde_json::to_string(&space.to_dvec())?)
}

pub fn space_to_csv(space: &FiniteMetricSpace) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in space.rows() {
        writer.write_record(row.iter().map(|v| v.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_space(space: &FiniteMetricSpace, path: &Path) -> Result<()> {
    let text = match SpaceFormat::from_path(path) {
        SpaceFormat::Csv => space_to_csv(space)?,
        SpaceFormat::Json => space_to_json(space)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}
