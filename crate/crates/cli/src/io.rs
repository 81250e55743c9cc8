// SPDX-License-Identifier: MIT OR Apache-2.0

//! Input parsing, output writing and exit codes.

use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use notseg::{Error, Scenario, TimeSeries};
use serde::Serialize;

/// `Input` exits with 2, `Config` with 3.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Config(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Config(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptySeries | Error::NonFinite { .. } => CliError::Input(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn read_source(input: &str) -> Result<String, CliError> {
    let mut text = String::new();
    if input == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::Input(format!("reading stdin: {e}")))?;
    } else {
        text = fs::read_to_string(input).map_err(|e| CliError::Input(format!("reading {input}: {e}")))?;
    }
    Ok(text)
}

/// Parses one numeric column. A first line whose token is not a number is
/// taken as a header.
pub fn parse_series(text: &str) -> Result<TimeSeries, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("line {}: {e}", i + 1)))?;
        if rec.len() != 1 {
            return Err(CliError::Input(format!("line {}: expected one column, found {}", i + 1, rec.len())));
        }
        let token = &rec[0];
        match token.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(CliError::Input(format!("line {}: not a number: {token:?}", i + 1))),
        }
    }
    Ok(TimeSeries::new(values)?)
}

pub fn read_series(input: &str) -> Result<TimeSeries, CliError> {
    parse_series(&read_source(input)?)
}

/// Scenario and change-points of a saved `detect` result.
pub fn read_model(path: &Path) -> Result<(Scenario, Vec<usize>), CliError> {
    #[derive(serde::Deserialize)]
    struct Saved {
        scenario: Scenario,
        change_points: Vec<usize>,
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))?;
    let saved: Saved =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("parsing {}: {e}", path.display())))?;
    Ok((saved.scenario, saved.change_points))
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn csv_bytes<H, R>(header: &[H], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError>
where
    H: AsRef<[u8]>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let res = match path {
        Some(p) => fs::write(p, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| CliError::Config(format!("writing output: {e}")))
}
