//! File formats for spaces, torus functions and point maps.
//!
//! * spaces: JSON `{"labels": [...], "matrix": [[...], ...]}` or CSV with a header row of
//!   labels followed by one row of distances per point;
//! * functions: JSON `{"n": .., "m": .., "values": [...]}`;
//! * maps: JSON `{"source": <space>, "target": <space>, "assignment": [...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cotype::{CotypeError, TorusFunction};
use crate::metric::{FiniteMetricSpace, MetricError, DEFAULT_TOLERANCE};
use crate::transfer::{PointMap, TransferError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Cotype(#[from] CotypeError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
}

impl IoError {
    /// Metric violations behind this error, if any.
    pub fn violations(&self) -> &[crate::metric::Violation] {
        match self {
            IoError::Metric(e) => e.violations(),
            _ => &[],
        }
    }
}

/// Unvalidated on-disk form of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl SpaceFile {
    pub fn validate(self) -> Result<FiniteMetricSpace, MetricError> {
        FiniteMetricSpace::new(self.matrix, self.labels, DEFAULT_TOLERANCE)
    }
}

impl From<&FiniteMetricSpace> for SpaceFile {
    fn from(space: &FiniteMetricSpace) -> Self {
        SpaceFile {
            labels: space.labels().to_vec(),
            matrix: space.matrix(),
        }
    }
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SpaceFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteMetricSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        SpaceFile::deserialize(deserializer)?
            .validate()
            .map_err(serde::de::Error::custom)
    }
}

pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    serde_json::to_string_pretty(&SpaceFile::from(space)).expect("finite values serialize")
}

pub fn space_from_json(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let file: SpaceFile = serde_json::from_str(text)?;
    Ok(file.validate()?)
}

pub fn space_to_csv(space: &FiniteMetricSpace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(space.labels()).expect("in-memory write");
    for row in space.matrix() {
        w.write_record(row.iter().map(|x| x.to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn space_from_csv(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut matrix = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    IoError::Format(format!("row {}: '{s}' is not a number", line + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        matrix.push(row);
    }
    Ok(SpaceFile { labels, matrix }.validate()?)
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a space, choosing CSV for a `.csv` extension and JSON otherwise.
pub fn read_space(path: &Path) -> Result<FiniteMetricSpace, IoError> {
    let text = read_text(path)?;
    if is_csv(path) {
        space_from_csv(&text)
    } else {
        space_from_json(&text)
    }
}

pub fn write_space(path: &Path, space: &FiniteMetricSpace) -> Result<(), IoError> {
    let text = if is_csv(path) {
        space_to_csv(space)
    } else {
        space_to_json(space)
    };
    write_text(path, &text)
}

pub fn function_to_json(f: &TorusFunction) -> String {
    serde_json::to_string(f).expect("integers serialize")
}

pub fn function_from_json(text: &str) -> Result<TorusFunction, IoError> {
    let f: TorusFunction = serde_json::from_str(text)?;
    f.torus()?;
    Ok(f)
}

pub fn read_function(path: &Path) -> Result<TorusFunction, IoError> {
    function_from_json(&read_text(path)?)
}

pub fn write_function(path: &Path, f: &TorusFunction) -> Result<(), IoError> {
    write_text(path, &function_to_json(f))
}

pub fn map_to_json(map: &PointMap) -> String {
    serde_json::to_string_pretty(map).expect("finite values serialize")
}

pub fn map_from_json(text: &str) -> Result<PointMap, IoError> {
    #[derive(Deserialize)]
    struct MapFile {
        source: SpaceFile,
        target: SpaceFile,
        assignment: Vec<usize>,
    }
    let file: MapFile = serde_json::from_str(text)?;
    Ok(PointMap::new(
        file.source.validate()?,
        file.target.validate()?,
        file.assignment,
    )?)
}

pub fn read_map(path: &Path) -> Result<PointMap, IoError> {
    map_from_json(&read_text(path)?)
}

pub fn write_map(path: &Path, map: &PointMap) -> Result<(), IoError> {
    write_text(path, &map_to_json(map))
}
