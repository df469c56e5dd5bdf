//! On-disk table formats: datasets, weight columns, and generation sidecars.
//!
//! Datasets are headed CSV with predictor columns `x0..x{d-1}` and a
//! response column `y` (any other response name is fine when reading; point
//! at it explicitly). Weight files are a single `beta` column, one row per
//! coefficient, so generated truths and fitted estimates diff directly.
//! Floats are written in shortest round-trip form: read(write(x)) is
//! bit-exact.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, WeightVector};
use crate::synthgen::{DistributionParams, WeightDistribution};

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Rewraps a `from_path` failure so the message names the file.
pub(crate) fn name_path(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::DataFormat {
            path: path.to_path_buf(),
            message: format!("{kind:?}"),
        },
    }
}

pub(crate) fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| name_path(path, e))
}

pub(crate) fn create_csv(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| name_path(path, e))
}

/// A dataset read from CSV, with the column names it came with.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub data: Dataset,
    pub feature_names: Vec<String>,
    pub response_name: String,
}

/// Writes `x0..x{d-1},y` rows.
pub fn write_dataset_csv(path: &Path, data: &Dataset) -> Result<()> {
    let mut writer = create_csv(path)?;
    let d = data.n_features();
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    writer.write_record(&header)?;
    for i in 0..data.n_samples() {
        let mut record: Vec<String> = (0..d).map(|j| fmt_f64(data.inputs()[(i, j)])).collect();
        record.push(fmt_f64(data.outputs()[i]));
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a headed numeric CSV. The response column is `response` when
/// given, else `y`; every other column is a predictor, in header order.
pub fn read_dataset_csv(path: &Path, response: Option<&str>) -> Result<DatasetFile> {
    let mut reader = open_csv(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let wanted = response.unwrap_or("y");
    let response_idx = headers.iter().position(|h| h == wanted).ok_or_else(|| {
        Error::DataFormat {
            path: path.to_path_buf(),
            message: match response {
                Some(name) => format!("no column named {name:?}"),
                None => "no column named \"y\"; name the response with --response-column".into(),
            },
        }
    })?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != response_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::DataFormat {
            path: path.to_path_buf(),
            message: "dataset has no predictor columns".into(),
        });
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut outputs: Vec<f64> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        let mut row = Vec::with_capacity(feature_names.len());
        for (idx, raw) in record.iter().enumerate() {
            let value: f64 = raw.parse().map_err(|_| Error::DataFormat {
                path: path.to_path_buf(),
                message: format!(
                    "cannot parse {:?} in column {:?} on line {line}",
                    raw, headers[idx]
                ),
            })?;
            if idx == response_idx {
                outputs.push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::DataFormat {
            path: path.to_path_buf(),
            message: "dataset has no data rows".into(),
        });
    }

    let m = rows.len();
    let d = feature_names.len();
    let inputs = DMatrix::from_fn(m, d, |i, j| rows[i][j]);
    let data = Dataset::new(inputs, DVector::from_vec(outputs)).map_err(|e| Error::DataFormat {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(DatasetFile {
        data,
        feature_names,
        response_name: headers[response_idx].clone(),
    })
}

/// Writes a one-column `beta` table, one row per coefficient.
pub fn write_weights_csv(path: &Path, weights: &WeightVector) -> Result<()> {
    let mut writer = create_csv(path)?;
    writer.write_record(["beta"])?;
    for v in weights.as_slice() {
        writer.write_record([fmt_f64(*v)])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a `beta` column written by [`write_weights_csv`].
pub fn read_weights_csv(path: &Path) -> Result<WeightVector> {
    let mut reader = open_csv(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() != 1 || headers.get(0) != Some("beta") {
        return Err(Error::DataFormat {
            path: path.to_path_buf(),
            message: "expected a single \"beta\" column".into(),
        });
    }
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let raw = record.get(0).unwrap_or_default();
        values.push(raw.parse::<f64>().map_err(|_| Error::DataFormat {
            path: path.to_path_buf(),
            message: format!(
                "cannot parse {:?} on line {}",
                raw,
                record.position().map(|p| p.line()).unwrap_or_default()
            ),
        })?);
    }
    WeightVector::new(values).map_err(|e| Error::DataFormat {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Sidecar written next to generated datasets: everything needed to
/// regenerate or interpret the files. Seeds are strings because TOML
/// integers cannot carry the full unsigned 64-bit range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateMeta {
    pub schema_version: u32,
    pub distribution: WeightDistribution,
    pub k: usize,
    pub sparsity: f64,
    pub noise_factor: f64,
    pub master_seed: String,
    pub d: usize,
    pub m: usize,
    /// Realized noise standard deviation `sqrt(noise_factor * sum|beta|)`.
    pub noise_sigma: f64,
    pub distribution_params: DistributionParams,
}

pub fn write_meta_toml(path: &Path, meta: &GenerateMeta) -> Result<()> {
    let text = toml::to_string_pretty(meta)
        .map_err(|e| Error::Degenerate(format!("metadata serialization failed: {e}")))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_meta_toml(path: &Path) -> Result<GenerateMeta> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
