//! Dataset CSV and model JSON files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, Feature, FeatureScaler, GpModel, KernelParams, Sample};
use crate::{Error, Result};

const HEADER: [&str; 4] = ["level", "alpha", "duration", "next_level"];

pub fn write_dataset_csv<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for s in data.samples() {
        let f = s.feature;
        w.write_record([f.level.to_string(), f.alpha.to_string(), f.duration.to_string(), s.next_level.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Reads a dataset; errors name the 1-based data row and the column.
pub fn read_dataset_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(Error::Parse {
            row: 0,
            column: header.iter().collect::<Vec<_>>().join(","),
            message: format!("expected header `{}`", HEADER.join(",")),
        });
    }
    let mut samples = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, column: String::new(), message: e.to_string() })?;
        let mut vals = [0.0; 4];
        for (c, name) in HEADER.iter().enumerate() {
            let cell = rec.get(c).ok_or_else(|| Error::Parse {
                row,
                column: name.to_string(),
                message: "missing value".into(),
            })?;
            vals[c] = cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                row,
                column: name.to_string(),
                message: format!("`{cell}`: {e}"),
            })?;
        }
        let feature = Feature { level: vals[0], alpha: vals[1], duration: vals[2] };
        feature.validate().map_err(|e| Error::Parse {
            row,
            column: "level/alpha/duration".into(),
            message: e.to_string(),
        })?;
        samples.push(Sample { feature, next_level: vals[3] });
    }
    if samples.is_empty() {
        return Err(Error::Parse { row: 1, column: String::new(), message: "dataset has no rows".into() });
    }
    Dataset::new(samples)
}

/// Serialized form of a model. The factorization is recomputed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub kernel_params: KernelParams,
    pub feature_scaler: FeatureScaler,
    pub dataset: Dataset,
}

impl From<&GpModel> for ModelFile {
    fn from(m: &GpModel) -> Self {
        ModelFile { kernel_params: *m.params(), feature_scaler: *m.scaler(), dataset: m.dataset().clone() }
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<GpModel> {
        GpModel::with_scaler(&self.dataset, &self.kernel_params, self.feature_scaler)
    }
}

pub fn write_model_json(model: &GpModel, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, &ModelFile::from(model))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_model_json(path: &Path) -> Result<GpModel> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_reader(BufReader::new(f))?;
    file.into_model()
}
