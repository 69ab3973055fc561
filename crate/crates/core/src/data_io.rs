//! Dataset ingestion and experiment bookkeeping.
//!
//! CSV files with all-numeric feature columns and one label column load into
//! [`Sample`]s; labels are densely re-encoded in first-appearance order.
//! Splits use an explicitly pinned generator (ChaCha8 keyed by a 64-bit seed
//! driving a Fisher-Yates shuffle) so they reproduce across machines.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::Sample;

/// Which column of the file carries the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => write!(f, "{n}"),
        }
    }
}

/// Where and how to read a dataset.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub label_column: LabelColumn,
    pub delimiter: u8,
    pub has_header: bool,
    pub name: String,
}

impl DatasetSpec {
    pub fn csv(path: impl Into<PathBuf>, label_column: LabelColumn, has_header: bool) -> Self {
        let path = path.into();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        DatasetSpec {
            path,
            label_column,
            delimiter: b',',
            has_header,
            name,
        }
    }
}

/// Load a dataset. Labels re-encode to `0..n` in first-appearance order;
/// any non-numeric feature cell fails with its row and column named.
pub fn load(spec: &DatasetSpec) -> Result<Sample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(spec.has_header)
        .delimiter(spec.delimiter)
        .flexible(false)
        .from_path(&spec.path)?;

    let headers: Option<Vec<String>> = if spec.has_header {
        Some(reader.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };

    let label_idx = match &spec.label_column {
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => headers
            .as_ref()
            .ok_or_else(|| {
                Error::InvalidArgument("label column by name needs a header row".into())
            })?
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no column named {name:?}")))?,
    };

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    let mut classes: Vec<String> = Vec::new();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        if label_idx >= record.len() {
            return Err(Error::Parse(format!(
                "row {}: label column {label_idx} out of range ({} columns)",
                row_idx + 1,
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(record.len() - 1);
        for (col_idx, cell) in record.iter().enumerate() {
            if col_idx == label_idx {
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| {
                let col_name = headers
                    .as_ref()
                    .map(|h| h[col_idx].clone())
                    .unwrap_or_else(|| col_idx.to_string());
                Error::Parse(format!(
                    "row {}, column {col_name}: {cell:?} is not numeric",
                    row_idx + 1
                ))
            })?;
            row.push(value);
        }
        let label_text = record[label_idx].trim().to_owned();
        let label = match classes.iter().position(|c| *c == label_text) {
            Some(i) => i as u32,
            None => {
                classes.push(label_text);
                (classes.len() - 1) as u32
            }
        };
        features.push(row);
        labels.push(label);
    }

    if features.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{}: dataset is empty",
            spec.path.display()
        )));
    }
    let n_classes = classes.len() as u32;
    let mut sample = Sample::new(features, labels, n_classes)?;
    sample.feature_names = headers.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|(i, _)| *i != label_idx)
            .map(|(_, name)| name)
            .collect()
    });
    Ok(sample)
}

/// Write a sample as CSV: feature columns then the encoded label, with a
/// header when feature names are present.
pub fn save(s: &Sample, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    if let Some(names) = &s.feature_names {
        let mut header: Vec<String> = names.clone();
        header.push("label".into());
        writer.write_record(&header)?;
    }
    for (row, &label) in s.features.iter().zip(&s.labels) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(label.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Seeded uniform split: shuffle with ChaCha8(seed) + Fisher-Yates, first
/// `ceil(fraction * m)` rows train, rest test. Not stratified.
pub fn split(s: &Sample, train_fraction: f64, seed: u64) -> Result<(Sample, Sample)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument("train fraction must lie in (0, 1)".into()));
    }
    let m = s.len();
    if m < 2 {
        return Err(Error::InvalidArgument("cannot split fewer than two rows".into()));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..m).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let n_train = (train_fraction * m as f64).ceil() as usize;
    let train = s.subset(&order[..n_train]);
    let test = s.subset(&order[n_train..]);
    Ok((train, test))
}

/// One experiment run: a (dataset, model, repetition) cell, persisted as a
/// single JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub model: String,
    pub seed: u64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub leaves: usize,
    pub height: usize,
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}
