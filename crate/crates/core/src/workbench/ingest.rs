use std::fs::File;
use std::io::Read;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::molgraph::{parse_smiles, LabeledRecord, SmilesError};

use super::WorkbenchError;

/// Where a labeled SMILES corpus lives and which columns to read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub path: PathBuf,
    pub smiles_column: String,
    /// Empty means every column other than the SMILES column.
    #[serde(default)]
    pub task_columns: Vec<String>,
    /// Defaults to the first task column.
    #[serde(default)]
    pub active_task: Option<String>,
    /// Per-atom scores for the external strategy, one row per parsed record.
    #[serde(default)]
    pub external_scores: Option<PathBuf>,
    /// Per-atom embeddings for VQ targets, keyed by parsed-record index.
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
    /// Per-atom logits for argmax targets, keyed by parsed-record index.
    #[serde(default)]
    pub logits: Option<PathBuf>,
    #[serde(default)]
    pub codebook: Option<PathBuf>,
}

impl DatasetManifest {
    /// Manifest named after the file stem, reading a `smiles` column.
    pub fn from_path(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let name = path
            .file_stem()
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
        DatasetManifest {
            name,
            path,
            smiles_column: "smiles".into(),
            task_columns: Vec::new(),
            active_task: None,
            external_scores: None,
            embeddings: None,
            logits: None,
            codebook: None,
        }
    }
}

/// Row accounting for one ingest: `parsed + skipped_parse + skipped_multi_fragment = rows`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub parsed: usize,
    pub skipped_parse: usize,
    pub skipped_multi_fragment: usize,
    pub unlabeled: usize,
    pub singletons: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowFailure {
    /// 1-based data row, excluding the header.
    pub row: usize,
    pub smiles: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub task_columns: Vec<String>,
    pub records: Vec<LabeledRecord>,
    pub summary: IngestSummary,
    pub failures: Vec<RowFailure>,
}

impl Dataset {
    /// Indices of records used by the analyses: labeled and with more than one atom.
    pub fn analysis_indices(&self) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label().is_some() && !r.graph.is_singleton())
            .map(|(i, _)| i)
            .collect()
    }
}

fn parse_label(cell: &str) -> Option<Result<u8, ()>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    Some(match cell.parse::<f64>() {
        Ok(0.0) => Ok(0),
        Ok(1.0) => Ok(1),
        _ => Err(()),
    })
}

pub fn ingest(manifest: &DatasetManifest) -> Result<Dataset, WorkbenchError> {
    let file = File::open(&manifest.path).map_err(|e| WorkbenchError::io(&manifest.path, e))?;
    ingest_reader(manifest, file)
}

/// As [`ingest`], reading CSV text from `input` instead of `manifest.path`.
pub fn ingest_reader<R: Read>(manifest: &DatasetManifest, input: R) -> Result<Dataset, WorkbenchError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| WorkbenchError::MissingColumn {
                dataset: manifest.name.clone(),
                column: name.to_string(),
            })
    };
    let smiles_col = column(&manifest.smiles_column)?;
    let task_columns: Vec<String> = if manifest.task_columns.is_empty() {
        headers
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != smiles_col)
            .map(|(_, h)| h.trim().to_string())
            .collect()
    } else {
        manifest.task_columns.clone()
    };
    let task_idx = task_columns.iter().map(|t| column(t)).collect::<Result<Vec<_>, _>>()?;
    let active_task = match &manifest.active_task {
        Some(t) => task_columns
            .iter()
            .position(|c| c == t)
            .ok_or_else(|| WorkbenchError::MissingColumn {
                dataset: manifest.name.clone(),
                column: t.clone(),
            })?,
        None if task_columns.is_empty() => {
            return Err(WorkbenchError::MissingColumn {
                dataset: manifest.name.clone(),
                column: "<task>".into(),
            })
        }
        None => 0,
    };

    let mut summary = IngestSummary::default();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let row_no = i + 1;
        summary.rows += 1;
        let smiles = row.get(smiles_col).unwrap_or("").trim();
        let graph = match parse_smiles(smiles) {
            Ok(g) => g,
            Err(e) => {
                if matches!(e, SmilesError::MultiFragment { .. }) {
                    summary.skipped_multi_fragment += 1;
                } else {
                    summary.skipped_parse += 1;
                }
                failures.push(RowFailure {
                    row: row_no,
                    smiles: smiles.to_string(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let mut labels = Vec::with_capacity(task_idx.len());
        for (t, &c) in task_idx.iter().enumerate() {
            let cell = row.get(c).unwrap_or("");
            labels.push(match parse_label(cell) {
                None => None,
                Some(Ok(y)) => Some(y),
                Some(Err(())) => {
                    return Err(WorkbenchError::BadLabel {
                        dataset: manifest.name.clone(),
                        row: row_no,
                        column: task_columns[t].clone(),
                        value: cell.to_string(),
                    })
                }
            });
        }
        let record = LabeledRecord::new(graph, labels, active_task);
        summary.parsed += 1;
        if record.label().is_none() {
            summary.unlabeled += 1;
        }
        if record.graph.is_singleton() {
            summary.singletons += 1;
        }
        records.push(record);
    }
    Ok(Dataset {
        manifest: manifest.clone(),
        task_columns,
        records,
        summary,
        failures,
    })
}
