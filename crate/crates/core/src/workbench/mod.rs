//! Corpus ingestion, run configuration and CSV/SVG report generation.
//!
//! Report rows are sorted by (dataset, target kind, strategy) and carry the
//! toolkit version, seed and config hash, so identical inputs give
//! byte-identical files whatever the worker count.

mod analysis;
mod config;
mod ingest;
mod plot;
mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use analysis::{
    run_jsd_analysis, run_mask_sim, run_mi_analysis, DatasetSummary, JsdRow, LoadedDataset, MiRow, RunSummary,
    UnitPairs, Workbench, EXACT, SHUFFLED, TOOLKIT_VERSION,
};
pub use config::RunConfig;
pub use ingest::{ingest, ingest_reader, Dataset, DatasetManifest, IngestSummary, RowFailure};
pub use plot::{render_svg, write_svg};
pub use report::{
    read_report, write_csv, write_csv_to, write_json, Report, ReportRow, COVERAGE_COLUMNS, JSD_COLUMNS, MI_COLUMNS,
};

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("dataset {dataset}: missing column {column:?}")]
    MissingColumn { dataset: String, column: String },
    #[error("dataset {dataset}, row {row}: label {value:?} in column {column:?} is not 0 or 1")]
    BadLabel {
        dataset: String,
        row: usize,
        column: String,
        value: String,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid run config: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Mask(#[from] crate::masking::MaskError),
    #[error(transparent)]
    Target(#[from] crate::targets::TargetError),
    #[error(transparent)]
    Info(#[from] crate::infotheory::InfoError),
    #[error(transparent)]
    Scoring(#[from] crate::scoring::ScoringError),
    #[error(transparent)]
    Motif(#[from] crate::motif::MotifError),
    #[error(transparent)]
    Vocab(#[from] crate::motif::VocabReadError),
}

impl WorkbenchError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        WorkbenchError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }
}
