use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::motif::CoverageRow;

use super::{JsdRow, MiRow, WorkbenchError};

/// A row type with a fixed CSV header.
pub trait ReportRow: Serialize {
    const COLUMNS: &'static [&'static str];
}

impl ReportRow for MiRow {
    const COLUMNS: &'static [&'static str] = &MI_COLUMNS;
}

impl ReportRow for JsdRow {
    const COLUMNS: &'static [&'static str] = &JSD_COLUMNS;
}

impl ReportRow for CoverageRow {
    const COLUMNS: &'static [&'static str] = &COVERAGE_COLUMNS;
}

pub fn write_csv<T: ReportRow>(rows: &[T], path: impl AsRef<Path>) -> Result<(), WorkbenchError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| WorkbenchError::io(path, e))?;
    write_csv_to(rows, file)
}

/// Header is written even for an empty row set.
pub fn write_csv_to<T: ReportRow, W: Write>(rows: &[T], out: W) -> Result<(), WorkbenchError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(T::COLUMNS)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub const MI_COLUMNS: [&str; 12] = [
    "dataset",
    "target_kind",
    "strategy",
    "mi_bits",
    "h_y_bits",
    "relative_gain",
    "n_pairs",
    "seed_mean",
    "seed_std",
    "version",
    "seed",
    "config_hash",
];

pub const JSD_COLUMNS: [&str; 9] = [
    "dataset",
    "target_kind",
    "tau",
    "jsd_bits",
    "labels_kept",
    "defined",
    "version",
    "seed",
    "config_hash",
];

pub const COVERAGE_COLUMNS: [&str; 6] = [
    "dataset",
    "overlap_ratio",
    "mean_r",
    "median_r",
    "pct_r_ge_080",
    "pct_r_le_020",
];

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, WorkbenchError> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(WorkbenchError::from)).collect()
}

/// A report CSV read back for plotting, recognized by its header.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Mi(Vec<MiRow>),
    Jsd(Vec<JsdRow>),
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report, WorkbenchError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header == MI_COLUMNS {
        Ok(Report::Mi(read_rows(path)?))
    } else if header == JSD_COLUMNS {
        Ok(Report::Jsd(read_rows(path)?))
    } else {
        Err(WorkbenchError::Config(format!(
            "{} is neither an MI nor a JSD report",
            path.display()
        )))
    }
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<(), WorkbenchError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| WorkbenchError::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| WorkbenchError::io(path, e))?;
    out.flush().map_err(|e| WorkbenchError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi_row() -> MiRow {
        MiRow {
            dataset: "toy".into(),
            target_kind: "atom_type".into(),
            strategy: "exact".into(),
            mi_bits: 0.1,
            h_y_bits: 1.0,
            relative_gain: 0.1,
            n_pairs: 10,
            seed_mean: None,
            seed_std: Some(0.25),
            version: "0".into(),
            seed: 3,
            config_hash: "abc".into(),
        }
    }

    #[test]
    fn mi_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mi.csv");
        write_csv(&[mi_row()], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&MI_COLUMNS.join(",")));
        assert!(text.contains("0.1,1.0,0.1,10,,0.25,"));
        assert_eq!(read_report(&path).unwrap(), Report::Mi(vec![mi_row()]));
    }

    #[test]
    fn empty_report_keeps_header() {
        let mut buf = Vec::new();
        write_csv_to::<JsdRow, _>(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), JSD_COLUMNS.join(","));
    }
}
