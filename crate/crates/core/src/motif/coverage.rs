use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::molgraph::MolGraph;

use super::{decompose, MotifError, MotifVocab};

/// How well a pretraining vocabulary covers a downstream corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageStats {
    /// Fraction of distinct downstream signatures present in the pretraining vocabulary.
    pub overlap_ratio: f64,
    /// Per graph: seen motif instances / all motif instances.
    pub per_graph_r: Vec<f64>,
    /// Percentage (0..=100) of graphs with r >= 0.8.
    pub pct_r_ge_080: f64,
    /// Percentage (0..=100) of graphs with r <= 0.2.
    pub pct_r_le_020: f64,
}

impl CoverageStats {
    pub fn mean_r(&self) -> f64 {
        if self.per_graph_r.is_empty() {
            return 0.0;
        }
        self.per_graph_r.iter().sum::<f64>() / self.per_graph_r.len() as f64
    }

    pub fn median_r(&self) -> f64 {
        let mut v = self.per_graph_r.clone();
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(f64::total_cmp);
        let mid = v.len() / 2;
        if v.len().is_multiple_of(2) {
            (v[mid - 1] + v[mid]) / 2.0
        } else {
            v[mid]
        }
    }
}

pub fn coverage<'a, I>(pretrain_vocab: &MotifVocab, downstream: I) -> Result<CoverageStats, MotifError>
where
    I: IntoIterator<Item = &'a MolGraph>,
{
    if pretrain_vocab.is_empty() {
        return Err(MotifError::EmptyVocab);
    }
    let mut distinct = BTreeSet::new();
    let mut per_graph_r = Vec::new();
    for graph in downstream {
        let partition = decompose(graph);
        let seen = partition
            .signatures
            .iter()
            .filter(|s| pretrain_vocab.contains(s))
            .count();
        per_graph_r.push(seen as f64 / partition.len() as f64);
        distinct.extend(partition.signatures);
    }
    let overlap_ratio = if distinct.is_empty() {
        0.0
    } else {
        distinct.iter().filter(|s| pretrain_vocab.contains(s)).count() as f64 / distinct.len() as f64
    };
    let pct = |pred: &dyn Fn(f64) -> bool| {
        if per_graph_r.is_empty() {
            0.0
        } else {
            100.0 * per_graph_r.iter().filter(|&&r| pred(r)).count() as f64 / per_graph_r.len() as f64
        }
    };
    let pct_r_ge_080 = pct(&|r| r >= 0.8);
    let pct_r_le_020 = pct(&|r| r <= 0.2);
    Ok(CoverageStats {
        overlap_ratio,
        per_graph_r,
        pct_r_ge_080,
        pct_r_le_020,
    })
}

/// One line of the coverage CSV report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub dataset: String,
    pub overlap_ratio: f64,
    pub mean_r: f64,
    pub median_r: f64,
    pub pct_r_ge_080: f64,
    pub pct_r_le_020: f64,
}

pub fn coverage_report_row(dataset: &str, stats: &CoverageStats) -> CoverageRow {
    CoverageRow {
        dataset: dataset.to_string(),
        overlap_ratio: stats.overlap_ratio,
        mean_r: stats.mean_r(),
        median_r: stats.median_r(),
        pct_r_ge_080: stats.pct_r_ge_080,
        pct_r_le_020: stats.pct_r_le_020,
    }
}
