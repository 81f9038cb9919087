//! Masking distributions, mask application and masked-view export.
//!
//! Node-level strategies always mask exactly [`mask_count`] atoms. Motif-level
//! strategies mask whole motifs (MoAMa-style, never two adjacent motifs) or a
//! fraction of the atoms inside sampled motifs (MotifPred-style).

mod apply;
mod export;
mod sampler;
mod strategies;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::ScoreSource;

pub use apply::{apply_mask, MaskedGraph, MASK_TOKEN};
pub use export::{build_views, export_views, load_views, read_views, write_views, ViewRecord};
pub use sampler::MaskSampler;
pub use strategies::{moama_mask, motifpred_mask, perturbed_topk, top_k, uniform_mask};

pub const DEFAULT_BETA_PAGERANK: f64 = 0.25;
pub const DEFAULT_BETA_LEARNED: f64 = 0.5;

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("invalid mask config: {0}")]
    InvalidConfig(String),
    #[error("atom index {index} out of range for {atoms} atoms")]
    OutOfRangeIndex { index: usize, atoms: usize },
    #[error("strategy {0} needs {1}")]
    MissingInput(Strategy, &'static str),
    #[error("per-graph inputs cover {found} graphs, corpus has {expected}")]
    CorpusMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Scoring(#[from] crate::scoring::ScoringError),
    #[error(transparent)]
    Target(#[from] crate::targets::TargetError),
    #[error("export I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("view line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Uniform,
    #[serde(rename = "pagerank")]
    PageRank,
    External,
    Degree,
    Moama,
    #[serde(rename = "motifpred")]
    MotifPred,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Uniform,
        Strategy::PageRank,
        Strategy::External,
        Strategy::Degree,
        Strategy::Moama,
        Strategy::MotifPred,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::PageRank => "pagerank",
            Strategy::External => "external",
            Strategy::Degree => "degree",
            Strategy::Moama => "moama",
            Strategy::MotifPred => "motifpred",
        }
    }

    pub fn from_score_source(source: ScoreSource) -> Strategy {
        match source {
            ScoreSource::PageRank => Strategy::PageRank,
            ScoreSource::Degree => Strategy::Degree,
            ScoreSource::External => Strategy::External,
        }
    }

    pub fn is_motif_level(self) -> bool {
        matches!(self, Strategy::Moama | Strategy::MotifPred)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskConfig {
    /// Mask ratio gamma in (0, 1].
    pub ratio: f64,
    /// Annealing epoch i, 1 <= i <= max_epoch.
    pub epoch: u32,
    pub max_epoch: u32,
    /// Perturbation strength; `None` selects the per-source default.
    pub beta: Option<f64>,
    /// Fraction of atoms masked inside each selected motif (MotifPred).
    pub intra_motif_fraction: f64,
    pub seed: u64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        MaskConfig {
            ratio: 0.15,
            epoch: 1,
            max_epoch: 1,
            beta: None,
            intra_motif_fraction: 0.5,
            seed: 0,
        }
    }
}

impl MaskConfig {
    pub fn with_ratio(ratio: f64) -> Self {
        MaskConfig {
            ratio,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), MaskError> {
        let bad = |m: &str| Err(MaskError::InvalidConfig(m.to_string()));
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return bad("ratio must lie in (0, 1]");
        }
        if self.max_epoch == 0 || self.epoch == 0 || self.epoch > self.max_epoch {
            return bad("epoch must satisfy 1 <= epoch <= max_epoch");
        }
        if let Some(beta) = self.beta {
            if !(beta >= 0.0 && beta.is_finite()) {
                return bad("beta must be finite and >= 0");
            }
        }
        if !(self.intra_motif_fraction > 0.0 && self.intra_motif_fraction <= 1.0) {
            return bad("intra_motif_fraction must lie in (0, 1]");
        }
        Ok(())
    }

    /// gamma_i = gamma * sqrt(i / E).
    pub fn annealed_ratio(&self) -> f64 {
        self.ratio * (f64::from(self.epoch) / f64::from(self.max_epoch)).sqrt()
    }

    pub fn beta_for(&self, source: ScoreSource) -> f64 {
        self.beta.unwrap_or(match source {
            ScoreSource::External => DEFAULT_BETA_LEARNED,
            ScoreSource::PageRank | ScoreSource::Degree => DEFAULT_BETA_PAGERANK,
        })
    }
}

// Guards against products such as 0.15 * 30 landing just below a half.
const ROUNDING_SLACK: f64 = 1e-9;

/// Number of units masked at ratio `ratio` out of `n`: `max(1, round_half_up(ratio * n))`,
/// capped at `n`.
pub fn mask_count(ratio: f64, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let k = (ratio * n as f64 + 0.5 + ROUNDING_SLACK).floor() as usize;
    k.clamp(1, n)
}

/// Masked atoms and motifs for one graph under one strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskPlan {
    /// Sorted ascending.
    pub masked_atoms: Vec<usize>,
    /// Sorted ascending; empty for node-level strategies.
    pub masked_motifs: Vec<usize>,
    pub strategy: Strategy,
}

impl MaskPlan {
    pub fn empty(strategy: Strategy) -> Self {
        MaskPlan {
            masked_atoms: Vec::new(),
            masked_motifs: Vec::new(),
            strategy,
        }
    }

    pub fn len(&self) -> usize {
        self.masked_atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masked_atoms.is_empty()
    }
}
