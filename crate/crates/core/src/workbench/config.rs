use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::infotheory::DEFAULT_TAU_GRID;
use crate::masking::{MaskConfig, Strategy};
use crate::scoring::PageRankConfig;
use crate::targets::TargetKind;

use super::{DatasetManifest, WorkbenchError};

/// Everything that determines an analysis run's output. `workers` and
/// `out_dir` do not affect results and are left out of the config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub datasets: Vec<DatasetManifest>,
    pub strategies: Vec<Strategy>,
    /// Mask parameters; `mask.seed` is the run seed.
    pub mask: MaskConfig,
    pub target_kinds: Vec<TargetKind>,
    pub taus: Vec<f64>,
    pub repeats: usize,
    /// Pool whole plans instead of one atom per plan in sampled MI.
    #[serde(default)]
    pub without_replacement: bool,
    #[serde(default)]
    pub normalize_embeddings: bool,
    /// Motif vocabulary TSV; when absent each dataset is labeled with its own vocabulary.
    #[serde(default)]
    pub vocab: Option<PathBuf>,
    pub pagerank: PageRankConfig,
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            datasets: Vec::new(),
            strategies: vec![Strategy::Uniform, Strategy::PageRank],
            mask: MaskConfig::default(),
            target_kinds: vec![TargetKind::AtomType, TargetKind::MotifLabel],
            taus: DEFAULT_TAU_GRID.to_vec(),
            repeats: 5,
            without_replacement: false,
            normalize_embeddings: false,
            vocab: None,
            pagerank: PageRankConfig::default(),
            workers: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.mask.seed
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }

    pub fn validate(&self) -> Result<(), WorkbenchError> {
        self.mask.validate()?;
        if self.repeats == 0 {
            return Err(WorkbenchError::Config("repeats must be at least 1".into()));
        }
        if let Some(&tau) = self.taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(WorkbenchError::Config(format!("tau {tau} must be positive")));
        }
        let must_exist = |p: &Path| {
            if p.exists() {
                Ok(())
            } else {
                Err(WorkbenchError::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
                ))
            }
        };
        for m in &self.datasets {
            must_exist(&m.path)?;
            for p in [&m.external_scores, &m.embeddings, &m.logits, &m.codebook]
                .into_iter()
                .flatten()
            {
                must_exist(p)?;
            }
        }
        if let Some(v) = &self.vocab {
            must_exist(v)?;
        }
        Ok(())
    }
}
