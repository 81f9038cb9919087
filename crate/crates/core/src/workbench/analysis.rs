use std::fs::File;
use std::io::BufReader;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::infotheory::{
    accumulate, entropy_y, jsd_curve, mutual_information, sampled_mi, shuffle_control, JointCounts, RepeatStats,
    SampledMiOptions,
};
use crate::masking::{MaskPlan, MaskSampler, Strategy};
use crate::molgraph::{LabeledRecord, MolGraph};
use crate::motif::{build_vocab_par, coverage, coverage_report_row, decompose, CoverageRow, MotifVocab};
use crate::scoring::load_external_scores;
use crate::targets::{Codebook, EmbeddingTable, TargetKind, TargetSpec};

use super::{ingest, Dataset, IngestSummary, RunConfig, WorkbenchError};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Strategy column value for exhaustive (unsampled) MI rows.
pub const EXACT: &str = "exact";
/// Strategy column value for label-shuffled control rows.
pub const SHUFFLED: &str = "shuffled";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiRow {
    pub dataset: String,
    pub target_kind: String,
    pub strategy: String,
    pub mi_bits: f64,
    pub h_y_bits: f64,
    pub relative_gain: f64,
    pub n_pairs: u64,
    pub seed_mean: Option<f64>,
    pub seed_std: Option<f64>,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsdRow {
    pub dataset: String,
    pub target_kind: String,
    pub tau: f64,
    pub jsd_bits: Option<f64>,
    pub labels_kept: usize,
    pub defined: bool,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub dataset: String,
    #[serde(flatten)]
    pub ingest: IngestSummary,
    /// Labeled multi-atom records entering the analyses.
    pub analysed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub datasets: Vec<DatasetSummary>,
}

/// (label, graph label) pairs over all units of one target kind.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPairs {
    pub pairs: Vec<(u32, u8)>,
    /// Motif instances dropped for lack of a vocabulary entry.
    pub unknown: usize,
}

impl UnitPairs {
    pub fn counts(&self) -> JointCounts<u32> {
        accumulate(self.pairs.iter().copied()).expect("labels were checked at ingest")
    }
}

pub struct LoadedDataset {
    pub dataset: Dataset,
    /// Parsed-record index of each analysed record.
    pub indices: Vec<usize>,
    pub records: Vec<LabeledRecord>,
}

impl LoadedDataset {
    pub fn new(dataset: Dataset) -> Self {
        let indices = dataset.analysis_indices();
        let records = indices.iter().map(|&i| dataset.records[i].clone()).collect();
        LoadedDataset {
            dataset,
            indices,
            records,
        }
    }

    pub fn name(&self) -> &str {
        &self.dataset.manifest.name
    }

    pub fn graphs(&self) -> Vec<MolGraph> {
        self.records.iter().map(|r| r.graph.clone()).collect()
    }
}

/// Loaded corpora plus the run configuration; produces report rows.
pub struct Workbench {
    config: RunConfig,
    datasets: Vec<LoadedDataset>,
    vocab: Option<MotifVocab>,
}

impl Workbench {
    pub fn load(config: RunConfig) -> Result<Self, WorkbenchError> {
        config.validate()?;
        let datasets = config.datasets.iter().map(ingest).collect::<Result<Vec<_>, _>>()?;
        Self::from_datasets(config, datasets)
    }

    pub fn from_datasets(config: RunConfig, datasets: Vec<Dataset>) -> Result<Self, WorkbenchError> {
        config.mask.validate()?;
        let vocab = match &config.vocab {
            Some(path) => {
                let file = File::open(path).map_err(|e| WorkbenchError::io(path, e))?;
                Some(MotifVocab::read_tsv(BufReader::new(file))?)
            }
            None => None,
        };
        Ok(Workbench {
            config,
            datasets: datasets.into_iter().map(LoadedDataset::new).collect(),
            vocab,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn datasets(&self) -> &[LoadedDataset] {
        &self.datasets
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            version: TOOLKIT_VERSION.to_string(),
            seed: self.config.seed(),
            config_hash: self.config.config_hash(),
            datasets: self
                .datasets
                .iter()
                .map(|d| DatasetSummary {
                    dataset: d.name().to_string(),
                    ingest: d.dataset.summary.clone(),
                    analysed: d.records.len(),
                })
                .collect(),
        }
    }

    /// Pairs every unit of `kind` (each atom, or each motif) with its graph label.
    pub fn unit_pairs(&self, d: &LoadedDataset, kind: TargetKind) -> Result<UnitPairs, WorkbenchError> {
        let spec = self.target_spec(d, kind)?;
        let per_record = d
            .records
            .par_iter()
            .zip(&d.indices)
            .map(|(rec, &parsed_index)| {
                let y = rec.label().expect("analysed records are labeled");
                let n = rec.graph.atom_count();
                let partition = kind.is_motif_level().then(|| decompose(&rec.graph));
                let plan = MaskPlan {
                    masked_atoms: (0..n).collect(),
                    masked_motifs: (0..partition.as_ref().map_or(0, |p| p.len())).collect(),
                    strategy: Strategy::Uniform,
                };
                let assignment = spec.assign(parsed_index, &rec.graph, partition.as_ref(), &plan)?;
                let unk = assignment.label_space_size as u32 - 1;
                let pairs: Vec<(u32, u8)> = assignment
                    .labels
                    .iter()
                    .filter(|&&l| !(kind.is_motif_level() && l == unk))
                    .map(|&l| (l, y))
                    .collect();
                Ok((pairs, assignment.unknown_count))
            })
            .collect::<Result<Vec<_>, WorkbenchError>>()?;
        let mut out = UnitPairs {
            pairs: Vec::new(),
            unknown: 0,
        };
        for (pairs, unknown) in per_record {
            out.pairs.extend(pairs);
            out.unknown += unknown;
        }
        Ok(out)
    }

    pub fn target_spec(&self, d: &LoadedDataset, kind: TargetKind) -> Result<TargetSpec, WorkbenchError> {
        let m = &d.dataset.manifest;
        let atom_counts: Vec<usize> = d.dataset.records.iter().map(|r| r.graph.atom_count()).collect();
        let table = |path: &Option<std::path::PathBuf>, what: &'static str| -> Result<EmbeddingTable, WorkbenchError> {
            let path = path
                .as_ref()
                .ok_or(crate::targets::TargetError::MissingInput(kind, what))?;
            let t = EmbeddingTable::load(path)?;
            t.check_shape(&atom_counts)?;
            Ok(t)
        };
        let spec = match kind {
            TargetKind::AtomType => TargetSpec::atom_type(),
            TargetKind::MotifLabel => TargetSpec::motif_label(match &self.vocab {
                Some(v) => v.clone(),
                None => build_vocab_par(&d.graphs()),
            }),
            TargetKind::ArgmaxToken => TargetSpec::argmax_token(table(&m.logits, "a logits file")?),
            TargetKind::VqCode => {
                let embeddings = table(&m.embeddings, "an embeddings file")?;
                let path = m
                    .codebook
                    .as_ref()
                    .ok_or(crate::targets::TargetError::MissingInput(kind, "a codebook file"))?;
                TargetSpec {
                    normalize_embeddings: self.config.normalize_embeddings,
                    ..TargetSpec::vq_code(embeddings, Codebook::load(path)?)
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    fn mi_row(
        &self,
        dataset: &str,
        kind: TargetKind,
        strategy: &str,
        counts: &JointCounts<u32>,
    ) -> Result<MiRow, WorkbenchError> {
        let mi = mutual_information(counts)?;
        let h_y = entropy_y(counts)?;
        Ok(MiRow {
            dataset: dataset.to_string(),
            target_kind: kind.name().to_string(),
            strategy: strategy.to_string(),
            mi_bits: mi,
            h_y_bits: h_y,
            relative_gain: if h_y > 0.0 { mi / h_y } else { 0.0 },
            n_pairs: counts.total(),
            seed_mean: None,
            seed_std: None,
            version: TOOLKIT_VERSION.to_string(),
            seed: self.config.seed(),
            config_hash: self.config.config_hash(),
        })
    }

    fn with_stats(mut row: MiRow, stats: &RepeatStats) -> MiRow {
        row.mi_bits = stats.mean;
        row.relative_gain = if row.h_y_bits > 0.0 {
            stats.mean / row.h_y_bits
        } else {
            0.0
        };
        row.seed_mean = Some(stats.mean);
        row.seed_std = Some(stats.std);
        row
    }

    /// Exact MI, H(Y) and relative gain per dataset and target kind.
    pub fn mi_rows(&self) -> Result<Vec<MiRow>, WorkbenchError> {
        let mut rows = Vec::new();
        for d in &self.datasets {
            for &kind in &self.config.target_kinds {
                let counts = self.unit_pairs(d, kind)?.counts();
                rows.push(self.mi_row(d.name(), kind, EXACT, &counts)?);
            }
        }
        sort_mi(&mut rows);
        Ok(rows)
    }

    /// JSD between the class-conditional rare-label distributions at each tau.
    pub fn jsd_rows(&self) -> Result<Vec<JsdRow>, WorkbenchError> {
        let mut rows = Vec::new();
        for d in &self.datasets {
            for &kind in &self.config.target_kinds {
                let counts = self.unit_pairs(d, kind)?.counts();
                let curve = jsd_curve(&counts, &self.config.taus);
                for (i, &tau) in curve.thresholds.iter().enumerate() {
                    rows.push(JsdRow {
                        dataset: d.name().to_string(),
                        target_kind: kind.name().to_string(),
                        tau,
                        jsd_bits: curve.jsd_values[i],
                        labels_kept: curve.kept_label_counts[i],
                        defined: curve.jsd_values[i].is_some(),
                        version: TOOLKIT_VERSION.to_string(),
                        seed: self.config.seed(),
                        config_hash: self.config.config_hash(),
                    });
                }
            }
        }
        rows.sort_by(|a, b| {
            (&a.dataset, &a.target_kind)
                .cmp(&(&b.dataset, &b.target_kind))
                .then(b.tau.total_cmp(&a.tau))
        });
        Ok(rows)
    }

    /// Sampled atom-type MI under each configured strategy, next to the exact value.
    pub fn mask_sim_rows(&self) -> Result<Vec<MiRow>, WorkbenchError> {
        let mut rows = Vec::new();
        let options = SampledMiOptions {
            repeats: self.config.repeats,
            seed: self.config.seed(),
            without_replacement: self.config.without_replacement,
        };
        for d in &self.datasets {
            let exact = self.mi_row(
                d.name(),
                TargetKind::AtomType,
                EXACT,
                &self.unit_pairs(d, TargetKind::AtomType)?.counts(),
            )?;
            for &strategy in &self.config.strategies {
                let sampler = self.sampler(d, strategy)?;
                let stats = sampled_mi(&d.records, &sampler, &self.config.mask, &options)?;
                let row = MiRow {
                    strategy: strategy.name().to_string(),
                    ..exact.clone()
                };
                rows.push(Self::with_stats(row, &stats));
            }
            rows.push(exact);
        }
        sort_mi(&mut rows);
        Ok(rows)
    }

    /// Sampler over the analysed records of `d`, indexed like `d.records`.
    pub fn sampler(&self, d: &LoadedDataset, strategy: Strategy) -> Result<MaskSampler, WorkbenchError> {
        self.prepare_sampler(d, strategy, &d.indices)
    }

    /// Sampler over every parsed record of `d`, indexed like `d.dataset.records`.
    pub fn full_sampler(&self, d: &LoadedDataset, strategy: Strategy) -> Result<MaskSampler, WorkbenchError> {
        let all: Vec<usize> = (0..d.dataset.records.len()).collect();
        self.prepare_sampler(d, strategy, &all)
    }

    fn prepare_sampler(
        &self,
        d: &LoadedDataset,
        strategy: Strategy,
        indices: &[usize],
    ) -> Result<MaskSampler, WorkbenchError> {
        let external = match (&d.dataset.manifest.external_scores, strategy) {
            (Some(path), Strategy::External) => {
                let counts: Vec<usize> = d.dataset.records.iter().map(|r| r.graph.atom_count()).collect();
                let all = load_external_scores(path, &counts)?;
                Some(indices.iter().map(|&i| all[i].clone()).collect())
            }
            _ => None,
        };
        let graphs: Vec<MolGraph> = indices.iter().map(|&i| d.dataset.records[i].graph.clone()).collect();
        Ok(MaskSampler::prepare(
            strategy,
            &graphs,
            external,
            &self.config.pagerank,
        )?)
    }

    /// Exact MI and label-shuffled MI (mean and std over `repeats` permutations).
    pub fn shuffle_rows(&self) -> Result<Vec<MiRow>, WorkbenchError> {
        let mut rows = Vec::new();
        for d in &self.datasets {
            for &kind in &self.config.target_kinds {
                let pairs = self.unit_pairs(d, kind)?;
                let exact = self.mi_row(d.name(), kind, EXACT, &pairs.counts())?;
                let stats = shuffle_control(&pairs.pairs, self.config.seed(), self.config.repeats)?;
                let shuffled = MiRow {
                    strategy: SHUFFLED.to_string(),
                    ..exact.clone()
                };
                rows.push(Self::with_stats(shuffled, &stats));
                rows.push(exact);
            }
        }
        sort_mi(&mut rows);
        Ok(rows)
    }

    /// Coverage of each dataset's motifs by `vocab`, over all parsed records.
    pub fn coverage_rows(&self, vocab: &MotifVocab) -> Result<Vec<CoverageRow>, WorkbenchError> {
        self.datasets
            .iter()
            .map(|d| {
                let stats = coverage(vocab, d.dataset.records.iter().map(|r| &r.graph))?;
                Ok(coverage_report_row(d.name(), &stats))
            })
            .collect()
    }
}

fn sort_mi(rows: &mut [MiRow]) {
    rows.sort_by(|a, b| (&a.dataset, &a.target_kind, &a.strategy).cmp(&(&b.dataset, &b.target_kind, &b.strategy)));
}

pub fn run_mi_analysis(config: RunConfig) -> Result<Vec<MiRow>, WorkbenchError> {
    Workbench::load(config)?.mi_rows()
}

pub fn run_jsd_analysis(config: RunConfig) -> Result<Vec<JsdRow>, WorkbenchError> {
    Workbench::load(config)?.jsd_rows()
}

pub fn run_mask_sim(config: RunConfig) -> Result<Vec<MiRow>, WorkbenchError> {
    Workbench::load(config)?.mask_sim_rows()
}
