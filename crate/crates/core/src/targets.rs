//! Prediction targets for masked units: atom types, motif labels, argmax
//! tokens and nearest-codebook (VQ) codes.
//!
//! Embeddings, logits and codebooks are read from files; nothing here trains
//! a tokenizer.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::masking::MaskPlan;
use crate::molgraph::MolGraph;
use crate::motif::{MotifPartition, MotifVocab};

/// Label space of atom-type targets: atomic numbers 0..=118.
pub const ATOM_TYPE_SPACE: usize = 119;

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("{0} targets need {1}")]
    MissingInput(TargetKind, &'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("codebook is empty")]
    EmptyCodebook,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    AtomType,
    MotifLabel,
    ArgmaxToken,
    VqCode,
}

impl TargetKind {
    pub const ALL: [TargetKind; 4] = [
        TargetKind::AtomType,
        TargetKind::MotifLabel,
        TargetKind::ArgmaxToken,
        TargetKind::VqCode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetKind::AtomType => "atom_type",
            TargetKind::MotifLabel => "motif_label",
            TargetKind::ArgmaxToken => "argmax_token",
            TargetKind::VqCode => "vq_code",
        }
    }

    /// Motif labels are defined per motif, all other targets per atom.
    pub fn is_motif_level(self) -> bool {
        self == TargetKind::MotifLabel
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TargetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown target kind {s:?}"))
    }
}

/// Labels for the masked units of one plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetAssignment {
    /// Masked atom indices, or masked motif indices for motif targets.
    pub unit_ids: Vec<usize>,
    pub labels: Vec<u32>,
    pub label_space_size: usize,
    /// Units whose label fell back to the UNK id.
    pub unknown_count: usize,
}

pub fn atom_type_targets(graph: &MolGraph, plan: &MaskPlan) -> TargetAssignment {
    TargetAssignment {
        unit_ids: plan.masked_atoms.clone(),
        labels: plan
            .masked_atoms
            .iter()
            .map(|&a| u32::from(graph.atom(a).atomic_number))
            .collect(),
        label_space_size: ATOM_TYPE_SPACE,
        unknown_count: 0,
    }
}

/// One vocabulary id per masked motif, in motif-index order. Unknown
/// signatures get [`MotifVocab::unk_id`]; the label space is `vocab.size() + 1`.
pub fn motif_targets(partition: &MotifPartition, plan: &MaskPlan, vocab: &MotifVocab) -> TargetAssignment {
    let mut unknown_count = 0;
    let labels = plan
        .masked_motifs
        .iter()
        .map(|&m| {
            vocab.id(&partition.signatures[m]).unwrap_or_else(|| {
                unknown_count += 1;
                vocab.unk_id()
            })
        })
        .collect();
    TargetAssignment {
        unit_ids: plan.masked_motifs.clone(),
        labels,
        label_space_size: vocab.size() + 1,
        unknown_count,
    }
}

/// Code vectors, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl Codebook {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, TargetError> {
        let dim = rows.first().ok_or(TargetError::EmptyCodebook)?.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(TargetError::DimMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Codebook { rows, dim })
    }

    /// Reads a headerless CSV with one code vector per row.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TargetError> {
        let reader = BufReader::new(File::open(path)?);
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            rows.push(parse_floats(&line, i + 1)?);
        }
        Codebook::new(rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Index of the row with the smallest Euclidean distance; ties go to the lower index.
    pub fn nearest(&self, embedding: &[f64]) -> Result<usize, TargetError> {
        if embedding.len() != self.dim {
            return Err(TargetError::DimMismatch {
                expected: self.dim,
                found: embedding.len(),
            });
        }
        let mut best = (0, f64::INFINITY);
        for (i, row) in self.rows.iter().enumerate() {
            let d: f64 = row.iter().zip(embedding).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok(best.0)
    }
}

fn parse_floats(line: &str, line_no: usize) -> Result<Vec<f64>, TargetError> {
    line.split(',')
        .map(|f| {
            let f = f.trim();
            let v: f64 = f.parse().map_err(|_| TargetError::Parse {
                line: line_no,
                reason: format!("cannot parse {f:?} as a number"),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(TargetError::Parse {
                    line: line_no,
                    reason: format!("non-finite value {f:?}"),
                })
            }
        })
        .collect()
}

fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / norm).collect()
    }
}

/// Nearest-codebook label per masked atom. `embeddings` holds one row per atom.
pub fn vq_targets(
    plan: &MaskPlan,
    embeddings: &[Vec<f64>],
    codebook: &Codebook,
    normalize: bool,
) -> Result<TargetAssignment, TargetError> {
    let mut labels = Vec::with_capacity(plan.len());
    for &atom in &plan.masked_atoms {
        let row = embeddings.get(atom).ok_or_else(|| {
            TargetError::ShapeMismatch(format!("no embedding for atom {atom} ({} rows)", embeddings.len()))
        })?;
        let code = if normalize {
            codebook.nearest(&l2_normalized(row))?
        } else {
            codebook.nearest(row)?
        };
        labels.push(code as u32);
    }
    Ok(TargetAssignment {
        unit_ids: plan.masked_atoms.clone(),
        labels,
        label_space_size: codebook.len(),
        unknown_count: 0,
    })
}

/// Index of the largest logit per masked atom; ties go to the lower index.
pub fn argmax_targets(plan: &MaskPlan, logits: &[Vec<f64>]) -> Result<TargetAssignment, TargetError> {
    let space = logits.first().map_or(0, Vec::len);
    let mut labels = Vec::with_capacity(plan.len());
    for &atom in &plan.masked_atoms {
        let row = logits
            .get(atom)
            .ok_or_else(|| TargetError::ShapeMismatch(format!("no logits for atom {atom} ({} rows)", logits.len())))?;
        if row.len() != space || space == 0 {
            return Err(TargetError::ShapeMismatch(format!(
                "logit row for atom {atom} has length {}, expected {space}",
                row.len()
            )));
        }
        let mut best = 0;
        for (i, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = i;
            }
        }
        labels.push(best as u32);
    }
    Ok(TargetAssignment {
        unit_ids: plan.masked_atoms.clone(),
        labels,
        label_space_size: space,
        unknown_count: 0,
    })
}

/// Per-atom vectors for a corpus, read from CSV rows
/// `graph_index,atom_index,v0,v1,...` (an optional header line is skipped).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingTable {
    graphs: BTreeMap<usize, Vec<Vec<f64>>>,
    dim: usize,
}

impl EmbeddingTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TargetError> {
        Self::parse(BufReader::new(File::open(path)?))
    }

    pub fn parse<R: BufRead>(input: R) -> Result<Self, TargetError> {
        let mut raw: BTreeMap<usize, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
        let mut dim = None;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.splitn(3, ',');
            let g = fields.next().unwrap_or("").trim();
            let a = fields.next().unwrap_or("").trim();
            let (Ok(g), Ok(a)) = (g.parse::<usize>(), a.parse::<usize>()) else {
                if line_no == 1 {
                    continue;
                }
                return Err(TargetError::Parse {
                    line: line_no,
                    reason: "expected graph_index,atom_index prefix".into(),
                });
            };
            let values = parse_floats(fields.next().unwrap_or(""), line_no)?;
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(TargetError::DimMismatch {
                        expected: d,
                        found: values.len(),
                    })
                }
                _ => {}
            }
            if raw.entry(g).or_default().insert(a, values).is_some() {
                return Err(TargetError::Parse {
                    line: line_no,
                    reason: format!("duplicate row for graph {g} atom {a}"),
                });
            }
        }
        let mut graphs = BTreeMap::new();
        for (g, atoms) in raw {
            let n = atoms.len();
            if atoms.keys().copied().ne(0..n) {
                return Err(TargetError::ShapeMismatch(format!(
                    "graph {g}: atom indices are not contiguous from 0"
                )));
            }
            graphs.insert(g, atoms.into_values().collect());
        }
        Ok(EmbeddingTable {
            graphs,
            dim: dim.unwrap_or(0),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn graph(&self, graph_index: usize) -> Option<&[Vec<f64>]> {
        self.graphs.get(&graph_index).map(Vec::as_slice)
    }

    /// Checks that every graph has exactly one row per atom.
    pub fn check_shape(&self, atom_counts: &[usize]) -> Result<(), TargetError> {
        for (g, &n) in atom_counts.iter().enumerate() {
            let found = self.graphs.get(&g).map_or(0, Vec::len);
            if found != n {
                return Err(TargetError::ShapeMismatch(format!(
                    "graph {g}: {found} embedding rows for {n} atoms"
                )));
            }
        }
        if let Some(&extra) = self.graphs.keys().find(|&&g| g >= atom_counts.len()) {
            return Err(TargetError::ShapeMismatch(format!(
                "embedding rows for graph {extra} beyond corpus size {}",
                atom_counts.len()
            )));
        }
        Ok(())
    }
}

/// Target type together with the side inputs it needs.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub vocab: Option<MotifVocab>,
    pub codebook: Option<Codebook>,
    /// Embeddings for `vq_code`, logits for `argmax_token`.
    pub embeddings: Option<EmbeddingTable>,
    /// L2-normalize embeddings before the codebook search.
    pub normalize_embeddings: bool,
}

impl TargetSpec {
    pub fn atom_type() -> Self {
        TargetSpec {
            kind: TargetKind::AtomType,
            vocab: None,
            codebook: None,
            embeddings: None,
            normalize_embeddings: false,
        }
    }

    pub fn motif_label(vocab: MotifVocab) -> Self {
        TargetSpec {
            kind: TargetKind::MotifLabel,
            vocab: Some(vocab),
            ..Self::atom_type()
        }
    }

    pub fn argmax_token(logits: EmbeddingTable) -> Self {
        TargetSpec {
            kind: TargetKind::ArgmaxToken,
            embeddings: Some(logits),
            ..Self::atom_type()
        }
    }

    pub fn vq_code(embeddings: EmbeddingTable, codebook: Codebook) -> Self {
        TargetSpec {
            kind: TargetKind::VqCode,
            embeddings: Some(embeddings),
            codebook: Some(codebook),
            ..Self::atom_type()
        }
    }

    pub fn validate(&self) -> Result<(), TargetError> {
        match self.kind {
            TargetKind::AtomType => Ok(()),
            TargetKind::MotifLabel if self.vocab.is_none() => {
                Err(TargetError::MissingInput(self.kind, "a motif vocabulary"))
            }
            TargetKind::ArgmaxToken if self.embeddings.is_none() => {
                Err(TargetError::MissingInput(self.kind, "per-atom logits"))
            }
            TargetKind::VqCode if self.embeddings.is_none() || self.codebook.is_none() => Err(
                TargetError::MissingInput(self.kind, "per-atom embeddings and a codebook"),
            ),
            TargetKind::VqCode => {
                let (e, c) = (self.embeddings.as_ref().unwrap(), self.codebook.as_ref().unwrap());
                if e.dim() != c.dim() {
                    return Err(TargetError::DimMismatch {
                        expected: c.dim(),
                        found: e.dim(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn rows(&self, graph_index: usize) -> Result<&[Vec<f64>], TargetError> {
        self.embeddings
            .as_ref()
            .ok_or(TargetError::MissingInput(self.kind, "per-atom vectors"))?
            .graph(graph_index)
            .ok_or_else(|| TargetError::ShapeMismatch(format!("no vectors for graph {graph_index}")))
    }

    /// Labels for `plan` on graph `graph_index`. `partition` is required for motif targets.
    pub fn assign(
        &self,
        graph_index: usize,
        graph: &MolGraph,
        partition: Option<&MotifPartition>,
        plan: &MaskPlan,
    ) -> Result<TargetAssignment, TargetError> {
        match self.kind {
            TargetKind::AtomType => Ok(atom_type_targets(graph, plan)),
            TargetKind::MotifLabel => {
                let vocab = self
                    .vocab
                    .as_ref()
                    .ok_or(TargetError::MissingInput(self.kind, "a motif vocabulary"))?;
                let partition = partition.ok_or(TargetError::MissingInput(self.kind, "a motif partition"))?;
                Ok(motif_targets(partition, plan, vocab))
            }
            TargetKind::ArgmaxToken => argmax_targets(plan, self.rows(graph_index)?),
            TargetKind::VqCode => {
                let codebook = self
                    .codebook
                    .as_ref()
                    .ok_or(TargetError::MissingInput(self.kind, "a codebook"))?;
                vq_targets(plan, self.rows(graph_index)?, codebook, self.normalize_embeddings)
            }
        }
    }
}
