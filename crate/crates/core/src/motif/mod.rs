//! Motif decomposition, canonical motif signatures, vocabularies and coverage.

mod canon;
mod coverage;
mod decompose;
mod vocab;

use thiserror::Error;

pub use canon::{canonical_ranks, canonical_signature, FALLBACK_PREFIX, MAX_CELL_BRANCHING, MAX_LEAVES};
pub use coverage::{coverage, coverage_report_row, CoverageRow, CoverageStats};
pub use decompose::{cut_bonds, decompose, MotifPartition};
pub use vocab::{build_vocab, build_vocab_par, MotifCounter, MotifVocab, VocabEntry, VocabReadError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotifError {
    #[error("atom set induces a disconnected subgraph")]
    DisconnectedMotif,
    #[error("atom set is empty")]
    EmptyAtomSet,
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("motif vocabulary is empty")]
    EmptyVocab,
    #[error("malformed vocabulary line {line}: {reason}")]
    VocabFormat { line: usize, reason: String },
}
