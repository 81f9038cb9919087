use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::molgraph::MolGraph;

use super::{decompose, MotifError};

/// Signature counts; merging is commutative and associative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MotifCounter {
    counts: BTreeMap<String, u64>,
}

impl MotifCounter {
    pub fn add_graph(&mut self, graph: &MolGraph) {
        for signature in decompose(graph).signatures {
            *self.counts.entry(signature).or_insert(0) += 1;
        }
    }

    pub fn merge(mut self, other: MotifCounter) -> MotifCounter {
        for (sig, c) in other.counts {
            *self.counts.entry(sig).or_insert(0) += c;
        }
        self
    }

    pub fn into_vocab(self) -> MotifVocab {
        MotifVocab::from_counts(self.counts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabEntry {
    pub id: u32,
    pub count: u64,
}

/// Motif signature vocabulary with dense ids assigned by descending count,
/// ties broken by signature.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MotifVocab {
    entries: BTreeMap<String, VocabEntry>,
    by_id: Vec<String>,
}

impl MotifVocab {
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let mut ranked: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut entries = BTreeMap::new();
        let mut by_id = Vec::with_capacity(ranked.len());
        for (id, (sig, count)) in ranked.into_iter().enumerate() {
            entries.insert(sig.clone(), VocabEntry { id: id as u32, count });
            by_id.push(sig);
        }
        MotifVocab { entries, by_id }
    }

    pub fn size(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn id(&self, signature: &str) -> Option<u32> {
        self.entries.get(signature).map(|e| e.id)
    }

    pub fn get(&self, signature: &str) -> Option<VocabEntry> {
        self.entries.get(signature).copied()
    }

    pub fn contains(&self, signature: &str) -> bool {
        self.entries.contains_key(signature)
    }

    /// Reserved label for motifs missing from the vocabulary.
    pub fn unk_id(&self) -> u32 {
        self.by_id.len() as u32
    }

    pub fn signature(&self, id: u32) -> Option<&str> {
        self.by_id.get(id as usize).map(String::as_str)
    }

    /// `(signature, entry)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, VocabEntry)> + '_ {
        self.by_id.iter().map(|s| (s.as_str(), self.entries[s]))
    }

    /// Writes the TSV form: header `signature\tid\tcount`, one row per entry in id order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "signature\tid\tcount")?;
        for (sig, e) in self.iter() {
            writeln!(out, "{sig}\t{}\t{}", e.id, e.count)?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self, VocabReadError> {
        let mut lines = input.lines();
        match lines.next().transpose()? {
            Some(h) if h.trim_end() == "signature\tid\tcount" => {}
            _ => {
                return Err(MotifError::VocabFormat {
                    line: 1,
                    reason: "expected header signature\\tid\\tcount".into(),
                }
                .into())
            }
        }
        let mut rows: Vec<(u32, String, u64)> = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let line_no = i + 2;
            let bad = |reason: &str| MotifError::VocabFormat {
                line: line_no,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(bad("expected 3 tab-separated fields").into());
            }
            let id: u32 = fields[1].parse().map_err(|_| bad("invalid id"))?;
            let count: u64 = fields[2].parse().map_err(|_| bad("invalid count"))?;
            if count == 0 {
                return Err(bad("count must be >= 1").into());
            }
            rows.push((id, fields[0].to_string(), count));
        }
        rows.sort();
        let mut entries = BTreeMap::new();
        let mut by_id = Vec::with_capacity(rows.len());
        for (expected, (id, sig, count)) in rows.into_iter().enumerate() {
            if id as usize != expected {
                return Err(MotifError::VocabFormat {
                    line: 0,
                    reason: format!("ids are not dense: missing {expected}"),
                }
                .into());
            }
            if entries.insert(sig.clone(), VocabEntry { id, count }).is_some() {
                return Err(MotifError::VocabFormat {
                    line: 0,
                    reason: format!("duplicate signature {sig}"),
                }
                .into());
            }
            by_id.push(sig);
        }
        Ok(MotifVocab { entries, by_id })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VocabReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] MotifError),
}

/// Decomposes every graph and counts motif signatures.
pub fn build_vocab<'a, I>(corpus: I) -> MotifVocab
where
    I: IntoIterator<Item = &'a MolGraph>,
{
    let mut counter = MotifCounter::default();
    for g in corpus {
        counter.add_graph(g);
    }
    counter.into_vocab()
}

/// Parallel [`build_vocab`]; the result does not depend on the thread count.
pub fn build_vocab_par(corpus: &[MolGraph]) -> MotifVocab {
    corpus
        .par_iter()
        .fold(MotifCounter::default, |mut c, g| {
            c.add_graph(g);
            c
        })
        .reduce(MotifCounter::default, MotifCounter::merge)
        .into_vocab()
}
