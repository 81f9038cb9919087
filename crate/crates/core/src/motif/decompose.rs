use std::collections::BTreeSet;

use crate::molgraph::{BondOrder, MolGraph};

use super::{canonical_signature, MotifVocab};

/// Disjoint cover of a graph's atoms by connected motifs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifPartition {
    /// Atom sets, each sorted; motifs are ordered by their smallest atom index.
    pub motifs: Vec<Vec<usize>>,
    pub motif_of_atom: Vec<usize>,
    pub signatures: Vec<String>,
    /// Vocabulary id per motif; `None` until [`MotifPartition::assign_vocab`]
    /// is called or when the signature is not in the vocabulary.
    pub vocab_ids: Vec<Option<u32>>,
    /// Bonds removed by the decomposition rule.
    pub cut_bonds: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

/// Bonds removed by the decomposition rule: acyclic single bonds with at
/// least one ring endpoint, and acyclic single bonds whose endpoints both
/// have degree >= 2.
pub fn cut_bonds(graph: &MolGraph) -> Vec<usize> {
    graph
        .bonds()
        .iter()
        .enumerate()
        .filter(|&(i, bond)| {
            if bond.order != BondOrder::Single || graph.bond_in_ring(i) {
                return false;
            }
            let (a, b) = bond.endpoints;
            let ring_end = graph.atom(a).in_ring || graph.atom(b).in_ring;
            let internal = graph.degree(a) >= 2 && graph.degree(b) >= 2;
            ring_end || internal
        })
        .map(|(i, _)| i)
        .collect()
}

/// Splits `graph` into motifs: the connected components left after removing
/// [`cut_bonds`].
pub fn decompose(graph: &MolGraph) -> MotifPartition {
    let n = graph.atom_count();
    let cuts = cut_bonds(graph);
    let mut is_cut = vec![false; graph.bond_count()];
    for &c in &cuts {
        is_cut[c] = true;
    }
    let mut motif_of_atom = vec![usize::MAX; n];
    let mut motifs: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if motif_of_atom[root] != usize::MAX {
            continue;
        }
        let id = motifs.len();
        let mut members = vec![root];
        motif_of_atom[root] = id;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for nb in graph.neighbors(v) {
                if !is_cut[nb.bond] && motif_of_atom[nb.atom] == usize::MAX {
                    motif_of_atom[nb.atom] = id;
                    members.push(nb.atom);
                    stack.push(nb.atom);
                }
            }
        }
        members.sort_unstable();
        motifs.push(members);
    }
    let signatures = motifs
        .iter()
        .map(|m| canonical_signature(graph, m).expect("motif components are connected"))
        .collect();
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); motifs.len()];
    for &c in &cuts {
        let (a, b) = graph.bonds()[c].endpoints;
        let (ma, mb) = (motif_of_atom[a], motif_of_atom[b]);
        adjacency[ma].insert(mb);
        adjacency[mb].insert(ma);
    }
    let vocab_ids = vec![None; motifs.len()];
    MotifPartition {
        motifs,
        motif_of_atom,
        signatures,
        vocab_ids,
        cut_bonds: cuts,
        adjacency: adjacency.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

impl MotifPartition {
    pub fn len(&self) -> usize {
        self.motifs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motifs.is_empty()
    }

    /// Motifs sharing a cut bond with `motif`, ascending.
    pub fn neighbors(&self, motif: usize) -> &[usize] {
        &self.adjacency[motif]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Looks every signature up in `vocab`; unknown motifs stay `None`.
    pub fn assign_vocab(&mut self, vocab: &MotifVocab) {
        self.vocab_ids = self.signatures.iter().map(|s| vocab.id(s)).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn sizes(smiles: &str) -> Vec<usize> {
        let p = decompose(&parse_smiles(smiles).unwrap());
        p.motifs.iter().map(Vec::len).collect()
    }

    #[test]
    fn chain_with_terminal_bonds_is_one_motif() {
        assert_eq!(sizes("CCO"), vec![3]);
    }

    #[test]
    fn ring_and_pendant() {
        let p = decompose(&parse_smiles("C1CCCCC1C").unwrap());
        assert_eq!(p.motifs, vec![vec![0, 1, 2, 3, 4, 5], vec![6]]);
        assert_eq!(p.neighbors(0), &[1]);
    }

    #[test]
    fn two_rings_and_linker() {
        // ring-chain bonds are cut, and so is the linker's internal C-C bond
        // (both endpoints have degree 2)
        let p = decompose(&parse_smiles("C1CC1CCC1CC1").unwrap());
        assert_eq!(p.motifs, vec![vec![0, 1, 2], vec![3], vec![4], vec![5, 6, 7]]);
        assert_eq!(p.signatures[0], p.signatures[3]);
        assert_eq!(p.neighbors(1), &[0, 2]);
    }

    #[test]
    fn double_bonds_are_never_cut() {
        // C=C between two degree-2 atoms stays inside a motif
        assert_eq!(sizes("CC=CC"), vec![4]);
        assert_eq!(sizes("CCC=CCC"), vec![2, 2, 2]);
        assert_eq!(sizes("C1CC1=C"), vec![4]);
    }

    #[test]
    fn fused_rings_stay_together() {
        assert_eq!(sizes("c1ccc2ccccc2c1"), vec![10]);
        assert_eq!(sizes("c1ccccc1c1ccccc1"), vec![6, 6]);
    }

    #[test]
    fn single_atom() {
        let p = decompose(&parse_smiles("C").unwrap());
        assert_eq!(p.len(), 1);
        assert!(p.cut_bonds.is_empty());
    }
}
