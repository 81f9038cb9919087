use crate::molgraph::MolGraph;

use super::{MaskError, MaskPlan};

/// Atom feature value carried by masked atoms (one past the largest element).
pub const MASK_TOKEN: u8 = 119;

/// A graph paired with the set of atoms whose features are replaced by [`MASK_TOKEN`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedGraph {
    pub graph: MolGraph,
    /// Sorted, deduplicated.
    pub masked_atoms: Vec<usize>,
    pub mask_token_applied: bool,
}

impl MaskedGraph {
    pub fn is_masked(&self, atom: usize) -> bool {
        self.masked_atoms.binary_search(&atom).is_ok()
    }

    /// Atom feature vector: atomic number, or [`MASK_TOKEN`] for masked atoms.
    pub fn node_labels(&self) -> Vec<u8> {
        self.graph
            .atoms()
            .iter()
            .map(|a| {
                if self.is_masked(a.index) {
                    MASK_TOKEN
                } else {
                    a.atomic_number
                }
            })
            .collect()
    }

    /// Masks the plan's atoms on top of the existing mask.
    pub fn apply(&self, plan: &MaskPlan) -> Result<MaskedGraph, MaskError> {
        let mut next = apply_mask(&self.graph, plan)?;
        next.masked_atoms.extend_from_slice(&self.masked_atoms);
        next.masked_atoms.sort_unstable();
        next.masked_atoms.dedup();
        next.mask_token_applied = !next.masked_atoms.is_empty();
        Ok(next)
    }
}

/// Builds the corrupted view of `graph`; `graph` itself is left untouched.
pub fn apply_mask(graph: &MolGraph, plan: &MaskPlan) -> Result<MaskedGraph, MaskError> {
    let n = graph.atom_count();
    if let Some(&index) = plan.masked_atoms.iter().find(|&&a| a >= n) {
        return Err(MaskError::OutOfRangeIndex { index, atoms: n });
    }
    let mut masked_atoms = plan.masked_atoms.clone();
    masked_atoms.sort_unstable();
    masked_atoms.dedup();
    Ok(MaskedGraph {
        graph: graph.clone(),
        mask_token_applied: !masked_atoms.is_empty(),
        masked_atoms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masking::Strategy;
    use crate::molgraph::parse_smiles;

    fn plan(atoms: Vec<usize>) -> MaskPlan {
        MaskPlan {
            masked_atoms: atoms,
            masked_motifs: Vec::new(),
            strategy: Strategy::Uniform,
        }
    }

    #[test]
    fn empty_plan_is_identity() {
        let g = parse_smiles("CCO").unwrap();
        let m = apply_mask(&g, &plan(vec![])).unwrap();
        assert!(!m.mask_token_applied);
        assert_eq!(m.node_labels(), vec![6, 6, 8]);
        assert_eq!(m.graph, g);
    }

    #[test]
    fn full_plan_masks_everything() {
        let g = parse_smiles("CCO").unwrap();
        let m = apply_mask(&g, &plan(vec![0, 1, 2])).unwrap();
        assert_eq!(m.node_labels(), vec![MASK_TOKEN; 3]);
        assert_eq!(g.atom(2).atomic_number, 8);
    }

    #[test]
    fn idempotent() {
        let g = parse_smiles("CC(=O)N").unwrap();
        let p = plan(vec![1, 3]);
        let once = apply_mask(&g, &p).unwrap();
        let twice = once.apply(&p).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn out_of_range() {
        let g = parse_smiles("CC").unwrap();
        assert!(matches!(
            apply_mask(&g, &plan(vec![2])),
            Err(MaskError::OutOfRangeIndex { index: 2, atoms: 2 })
        ));
    }
}
