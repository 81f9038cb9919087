//! Heavy-atom molecular graphs built from SMILES.
//!
//! A [`MolGraph`] is immutable once constructed. Ring membership is derived at
//! construction time from bridge detection, so `Atom::in_ring` and
//! [`MolGraph::bond_in_ring`] are always consistent with the bond set.

pub mod elements;
mod parse;
mod rings;
mod write;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_smiles, SmilesError};
pub use rings::{bridges, ring_membership, RingFlags};
pub use write::to_smiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Single-character code used in signatures and SMILES output.
    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub index: usize,
    /// 0 for unknown elements, otherwise 1..=118.
    pub atomic_number: u8,
    pub aromatic: bool,
    pub formal_charge: i8,
    pub in_ring: bool,
}

impl Atom {
    pub fn symbol(&self) -> &'static str {
        elements::symbol(self.atomic_number)
    }
}

/// Element, aromaticity and charge of an atom before it is placed in a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AtomSpec {
    pub atomic_number: u8,
    pub aromatic: bool,
    pub formal_charge: i8,
}

impl AtomSpec {
    pub fn element(atomic_number: u8) -> Self {
        AtomSpec {
            atomic_number,
            ..Default::default()
        }
    }

    pub fn aromatic(atomic_number: u8) -> Self {
        AtomSpec {
            atomic_number,
            aromatic: true,
            formal_charge: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    /// Endpoints with `endpoints.0 < endpoints.1`.
    pub endpoints: (usize, usize),
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.endpoints.0 == atom {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no atoms")]
    Empty,
    #[error("atomic number {0} is out of range 0..=118")]
    AtomicNumber(u8),
    #[error("bond endpoint {index} out of range for {atoms} atoms")]
    EndpointOutOfRange { index: usize, atoms: usize },
    #[error("self-loop on atom {0}")]
    SelfLoop(usize),
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
}

/// Neighbor entry: adjacent atom and the index of the connecting bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub atom: usize,
    pub bond: usize,
}

#[derive(Clone, PartialEq)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<Neighbor>>,
    bond_in_ring: Vec<bool>,
    source_smiles: String,
}

impl fmt::Debug for MolGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MolGraph")
            .field("smiles", &self.source_smiles)
            .field("atoms", &self.atoms.len())
            .field("bonds", &self.bonds.len())
            .finish()
    }
}

impl MolGraph {
    /// Builds a graph from atom specs and bonds, validating the bond set.
    pub fn new(
        atoms: &[AtomSpec],
        bonds: &[(usize, usize, BondOrder)],
        source_smiles: impl Into<String>,
    ) -> Result<Self, GraphError> {
        if atoms.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = atoms.len();
        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        let mut out_bonds = Vec::with_capacity(bonds.len());
        for &(a, b, order) in bonds {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::EndpointOutOfRange { index, atoms: n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if adjacency[a].iter().any(|nb| nb.atom == b) {
                return Err(GraphError::DuplicateBond(a.min(b), a.max(b)));
            }
            let bond = out_bonds.len();
            adjacency[a].push(Neighbor { atom: b, bond });
            adjacency[b].push(Neighbor { atom: a, bond });
            out_bonds.push(Bond {
                endpoints: (a.min(b), a.max(b)),
                order,
            });
        }
        let mut out_atoms = Vec::with_capacity(n);
        for (index, spec) in atoms.iter().enumerate() {
            if spec.atomic_number > elements::MAX_ATOMIC_NUMBER {
                return Err(GraphError::AtomicNumber(spec.atomic_number));
            }
            out_atoms.push(Atom {
                index,
                atomic_number: spec.atomic_number,
                aromatic: spec.aromatic,
                formal_charge: spec.formal_charge,
                in_ring: false,
            });
        }
        let mut graph = MolGraph {
            atoms: out_atoms,
            bonds: out_bonds,
            adjacency,
            bond_in_ring: Vec::new(),
            source_smiles: source_smiles.into(),
        };
        let flags = rings::ring_membership(&graph);
        for (atom, flag) in graph.atoms.iter_mut().zip(&flags.atoms) {
            atom.in_ring = *flag;
        }
        graph.bond_in_ring = flags.bonds;
        Ok(graph)
    }

    /// Convenience constructor from atomic numbers and edges (non-aromatic, neutral).
    pub fn from_edges(atomic_numbers: &[u8], edges: &[(usize, usize, BondOrder)]) -> Result<Self, GraphError> {
        let specs: Vec<AtomSpec> = atomic_numbers.iter().map(|&z| AtomSpec::element(z)).collect();
        MolGraph::new(&specs, edges, "")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> &Atom {
        &self.atoms[index]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn neighbors(&self, atom: usize) -> &[Neighbor] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|nb| nb.atom == b)
            .map(|nb| &self.bonds[nb.bond])
    }

    pub fn bond_in_ring(&self, bond: usize) -> bool {
        self.bond_in_ring[bond]
    }

    pub fn source_smiles(&self) -> &str {
        &self.source_smiles
    }

    /// Single-atom graphs parse but are skipped by the analyses.
    pub fn is_singleton(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for nb in &self.adjacency[v] {
                if !seen[nb.atom] {
                    seen[nb.atom] = true;
                    count += 1;
                    stack.push(nb.atom);
                }
            }
        }
        count == self.atoms.len()
    }

    pub(crate) fn specs(&self) -> Vec<AtomSpec> {
        self.atoms
            .iter()
            .map(|a| AtomSpec {
                atomic_number: a.atomic_number,
                aromatic: a.aromatic,
                formal_charge: a.formal_charge,
            })
            .collect()
    }

    /// Returns the graph with atoms renumbered so that old atom `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> MolGraph {
        assert_eq!(perm.len(), self.atoms.len(), "permutation length");
        let specs = self.specs();
        let mut new_specs = vec![AtomSpec::default(); specs.len()];
        for (old, &new) in perm.iter().enumerate() {
            new_specs[new] = specs[old];
        }
        let edges: Vec<_> = self
            .bonds
            .iter()
            .map(|b| (perm[b.endpoints.0], perm[b.endpoints.1], b.order))
            .collect();
        MolGraph::new(&new_specs, &edges, self.source_smiles.clone()).expect("permutation of a valid graph is valid")
    }
}

/// A parsed molecule with its (possibly missing) binary task labels.
#[derive(Debug, Clone)]
pub struct LabeledRecord {
    pub graph: MolGraph,
    pub task_labels: Vec<Option<u8>>,
    pub active_task: usize,
}

impl LabeledRecord {
    pub fn new(graph: MolGraph, task_labels: Vec<Option<u8>>, active_task: usize) -> Self {
        LabeledRecord {
            graph,
            task_labels,
            active_task,
        }
    }

    /// The graph label Y, or `None` when the active task is unlabeled.
    pub fn label(&self) -> Option<u8> {
        self.task_labels.get(self.active_task).copied().flatten()
    }
}
