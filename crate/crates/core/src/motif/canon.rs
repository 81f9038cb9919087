//! Canonical labeling of induced subgraphs.
//!
//! Colors are refined Weisfeiler-Lehman style until stable, then remaining
//! ties are broken by individualize-and-refine search. The search branches on
//! the first non-singleton color cell; each cell may offer at most
//! [`MAX_CELL_BRANCHING`] choices and the whole search at most [`MAX_LEAVES`]
//! leaves. Past either bound the signature falls back to the stable refined
//! coloring, which is still isomorphism-invariant but may merge rare
//! refinement-equivalent structures.

use std::collections::{BTreeMap, VecDeque};

use crate::molgraph::{elements, BondOrder, MolGraph};

use super::MotifError;

pub const MAX_CELL_BRANCHING: usize = 8;
pub const MAX_LEAVES: usize = 512;

/// Prefix marking a signature produced by the refined-coloring fallback.
pub const FALLBACK_PREFIX: char = '~';

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Label {
    atomic_number: u8,
    aromatic: bool,
    charge: i8,
}

struct Induced {
    labels: Vec<Label>,
    /// neighbor lists: (local index, bond order)
    adj: Vec<Vec<(usize, BondOrder)>>,
}

impl Induced {
    fn new(graph: &MolGraph, atoms: &[usize], with_charge: bool) -> Self {
        let local: BTreeMap<usize, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let labels = atoms
            .iter()
            .map(|&a| {
                let atom = graph.atom(a);
                Label {
                    atomic_number: atom.atomic_number,
                    aromatic: atom.aromatic,
                    charge: if with_charge { atom.formal_charge } else { 0 },
                }
            })
            .collect();
        let adj = atoms
            .iter()
            .map(|&a| {
                graph
                    .neighbors(a)
                    .iter()
                    .filter_map(|nb| local.get(&nb.atom).map(|&j| (j, graph.bonds()[nb.bond].order)))
                    .collect()
            })
            .collect();
        Induced { labels, adj }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn is_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == n
    }

    /// Relabels `keys` to dense ranks 0.. in sorted key order.
    fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
        let mut sorted: Vec<K> = keys.to_vec();
        sorted.sort();
        sorted.dedup();
        keys.iter()
            .map(|k| sorted.binary_search(k).expect("key present"))
            .collect()
    }

    fn initial_colors(&self) -> Vec<usize> {
        let keys: Vec<(Label, usize)> = (0..self.len()).map(|v| (self.labels[v], self.adj[v].len())).collect();
        Self::rank(&keys)
    }

    /// Refines `colors` until the number of color classes stops growing.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut classes = count_classes(&colors);
        loop {
            let keys: Vec<(usize, Vec<(BondOrder, usize)>)> = (0..self.len())
                .map(|v| {
                    let mut nbs: Vec<(BondOrder, usize)> = self.adj[v].iter().map(|&(u, o)| (o, colors[u])).collect();
                    nbs.sort();
                    (colors[v], nbs)
                })
                .collect();
            let next = Self::rank(&keys);
            let next_classes = count_classes(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }

    fn certificate(&self, colors: &[usize]) -> Certificate {
        let n = self.len();
        let mut atoms = vec![self.labels[0]; n];
        for v in 0..n {
            atoms[colors[v]] = self.labels[v];
        }
        let mut edges = Vec::new();
        for v in 0..n {
            for &(u, order) in &self.adj[v] {
                if v < u {
                    let (a, b) = (colors[v].min(colors[u]), colors[v].max(colors[u]));
                    edges.push((a, b, order));
                }
            }
        }
        edges.sort();
        Certificate { atoms, edges }
    }
}

fn count_classes(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Certificate {
    atoms: Vec<Label>,
    edges: Vec<(usize, usize, BondOrder)>,
}

enum Search {
    Found { cert: Certificate, colors: Vec<usize> },
    Exceeded,
}

struct Searcher<'a> {
    graph: &'a Induced,
    leaves: usize,
    best: Option<(Certificate, Vec<usize>)>,
}

impl Searcher<'_> {
    fn run(mut self, colors: Vec<usize>) -> Search {
        if self.descend(colors).is_err() {
            return Search::Exceeded;
        }
        let (cert, colors) = self.best.expect("at least one leaf");
        Search::Found { cert, colors }
    }

    fn descend(&mut self, colors: Vec<usize>) -> Result<(), ()> {
        let n = self.graph.len();
        if count_classes(&colors) == n {
            self.leaves += 1;
            if self.leaves > MAX_LEAVES {
                return Err(());
            }
            let cert = self.graph.certificate(&colors);
            if self.best.as_ref().is_none_or(|(b, _)| cert < *b) {
                self.best = Some((cert, colors));
            }
            return Ok(());
        }
        let mut sizes = vec![0usize; count_classes(&colors)];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).expect("non-discrete");
        if sizes[target] > MAX_CELL_BRANCHING {
            return Err(());
        }
        for v in (0..n).filter(|&v| colors[v] == target) {
            let keys: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
            let individualized = Induced::rank(&keys);
            let refined = self.graph.refine(individualized);
            self.descend(refined)?;
        }
        Ok(())
    }
}

fn label_text(label: &Label) -> String {
    let symbol = elements::symbol(label.atomic_number);
    let mut s = if label.aromatic {
        symbol.to_ascii_lowercase()
    } else {
        symbol.to_string()
    };
    if label.charge != 0 {
        s.push_str(&format!("{:+}", label.charge));
    }
    s
}

fn render(cert: &Certificate, fallback: bool) -> String {
    let mut out = String::new();
    if fallback {
        out.push(FALLBACK_PREFIX);
    }
    let atoms: Vec<String> = cert.atoms.iter().map(label_text).collect();
    out.push_str(&atoms.join("."));
    out.push('|');
    let edges: Vec<String> = cert
        .edges
        .iter()
        .map(|(a, b, o)| format!("{a}{}{b}", o.symbol()))
        .collect();
    out.push_str(&edges.join(","));
    out
}

struct Labeling {
    signature: String,
    ranks: Vec<usize>,
}

fn label(graph: &MolGraph, atoms: &[usize], with_charge: bool) -> Result<Labeling, MotifError> {
    if atoms.is_empty() {
        return Err(MotifError::EmptyAtomSet);
    }
    let mut sorted = atoms.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&a| a >= graph.atom_count()) {
        return Err(MotifError::AtomOutOfRange(bad));
    }
    let induced = Induced::new(graph, &sorted, with_charge);
    if !induced.is_connected() {
        return Err(MotifError::DisconnectedMotif);
    }
    let stable = induced.refine(induced.initial_colors());
    let searcher = Searcher {
        graph: &induced,
        leaves: 0,
        best: None,
    };
    let local_ranks = match searcher.run(stable.clone()) {
        Search::Found { cert, colors } => {
            let signature = render(&cert, false);
            return Ok(Labeling {
                signature,
                ranks: scatter(&sorted, atoms, &colors),
            });
        }
        Search::Exceeded => stable,
    };
    // fallback: labels ordered by stable color plus the color-level edge multiset
    let n = induced.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (local_ranks[v], v));
    let mut positions = vec![0usize; n];
    for (pos, &v) in order.iter().enumerate() {
        positions[v] = pos;
    }
    let atoms_by_color = order.iter().map(|&v| induced.labels[v]).collect();
    let mut edges = Vec::new();
    for v in 0..n {
        for &(u, o) in &induced.adj[v] {
            if v < u {
                let (cv, cu) = (local_ranks[v], local_ranks[u]);
                edges.push((cv.min(cu), cv.max(cu), o));
            }
        }
    }
    edges.sort();
    let cert = Certificate {
        atoms: atoms_by_color,
        edges,
    };
    Ok(Labeling {
        signature: render(&cert, true),
        ranks: scatter(&sorted, atoms, &positions),
    })
}

/// Maps local ranks (indexed by position in `sorted`) back onto the caller's atom order.
fn scatter(sorted: &[usize], atoms: &[usize], local: &[usize]) -> Vec<usize> {
    atoms
        .iter()
        .map(|a| local[sorted.binary_search(a).expect("atom in set")])
        .collect()
}

/// Canonical signature of the subgraph induced by `atoms`.
///
/// Invariant under isomorphism of the induced subgraph with respect to atomic
/// number, aromaticity and bond order. Formal charge is not part of the label.
pub fn canonical_signature(graph: &MolGraph, atoms: &[usize]) -> Result<String, MotifError> {
    label(graph, atoms, false).map(|l| l.signature)
}

/// Canonical rank of each atom in `atoms` (same order as `atoms`), with charge
/// included in the atom label. Used to order SMILES output.
///
/// # Panics
/// If `atoms` is empty, out of range, or induces a disconnected subgraph.
pub fn canonical_ranks(graph: &MolGraph, atoms: &[usize]) -> Vec<usize> {
    label(graph, atoms, true)
        .expect("canonical_ranks requires a connected non-empty atom set")
        .ranks
}
