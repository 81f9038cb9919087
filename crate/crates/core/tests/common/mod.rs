#![allow(dead_code)]

use molmask::molgraph::{AtomSpec, BondOrder};
use molmask::{parse_smiles, MolGraph};
use proptest::prelude::*;

/// Small drug-like and edge-case molecules shared by the integration tests.
pub const FIXTURES: &[&str] = &[
    "C",
    "CC",
    "CCO",
    "CC(=O)O",
    "C1CC1",
    "c1ccccc1",
    "c1ccncc1",
    "C1CCCCC1",
    "c1ccc2ccccc2c1",
    "C1CC1CCC1CC1",
    "CC(C)(C)c1ccc(O)cc1",
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "C#CCN(C)C",
    "OC(=O)C(N)Cc1ccccc1",
    "c1ccccc1-c1ccccc1",
    "C1CC2CCC1C2",
    "[NH4+]",
    "O=C([O-])c1ccccc1",
    "FC(F)(F)c1ccc(Cl)cc1",
    "C1=CC=CC=C1",
    "CCN(CC)CC",
    "c1ccc2[nH]ccc2c1",
    "O=S(=O)(N)c1ccc(N)cc1",
];

pub fn fixture_graphs() -> Vec<MolGraph> {
    FIXTURES
        .iter()
        .map(|s| parse_smiles(s).expect("fixture parses"))
        .collect()
}

const ELEMENTS: [u8; 7] = [6, 6, 6, 7, 8, 16, 17];

fn order(code: u8) -> BondOrder {
    match code {
        0..=2 => BondOrder::Single,
        3 => BondOrder::Double,
        4 => BondOrder::Triple,
        _ => BondOrder::Aromatic,
    }
}

/// Connected random graphs: a random tree plus a few ring-closing edges.
pub fn arb_graph(max_atoms: usize) -> impl Strategy<Value = MolGraph> {
    (1..=max_atoms)
        .prop_flat_map(|n| {
            let atoms = prop::collection::vec((0..ELEMENTS.len(), any::<bool>(), -1i8..=1), n);
            let parents: Vec<_> = (1..n).map(|i| (0..i, 0u8..6)).collect();
            let extra = prop::collection::vec((0..n, 0..n, 0u8..6), 0..=n / 2);
            (atoms, parents, extra)
        })
        .prop_map(|(atoms, parents, extra)| {
            let specs: Vec<AtomSpec> = atoms
                .iter()
                .map(|&(e, aromatic, charge)| AtomSpec {
                    atomic_number: ELEMENTS[e],
                    aromatic,
                    formal_charge: charge,
                })
                .collect();
            let mut edges: Vec<(usize, usize, BondOrder)> = parents
                .iter()
                .enumerate()
                .map(|(i, &(p, o))| (p, i + 1, order(o)))
                .collect();
            for (a, b, o) in extra {
                let key = (a.min(b), a.max(b));
                if a != b && !edges.iter().any(|&(x, y, _)| (x.min(y), x.max(y)) == key) {
                    edges.push((a, b, order(o)));
                }
            }
            MolGraph::new(&specs, &edges, "").expect("generated graph is valid")
        })
}

pub fn arb_permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Graph together with a permutation of its atoms.
pub fn arb_graph_and_perm(max_atoms: usize) -> impl Strategy<Value = (MolGraph, Vec<usize>)> {
    arb_graph(max_atoms).prop_flat_map(|g| {
        let n = g.atom_count();
        (Just(g), arb_permutation(n))
    })
}

/// Mutual information straight from the definition, accumulated in natural
/// log and converted to bits; independent of the crate's estimator.
pub fn oracle_mi(table: &[[u64; 2]]) -> f64 {
    let n: u64 = table.iter().map(|r| r[0] + r[1]).sum();
    let n = n as f64;
    let py = [0, 1].map(|y| table.iter().map(|r| r[y]).sum::<u64>() as f64 / n);
    let mut nats = 0.0;
    for row in table {
        let px = (row[0] + row[1]) as f64 / n;
        for y in 0..2 {
            let pxy = row[y] as f64 / n;
            if pxy > 0.0 {
                nats += pxy * (pxy.ln() - px.ln() - py[y].ln());
            }
        }
    }
    nats / std::f64::consts::LN_2
}

/// PageRank by a dense linear solve of `(I - alpha * M) x = (1 - alpha) p`,
/// where column j of `M` spreads node j's mass evenly over its neighbors
/// (or over all nodes when j is isolated) and `p` is uniform.
pub fn oracle_pagerank(g: &MolGraph, alpha: f64) -> Vec<f64> {
    use nalgebra::{DMatrix, DVector};
    let n = g.atom_count();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let nbs = g.neighbors(j);
        if nbs.is_empty() {
            for i in 0..n {
                m[(i, j)] = 1.0 / n as f64;
            }
        } else {
            for nb in nbs {
                m[(nb.atom, j)] += 1.0 / nbs.len() as f64;
            }
        }
    }
    let lhs = DMatrix::<f64>::identity(n, n) - m * alpha;
    let rhs = DVector::<f64>::from_element(n, (1.0 - alpha) / n as f64);
    let x = lhs.lu().solve(&rhs).expect("PageRank system is non-singular");
    x.iter().copied().collect()
}
