//! Parse SMILES into heavy-atom graphs and print ring membership and a
//! canonical SMILES for each.

use molmask::molgraph::{elements, to_smiles};
use molmask::parse_smiles;

fn main() {
    let inputs = [
        "CC(=O)Oc1ccccc1C(=O)O",
        "C1CC2CCCCC2CC1",
        "[NH4+]",
        "c1ccccc1-c1ccccc1",
        "C1CC",
    ];
    for smiles in inputs {
        let graph = match parse_smiles(smiles) {
            Ok(g) => g,
            Err(e) => {
                println!("{smiles}: rejected ({e})");
                continue;
            }
        };
        let ring_atoms = graph.atoms().iter().filter(|a| a.in_ring).count();
        let ring_bonds = (0..graph.bond_count()).filter(|&b| graph.bond_in_ring(b)).count();
        println!(
            "{smiles}: {} atoms, {} bonds, {ring_atoms} ring atoms, {ring_bonds} ring bonds, canonical {}",
            graph.atom_count(),
            graph.bond_count(),
            to_smiles(&graph)
        );
        let symbols: Vec<&str> = graph
            .atoms()
            .iter()
            .map(|a| elements::symbol(a.atomic_number))
            .collect();
        println!("  atoms: {}", symbols.join(" "));
    }
}
