//! Mutual information, rare-label JSD and the shuffled-label control on a
//! small labeled corpus.

use molmask::infotheory::{accumulate, entropy_y, jsd_curve, mutual_information, shuffle_control, DEFAULT_TAU_GRID};
use molmask::motif::decompose;
use molmask::parse_smiles;

fn main() {
    let corpus = [
        ("c1ccccc1CCN", 1),
        ("c1ccccc1CCO", 1),
        ("c1ccc(Cl)cc1CN", 1),
        ("C1CCCCC1CCN", 0),
        ("C1CCCCC1CCO", 0),
        ("CCCCCCN", 0),
        ("c1ccncc1CO", 1),
        ("CC(C)CCO", 0),
    ];
    let mut atom_pairs = Vec::new();
    let mut motif_pairs = Vec::new();
    for (smiles, y) in corpus {
        let g = parse_smiles(smiles).unwrap();
        atom_pairs.extend(g.atoms().iter().map(|a| (a.atomic_number, y)));
        motif_pairs.extend(decompose(&g).signatures.into_iter().map(|s| (s, y)));
    }
    let atoms = accumulate(atom_pairs).unwrap();
    let motifs = accumulate(motif_pairs.clone()).unwrap();
    println!("H(Y) = {:.4} bits", entropy_y(&atoms).unwrap());
    println!("I(atom type; Y) = {:.4} bits", mutual_information(&atoms).unwrap());
    println!("I(motif; Y)     = {:.4} bits", mutual_information(&motifs).unwrap());

    let shuffled = shuffle_control(&motif_pairs, 0, 5).unwrap();
    println!("shuffled motif MI = {:.4} +/- {:.4}", shuffled.mean, shuffled.std);

    let curve = jsd_curve(&motifs, &DEFAULT_TAU_GRID);
    for ((tau, jsd), kept) in curve
        .thresholds
        .iter()
        .zip(&curve.jsd_values)
        .zip(&curve.kept_label_counts)
    {
        match jsd {
            Some(v) => println!("tau {tau:<6} labels {kept:>2} JSD {v:.4}"),
            None => println!("tau {tau:<6} labels {kept:>2} JSD undefined"),
        }
    }
}
