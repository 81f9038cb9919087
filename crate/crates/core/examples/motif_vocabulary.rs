//! Split molecules into motifs, build a vocabulary and measure how well it
//! covers a second corpus.

use molmask::motif::{build_vocab, coverage, decompose};
use molmask::{parse_smiles, MolGraph};

fn graphs(smiles: &[&str]) -> Vec<MolGraph> {
    smiles.iter().map(|s| parse_smiles(s).expect("valid SMILES")).collect()
}

fn main() {
    let pretrain = graphs(&[
        "c1ccccc1CCN",
        "c1ccccc1C(=O)O",
        "C1CCCCC1CCO",
        "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    ]);
    for g in &pretrain {
        let p = decompose(g);
        println!("{}: {} motifs", g.source_smiles(), p.len());
        for (atoms, sig) in p.motifs.iter().zip(&p.signatures) {
            println!("  {atoms:?} {sig}");
        }
    }

    let vocab = build_vocab(&pretrain);
    println!("\nvocabulary ({} entries, UNK id {}):", vocab.size(), vocab.unk_id());
    let mut tsv = Vec::new();
    vocab.write_tsv(&mut tsv).unwrap();
    print!("{}", String::from_utf8(tsv).unwrap());

    let downstream = graphs(&["c1ccccc1CCO", "c1ccncc1C(=O)O"]);
    let stats = coverage(&vocab, &downstream).unwrap();
    println!(
        "\ncoverage: overlap {:.2}, r(G) = {:?}, mean {:.2}",
        stats.overlap_ratio,
        stats.per_graph_r,
        stats.mean_r()
    );
}
