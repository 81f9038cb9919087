//! PageRank and degree scores used to rank atoms for perturbed top-k masking.

use molmask::molgraph::elements;
use molmask::parse_smiles;
use molmask::scoring::{degree_scores, pagerank, PageRankConfig};

fn main() {
    let graph = parse_smiles("CC(C)(C)c1ccc(O)cc1").unwrap();
    let pr = pagerank(&graph, &PageRankConfig::default()).unwrap();
    println!("converged: {} after {} iterations", pr.converged, pr.iterations);
    let degree = degree_scores(&graph);
    for (i, atom) in graph.atoms().iter().enumerate() {
        println!(
            "{i:>2} {:<2} degree {} pagerank {:.4}",
            elements::symbol(atom.atomic_number),
            degree.values[i],
            pr.scores.values[i]
        );
    }
}
