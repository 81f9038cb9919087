//! Labels for masked units under each target type.

use molmask::masking::{MaskConfig, MaskSampler, Strategy};
use molmask::motif::build_vocab;
use molmask::parse_smiles;
use molmask::rng::substream;
use molmask::scoring::PageRankConfig;
use molmask::targets::{argmax_targets, atom_type_targets, motif_targets, vq_targets, Codebook};

fn main() {
    let graphs = vec![
        parse_smiles("OCc1ccccc1C(=O)N").unwrap(),
        parse_smiles("c1ccccc1CCl").unwrap(),
    ];
    let vocab = build_vocab(&graphs);
    let config = MaskConfig::with_ratio(0.4);
    let n = graphs[0].atom_count();

    let sampler = MaskSampler::prepare(Strategy::MotifPred, &graphs, None, &PageRankConfig::default()).unwrap();
    let plan = sampler.draw(0, n, &config, &mut substream(7, 0, 0));
    println!("plan: atoms {:?}, motifs {:?}", plan.masked_atoms, plan.masked_motifs);

    let atom = atom_type_targets(&graphs[0], &plan);
    println!("atom_type    {:?} (space {})", atom.labels, atom.label_space_size);

    let partition = &sampler.partitions().unwrap()[0];
    let motif = motif_targets(partition, &plan, &vocab);
    println!(
        "motif_label  {:?} (space {}, unknown {})",
        motif.labels, motif.label_space_size, motif.unknown_count
    );

    // toy 3-d embeddings standing in for a tokenizer's per-atom outputs
    let embeddings: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i % 3) as f64, 1.0]).collect();
    let codebook = Codebook::new(vec![vec![0.0, 0.0, 0.0], vec![4.0, 1.0, 1.0], vec![9.0, 2.0, 1.0]]).unwrap();
    let vq = vq_targets(&plan, &embeddings, &codebook, false).unwrap();
    println!("vq_code      {:?} (space {})", vq.labels, vq.label_space_size);

    let argmax = argmax_targets(&plan, &embeddings).unwrap();
    println!("argmax_token {:?} (space {})", argmax.labels, argmax.label_space_size);
}
