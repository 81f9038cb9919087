//! Draw one mask plan per strategy for the same molecule and apply it.

use molmask::masking::{apply_mask, MaskConfig, MaskSampler, Strategy};
use molmask::parse_smiles;
use molmask::rng::substream;
use molmask::scoring::{NodeScores, PageRankConfig, ScoreSource};

fn main() {
    let graphs = vec![parse_smiles("CC(=O)Nc1ccc(O)cc1C1CCNCC1").unwrap()];
    let n = graphs[0].atom_count();
    let config = MaskConfig {
        ratio: 0.3,
        seed: 42,
        ..MaskConfig::default()
    };
    // stand-in for scores produced by an external model
    let external = vec![NodeScores {
        values: (0..n).map(|i| (i as f64 * 0.37).sin().abs()).collect(),
        source: ScoreSource::External,
    }];
    println!("{} atoms, ratio {}", n, config.ratio);
    for strategy in Strategy::ALL {
        let ext = (strategy == Strategy::External).then(|| external.clone());
        let sampler = MaskSampler::prepare(strategy, &graphs, ext, &PageRankConfig::default()).unwrap();
        let plan = sampler.draw(0, n, &config, &mut substream(config.seed, 0, 0));
        let masked = apply_mask(&graphs[0], &plan).unwrap();
        println!(
            "{:<10} atoms {:?} motifs {:?} labels {:?}",
            strategy.name(),
            plan.masked_atoms,
            plan.masked_motifs,
            masked.node_labels()
        );
    }
}
