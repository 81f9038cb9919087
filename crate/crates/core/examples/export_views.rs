//! Export masked views with motif-label targets as JSON lines and read them back.

use molmask::masking::{export_views, load_views, MaskConfig, MaskSampler, Strategy};
use molmask::motif::build_vocab;
use molmask::parse_smiles;
use molmask::scoring::PageRankConfig;
use molmask::targets::TargetSpec;

fn main() {
    let graphs: Vec<_> = ["c1ccccc1CC(=O)O", "C1CCNCC1CCc1ccccc1"]
        .iter()
        .map(|s| parse_smiles(s).unwrap())
        .collect();
    let sampler = MaskSampler::prepare(Strategy::Moama, &graphs, None, &PageRankConfig::default()).unwrap();
    let targets = TargetSpec::motif_label(build_vocab(&graphs));
    let config = MaskConfig {
        ratio: 0.5,
        seed: 1,
        ..MaskConfig::default()
    };
    let path = std::env::temp_dir().join("molmask_views.jsonl");
    let lines = export_views(&graphs, &sampler, &targets, &config, 2, &path).unwrap();
    println!("wrote {lines} views to {}", path.display());
    print!("{}", std::fs::read_to_string(&path).unwrap());
    let views = load_views(&path).unwrap();
    println!("read back {} views; first plan {:?}", views.len(), views[0].plan());
}
