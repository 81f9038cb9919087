use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::molgraph::{to_smiles, MolGraph};
use crate::motif::decompose;
use crate::rng::substream;
use crate::targets::{TargetKind, TargetSpec};

use super::{MaskConfig, MaskError, MaskPlan, MaskSampler, Strategy};

/// One masked view with its prediction targets; serialized as one JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewRecord {
    pub graph_index: usize,
    pub draw: usize,
    pub smiles: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub masked_atoms: Vec<usize>,
    pub masked_motifs: Vec<usize>,
    pub target_type: TargetKind,
    /// Masked atom indices, or motif indices for motif targets.
    pub target_units: Vec<usize>,
    pub targets: Vec<u32>,
    pub label_space_size: usize,
}

impl ViewRecord {
    pub fn plan(&self) -> MaskPlan {
        MaskPlan {
            masked_atoms: self.masked_atoms.clone(),
            masked_motifs: self.masked_motifs.clone(),
            strategy: self.strategy,
        }
    }
}

/// Builds `draws_per_graph` views per graph. Draw `d` of graph `g` uses
/// substream `(config.seed, g, d)`, so output is independent of thread count.
pub fn build_views(
    corpus: &[MolGraph],
    sampler: &MaskSampler,
    targets: &TargetSpec,
    config: &MaskConfig,
    draws_per_graph: usize,
) -> Result<Vec<ViewRecord>, MaskError> {
    config.validate()?;
    targets.validate()?;
    if targets.kind == TargetKind::MotifLabel && !sampler.strategy().is_motif_level() {
        return Err(MaskError::InvalidConfig(format!(
            "motif_label targets need a motif-level strategy, got {}",
            sampler.strategy()
        )));
    }
    let per_graph = corpus
        .par_iter()
        .enumerate()
        .map(|(g, graph)| {
            let own_partition;
            let partition = match sampler.partitions() {
                Some(parts) => Some(&parts[g]),
                None if targets.kind.is_motif_level() => {
                    own_partition = decompose(graph);
                    Some(&own_partition)
                }
                None => None,
            };
            let smiles = match graph.source_smiles() {
                "" => to_smiles(graph),
                s => s.to_string(),
            };
            (0..draws_per_graph)
                .map(|d| {
                    let mut rng = substream(config.seed, g as u64, d as u64);
                    let plan = sampler.draw(g, graph.atom_count(), config, &mut rng);
                    let assignment = targets.assign(g, graph, partition, &plan)?;
                    Ok(ViewRecord {
                        graph_index: g,
                        draw: d,
                        smiles: smiles.clone(),
                        strategy: plan.strategy,
                        seed: config.seed,
                        masked_atoms: plan.masked_atoms,
                        masked_motifs: plan.masked_motifs,
                        target_type: targets.kind,
                        target_units: assignment.unit_ids,
                        targets: assignment.labels,
                        label_space_size: assignment.label_space_size,
                    })
                })
                .collect::<Result<Vec<_>, MaskError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_graph.into_iter().flatten().collect())
}

pub fn write_views<W: Write>(records: &[ViewRecord], out: W) -> Result<(), MaskError> {
    let mut out = BufWriter::new(out);
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| MaskError::Io(e.into()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_views<R: BufRead>(input: R) -> Result<Vec<ViewRecord>, MaskError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|source| MaskError::Json { line: i + 1, source })?);
    }
    Ok(records)
}

/// Writes the views of [`build_views`] to `path` as JSONL; returns the line count.
pub fn export_views(
    corpus: &[MolGraph],
    sampler: &MaskSampler,
    targets: &TargetSpec,
    config: &MaskConfig,
    draws_per_graph: usize,
    path: impl AsRef<Path>,
) -> Result<usize, MaskError> {
    let records = build_views(corpus, sampler, targets, config, draws_per_graph)?;
    write_views(&records, File::create(path)?)?;
    Ok(records.len())
}

/// Reads a JSONL file written by [`export_views`].
pub fn load_views(path: impl AsRef<Path>) -> Result<Vec<ViewRecord>, MaskError> {
    read_views(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::motif::build_vocab;
    use crate::scoring::PageRankConfig;

    fn corpus() -> Vec<MolGraph> {
        ["CCO", "c1ccccc1CC(=O)N"]
            .iter()
            .map(|s| parse_smiles(s).unwrap())
            .collect()
    }

    #[test]
    fn one_line_per_draw_and_round_trip() {
        let graphs = corpus();
        let cfg = MaskConfig::with_ratio(0.3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("views.jsonl");
        let n = export_views(
            &graphs,
            &MaskSampler::uniform(),
            &TargetSpec::atom_type(),
            &cfg,
            1,
            &path,
        )
        .unwrap();
        assert_eq!(n, 2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);

        let back = load_views(&path).unwrap();
        let again = build_views(&graphs, &MaskSampler::uniform(), &TargetSpec::atom_type(), &cfg, 1).unwrap();
        assert_eq!(back, again);
        for r in &back {
            let mut rng = substream(cfg.seed, r.graph_index as u64, r.draw as u64);
            let plan = MaskSampler::uniform().draw(r.graph_index, graphs[r.graph_index].atom_count(), &cfg, &mut rng);
            assert_eq!(r.plan(), plan);
        }
    }

    #[test]
    fn byte_identical_reruns() {
        let graphs = corpus();
        let cfg = MaskConfig {
            seed: 9,
            ..MaskConfig::with_ratio(0.3)
        };
        let sampler = MaskSampler::prepare(Strategy::PageRank, &graphs, None, &PageRankConfig::default()).unwrap();
        let render = || {
            let mut buf = Vec::new();
            let views = build_views(&graphs, &sampler, &TargetSpec::atom_type(), &cfg, 3).unwrap();
            write_views(&views, &mut buf).unwrap();
            buf
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn motif_targets_need_motif_strategy() {
        let graphs = corpus();
        let spec = TargetSpec::motif_label(build_vocab(&graphs));
        let cfg = MaskConfig::with_ratio(0.3);
        assert!(matches!(
            build_views(&graphs, &MaskSampler::uniform(), &spec, &cfg, 1),
            Err(MaskError::InvalidConfig(_))
        ));
        let sampler = MaskSampler::prepare(Strategy::MotifPred, &graphs, None, &PageRankConfig::default()).unwrap();
        let views = build_views(&graphs, &sampler, &spec, &cfg, 2).unwrap();
        assert_eq!(views.len(), 4);
        for v in views {
            assert_eq!(v.target_units, v.masked_motifs);
            assert!(v.targets.iter().all(|&t| (t as usize) < v.label_space_size));
        }
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = read_views("\n{not json}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MaskError::Json { line: 2, .. }));
    }
}
