use rand::Rng;
use rayon::prelude::*;

use crate::molgraph::MolGraph;
use crate::motif::{decompose, MotifPartition};
use crate::scoring::{degree_scores, pagerank, NodeScores, PageRankConfig};

use super::{moama_mask, motifpred_mask, perturbed_topk, uniform_mask, MaskConfig, MaskError, MaskPlan, Strategy};

#[derive(Debug, Clone)]
enum PerGraph {
    Nothing,
    Scores(Vec<NodeScores>),
    Partitions(Vec<MotifPartition>),
}

/// A masking strategy with its per-graph inputs (scores or motif partitions)
/// precomputed for a corpus.
#[derive(Debug, Clone)]
pub struct MaskSampler {
    strategy: Strategy,
    per_graph: PerGraph,
}

impl MaskSampler {
    pub fn uniform() -> Self {
        MaskSampler {
            strategy: Strategy::Uniform,
            per_graph: PerGraph::Nothing,
        }
    }

    /// Perturbed top-k over the given scores; the strategy follows the score source.
    pub fn from_scores(scores: Vec<NodeScores>) -> Self {
        let strategy = scores
            .first()
            .map_or(Strategy::External, |s| Strategy::from_score_source(s.source));
        MaskSampler {
            strategy,
            per_graph: PerGraph::Scores(scores),
        }
    }

    pub fn from_partitions(strategy: Strategy, partitions: Vec<MotifPartition>) -> Result<Self, MaskError> {
        if !strategy.is_motif_level() {
            return Err(MaskError::MissingInput(strategy, "node scores, not motif partitions"));
        }
        Ok(MaskSampler {
            strategy,
            per_graph: PerGraph::Partitions(partitions),
        })
    }

    /// Precomputes whatever `strategy` needs for `graphs`. `external` must be
    /// supplied for [`Strategy::External`].
    pub fn prepare(
        strategy: Strategy,
        graphs: &[MolGraph],
        external: Option<Vec<NodeScores>>,
        pagerank_config: &PageRankConfig,
    ) -> Result<Self, MaskError> {
        match strategy {
            Strategy::Uniform => Ok(Self::uniform()),
            Strategy::PageRank => {
                let scores = graphs
                    .par_iter()
                    .map(|g| pagerank(g, pagerank_config).map(|pr| pr.scores))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Self::from_scores(scores))
            }
            Strategy::Degree => Ok(Self::from_scores(graphs.iter().map(degree_scores).collect())),
            Strategy::External => {
                let scores = external.ok_or(MaskError::MissingInput(strategy, "an external score file"))?;
                if scores.len() != graphs.len() {
                    return Err(MaskError::CorpusMismatch {
                        expected: graphs.len(),
                        found: scores.len(),
                    });
                }
                for (row, (s, g)) in scores.iter().zip(graphs).enumerate() {
                    if s.len() != g.atom_count() {
                        return Err(crate::scoring::ScoringError::ShapeMismatch {
                            row,
                            expected: g.atom_count(),
                            found: s.len(),
                        }
                        .into());
                    }
                }
                Ok(MaskSampler {
                    strategy,
                    per_graph: PerGraph::Scores(scores),
                })
            }
            Strategy::Moama | Strategy::MotifPred => {
                let partitions = graphs.par_iter().map(decompose).collect();
                Self::from_partitions(strategy, partitions)
            }
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn partitions(&self) -> Option<&[MotifPartition]> {
        match &self.per_graph {
            PerGraph::Partitions(p) => Some(p),
            _ => None,
        }
    }

    /// Draws one mask plan for graph `graph_index` with `n_atoms` atoms.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        graph_index: usize,
        n_atoms: usize,
        config: &MaskConfig,
        rng: &mut R,
    ) -> MaskPlan {
        match &self.per_graph {
            PerGraph::Nothing => uniform_mask(n_atoms, config, rng),
            PerGraph::Scores(scores) => perturbed_topk(&scores[graph_index], config, rng),
            PerGraph::Partitions(parts) => match self.strategy {
                Strategy::Moama => moama_mask(&parts[graph_index], config, rng),
                _ => motifpred_mask(&parts[graph_index], config, rng),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::rng::substream;

    #[test]
    fn prepare_each_strategy() {
        let graphs: Vec<MolGraph> = ["CCO", "c1ccccc1CC"].iter().map(|s| parse_smiles(s).unwrap()).collect();
        let cfg = MaskConfig::with_ratio(0.3);
        for strategy in Strategy::ALL {
            let external = (strategy == Strategy::External).then(|| {
                graphs
                    .iter()
                    .map(|g| NodeScores {
                        values: vec![1.0; g.atom_count()],
                        source: crate::scoring::ScoreSource::External,
                    })
                    .collect()
            });
            let sampler = MaskSampler::prepare(strategy, &graphs, external, &PageRankConfig::default()).unwrap();
            assert_eq!(sampler.strategy(), strategy);
            let plan = sampler.draw(1, graphs[1].atom_count(), &cfg, &mut substream(0, 1, 0));
            assert_eq!(plan.strategy, strategy);
            assert!(!plan.is_empty());
        }
    }

    #[test]
    fn external_requires_scores() {
        let graphs = vec![parse_smiles("CCO").unwrap()];
        assert!(matches!(
            MaskSampler::prepare(Strategy::External, &graphs, None, &PageRankConfig::default()),
            Err(MaskError::MissingInput(Strategy::External, _))
        ));
        let wrong = vec![NodeScores {
            values: vec![1.0; 2],
            source: crate::scoring::ScoreSource::External,
        }];
        assert!(MaskSampler::prepare(Strategy::External, &graphs, Some(wrong), &PageRankConfig::default()).is_err());
    }
}
