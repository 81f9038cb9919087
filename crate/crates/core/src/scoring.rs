//! Node-importance scores consumed by perturbed top-k masking.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::MolGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreSource {
    PageRank,
    Degree,
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeScores {
    pub values: Vec<f64>,
    pub source: ScoreSource,
}

impl NodeScores {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("PageRank did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize, last: NodeScores },
    #[error("score row {row}: expected {expected} values, found {found}")]
    ShapeMismatch { row: usize, expected: usize, found: usize },
    #[error("score row {row}, column {column}: non-finite value {value:?}")]
    NonFiniteScore { row: usize, column: usize, value: String },
    #[error("score row {row}, column {column}: cannot parse {value:?}")]
    Parse { row: usize, column: usize, value: String },
    #[error("invalid PageRank parameters: {0}")]
    InvalidParams(&'static str),
    #[error("reading scores: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankConfig {
    /// Damping factor in (0, 1).
    pub alpha: f64,
    /// Convergence threshold on the L1 change between iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            alpha: 0.85,
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub scores: NodeScores,
    pub iterations: usize,
    pub converged: bool,
}

impl PageRank {
    /// Returns the scores, or `NoConvergence` carrying the last iterate.
    pub fn into_converged(self) -> Result<NodeScores, ScoringError> {
        if self.converged {
            Ok(self.scores)
        } else {
            Err(ScoringError::NoConvergence {
                iterations: self.iterations,
                last: self.scores,
            })
        }
    }
}

/// PageRank by power iteration with a uniform teleport vector.
///
/// Each step moves mass from a node to its neighbors in equal shares
/// (`x' = alpha * A D^-1 x + (1 - alpha) p`), which is the random-walk update
/// `x'^T = alpha * x^T D^-1 A + (1 - alpha) p^T` written for column vectors.
/// Mass on isolated nodes is teleported. Stops once the L1 change drops below
/// `tol`; the result is renormalized to sum to 1.
pub fn pagerank(graph: &MolGraph, config: &PageRankConfig) -> Result<PageRank, ScoringError> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(ScoringError::InvalidParams("alpha must lie in (0, 1)"));
    }
    if config.tol.is_nan() || config.tol <= 0.0 || config.max_iter == 0 {
        return Err(ScoringError::InvalidParams("tol must be > 0 and max_iter >= 1"));
    }
    let n = graph.atom_count();
    let uniform = 1.0 / n as f64;
    if n == 1 {
        return Ok(PageRank {
            scores: NodeScores {
                values: vec![1.0],
                source: ScoreSource::PageRank,
            },
            iterations: 0,
            converged: true,
        });
    }
    let degree: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64).collect();
    let mut x = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&v| degree[v] == 0.0).map(|v| x[v]).sum();
        let base = (1.0 - config.alpha) * uniform + config.alpha * dangling * uniform;
        next.iter_mut().for_each(|y| *y = base);
        for v in 0..n {
            if degree[v] > 0.0 {
                let share = config.alpha * x[v] / degree[v];
                for nb in graph.neighbors(v) {
                    next[nb.atom] += share;
                }
            }
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if delta < config.tol {
            converged = true;
            break;
        }
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    Ok(PageRank {
        scores: NodeScores {
            values: x,
            source: ScoreSource::PageRank,
        },
        iterations,
        converged,
    })
}

pub fn degree_scores(graph: &MolGraph) -> NodeScores {
    NodeScores {
        values: (0..graph.atom_count()).map(|v| graph.degree(v) as f64).collect(),
        source: ScoreSource::Degree,
    }
}

/// Reads externally produced per-atom scores: one CSV row per graph in corpus
/// order, comma-separated floats, one value per atom.
pub fn load_external_scores(path: impl AsRef<Path>, atom_counts: &[usize]) -> Result<Vec<NodeScores>, ScoringError> {
    let file = File::open(path)?;
    parse_external_scores(BufReader::new(file), atom_counts)
}

pub fn parse_external_scores<R: BufRead>(input: R, atom_counts: &[usize]) -> Result<Vec<NodeScores>, ScoringError> {
    let mut out = Vec::with_capacity(atom_counts.len());
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = out.len();
        let Some(&expected) = atom_counts.get(row) else {
            return Err(ScoringError::ShapeMismatch {
                row,
                expected: 0,
                found: line.split(',').count(),
            });
        };
        let mut values = Vec::with_capacity(expected);
        for (column, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| ScoringError::Parse {
                row,
                column,
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(ScoringError::NonFiniteScore {
                    row,
                    column,
                    value: field.to_string(),
                });
            }
            values.push(value);
        }
        if values.len() != expected {
            return Err(ScoringError::ShapeMismatch {
                row,
                expected,
                found: values.len(),
            });
        }
        out.push(NodeScores {
            values,
            source: ScoreSource::External,
        });
    }
    if out.len() != atom_counts.len() {
        return Err(ScoringError::ShapeMismatch {
            row: out.len(),
            expected: atom_counts.get(out.len()).copied().unwrap_or(0),
            found: 0,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{parse_smiles, BondOrder};

    fn star(leaves: usize) -> MolGraph {
        let z = vec![6u8; leaves + 1];
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i, BondOrder::Single)).collect();
        MolGraph::from_edges(&z, &edges).unwrap()
    }

    fn cycle(n: usize) -> MolGraph {
        let z = vec![6u8; n];
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, BondOrder::Single)).collect();
        MolGraph::from_edges(&z, &edges).unwrap()
    }

    #[test]
    fn single_node_and_pair() {
        let pr = pagerank(&parse_smiles("C").unwrap(), &PageRankConfig::default()).unwrap();
        assert_eq!(pr.scores.values, vec![1.0]);
        let pr = pagerank(&parse_smiles("CC").unwrap(), &PageRankConfig::default()).unwrap();
        assert!(pr.converged);
        for v in pr.scores.values {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn star_center_dominates() {
        let pr = pagerank(&star(4), &PageRankConfig::default()).unwrap();
        let s = pr.scores.values;
        assert!(s[1..].iter().all(|&leaf| s[0] > leaf));
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_convergence_is_reported() {
        let cfg = PageRankConfig {
            max_iter: 1,
            ..Default::default()
        };
        let pr = pagerank(&star(4), &cfg).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 1);
        match pr.into_converged() {
            Err(ScoringError::NoConvergence { iterations: 1, last }) => assert_eq!(last.len(), 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_alpha() {
        let cfg = PageRankConfig {
            alpha: 1.0,
            ..Default::default()
        };
        assert!(matches!(pagerank(&star(2), &cfg), Err(ScoringError::InvalidParams(_))));
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_scores(&star(4)).values, vec![4.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(degree_scores(&cycle(6)).values, vec![2.0; 6]);
        assert_eq!(degree_scores(&parse_smiles("CCO").unwrap()).values, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn external_scores() {
        let s = parse_external_scores("0.1,0.9\n".as_bytes(), &[2]).unwrap();
        assert_eq!(s[0].values, vec![0.1, 0.9]);
        assert_eq!(s[0].source, ScoreSource::External);
        assert!(matches!(
            parse_external_scores("0.1,0.9,0.3\n".as_bytes(), &[2]),
            Err(ScoringError::ShapeMismatch {
                row: 0,
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(
            parse_external_scores("0.1,nan\n".as_bytes(), &[2]),
            Err(ScoringError::NonFiniteScore { row: 0, column: 1, .. })
        ));
        assert!(matches!(
            parse_external_scores("0.1,x\n".as_bytes(), &[2]),
            Err(ScoringError::Parse { .. })
        ));
        assert!(matches!(
            parse_external_scores("0.1,0.2\n".as_bytes(), &[2, 3]),
            Err(ScoringError::ShapeMismatch { row: 1, .. })
        ));
        assert!(matches!(
            parse_external_scores("0.1,0.2\n1\n".as_bytes(), &[2]),
            Err(ScoringError::ShapeMismatch { row: 1, .. })
        ));
    }
}
