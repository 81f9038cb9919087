use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::motif::MotifPartition;
use crate::scoring::NodeScores;

use super::{mask_count, MaskConfig, MaskPlan, Strategy};

/// Indices of the `k` largest values, ties broken by lower index; returned ascending.
pub fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Samples `k(gamma, |V|)` distinct atoms uniformly without replacement.
pub fn uniform_mask<R: Rng + ?Sized>(n_atoms: usize, config: &MaskConfig, rng: &mut R) -> MaskPlan {
    let k = mask_count(config.ratio, n_atoms);
    let mut atoms = index::sample(rng, n_atoms, k).into_vec();
    atoms.sort_unstable();
    MaskPlan {
        masked_atoms: atoms,
        masked_motifs: Vec::new(),
        strategy: Strategy::Uniform,
    }
}

/// Perturbed top-k selection over node scores.
///
/// The top `k(gamma_i, |V|)` scored atoms form the candidate pool; every atom
/// draws `U(0, 1)` noise, candidates get `+beta`, and the `k(gamma, |V|)`
/// atoms with the largest perturbed values are masked.
pub fn perturbed_topk<R: Rng + ?Sized>(scores: &NodeScores, config: &MaskConfig, rng: &mut R) -> MaskPlan {
    let n = scores.len();
    let beta = config.beta_for(scores.source);
    let candidates = top_k(&scores.values, mask_count(config.annealed_ratio(), n));
    let mut noise: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    for &c in &candidates {
        noise[c] += beta;
    }
    MaskPlan {
        masked_atoms: top_k(&noise, mask_count(config.ratio, n)),
        masked_motifs: Vec::new(),
        strategy: Strategy::from_score_source(scores.source),
    }
}

/// Non-adjacent whole-motif masking.
///
/// Motifs are drawn uniformly from a pool; each pick removes itself and its
/// motif neighbors from the pool. The first pick is always kept; later picks
/// stop the selection when they would push the masked-atom count past
/// `k(gamma, |V|)`.
pub fn moama_mask<R: Rng + ?Sized>(partition: &MotifPartition, config: &MaskConfig, rng: &mut R) -> MaskPlan {
    let n_atoms = partition.motif_of_atom.len();
    let budget = mask_count(config.ratio, n_atoms);
    let mut pool: Vec<usize> = (0..partition.len()).collect();
    let mut selected = Vec::new();
    let mut masked = 0;
    while !pool.is_empty() {
        let motif = pool[rng.random_range(0..pool.len())];
        let size = partition.motifs[motif].len();
        if !selected.is_empty() && masked + size > budget {
            break;
        }
        selected.push(motif);
        masked += size;
        let neighbors = partition.neighbors(motif);
        pool.retain(|&m| m != motif && !neighbors.contains(&m));
    }
    selected.sort_unstable();
    let mut atoms: Vec<usize> = selected
        .iter()
        .flat_map(|&m| partition.motifs[m].iter().copied())
        .collect();
    atoms.sort_unstable();
    MaskPlan {
        masked_atoms: atoms,
        masked_motifs: selected,
        strategy: Strategy::Moama,
    }
}

fn intra_count(fraction: f64, size: usize) -> usize {
    ((fraction * size as f64 - 1e-9).ceil() as usize).clamp(1, size)
}

/// Partial-motif masking: motifs are visited in uniformly random order and
/// `ceil(fraction * |motif|)` of each visited motif's atoms are masked until
/// at least `k(gamma, |V|)` atoms are masked.
pub fn motifpred_mask<R: Rng + ?Sized>(partition: &MotifPartition, config: &MaskConfig, rng: &mut R) -> MaskPlan {
    let n_atoms = partition.motif_of_atom.len();
    let budget = mask_count(config.ratio, n_atoms);
    let mut order: Vec<usize> = (0..partition.len()).collect();
    order.shuffle(rng);
    let mut atoms = Vec::new();
    let mut motifs = Vec::new();
    for motif in order {
        if atoms.len() >= budget {
            break;
        }
        let members = &partition.motifs[motif];
        let take = intra_count(config.intra_motif_fraction, members.len());
        atoms.extend(index::sample(rng, members.len(), take).into_iter().map(|i| members[i]));
        motifs.push(motif);
    }
    atoms.sort_unstable();
    motifs.sort_unstable();
    MaskPlan {
        masked_atoms: atoms,
        masked_motifs: motifs,
        strategy: Strategy::MotifPred,
    }
}
