use rand::seq::{IndexedRandom, SliceRandom};
use rayon::prelude::*;

use crate::masking::{MaskConfig, MaskSampler};
use crate::molgraph::LabeledRecord;
use crate::rng::{stream_key, substream};

use super::{binary, mutual_information, InfoError, JointCounts, RepeatStats};

const SAMPLE_STREAM: u64 = 0x534d_504c;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledMiOptions {
    pub repeats: usize,
    pub seed: u64,
    /// Take every atom of each drawn plan (in random order) instead of one
    /// uniformly chosen member per plan.
    pub without_replacement: bool,
}

impl Default for SampledMiOptions {
    fn default() -> Self {
        SampledMiOptions {
            repeats: 5,
            seed: 0,
            without_replacement: false,
        }
    }
}

/// MI between sampled atom types and Y. For each graph, `|V|` atoms are
/// sampled through the masking strategy: each sample draws a fresh plan and
/// keeps one of its atoms uniformly. Records without a label are skipped;
/// `sampler` must be prepared on the same graphs, in order.
pub fn sampled_mi(
    records: &[LabeledRecord],
    sampler: &MaskSampler,
    config: &MaskConfig,
    options: &SampledMiOptions,
) -> Result<RepeatStats, InfoError> {
    if options.repeats == 0 {
        return Err(InfoError::NoRepeats);
    }
    let mut values = Vec::with_capacity(options.repeats);
    for r in 0..options.repeats {
        let repeat_seed = stream_key(options.seed, SAMPLE_STREAM, r as u64);
        let counts = records
            .par_iter()
            .enumerate()
            .map(|(g, rec)| sample_graph(g, rec, sampler, config, repeat_seed, options.without_replacement))
            .try_reduce(JointCounts::new, |a, b| Ok(a.merge(b)))?;
        values.push(mutual_information(&counts)?);
    }
    Ok(RepeatStats::from_values(values))
}

fn sample_graph(
    g: usize,
    rec: &LabeledRecord,
    sampler: &MaskSampler,
    config: &MaskConfig,
    repeat_seed: u64,
    without_replacement: bool,
) -> Result<JointCounts<u8>, InfoError> {
    let mut counts = JointCounts::new();
    let Some(y) = rec.label() else {
        return Ok(counts);
    };
    let y = binary(y)?;
    let graph = &rec.graph;
    let n = graph.atom_count();
    let mut rng = substream(repeat_seed, g as u64, 0);
    let mut taken = 0;
    while taken < n {
        let plan = sampler.draw(g, n, config, &mut rng);
        if plan.is_empty() {
            break;
        }
        if without_replacement {
            let mut atoms = plan.masked_atoms;
            atoms.shuffle(&mut rng);
            for &a in atoms.iter().take(n - taken) {
                counts.add(graph.atom(a).atomic_number, y);
                taken += 1;
            }
        } else {
            let &a = plan.masked_atoms.choose(&mut rng).expect("plan is non-empty");
            counts.add(graph.atom(a).atomic_number, y);
            taken += 1;
        }
    }
    Ok(counts)
}
