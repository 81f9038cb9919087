//! Plug-in information measures between local labels X and a binary graph
//! label Y. All logarithms are base 2.

mod divergence;
mod sampled;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::Serialize;
use thiserror::Error;

use crate::rng::substream;

pub use divergence::{jsd, jsd_curve, low_freq_conditionals, JsdCurve, LowFreqConditionals, DEFAULT_TAU_GRID};
pub use sampled::{sampled_mi, SampledMiOptions};

#[derive(Debug, Error, PartialEq)]
pub enum InfoError {
    #[error("no (x, y) pairs were counted")]
    EmptyCounts,
    #[error("no label has frequency below tau = {tau} under both classes")]
    EmptySupport { tau: f64 },
    #[error("graph label {0} is not binary")]
    NonBinaryLabel(u8),
    #[error("repeats must be at least 1")]
    NoRepeats,
}

/// Contingency table of (local label, binary graph label) counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCounts<L: Ord> {
    cells: BTreeMap<L, [u64; 2]>,
    total: u64,
}

impl<L: Ord> Default for JointCounts<L> {
    fn default() -> Self {
        JointCounts {
            cells: BTreeMap::new(),
            total: 0,
        }
    }
}

impl<L: Ord> JointCounts<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: L, y: bool) {
        self.add_n(x, y, 1);
    }

    pub fn add_n(&mut self, x: L, y: bool, n: u64) {
        if n == 0 {
            return;
        }
        self.cells.entry(x).or_default()[usize::from(y)] += n;
        self.total += n;
    }

    /// Commutative and associative; equals counting the concatenated streams.
    pub fn merge(mut self, other: JointCounts<L>) -> JointCounts<L> {
        for (x, [n0, n1]) in other.cells {
            let cell = self.cells.entry(x).or_default();
            cell[0] += n0;
            cell[1] += n1;
        }
        self.total += other.total;
        self
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, x: &L, y: bool) -> u64 {
        self.cells.get(x).map_or(0, |c| c[usize::from(y)])
    }

    pub fn label_count(&self) -> usize {
        self.cells.len()
    }

    /// `(x, [n(x, 0), n(x, 1)])` in label order.
    pub fn iter(&self) -> impl Iterator<Item = (&L, [u64; 2])> + '_ {
        self.cells.iter().map(|(x, c)| (x, *c))
    }

    pub fn y_counts(&self) -> [u64; 2] {
        self.cells
            .values()
            .fold([0, 0], |acc, c| [acc[0] + c[0], acc[1] + c[1]])
    }
}

/// Counts a stream of `(x, y)` pairs; `y` must be 0 or 1.
pub fn accumulate<L: Ord, I: IntoIterator<Item = (L, u8)>>(records: I) -> Result<JointCounts<L>, InfoError> {
    let mut counts = JointCounts::new();
    for (x, y) in records {
        counts.add(x, binary(y)?);
    }
    Ok(counts)
}

pub(crate) fn binary(y: u8) -> Result<bool, InfoError> {
    match y {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(InfoError::NonBinaryLabel(other)),
    }
}

fn plogp_sum<I: IntoIterator<Item = u64>>(counts: I, total: u64) -> f64 {
    let n = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Plug-in I(X;Y) in bits, clamped at 0 against rounding.
pub fn mutual_information<L: Ord>(counts: &JointCounts<L>) -> Result<f64, InfoError> {
    if counts.is_empty() {
        return Err(InfoError::EmptyCounts);
    }
    let n = counts.total as f64;
    let ny = counts.y_counts();
    let mut mi = 0.0;
    for (_, cell) in counts.iter() {
        let nx = (cell[0] + cell[1]) as f64;
        for y in 0..2 {
            if cell[y] > 0 {
                let nxy = cell[y] as f64;
                mi += nxy / n * (nxy * n / (nx * ny[y] as f64)).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

pub fn entropy_y<L: Ord>(counts: &JointCounts<L>) -> Result<f64, InfoError> {
    if counts.is_empty() {
        return Err(InfoError::EmptyCounts);
    }
    Ok(plogp_sum(counts.y_counts(), counts.total))
}

pub fn entropy_x<L: Ord>(counts: &JointCounts<L>) -> Result<f64, InfoError> {
    if counts.is_empty() {
        return Err(InfoError::EmptyCounts);
    }
    Ok(plogp_sum(counts.iter().map(|(_, c)| c[0] + c[1]), counts.total))
}

/// Mean and population standard deviation (ddof = 0) over repeats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatStats {
    pub mean: f64,
    pub std: f64,
    pub values: Vec<f64>,
}

impl RepeatStats {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        RepeatStats {
            mean,
            std: var.sqrt(),
            values,
        }
    }
}

const SHUFFLE_STREAM: u64 = 0x5348_5546;

/// MI after permuting the local labels across all pairs with Y held fixed,
/// once per repeat. Repeat `r` shuffles with substream `(seed, r)`.
pub fn shuffle_control<L: Ord>(pairs: &[(L, u8)], seed: u64, repeats: usize) -> Result<RepeatStats, InfoError> {
    if repeats == 0 {
        return Err(InfoError::NoRepeats);
    }
    if pairs.is_empty() {
        return Err(InfoError::EmptyCounts);
    }
    let ys = pairs.iter().map(|(_, y)| binary(*y)).collect::<Result<Vec<_>, _>>()?;
    let original: Vec<&L> = pairs.iter().map(|(x, _)| x).collect();
    let mut values = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut xs = original.clone();
        xs.shuffle(&mut substream(seed, SHUFFLE_STREAM, r as u64));
        let mut counts = JointCounts::new();
        for (x, &y) in xs.into_iter().zip(&ys) {
            counts.add(x, y);
        }
        values.push(mutual_information(&counts)?);
    }
    Ok(RepeatStats::from_values(values))
}
