use serde::Serialize;

use super::{InfoError, JointCounts};

/// Frequency thresholds for JSD curves, descending.
pub const DEFAULT_TAU_GRID: [f64; 9] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001];

/// Class-conditional label distributions restricted to the rare-label set
/// `S_tau = {x : P(x) < tau}`; `tau >= 1` keeps every label.
#[derive(Debug, Clone, PartialEq)]
pub struct LowFreqConditionals<L> {
    pub labels: Vec<L>,
    pub given_y0: Vec<f64>,
    pub given_y1: Vec<f64>,
}

fn rare_labels<L: Ord>(counts: &JointCounts<L>, tau: f64) -> Vec<(&L, [u64; 2])> {
    let n = counts.total() as f64;
    counts
        .iter()
        .filter(|(_, c)| tau >= 1.0 || ((c[0] + c[1]) as f64) / n < tau)
        .collect()
}

pub fn low_freq_conditionals<L: Ord + Clone>(
    counts: &JointCounts<L>,
    tau: f64,
) -> Result<LowFreqConditionals<L>, InfoError> {
    if counts.is_empty() {
        return Err(InfoError::EmptyCounts);
    }
    let kept = rare_labels(counts, tau);
    let mass = kept
        .iter()
        .fold([0u64; 2], |acc, (_, c)| [acc[0] + c[0], acc[1] + c[1]]);
    if mass[0] == 0 || mass[1] == 0 {
        return Err(InfoError::EmptySupport { tau });
    }
    Ok(LowFreqConditionals {
        labels: kept.iter().map(|(x, _)| (*x).clone()).collect(),
        given_y0: kept.iter().map(|(_, c)| c[0] as f64 / mass[0] as f64).collect(),
        given_y1: kept.iter().map(|(_, c)| c[1] as f64 / mass[1] as f64).collect(),
    })
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).log2())
        .sum()
}

/// Jensen-Shannon divergence in bits of two distributions over the same
/// support; lies in [0, 1].
///
/// Panics if the slices differ in length.
pub fn jsd(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "jsd needs distributions over the same support");
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    (0.5 * kl_to_mixture(p, &m) + 0.5 * kl_to_mixture(q, &m)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsdCurve {
    pub thresholds: Vec<f64>,
    /// `None` where a class has no mass on `S_tau`.
    pub jsd_values: Vec<Option<f64>>,
    pub kept_label_counts: Vec<usize>,
}

pub fn jsd_curve<L: Ord + Clone>(counts: &JointCounts<L>, thresholds: &[f64]) -> JsdCurve {
    let mut curve = JsdCurve {
        thresholds: thresholds.to_vec(),
        jsd_values: Vec::with_capacity(thresholds.len()),
        kept_label_counts: Vec::with_capacity(thresholds.len()),
    };
    for &tau in thresholds {
        curve.kept_label_counts.push(if counts.is_empty() {
            0
        } else {
            rare_labels(counts, tau).len()
        });
        curve.jsd_values.push(
            low_freq_conditionals(counts, tau)
                .ok()
                .map(|c| jsd(&c.given_y1, &c.given_y0)),
        );
    }
    curve
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> JointCounts<char> {
        // P(a)=0.6, P(b)=0.3, P(c)=0.1
        let mut c = JointCounts::new();
        c.add_n('a', false, 30);
        c.add_n('a', true, 30);
        c.add_n('b', false, 25);
        c.add_n('b', true, 5);
        c.add_n('c', true, 10);
        c
    }

    #[test]
    fn restricted_conditionals() {
        let all = low_freq_conditionals(&toy(), 1.0).unwrap();
        assert_eq!(all.labels, vec!['a', 'b', 'c']);
        assert_eq!(all.given_y0, vec![30.0 / 55.0, 25.0 / 55.0, 0.0]);
        assert_eq!(all.given_y1, vec![30.0 / 45.0, 5.0 / 45.0, 10.0 / 45.0]);

        let rare = low_freq_conditionals(&toy(), 0.5).unwrap();
        assert_eq!(rare.labels, vec!['b', 'c']);
        assert_eq!(rare.given_y0, vec![1.0, 0.0]);
        assert_eq!(rare.given_y1, vec![5.0 / 15.0, 10.0 / 15.0]);

        // only c is rarer than 0.2 and it never occurs with y = 0
        assert_eq!(
            low_freq_conditionals(&toy(), 0.2),
            Err(InfoError::EmptySupport { tau: 0.2 })
        );
        assert!(low_freq_conditionals(&toy(), 0.05).is_err());
    }

    #[test]
    fn jsd_reference_values() {
        assert_eq!(jsd(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        assert_eq!(jsd(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        let m = [0.7, 0.3];
        let kl = |p: [f64; 2]| p[0] * (p[0] / m[0]).log2() + p[1] * (p[1] / m[1]).log2();
        let expected = 0.5 * kl([0.5, 0.5]) + 0.5 * kl([0.9, 0.1]);
        assert!((jsd(&[0.5, 0.5], &[0.9, 0.1]) - expected).abs() < 1e-15);
    }

    #[test]
    fn curve_marks_undefined_points() {
        let curve = jsd_curve(&toy(), &DEFAULT_TAU_GRID);
        assert_eq!(curve.kept_label_counts[..3], [3, 2, 1]);
        assert!(curve.jsd_values[0].is_some());
        assert!(curve.jsd_values[1].is_some());
        assert!(curve.jsd_values[2..].iter().all(Option::is_none));
        let full = low_freq_conditionals(&toy(), 1.0).unwrap();
        assert_eq!(curve.jsd_values[0], Some(jsd(&full.given_y1, &full.given_y0)));
    }

    #[test]
    fn single_label_defined_only_at_full_threshold() {
        let mut c = JointCounts::new();
        c.add_n(6u8, false, 4);
        c.add_n(6u8, true, 4);
        let curve = jsd_curve(&c, &DEFAULT_TAU_GRID);
        assert_eq!(curve.jsd_values[0], Some(0.0));
        assert!(curve.jsd_values[1..].iter().all(Option::is_none));
    }
}
