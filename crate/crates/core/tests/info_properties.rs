mod common;

use common::oracle_mi;
use molmask::infotheory::{
    accumulate, entropy_x, entropy_y, jsd, jsd_curve, low_freq_conditionals, mutual_information, JointCounts,
    DEFAULT_TAU_GRID,
};
use proptest::prelude::*;

fn arb_pairs() -> impl Strategy<Value = Vec<(u8, u8)>> {
    prop::collection::vec((0u8..12, 0u8..2), 1..300)
}

fn arb_dist(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..100, len).prop_map(|w| {
        let total: u32 = w.iter().sum();
        if total == 0 {
            let mut v = vec![0.0; w.len()];
            v[0] = 1.0;
            v
        } else {
            w.iter().map(|&x| f64::from(x) / f64::from(total)).collect()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mi_is_bounded_by_both_entropies(pairs in arb_pairs()) {
        let c = accumulate(pairs).unwrap();
        let mi = mutual_information(&c).unwrap();
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= entropy_y(&c).unwrap() + 1e-12);
        prop_assert!(mi <= entropy_x(&c).unwrap() + 1e-12);
    }

    #[test]
    fn mi_matches_definition(pairs in arb_pairs()) {
        let c = accumulate(pairs).unwrap();
        let table: Vec<[u64; 2]> = c.iter().map(|(_, cell)| cell).collect();
        prop_assert!((mutual_information(&c).unwrap() - oracle_mi(&table)).abs() < 1e-12);
    }

    #[test]
    fn mi_is_symmetric_for_binary_labels(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..300)) {
        let c = accumulate(pairs.iter().copied()).unwrap();
        let t = accumulate(pairs.iter().map(|&(x, y)| (y, x))).unwrap();
        prop_assert!((mutual_information(&c).unwrap() - mutual_information(&t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mi_ignores_label_names(pairs in arb_pairs(), shift in 0u8..12) {
        let c = accumulate(pairs.iter().copied()).unwrap();
        let renamed = accumulate(pairs.iter().map(|&(x, y)| (format!("label-{}", (x + shift) % 12), y))).unwrap();
        prop_assert!((mutual_information(&c).unwrap() - mutual_information(&renamed).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn merged_counts_equal_single_pass(pairs in arb_pairs(), cut in any::<prop::sample::Index>()) {
        let at = cut.index(pairs.len() + 1);
        let left = accumulate(pairs[..at].iter().copied()).unwrap();
        let right = accumulate(pairs[at..].iter().copied()).unwrap();
        let whole = accumulate(pairs.iter().copied()).unwrap();
        prop_assert_eq!(left.clone().merge(right.clone()), whole.clone());
        prop_assert_eq!(right.merge(left), whole);
    }

    #[test]
    fn jsd_is_a_bounded_symmetric_divergence((p, q) in (2usize..10).prop_flat_map(|n| (arb_dist(n), arb_dist(n)))) {
        let d = jsd(&p, &q);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - jsd(&q, &p)).abs() < 1e-15);
        prop_assert!(jsd(&p, &p).abs() < 1e-15);
        if d < 1e-15 {
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn restricted_conditionals_are_distributions(pairs in arb_pairs(), tau_idx in 0usize..9) {
        let c = accumulate(pairs).unwrap();
        let tau = DEFAULT_TAU_GRID[tau_idx];
        if let Ok(cond) = low_freq_conditionals(&c, tau) {
            for dist in [&cond.given_y0, &cond.given_y1] {
                prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            prop_assert!(cond.labels.iter().all(|x| tau >= 1.0 || (c.get(x, false) + c.get(x, true)) as f64 / (c.total() as f64) < tau));
        }
        let curve = jsd_curve(&c, &DEFAULT_TAU_GRID);
        prop_assert!(curve.jsd_values.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(curve.kept_label_counts.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn rare_class_exclusive_labels_raise_jsd() {
    // Frequent labels are shared by both classes; rare ones are class-exclusive.
    let mut c = JointCounts::new();
    c.add_n("C".to_string(), false, 500);
    c.add_n("C".to_string(), true, 500);
    c.add_n("N".to_string(), false, 200);
    c.add_n("N".to_string(), true, 200);
    for i in 0..10 {
        c.add_n(format!("rare0-{i}"), false, 2);
        c.add_n(format!("rare1-{i}"), true, 2);
    }
    let curve = jsd_curve(&c, &DEFAULT_TAU_GRID);
    let full = curve.jsd_values[0].unwrap();
    let rare = curve.jsd_values[DEFAULT_TAU_GRID.iter().position(|&t| t == 0.01).unwrap()].unwrap();
    assert!(rare > full, "{rare} <= {full}");
    assert!((rare - 1.0).abs() < 1e-12);
}
