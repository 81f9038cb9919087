mod common;

use std::collections::BTreeSet;

use common::{arb_graph, fixture_graphs};
use molmask::masking::{
    apply_mask, mask_count, moama_mask, motifpred_mask, perturbed_topk, read_views, top_k, uniform_mask, write_views,
    MaskConfig, MaskError, MaskPlan, MaskSampler, Strategy, ViewRecord, MASK_TOKEN,
};
use molmask::motif::decompose;
use molmask::rng::substream;
use molmask::scoring::{degree_scores, pagerank, NodeScores, PageRankConfig, ScoreSource};
use molmask::targets::TargetKind;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn ratio() -> impl proptest::strategy::Strategy<Value = f64> {
    (1u32..=100).prop_map(|r| f64::from(r) / 100.0)
}

fn random_scores(n: usize, seed: u64) -> NodeScores {
    use rand::Rng;
    let mut rng = substream(seed, 99, 0);
    NodeScores {
        values: (0..n).map(|_| rng.random::<f64>()).collect(),
        source: ScoreSource::External,
    }
}

fn assert_valid_atoms(plan: &MaskPlan, n: usize) -> Result<(), TestCaseError> {
    prop_assert!(plan.masked_atoms.windows(2).all(|w| w[0] < w[1]), "sorted and distinct");
    prop_assert!(plan.masked_atoms.iter().all(|&a| a < n));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn node_level_plans_have_exactly_k_atoms(g in arb_graph(16), gamma in ratio(), seed in any::<u64>(), epoch in 1u32..=8) {
        let n = g.atom_count();
        let cfg = MaskConfig { ratio: gamma, epoch, max_epoch: 8, seed, ..MaskConfig::default() };
        let k = mask_count(gamma, n);
        let mut rng = substream(seed, 0, 0);
        let plans = [
            uniform_mask(n, &cfg, &mut rng),
            perturbed_topk(&pagerank(&g, &PageRankConfig::default()).unwrap().scores, &cfg, &mut rng),
            perturbed_topk(&degree_scores(&g), &cfg, &mut rng),
            perturbed_topk(&random_scores(n, seed), &cfg, &mut rng),
        ];
        for plan in &plans {
            assert_valid_atoms(plan, n)?;
            prop_assert_eq!(plan.len(), k);
            prop_assert!(plan.masked_motifs.is_empty());
        }
    }

    #[test]
    fn large_beta_keeps_mask_inside_candidates(g in arb_graph(16), gamma in ratio(), beta in 1.01f64..50.0, seed in any::<u64>()) {
        let n = g.atom_count();
        let scores = random_scores(n, seed);
        let cfg = MaskConfig { ratio: gamma, beta: Some(beta), seed, ..MaskConfig::default() };
        let candidates: BTreeSet<usize> = top_k(&scores.values, mask_count(cfg.annealed_ratio(), n)).into_iter().collect();
        let plan = perturbed_topk(&scores, &cfg, &mut substream(seed, 1, 0));
        prop_assert!(plan.masked_atoms.iter().all(|a| candidates.contains(a)));
    }

    #[test]
    fn annealing_reaches_target_ratio(gamma in ratio(), e in 1u32..50) {
        let at = |i| MaskConfig { ratio: gamma, epoch: i, max_epoch: e, ..MaskConfig::default() }.annealed_ratio();
        prop_assert_eq!(at(e), gamma);
        for i in 1..e {
            prop_assert!(at(i) <= at(i + 1));
        }
    }

    #[test]
    fn moama_selects_non_adjacent_whole_motifs(g in arb_graph(16), gamma in ratio(), seed in any::<u64>()) {
        let part = decompose(&g);
        let n = g.atom_count();
        let cfg = MaskConfig::with_ratio(gamma);
        let plan = moama_mask(&part, &cfg, &mut substream(seed, 2, 0));
        assert_valid_atoms(&plan, n)?;
        prop_assert!(!plan.masked_motifs.is_empty());
        for (i, &a) in plan.masked_motifs.iter().enumerate() {
            for &b in &plan.masked_motifs[i + 1..] {
                prop_assert!(!part.neighbors(a).contains(&b), "motifs {} and {} are adjacent", a, b);
            }
        }
        let union: BTreeSet<usize> = plan.masked_motifs.iter().flat_map(|&m| part.motifs[m].iter().copied()).collect();
        prop_assert_eq!(union.into_iter().collect::<Vec<_>>(), plan.masked_atoms.clone());
        if plan.masked_motifs.len() > 1 {
            prop_assert!(plan.len() <= mask_count(gamma, n));
        }
    }

    #[test]
    fn motifpred_budget_accounting(g in arb_graph(20), gamma in ratio(), frac in 1u32..=10, seed in any::<u64>()) {
        let part = decompose(&g);
        let n = g.atom_count();
        let fraction = f64::from(frac) / 10.0;
        let cfg = MaskConfig { ratio: gamma, intra_motif_fraction: fraction, ..MaskConfig::default() };
        let plan = motifpred_mask(&part, &cfg, &mut substream(seed, 3, 0));
        assert_valid_atoms(&plan, n)?;
        let k = mask_count(gamma, n);
        let take = |m: usize| ((fraction * part.motifs[m].len() as f64 - 1e-9).ceil() as usize).max(1);
        let max_take = (0..part.len()).map(take).max().unwrap();
        prop_assert!(plan.len() >= k.min(plan.masked_motifs.iter().map(|&m| take(m)).sum()));
        prop_assert!(plan.len() < k + max_take);
        let mut per_motif = vec![0usize; part.len()];
        for &a in &plan.masked_atoms {
            per_motif[part.motif_of_atom[a]] += 1;
        }
        for (m, &count) in per_motif.iter().enumerate() {
            let expected = if plan.masked_motifs.contains(&m) { take(m) } else { 0 };
            prop_assert_eq!(count, expected);
        }
    }

    #[test]
    fn applying_a_mask_marks_exactly_the_plan(g in arb_graph(16), gamma in ratio(), seed in any::<u64>()) {
        let n = g.atom_count();
        let plan = uniform_mask(n, &MaskConfig::with_ratio(gamma), &mut substream(seed, 4, 0));
        let masked = apply_mask(&g, &plan).unwrap();
        prop_assert!(masked.mask_token_applied);
        for (i, label) in masked.node_labels().into_iter().enumerate() {
            if plan.masked_atoms.contains(&i) {
                prop_assert_eq!(label, MASK_TOKEN);
            } else {
                prop_assert_eq!(label, g.atom(i).atomic_number);
            }
        }
        prop_assert_eq!(masked.apply(&plan).unwrap(), masked.clone());
        prop_assert_eq!(masked.graph.atoms(), g.atoms());
    }

    #[test]
    fn view_records_round_trip(atoms in prop::collection::btree_set(0usize..40, 0..10), seed in any::<u64>(), labels in prop::collection::vec(0u32..119, 0..10)) {
        let record = ViewRecord {
            graph_index: 3,
            draw: 1,
            smiles: "CCO".into(),
            strategy: Strategy::PageRank,
            seed,
            masked_atoms: atoms.iter().copied().collect(),
            masked_motifs: vec![],
            target_type: TargetKind::AtomType,
            target_units: atoms.into_iter().collect(),
            targets: labels,
            label_space_size: 119,
        };
        let mut buf = Vec::new();
        write_views(std::slice::from_ref(&record), &mut buf).unwrap();
        prop_assert_eq!(read_views(buf.as_slice()).unwrap(), vec![record]);
    }
}

#[test]
fn same_substream_same_plan() {
    let graphs = fixture_graphs();
    for strategy in [
        Strategy::Uniform,
        Strategy::PageRank,
        Strategy::Degree,
        Strategy::Moama,
        Strategy::MotifPred,
    ] {
        let sampler = MaskSampler::prepare(strategy, &graphs, None, &PageRankConfig::default()).unwrap();
        let cfg = MaskConfig::with_ratio(0.3);
        for (i, g) in graphs.iter().enumerate() {
            let a = sampler.draw(i, g.atom_count(), &cfg, &mut substream(5, i as u64, 0));
            let b = sampler.draw(i, g.atom_count(), &cfg, &mut substream(5, i as u64, 0));
            assert_eq!(a, b);
        }
    }
}

#[test]
fn out_of_range_plan_is_rejected() {
    let g = molmask::parse_smiles("CCO").unwrap();
    let plan = MaskPlan {
        masked_atoms: vec![3],
        masked_motifs: vec![],
        strategy: Strategy::Uniform,
    };
    assert!(matches!(
        apply_mask(&g, &plan),
        Err(MaskError::OutOfRangeIndex { index: 3, atoms: 3 })
    ));
    let empty = apply_mask(&g, &MaskPlan::empty(Strategy::Uniform)).unwrap();
    assert!(!empty.mask_token_applied);
    assert_eq!(empty.node_labels(), vec![6, 6, 8]);
}

#[test]
fn zero_beta_matches_uniform_marginals() {
    // With beta = 0 only the noise decides, so every atom is equally likely.
    let scores = NodeScores {
        values: (0..8).map(f64::from).collect(),
        source: ScoreSource::PageRank,
    };
    let cfg = MaskConfig {
        ratio: 0.25,
        beta: Some(0.0),
        ..MaskConfig::default()
    };
    let draws = 40_000;
    let mut freq = [0usize; 8];
    for d in 0..draws {
        for a in perturbed_topk(&scores, &cfg, &mut substream(11, d, 0)).masked_atoms {
            freq[a] += 1;
        }
    }
    for f in freq {
        let p = f as f64 / draws as f64;
        assert!((p - 0.25).abs() < 0.015, "{freq:?}");
    }
}
