mod common;

use common::{arb_graph, fixture_graphs, oracle_pagerank, FIXTURES};
use molmask::infotheory::{accumulate, mutual_information, sampled_mi, SampledMiOptions};
use molmask::masking::{MaskConfig, MaskPlan, MaskSampler, Strategy};
use molmask::molgraph::LabeledRecord;
use molmask::parse_smiles;
use molmask::rng::substream;
use molmask::scoring::{pagerank, PageRankConfig};
use molmask::targets::{argmax_targets, atom_type_targets, vq_targets, Codebook};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn pagerank_matches_dense_solve_on_fixtures() {
    for g in fixture_graphs() {
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        assert!(pr.converged);
        let exact = oracle_pagerank(&g, 0.85);
        for (a, b) in pr.scores.values.iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-7, "{}: {a} vs {b}", g.source_smiles());
        }
    }
}

proptest! {
    #[test]
    fn pagerank_matches_dense_solve_on_random_graphs(g in arb_graph(12), alpha in 0.05f64..0.95) {
        // the stopping error grows like tol * alpha / (1 - alpha)
        let cfg = PageRankConfig { alpha, tol: 1e-11, max_iter: 5000 };
        let pr = pagerank(&g, &cfg).unwrap();
        prop_assert!(pr.converged);
        let exact = oracle_pagerank(&g, alpha);
        for (a, b) in pr.scores.values.iter().zip(&exact) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }
}

fn full_plan(n: usize) -> MaskPlan {
    MaskPlan {
        masked_atoms: (0..n).collect(),
        masked_motifs: vec![],
        strategy: Strategy::Uniform,
    }
}

#[test]
fn vq_matches_exhaustive_scan() {
    let mut rng = substream(1, 0, 0);
    let codebook: Vec<Vec<f64>> = (0..512)
        .map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let embeddings: Vec<Vec<f64>> = (0..10)
        .map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let cb = Codebook::new(codebook.clone()).unwrap();
    let got = vq_targets(&full_plan(10), &embeddings, &cb, false).unwrap();
    for (e, &label) in embeddings.iter().zip(&got.labels) {
        let dist = |row: &Vec<f64>| row.iter().zip(e).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let best = (0..codebook.len())
            .min_by(|&i, &j| dist(&codebook[i]).total_cmp(&dist(&codebook[j])).then(i.cmp(&j)))
            .unwrap();
        assert_eq!(label as usize, best);
    }
    assert_eq!(got.label_space_size, 512);

    // translating embeddings and codebook together changes nothing
    let shift = |v: &Vec<f64>| v.iter().map(|x| x + 3.5).collect::<Vec<_>>();
    let moved = Codebook::new(codebook.iter().map(shift).collect()).unwrap();
    let moved_e: Vec<_> = embeddings.iter().map(shift).collect();
    assert_eq!(
        vq_targets(&full_plan(10), &moved_e, &moved, false).unwrap().labels,
        got.labels
    );
}

#[test]
fn argmax_agrees_with_scaled_identity_codebook() {
    let mut rng = substream(2, 0, 0);
    let dim = 16;
    let codebook: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 2.5 } else { 0.0 }).collect())
        .collect();
    let cb = Codebook::new(codebook).unwrap();
    let logits: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let plan = full_plan(50);
    assert_eq!(
        argmax_targets(&plan, &logits).unwrap().labels,
        vq_targets(&plan, &logits, &cb, false).unwrap().labels
    );
}

proptest! {
    #[test]
    fn atom_targets_follow_atom_relabeling((g, perm) in common::arb_graph_and_perm(14), seed in any::<u64>()) {
        let n = g.atom_count();
        let plan = molmask::masking::uniform_mask(n, &MaskConfig::with_ratio(0.5), &mut substream(seed, 0, 0));
        let labels = atom_type_targets(&g, &plan);
        let p = g.permuted(&perm);
        let mut moved: Vec<usize> = plan.masked_atoms.iter().map(|&a| perm[a]).collect();
        moved.sort_unstable();
        let moved_plan = MaskPlan { masked_atoms: moved, ..plan.clone() };
        let relabeled = atom_type_targets(&p, &moved_plan);
        for (i, &a) in plan.masked_atoms.iter().enumerate() {
            let j = moved_plan.masked_atoms.iter().position(|&b| b == perm[a]).unwrap();
            prop_assert_eq!(labels.labels[i], relabeled.labels[j]);
        }
    }
}

#[test]
fn uniform_sampled_mi_converges_to_exact() {
    // Fixture corpus with a label rule tied to composition, repeated to reach 10^6 samples.
    let mut records = Vec::new();
    for rep in 0..40 {
        for (i, s) in FIXTURES.iter().enumerate() {
            let g = parse_smiles(s).unwrap();
            let y = u8::from(g.atoms().iter().any(|a| a.atomic_number != 6) ^ ((i + rep) % 5 == 0));
            records.push(LabeledRecord::new(g, vec![Some(y)], 0));
        }
    }
    let per_repeat: usize = records.iter().map(|r| r.graph.atom_count()).sum();
    let repeats = 1_000_000usize.div_ceil(per_repeat);
    let exact = mutual_information(
        &accumulate(records.iter().flat_map(|r| {
            r.graph
                .atoms()
                .iter()
                .map(move |a| (a.atomic_number, r.label().unwrap()))
        }))
        .unwrap(),
    )
    .unwrap();
    let opts = SampledMiOptions {
        repeats,
        seed: 0,
        without_replacement: false,
    };
    let stats = sampled_mi(&records, &MaskSampler::uniform(), &MaskConfig::with_ratio(0.15), &opts).unwrap();
    assert!(
        (stats.mean - exact).abs() < 0.002,
        "sampled {} vs exact {exact}",
        stats.mean
    );
}

#[test]
fn literal_column_form_is_degenerate() {
    // x = alpha * D^-1 A x + (1 - alpha) p with uniform p is solved by the uniform
    // vector on every connected graph, which is why the scores use A D^-1.
    use nalgebra::{DMatrix, DVector};
    let g = parse_smiles("CC(C)(C)c1ccc(O)cc1").unwrap();
    let n = g.atom_count();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for nb in g.neighbors(i) {
            m[(i, nb.atom)] = 1.0 / g.degree(i) as f64;
        }
    }
    let x = (DMatrix::<f64>::identity(n, n) - m * 0.85)
        .lu()
        .solve(&DVector::from_element(n, 0.15 / n as f64))
        .unwrap();
    assert!(x.iter().all(|v| (v - 1.0 / n as f64).abs() < 1e-12));
    let pr = pagerank(&g, &PageRankConfig::default()).unwrap().scores.values;
    assert!(pr.iter().any(|v| (v - 1.0 / n as f64).abs() > 1e-3));
}
