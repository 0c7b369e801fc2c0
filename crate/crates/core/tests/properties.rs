mod common;

use std::collections::HashMap;

use common::*;
use mlsub::datagen::split_layers;
use mlsub::metrics::{compressed_length, greedy_disjoint_cover, rank_order, score};
use mlsub::{
    brute_force_enumerate, canonical_substructure, conflate_all, discover, group_isomorphs,
    DiscoveryConfig, ExactScore, HoMln, Instance, Layer, MdlContext, Metric, VertexId,
};
use proptest::prelude::*;

fn all_groups(g: &Layer, k: usize) -> Vec<mlsub::IsomorphGroup> {
    brute_force_enumerate(g, k, 14)
        .unwrap()
        .into_values()
        .flat_map(|s| group_isomorphs(s.into_iter().collect()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_matches_brute_force(seed in any::<u64>(), p in 1usize..5) {
        let g = small_layer(seed, 12);
        prop_assert_eq!(iterative_closure(&g, 5, p), brute_force_enumerate(&g, 5, 14).unwrap());
    }

    #[test]
    fn result_ignores_partitions_and_workers(seed in any::<u64>(), p in 1usize..9, w in 1usize..4) {
        let g = small_layer(seed, 14);
        let mln = split_layers(&g, &[0.6, 0.4], seed).unwrap();
        let base = DiscoveryConfig { beam: 3, ..Default::default() };
        let other = DiscoveryConfig { partitions: p, workers: w, ..base.clone() };
        prop_assert_eq!(
            discover::<f64>(&mln, &base).unwrap().to_json(),
            discover::<f64>(&mln, &other).unwrap().to_json()
        );
    }

    #[test]
    fn split_then_conflate_is_identity(seed in any::<u64>(), a in 0u32..=10, b in 0u32..=10) {
        let g = small_layer(seed, 14);
        let total = (a + b).max(1) as f64;
        let fr = if a + b == 0 { vec![1.0] } else { vec![a as f64 / total, b as f64 / total] };
        let mln = split_layers(&g, &fr, seed).unwrap();
        prop_assert_eq!(conflate_all(&mln).to_edge_list(), g.to_edge_list());
        let sizes: usize = mln.layers().iter().map(Layer::len).sum();
        prop_assert_eq!(sizes, g.len());
    }

    #[test]
    fn isolated_vertices_do_not_change_ranking(seed in any::<u64>(), extra in 1u64..1000) {
        let g = small_layer(seed, 10);
        let plain = MdlContext::new(&g);
        let padded = MdlContext::new(&g).with_isolated_vertices(extra);
        let rank = |ctx: &MdlContext| {
            let mut scored: Vec<_> = all_groups(&g, 4)
                .into_iter()
                .map(|grp| score::<ExactScore>(grp, Metric::Mdl, ctx).unwrap())
                .collect();
            scored.sort_by(rank_order);
            scored.into_iter().map(|s| s.sub).collect::<Vec<_>>()
        };
        prop_assert_eq!(rank(&plain), rank(&padded));
    }

    #[test]
    fn compressed_length_matches_explicit_graph(seed in any::<u64>()) {
        let g = small_layer(seed, 12);
        let ctx = MdlContext::new(&g);
        for grp in all_groups(&g, 4) {
            let chosen = greedy_disjoint_cover(&grp.instances);
            let selected: Vec<&Instance> = chosen.iter().map(|&i| &grp.instances[i]).collect();
            prop_assert_eq!(compressed_length(&ctx, &selected), compressed_dl(&g, &selected));
        }
    }

    #[test]
    fn equal_keys_mean_isomorphic(seed in any::<u64>()) {
        let g = small_layer(seed, 10);
        for grp in all_groups(&g, 4) {
            let first = &grp.instances[0];
            for other in &grp.instances[1..] {
                prop_assert!(isomorphic(first, other));
            }
        }
    }

    #[test]
    fn renumbering_keeps_distinguishable_keys(seed in any::<u64>(), shift in 1u32..1000) {
        let g = small_layer(seed, 10);
        for (_, set) in brute_force_enumerate(&g, 5, 14).unwrap() {
            for inst in set.iter().filter(|i| label_distinguishable(i)) {
                let vs = inst.vertices();
                let perm: HashMap<VertexId, VertexId> =
                    vs.iter().rev().enumerate().map(|(i, &v)| (v, shift + i as u32)).collect();
                prop_assert_eq!(canonical_substructure(inst), canonical_substructure(&renumber(inst, &perm)));
            }
        }
    }
}

#[test]
fn layers_with_shared_edges_match_ground_truth() {
    for seed in 0..40u64 {
        let g = small_layer(9_000 + seed, 12);
        let edges = g.edges();
        let cut = edges.len() / 2;
        let overlap = (edges.len() / 4).max(1);
        let a = edges[..(cut + overlap).min(edges.len())].to_vec();
        let b = edges[cut.saturating_sub(overlap)..].to_vec();
        let text = |es: &[mlsub::Edge]| es.iter().map(|e| g.vocab().record(e).to_line() + "\n").collect::<String>();
        let mln = HoMln::new(vec![
            mlsub::parse_edge_list(&text(&a)).unwrap(),
            mlsub::parse_edge_list(&text(&b)).unwrap(),
        ])
        .unwrap();
        let cfg = DiscoveryConfig { beam: usize::MAX, ..Default::default() };
        let found = discover::<ExactScore>(&mln, &cfg).unwrap().document();
        let truth = mlsub::run_ground_truth::<ExactScore>(&mln, &[0, 1], &cfg).unwrap().document();
        assert!(mlsub::compare_rankings(&truth, &found).is_empty(), "seed {seed}");
    }
}
