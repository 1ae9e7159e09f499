mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use vc2reg::analysis::{bad_pairs_psi, classify_triads, troublesome_triples, CoordinateClusters};
use vc2reg::generators::{gen_planted_decomposition, DensityProfile, PlantedParams};
use vc2reg::model::exact::{int, ratio};
use vc2reg::model::{Color, EdgeColoredBipartiteGraph, EdgeColoredTripartite3Graph};
use vc2reg::packing::{packing_cluster, verify_packing_bound, PackingDiagnostic};
use vc2reg::quasirandom::{dev2, dev23, k222_count, k222_link, EvalMode};
use vc2reg::splitting::{merge_parts, split_by_probability, split_quasirandom};
use vc2reg::vc::{vc_dim, SetSystem};
use vc2reg::{rng, Decomposition, Hypergraph3};

fn small_planted(n: usize, t: usize, ell: usize, noise: u64, seed: u64) -> vc2reg::generators::PlantedInstance {
    let params = PlantedParams {
        n,
        t,
        ell,
        groups_per_pair: 1,
        profile: DensityProfile::Random,
        hi: ratio(9, 10),
        lo: ratio(1, 10),
        noise: ratio(noise, 4),
    };
    gen_planted_decomposition(&params, seed).unwrap()
}

fn permuted(h: &Hypergraph3, p: &Decomposition, perm: &[u32]) -> (Hypergraph3, Decomposition) {
    let h2 = Hypergraph3::from_triples(
        h.n(),
        h.edges().iter().map(|e| (perm[e[0] as usize], perm[e[1] as usize], perm[e[2] as usize])),
    )
    .unwrap();
    let vertex_parts = p.vertex_parts.iter().map(|v| v.iter().map(|&x| perm[x as usize]).collect()).collect();
    let pair_parts = p
        .pair_parts
        .iter()
        .map(|(&k, parts)| {
            let parts = parts
                .iter()
                .map(|part| part.iter().map(|&(x, y)| (perm[x as usize], perm[y as usize])).collect())
                .collect();
            (k, parts)
        })
        .collect();
    (h2, Decomposition { vertex_parts, pair_parts })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dev2_modes_agree_with_oracle(seed in any::<u64>()) {
        let g = common::random_bipartite(seed, 7);
        let fast = dev2(&g, EvalMode::Fast).unwrap();
        let brute = dev2(&g, EvalMode::Brute).unwrap();
        let (raw, norm) = common::dev2_oracle(&g);
        prop_assert_eq!(&fast, &brute);
        prop_assert_eq!(fast.raw_sum, raw);
        prop_assert_eq!(fast.normalized, norm);
    }

    #[test]
    fn dev2_is_complement_invariant(seed in any::<u64>()) {
        let g = common::random_bipartite(seed, 7);
        let a = dev2(&g, EvalMode::Fast).unwrap();
        let b = dev2(&g.complement(), EvalMode::Fast).unwrap();
        prop_assert_eq!(a.raw_sum, b.raw_sum);
        prop_assert_eq!(b.density, int(1) - a.density);
    }

    #[test]
    fn dev2_is_transpose_invariant(seed in any::<u64>()) {
        let g = common::random_bipartite(seed, 7);
        prop_assert_eq!(dev2(&g, EvalMode::Fast).unwrap().normalized, dev2(&g.transpose(), EvalMode::Fast).unwrap().normalized);
    }

    #[test]
    fn dev23_modes_agree_with_oracle(seed in any::<u64>()) {
        let (t, h) = common::random_triad_with_h(seed, 5, None);
        let fast = dev23(&h, &t.view(), EvalMode::Fast).unwrap();
        let brute = dev23(&h, &t.view(), EvalMode::Brute).unwrap();
        let (raw, norm, d3) = common::dev23_oracle(&h, &t.view());
        prop_assert_eq!(&fast, &brute);
        prop_assert_eq!(fast.raw_sum, raw);
        prop_assert_eq!(fast.normalized_bound_lhs, norm);
        prop_assert_eq!(fast.d3, d3);
    }

    #[test]
    fn k222_links_sum_to_count(seed in any::<u64>()) {
        let (t, _) = common::random_triad_with_h(seed, 5, Some(0.0));
        let v = t.view();
        let mut sum = BigInt::from(0);
        v.for_each_triangle(|u, w, z| sum += k222_link(&v, u, w, z).unwrap());
        prop_assert_eq!(sum, k222_count(&v));
    }

    #[test]
    fn vc_dim_is_monotone_and_bounded(seed in any::<u64>(), ground in 1usize..8, count in 1usize..12) {
        let mut r = rng::stream(seed, "prop-vc", &[]);
        let mut sets: Vec<Vec<usize>> =
            (0..count).map(|_| (0..ground).filter(|_| r.gen_bool(0.5)).collect()).collect();
        let d = vc_dim(&SetSystem::new(ground, sets.clone()).unwrap()).unwrap();
        prop_assert!(1usize << d <= sets.len());
        prop_assert!(d <= ground);
        sets.push((0..ground).filter(|_| r.gen_bool(0.5)).collect());
        let d2 = vc_dim(&SetSystem::new(ground, sets).unwrap()).unwrap();
        prop_assert!(d2 >= d);
    }

    #[test]
    fn packing_output_is_consistent(seed in any::<u64>(), a in 1usize..40, b in 1usize..40, p2 in 0u32..20) {
        let mut r = rng::stream(seed, "prop-packing", &[]);
        let mut g = EdgeColoredBipartiteGraph::with_sizes(a, b);
        let q2 = f64::from(p2) / 100.0;
        for x in 0..a {
            for y in 0..b {
                let c = if r.gen_bool(q2) { Color::Two } else if r.gen_bool(0.5) { Color::One } else { Color::Zero };
                g.set(x, y, c);
            }
        }
        let res = packing_cluster(&g, &ratio(1, 5), &ratio(1, 100));
        let audit = verify_packing_bound(&g, &res, None);
        prop_assert!(audit.separated);
        prop_assert!(audit.assignment_ok);
        let not_similar = res.diagnostics.iter().any(|d| matches!(d, PackingDiagnostic::NotSimilar { .. }));
        prop_assert_eq!(audit.similar, !not_similar);
        // Without color 2, E₀ and E₁ differences coincide and stay within δ|B|/2.
        if p2 == 0 {
            prop_assert!(audit.similar);
        }
        prop_assert_eq!(audit.m, res.representatives.len());
        let assigned = res.clusters.iter().filter(|c| c.is_some()).count();
        prop_assert_eq!(assigned + res.exceptions.len(), a);
    }

    #[test]
    fn split_round_trips_and_conserves_edges(seed in any::<u64>(), parts in 1usize..6, num in 1u64..4) {
        let g = common::random_bipartite(seed, 12);
        let s = split_quasirandom(&g, parts, &ratio(1, 10), seed, 1).unwrap();
        prop_assert_eq!(s.parts.len(), parts);
        prop_assert_eq!(s.remainder.edge_count(), 0);
        let merged = merge_parts(&s.parts).unwrap();
        prop_assert_eq!(&merged.graph, &g);
        let total: usize = s.parts.iter().map(|x| x.edge_count()).sum();
        prop_assert_eq!(total, g.edge_count());

        let p = ratio(num, 4);
        let s = split_by_probability(&g, &p, &ratio(1, 10), seed, 1).unwrap();
        prop_assert_eq!(s.parts.len(), (4 / num) as usize);
        let mut all = s.parts.clone();
        all.push(s.remainder.clone());
        prop_assert_eq!(&merge_parts(&all).unwrap().graph, &g);
    }

    #[test]
    fn psi_shrinks_as_coefficient_grows(seed in any::<u64>(), noise in 0u64..=4) {
        let inst = small_planted(24, 4, 2, noise, seed);
        let c = classify_triads(&inst.hypergraph, &inst.decomposition, &int(128), &ratio(1, 10), &ratio(1, 10)).unwrap();
        let mut prev = bad_pairs_psi(&c, &int(0)).pairs;
        prop_assert_eq!(prev.len(), 6);
        for k in 1..=8u64 {
            let cur = bad_pairs_psi(&c, &ratio(k, 16)).pairs;
            prop_assert!(cur.iter().all(|x| prev.contains(x)));
            prev = cur;
        }
    }

    #[test]
    fn classification_is_relabeling_equivariant(seed in any::<u64>(), noise in 0u64..=4) {
        let inst = small_planted(21, 3, 2, noise, seed);
        let mut perm: Vec<u32> = (0..21).collect();
        perm.shuffle(&mut rng::stream(seed, "prop-perm", &[]));
        let (h2, p2) = permuted(&inst.hypergraph, &inst.decomposition, &perm);
        let (e1, e2, f) = (int(128), ratio(1, 10), ratio(1, 10));
        let a = classify_triads(&inst.hypergraph, &inst.decomposition, &e1, &e2, &f).unwrap();
        let b = classify_triads(&h2, &p2, &e1, &e2, &f).unwrap();
        prop_assert_eq!(&a.counts, &b.counts);
        for x in &a.triads {
            let y = b.get(&x.address).unwrap();
            prop_assert_eq!(x.label, y.label);
            prop_assert_eq!(&x.density, &y.density);
            prop_assert_eq!(x.triangles, y.triangles);
        }
    }

    #[test]
    fn identity_clustering_has_no_troublesome_triples(seed in any::<u64>(), a in 1usize..5, b in 1usize..5, c in 1usize..5) {
        let mut r = rng::stream(seed, "prop-tr", &[]);
        let colors = (0..a * b * c).map(|_| Color::from_index(r.gen_range(0..3)).unwrap()).collect();
        let parts = [(0..a as u32).collect(), (0..b as u32).collect(), (0..c as u32).collect()];
        let g = EdgeColoredTripartite3Graph::from_table(parts, colors).unwrap();
        let ids = [CoordinateClusters::identity(a), CoordinateClusters::identity(b), CoordinateClusters::identity(c)];
        prop_assert!(troublesome_triples(&g, [&ids[0], &ids[1], &ids[2]]).unwrap().is_empty());
    }

    #[test]
    fn monochrome_clusters_have_no_troublesome_triples(seed in any::<u64>(), a in 2usize..6) {
        // Colors depend only on the cluster of each coordinate.
        let mut r = rng::stream(seed, "prop-tr-exact", &[]);
        let assign: Vec<Option<usize>> = (0..a).map(|_| Some(r.gen_range(0..2))).collect();
        let mut reps = vec![None, None];
        for (x, c) in assign.iter().enumerate() {
            reps[c.unwrap()].get_or_insert(x);
        }
        let mut assign = assign;
        let reps: Vec<usize> = reps.into_iter().flatten().collect();
        if reps.len() == 1 {
            assign = assign.into_iter().map(|_| Some(0)).collect();
        }
        let cl = CoordinateClusters { assignment: assign.clone(), representatives: reps };
        let table: Vec<Color> = (0..8).map(|_| Color::from_index(r.gen_range(0..3)).unwrap()).collect();
        let mut colors = Vec::new();
        for x in 0..a {
            for y in 0..a {
                for z in 0..a {
                    let k = (assign[x].unwrap() * 2 + assign[y].unwrap()) * 2 + assign[z].unwrap();
                    colors.push(table[k]);
                }
            }
        }
        let v: Vec<u32> = (0..a as u32).collect();
        let g = EdgeColoredTripartite3Graph::from_table([v.clone(), v.clone(), v], colors).unwrap();
        prop_assert!(troublesome_triples(&g, [&cl, &cl, &cl]).unwrap().is_empty());
    }
}
