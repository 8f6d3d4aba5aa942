mod common;

use std::collections::HashSet;

use common::oracles::all_pairs_hops;
use gembed::graph::{
    is_temporally_valid_walk, load_edge_list, split_edges, write_edge_list, Graph, IdMap, TemporalEdge, TemporalGraph,
};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = (usize, bool, Vec<(usize, usize)>)> {
    (2..=max_n, any::<bool>()).prop_flat_map(|(n, directed)| {
        (Just(n), Just(directed), prop::collection::vec((0..n, 0..n), 0..3 * n))
    })
}

fn arcs(directed: bool, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    pairs.iter().flat_map(|&(u, v)| if directed { vec![(u, v)] } else { vec![(u, v), (v, u)] }).collect()
}

proptest! {
    #[test]
    fn hop_buckets_match_all_pairs_distances((n, directed, pairs) in arb_graph(10), k in 1usize..5) {
        let g = Graph::from_pairs(n, directed, &pairs).unwrap();
        let dist = all_pairs_hops(n, &arcs(directed, &pairs));
        for s in 0..n {
            let hops = g.k_hop_neighborhoods(s, k).unwrap();
            let mut seen = HashSet::new();
            for (h, bucket) in hops.iter() {
                for &v in bucket {
                    prop_assert!(seen.insert(v), "node {} in two buckets", v);
                    let d = dist[s][v].expect("bucketed nodes are reachable");
                    prop_assert_eq!(d.min(k), h);
                }
            }
            let reachable: HashSet<usize> = (0..n).filter(|&v| v != s && dist[s][v].is_some()).collect();
            prop_assert_eq!(seen, reachable);
        }
    }

    #[test]
    fn split_partitions_edges(n in 6usize..30, density in 0.1f64..0.5, p_val in 0.0f64..0.3, p_test in 0.0f64..0.3, seed in any::<u64>()) {
        let g = common::fixtures::random_weighted_graph(n, density, false, seed);
        prop_assume!(g.edge_count() > 0);
        let s = split_edges(&g, p_val, p_test, seed).unwrap();
        let m = g.edge_count();
        prop_assert_eq!(s.val_edges.len(), (p_val * m as f64).round() as usize);
        prop_assert_eq!(s.test_edges.len(), (p_test * m as f64).round() as usize);
        prop_assert_eq!(s.val_nonedges.len(), s.val_edges.len());
        prop_assert_eq!(s.test_nonedges.len(), s.test_edges.len());
        let mut all: Vec<_> = s.train_edges.iter().chain(&s.val_edges).chain(&s.test_edges).map(|e| (e.src, e.dst)).collect();
        all.sort_unstable();
        let mut want: Vec<_> = g.edges().iter().map(|e| (e.src, e.dst)).collect();
        want.sort_unstable();
        prop_assert_eq!(all, want);
        let mut pairs = HashSet::new();
        for &(u, v) in s.val_nonedges.iter().chain(&s.test_nonedges) {
            prop_assert!(u != v && !g.has_edge(u, v));
            prop_assert!(pairs.insert((u.min(v), u.max(v))));
        }
    }

    #[test]
    fn edge_list_round_trip(n in 2usize..20, density in 0.05f64..0.6, directed in any::<bool>(), seed in any::<u64>()) {
        let g = common::fixtures::random_weighted_graph(n, density, directed, seed);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let h = load_edge_list(buf.as_slice(), directed, true).unwrap();
        let mut again = Vec::new();
        write_edge_list(&h, &mut again).unwrap();
        prop_assert_eq!(&buf, &again);
        let named = |g: &Graph| {
            let mut v: Vec<(String, String, u64)> = g.edges().iter()
                .map(|e| (g.ids().name(e.src).to_string(), g.ids().name(e.dst).to_string(), e.weight.to_bits()))
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(named(&g), named(&h));
    }

    #[test]
    fn valid_temporal_walks_have_valid_prefixes(steps in prop::collection::vec((0usize..6, 0u8..8), 1..10)) {
        // a chain of timed edges along the walk, plus a few distractors
        let mut walk = vec![(0usize, 0.0f64)];
        let mut edges = vec![TemporalEdge { src: 1, dst: 2, time: 3.0 }];
        for &(v, t) in &steps {
            let prev = walk.last().unwrap().0;
            edges.push(TemporalEdge { src: prev, dst: v, time: f64::from(t) });
            walk.push((v, f64::from(t)));
        }
        let tg = TemporalGraph::new(IdMap::sequential(6), false, edges).unwrap();
        let full = is_temporally_valid_walk(&tg, &walk).unwrap();
        if full {
            for len in 1..walk.len() {
                prop_assert!(is_temporally_valid_walk(&tg, &walk[..len]).unwrap());
            }
        }
        let monotone = walk[1..].windows(2).all(|w| w[0].1 <= w[1].1);
        prop_assert_eq!(full, monotone);
    }
}

#[test]
fn path_triplets_match_enumeration() {
    // a-b-c-d anchored at a with K = 3
    let g = Graph::from_pairs(4, false, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let set = gembed::gauss::sample_triplets(&g, 3, 20, 1).unwrap();
    let got: HashSet<(usize, usize, usize)> =
        set.triplets.iter().filter(|t| t.anchor == 0).map(|t| (t.anchor, t.positive, t.negative)).collect();
    let want: HashSet<(usize, usize, usize)> = [(0, 1, 2), (0, 1, 3), (0, 2, 3)].into_iter().collect();
    assert_eq!(got, want);
    let dist = all_pairs_hops(4, &arcs(false, &[(0, 1), (1, 2), (2, 3)]));
    for t in &set.triplets {
        assert!(dist[t.anchor][t.positive] < dist[t.anchor][t.negative]);
        assert!(t.pos_hop < t.neg_hop);
    }
}

#[test]
fn karate_fixture_shape() {
    let g = common::fixtures::karate();
    assert_eq!(g.node_count(), 34);
    assert_eq!(g.edge_count(), 78);
    assert_eq!(g.labels().unwrap().iter().filter(|&&l| l == 0).count(), 17);
}
