#![allow(dead_code)]

use bsep::graph::WeightedGraph;
use proptest::prelude::*;

/// Connected graph on `2..=max_n` vertices: a random spanning tree plus
/// random extra edges, weights in `1..=max_w`.
pub fn connected_graph(max_n: usize, max_w: u64) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(1..=max_w, n - 1 + pairs),
        )
            .prop_map(|(n, parents, extra, weights)| {
                let mut w = weights.into_iter();
                let mut triples: Vec<(usize, usize, u64)> =
                    (1..n).map(|v| (parents[v - 1].index(v), v, w.next().unwrap())).collect();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        let wt = w.next().unwrap();
                        if extra[k] && !triples.iter().any(|&(a, b, _)| (a.min(b), a.max(b)) == (u, v)) {
                            triples.push((u, v, wt));
                        }
                        k += 1;
                    }
                }
                WeightedGraph::from_triples(n, &triples).unwrap()
            })
    })
}

/// Like [`connected_graph`], with every edge reweighted to the distance
/// between its endpoints.
pub fn weight_minimal_graph(max_n: usize, max_w: u64) -> impl Strategy<Value = WeightedGraph> {
    connected_graph(max_n, max_w).prop_map(|g| {
        let d = g.distances().unwrap();
        let t: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, d.get(e.u, e.v))).collect();
        WeightedGraph::from_triples(g.n(), &t).unwrap()
    })
}

/// Random tree on `2..=max_n` vertices.
pub fn tree(max_n: usize, max_w: u64) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
            proptest::collection::vec(1..=max_w, n - 1),
        )
            .prop_map(move |(parents, w)| {
                let t: Vec<_> = (1..n).map(|v| (parents[v - 1].index(v), v, w[v - 1])).collect();
                WeightedGraph::from_triples(n, &t).unwrap()
            })
    })
}

/// Cycle weights on `3..=max_n` vertices where no edge exceeds half the total.
pub fn minimal_cycle_weights(max_n: usize, max_w: u64) -> impl Strategy<Value = Vec<u64>> {
    (3..=max_n)
        .prop_flat_map(move |n| proptest::collection::vec(1..=max_w, n))
        .prop_filter("weight-minimal", |w| {
            let total: u64 = w.iter().sum();
            w.iter().all(|&x| 2 * x <= total)
        })
}

/// All tuples of `len` positive integers with sum at most `max_sum`.
pub fn weight_tuples(len: usize, max_sum: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t: Vec<u64>| {
                let used: u64 = t.iter().sum();
                (1..=max_sum.saturating_sub(used)).map(move |w| {
                    let mut t = t.clone();
                    t.push(w);
                    t
                })
            })
            .collect();
    }
    out
}
