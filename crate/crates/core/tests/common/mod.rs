#![allow(dead_code)]

use jacpair::graph::Multigraph;
use proptest::prelude::*;

/// A random connected loopless multigraph: a random tree plus extra edges.
pub fn connected_multigraph(max_n: usize, max_extra: usize) -> impl Strategy<Value = Multigraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let parents = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extras = prop::collection::vec((0..n, 0..n, 1u64..=3), 0..=max_extra);
        (Just(n), parents, extras).prop_map(|(n, parents, extras)| {
            let tree = parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1, 1));
            let extra = extras.into_iter().filter(|&(u, v, _)| u != v);
            Multigraph::from_edges(n, tree.chain(extra)).unwrap()
        })
    })
}

/// A degree-0 integer vector of length `n`.
pub fn degree_zero(n: usize, range: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-range..=range, n).prop_map(|mut v| {
        let s: i64 = v.iter().sum();
        v[0] -= s;
        v
    })
}
