//! Loopless multigraphs and everything structural about them.

mod canon;
mod construct;
mod format;
mod structure;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::IntMatrix;

pub use canon::{canonical_form, CanonicalForm};
pub use construct::{
    banana, complete, cycle, doubled_tree, multicycle, subdivided_banana, wedge, STuple,
};
pub use format::{emit_graph, parse_graph, ParseGraphError};
pub use structure::{spanning_tree_count, stats, Block, GraphStats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("loop at vertex {0}; loops are not allowed")]
    Loop(usize),
    #[error("vertex {vertex} out of range for a graph on {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One record of the edge multiset: `mult` parallel edges between `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub mult: u64,
}

/// A finite loopless multigraph on vertices `0..vertex_count`.
///
/// Edge records are kept sorted by `(u, v)` with `u < v` and one record per
/// unordered pair. Connectivity is not enforced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl Multigraph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Multigraph {
            vertex_count: n,
            edges: Vec::new(),
        }
    }

    /// Builds a graph from `(u, v, mult)` triples in any order and
    /// orientation. Repeated pairs have their multiplicities summed and
    /// zero multiplicities are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut map = BTreeMap::new();
        for (a, b, mult) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: x,
                        vertex_count: n,
                    });
                }
            }
            if a == b {
                return Err(GraphError::Loop(a));
            }
            if mult > 0 {
                *map.entry((a.min(b), a.max(b))).or_insert(0u64) += mult;
            }
        }
        Ok(Multigraph {
            vertex_count: n,
            edges: map
                .into_iter()
                .map(|((u, v), mult)| Edge { u, v, mult })
                .collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sum of all multiplicities.
    pub fn total_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.mult).sum()
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> u64 {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .map_or(0, |i| self.edges[i].mult)
    }

    /// Number of edge ends at `v`, counting multiplicity.
    pub fn valence(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|e| e.u == v || e.v == v)
            .map(|e| e.mult)
            .sum()
    }

    pub fn valences(&self) -> Vec<u64> {
        let mut val = vec![0; self.vertex_count];
        for e in &self.edges {
            val[e.u] += e.mult;
            val[e.v] += e.mult;
        }
        val
    }

    /// Neighbour lists as `(neighbour, multiplicity)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push((e.v, e.mult));
            adj[e.v].push((e.u, e.mult));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    pub(crate) fn require_connected(&self) -> Result<(), GraphError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// The full Laplacian `L = diag(valence) - adjacency`.
    pub fn laplacian(&self) -> IntMatrix {
        let n = self.vertex_count;
        let mut l = IntMatrix::zeros(n, n);
        for e in &self.edges {
            let m = BigInt::from(e.mult);
            l[(e.u, e.u)] += &m;
            l[(e.v, e.v)] += &m;
            l[(e.u, e.v)] -= &m;
            l[(e.v, e.u)] -= &m;
        }
        l
    }

    /// Laplacian with the row and column of `base` deleted. Remaining
    /// vertices keep their relative order.
    pub fn reduced_laplacian(&self, base: usize) -> IntMatrix {
        let n = self.vertex_count;
        let idx = |v: usize| if v < base { v } else { v - 1 };
        let mut l = IntMatrix::zeros(n - 1, n - 1);
        for e in &self.edges {
            let m = BigInt::from(e.mult);
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if a != base {
                    l[(idx(a), idx(a))] += &m;
                    if b != base {
                        l[(idx(a), idx(b))] -= &m;
                    }
                }
            }
        }
        l
    }

    /// Applies a vertex relabeling: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Multigraph {
        assert_eq!(perm.len(), self.vertex_count);
        Multigraph::from_edges(
            self.vertex_count,
            self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.mult)),
        )
        .expect("a permutation keeps the graph valid")
    }

    /// Induced sub-multigraph on `vertices`, relabeled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Multigraph {
        let mut local = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| (local[e.u], local[e.v], e.mult));
        Multigraph::from_edges(vertices.len(), edges).expect("induced subgraph is valid")
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| e.mult == 1)
    }
}
