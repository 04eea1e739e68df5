//! The graph families used to realize groups with pairing.
//!
//! Labels are fixed so that divisors written down in tests and docs stay
//! meaningful:
//!
//! * `cycle(n)`: vertices `0..n` in cyclic order.
//! * `banana(m)`: vertices `0` and `1`.
//! * `subdivided_banana(s)`: hubs `0` and `1`, then the interior vertices of
//!   each strand in strand order, each strand running from hub `0` to hub `1`.
//! * `multicycle(s)`: vertices `0..m`, with `s[i]` edges between `i` and
//!   `i + 1 (mod m)`.
//! * `wedge(g1, g2, a, b)`: `g1` keeps its labels; the vertices of `g2` other
//!   than `b` follow in their original order.

use std::fmt;

use super::{GraphError, Multigraph};

/// A strand-length tuple `s = (s_1, ..., s_m)`, `m >= 2`, all parts positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct STuple(Vec<u64>);

impl STuple {
    pub fn new(parts: Vec<u64>) -> Result<Self, GraphError> {
        if parts.len() < 2 {
            return Err(GraphError::InvalidParameter(format!(
                "an s-tuple needs at least two parts, got {}",
                parts.len()
            )));
        }
        if parts.contains(&0) {
            return Err(GraphError::InvalidParameter(
                "s-tuple parts must be positive".into(),
            ));
        }
        Ok(STuple(parts))
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    /// Same parts in ascending order.
    pub fn sorted(&self) -> STuple {
        let mut p = self.0.clone();
        p.sort_unstable();
        STuple(p)
    }

    /// `sum_i prod_{j != i} s_j`, the tree count of both `B_s` and `C_s`.
    /// `None` on overflow.
    pub fn tree_count(&self) -> Option<u128> {
        let mut total: u128 = 0;
        for i in 0..self.0.len() {
            let mut prod: u128 = 1;
            for (j, &s) in self.0.iter().enumerate() {
                if j != i {
                    prod = prod.checked_mul(s as u128)?;
                }
            }
            total = total.checked_add(prod)?;
        }
        Some(total)
    }

    /// `prod_i s_i`. `None` on overflow.
    pub fn product(&self) -> Option<u128> {
        self.0
            .iter()
            .try_fold(1u128, |acc, &s| acc.checked_mul(s as u128))
    }
}

impl fmt::Display for STuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

fn param(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParameter(msg.into())
}

/// The cycle `C_n`. `n = 2` gives the doubled edge.
pub fn cycle(n: usize) -> Result<Multigraph, GraphError> {
    if n < 2 {
        return Err(param(format!(
            "cycle needs at least 2 vertices (loops are not allowed), got {n}"
        )));
    }
    Multigraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1)))
}

/// The banana graph `B_m`: two vertices and `m` parallel edges.
pub fn banana(m: u64) -> Result<Multigraph, GraphError> {
    if m == 0 {
        return Err(param("banana graph needs at least one edge"));
    }
    Multigraph::from_edges(2, [(0, 1, m)])
}

/// `B_m` with its `i`-th edge subdivided `s_i - 1` times.
pub fn subdivided_banana(s: &STuple) -> Result<Multigraph, GraphError> {
    let interior: u64 = s.parts().iter().map(|&x| x - 1).sum();
    let n = usize::try_from(interior)
        .ok()
        .and_then(|i| i.checked_add(2))
        .ok_or_else(|| param(format!("subdivided banana {s} is too large")))?;
    let mut edges = Vec::with_capacity(n + s.parts().len());
    let mut next = 2;
    for &len in s.parts() {
        let mut prev = 0;
        for _ in 1..len {
            edges.push((prev, next, 1));
            prev = next;
            next += 1;
        }
        edges.push((prev, 1, 1));
    }
    Multigraph::from_edges(n, edges)
}

/// The multicycle `C_s` on `m` vertices, parts taken in the given order.
pub fn multicycle(s: &STuple) -> Result<Multigraph, GraphError> {
    let m = s.parts().len();
    Multigraph::from_edges(
        m,
        s.parts().iter().enumerate().map(|(i, &k)| (i, (i + 1) % m, k)),
    )
}

/// The complete graph `K_n`.
pub fn complete(n: usize) -> Result<Multigraph, GraphError> {
    if n == 0 {
        return Err(param("complete graph needs at least one vertex"));
    }
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1)));
    Multigraph::from_edges(n, edges)
}

/// Glues `g1` and `g2` by identifying `a` in `g1` with `b` in `g2`.
pub fn wedge(g1: &Multigraph, g2: &Multigraph, a: usize, b: usize) -> Result<Multigraph, GraphError> {
    g1.check_vertex(a)?;
    g2.check_vertex(b)?;
    let n1 = g1.vertex_count();
    let map = |v: usize| match v.cmp(&b) {
        std::cmp::Ordering::Equal => a,
        std::cmp::Ordering::Less => n1 + v,
        std::cmp::Ordering::Greater => n1 + v - 1,
    };
    let edges = g1
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.mult))
        .chain(g2.edges().iter().map(|e| (map(e.u), map(e.v), e.mult)));
    Multigraph::from_edges(n1 + g2.vertex_count() - 1, edges)
}

/// A tree on `n` vertices with the listed edges doubled.
///
/// Every graph built this way has Jacobian `(Z/2)^k`, `k = doubled.len()`.
pub fn doubled_tree(
    n: usize,
    tree: &[(usize, usize)],
    doubled: &[(usize, usize)],
) -> Result<Multigraph, GraphError> {
    if n == 0 {
        return Err(param("a tree needs at least one vertex"));
    }
    if tree.len() != n - 1 {
        return Err(param(format!(
            "a tree on {n} vertices has {} edges, got {}",
            n - 1,
            tree.len()
        )));
    }
    let t = Multigraph::from_edges(n, tree.iter().map(|&(u, v)| (u, v, 1)))?;
    if t.edges().len() != tree.len() || !t.is_connected() {
        return Err(param("edge list is not a tree"));
    }
    let mut edges: Vec<(usize, usize, u64)> = tree.iter().map(|&(u, v)| (u, v, 1)).collect();
    for &(u, v) in doubled {
        if t.multiplicity(u, v) == 0 {
            return Err(param(format!("({u}, {v}) is not an edge of the tree")));
        }
        edges.push((u, v, 1));
    }
    let g = Multigraph::from_edges(n, edges)?;
    if g.edges().iter().any(|e| e.mult > 2) {
        return Err(param("a tree edge was doubled more than once"));
    }
    Ok(g)
}
