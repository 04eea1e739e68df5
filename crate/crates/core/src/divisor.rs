//! Divisors, chip-firing and reduced representatives.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{GraphError, Multigraph};
use crate::linalg::solve_rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivisorError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("divisor has {found} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("divisor must have degree 0, got {0}")]
    NonzeroDegree(BigInt),
    #[error("bad divisor term {term:?}: {reason}")]
    Parse { term: String, reason: String },
}

/// An integer vector indexed by the vertices of some graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Divisor {
    values: Vec<BigInt>,
}

impl Divisor {
    pub fn new(values: Vec<BigInt>) -> Self {
        Divisor { values }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Divisor::new(values.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Divisor::new(vec![BigInt::zero(); n])
    }

    /// The single chip `v`.
    pub fn point(n: usize, v: usize) -> Self {
        let mut d = Divisor::zero(n);
        d.values[v] = BigInt::one();
        d
    }

    /// `v - w`.
    pub fn difference(n: usize, v: usize, w: usize) -> Self {
        let mut d = Divisor::zero(n);
        d.values[v] += 1;
        d.values[w] -= 1;
        d
    }

    /// Parses `"0:-1,3:1"`; unlisted vertices are zero. `"0"` and the empty
    /// string denote the zero divisor.
    pub fn parse(text: &str, n: usize) -> Result<Self, DivisorError> {
        let text = text.trim();
        let mut d = Divisor::zero(n);
        if text.is_empty() || text == "0" {
            return Ok(d);
        }
        let mut seen = vec![false; n];
        for term in text.split(',') {
            let err = |reason: &str| DivisorError::Parse {
                term: term.to_string(),
                reason: reason.to_string(),
            };
            let (i, v) = term
                .trim()
                .split_once(':')
                .ok_or_else(|| err("expected index:value"))?;
            let i: usize = i.trim().parse().map_err(|_| err("index is not a vertex number"))?;
            let v: BigInt = v.trim().parse().map_err(|_| err("value is not an integer"))?;
            if i >= n {
                return Err(err(&format!("vertex out of range for {n} vertices")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(err("vertex listed twice"));
            }
            d.values[i] = v;
        }
        Ok(d)
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn degree(&self) -> BigInt {
        self.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> Divisor {
        Divisor::new(self.values.iter().map(|x| x * k).collect())
    }

    pub(crate) fn check_len(&self, g: &Multigraph) -> Result<(), DivisorError> {
        if self.values.len() == g.vertex_count() {
            Ok(())
        } else {
            Err(DivisorError::LengthMismatch {
                expected: g.vertex_count(),
                found: self.values.len(),
            })
        }
    }

    pub(crate) fn check_degree_zero(&self) -> Result<(), DivisorError> {
        let deg = self.degree();
        if deg.is_zero() {
            Ok(())
        } else {
            Err(DivisorError::NonzeroDegree(deg))
        }
    }
}

/// Sparse text form, the inverse of [`Divisor::parse`].
impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}:{v}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        assert_eq!(self.len(), rhs.len());
        Divisor::new(self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        assert_eq!(self.len(), rhs.len());
        Divisor::new(self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor::new(self.values.iter().map(|a| -a).collect())
    }
}

/// `div(f)`: at `v`, the sum over neighbours `w` (with multiplicity) of
/// `f(v) - f(w)`. Equals `L f`.
pub fn div_of(g: &Multigraph, f: &[BigInt]) -> Result<Divisor, DivisorError> {
    if f.len() != g.vertex_count() {
        return Err(DivisorError::LengthMismatch {
            expected: g.vertex_count(),
            found: f.len(),
        });
    }
    let mut out = vec![BigInt::zero(); f.len()];
    for e in g.edges() {
        let d = (&f[e.u] - &f[e.v]) * e.mult;
        out[e.u] += &d;
        out[e.v] -= d;
    }
    Ok(Divisor::new(out))
}

/// The unique `base`-reduced divisor equivalent to `d`.
pub fn dhar_reduce(g: &Multigraph, d: &Divisor, base: usize) -> Result<Divisor, DivisorError> {
    d.check_len(g)?;
    g.check_vertex(base)?;
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut vals = d.values.clone();

    // Phase 1: make every non-base vertex nonnegative. Firing the ball of
    // radius k feeds the sphere of radius k + 1 and touches nothing farther
    // out, so spheres are settled from the outside in.
    let dist = bfs_layers(&adj, base);
    let depth = dist.iter().copied().max().unwrap_or(0);
    for k in (0..depth).rev() {
        let mut need = BigInt::zero();
        for v in (0..n).filter(|&v| dist[v] == k + 1 && vals[v].is_negative()) {
            let inward: u64 = adj[v]
                .iter()
                .filter(|&&(w, _)| dist[w] <= k)
                .map(|&(_, m)| m)
                .sum();
            let times = (-&vals[v]).div_ceil(&BigInt::from(inward));
            if times > need {
                need = times;
            }
        }
        if need.is_positive() {
            fire_set(&adj, &mut vals, |v| dist[v] <= k, &need);
        }
    }

    // Phase 2: burn from base; fire the unburnt region as often as it can
    // afford until the fire spreads everywhere.
    loop {
        let burnt = burn(&adj, &vals, base);
        if burnt.iter().all(|&b| b) {
            return Ok(Divisor::new(vals));
        }
        let mut times: Option<BigInt> = None;
        for v in (0..n).filter(|&v| !burnt[v]) {
            let out: u64 = adj[v].iter().filter(|&&(w, _)| burnt[w]).map(|&(_, m)| m).sum();
            if out > 0 {
                let t = vals[v].div_floor(&BigInt::from(out));
                if times.as_ref().is_none_or(|x| t < *x) {
                    times = Some(t);
                }
            }
        }
        let times = times.expect("unburnt region borders the burnt one");
        debug_assert!(times.is_positive());
        fire_set(&adj, &mut vals, |v| !burnt[v], &times);
    }
}

/// Whether `d` passes the burning test at `base`: nonnegative away from
/// `base`, and the fire started at `base` consumes the whole graph.
pub fn is_reduced(g: &Multigraph, d: &Divisor, base: usize) -> bool {
    if d.len() != g.vertex_count() || base >= g.vertex_count() {
        return false;
    }
    if d.values.iter().enumerate().any(|(v, x)| v != base && x.is_negative()) {
        return false;
    }
    burn(&g.adjacency(), &d.values, base).iter().all(|&b| b)
}

/// True when `d1 - d2` is principal. Unequal degrees give `false`.
pub fn is_equivalent(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> Result<bool, DivisorError> {
    d1.check_len(g)?;
    d2.check_len(g)?;
    if d1.degree() != d2.degree() {
        return Ok(false);
    }
    Ok(dhar_reduce(g, &(d1 - d2), 0)?.is_zero())
}

/// Least `m >= 1` with `m d` principal, for `d` of degree 0.
///
/// `m d` is principal exactly when `m` clears the denominators of the
/// rational solution of `L~ x = d` restricted away from vertex 0.
pub fn class_order(g: &Multigraph, d: &Divisor) -> Result<BigInt, DivisorError> {
    d.check_len(g)?;
    d.check_degree_zero()?;
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    if g.vertex_count() == 1 {
        return Ok(BigInt::one());
    }
    let l = g.reduced_laplacian(0);
    let x = solve_rational(&l, &d.values[1..]).expect("reduced Laplacian is nonsingular");
    Ok(x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom())))
}

/// Order by repeated addition and reduction, giving up after `limit` steps.
pub fn class_order_naive(g: &Multigraph, d: &Divisor, limit: u64) -> Result<Option<u64>, DivisorError> {
    d.check_len(g)?;
    d.check_degree_zero()?;
    let mut acc = d.clone();
    for m in 1..=limit {
        if dhar_reduce(g, &acc, 0)?.is_zero() {
            return Ok(Some(m));
        }
        acc = &acc + d;
    }
    Ok(None)
}

fn bfs_layers(adj: &[Vec<(usize, u64)>], base: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[base] = 0;
    let mut queue = std::collections::VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Every vertex of the set fires `times` times.
fn fire_set(adj: &[Vec<(usize, u64)>], vals: &mut [BigInt], in_set: impl Fn(usize) -> bool, times: &BigInt) {
    for v in 0..adj.len() {
        if !in_set(v) {
            continue;
        }
        for &(w, m) in &adj[v] {
            if !in_set(w) {
                let moved = times * m;
                vals[v] -= &moved;
                vals[w] += moved;
            }
        }
    }
}

fn burn(adj: &[Vec<(usize, u64)>], vals: &[BigInt], base: usize) -> Vec<bool> {
    let n = adj.len();
    let mut burnt = vec![false; n];
    let mut fire_edges = vec![0u64; n];
    burnt[base] = true;
    let mut stack = vec![base];
    while let Some(v) = stack.pop() {
        for &(w, m) in &adj[v] {
            if burnt[w] {
                continue;
            }
            fire_edges[w] += m;
            if BigInt::from(fire_edges[w]) > vals[w] {
                burnt[w] = true;
                stack.push(w);
            }
        }
    }
    burnt
}
