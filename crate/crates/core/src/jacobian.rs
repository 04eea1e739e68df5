//! The Jacobian of a multigraph and its monodromy pairing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::divisor::{dhar_reduce, Divisor, DivisorError};
use crate::graph::{GraphError, Multigraph};
use crate::linalg::{smith_normal_form, solve_rational, IntMatrix};
use crate::pairing::{frac, GroupWithPairing};

/// `Jac(G) = Z^(n-1) / L~ Z^(n-1)` written as `⊕ Z/d_i` through the Smith
/// form `U L~ V = S` of the Laplacian reduced at `base`.
#[derive(Debug, Clone)]
pub struct JacobianPresentation {
    base: usize,
    vertex_count: usize,
    invariant_factors: Vec<BigInt>,
    generators: Vec<Divisor>,
    /// Rows of `U` for the nontrivial factors.
    coord_rows: Vec<Vec<BigInt>>,
    /// Columns of `U^-1` (generator divisors away from `base`).
    gen_cols: Vec<Vec<BigInt>>,
    /// Columns of `V`; `L~^-1 g_i = v_i / d_i`.
    v_cols: Vec<Vec<BigInt>>,
}

pub fn jacobian(g: &Multigraph, base: usize) -> Result<JacobianPresentation, DivisorError> {
    g.check_vertex(base)?;
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let n = g.vertex_count();
    let l = g.reduced_laplacian(base);
    let snf = smith_normal_form(&l);
    let diag = snf.diagonal();
    let keep: Vec<usize> = (0..n - 1).filter(|&i| !diag[i].is_one()).collect();
    let gen_cols: Vec<Vec<BigInt>> = keep.iter().map(|&i| snf.u_inv.column(i)).collect();
    let mut generators = Vec::with_capacity(keep.len());
    for col in &gen_cols {
        let d = Divisor::new(expand(col, base));
        generators.push(dhar_reduce(g, &d, base)?);
    }
    Ok(JacobianPresentation {
        base,
        vertex_count: n,
        invariant_factors: keep.iter().map(|&i| diag[i].clone()).collect(),
        generators,
        coord_rows: keep.iter().map(|&i| snf.u.row(i).to_vec()).collect(),
        gen_cols,
        v_cols: keep.iter().map(|&i| snf.v.column(i)).collect(),
    })
}

/// Inserts the `base` entry that makes the degree zero.
fn expand(restricted: &[BigInt], base: usize) -> Vec<BigInt> {
    let mut full = Vec::with_capacity(restricted.len() + 1);
    full.extend_from_slice(&restricted[..base]);
    full.push(-restricted.iter().sum::<BigInt>());
    full.extend_from_slice(&restricted[base..]);
    full
}

fn restrict(d: &Divisor, base: usize) -> Vec<BigInt> {
    d.values()
        .iter()
        .enumerate()
        .filter(|&(v, _)| v != base)
        .map(|(_, x)| x.clone())
        .collect()
}

impl JacobianPresentation {
    pub fn base(&self) -> usize {
        self.base
    }

    /// `d_1 | d_2 | ... | d_k`, all `> 1`; their product is the tree count.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Base-reduced divisors; `generators[i]` has order `d_i`.
    pub fn generators(&self) -> &[Divisor] {
        &self.generators
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Largest element order.
    pub fn exponent(&self) -> BigInt {
        self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Coordinates of the class of a degree-0 divisor, `c_i mod d_i`.
    pub fn to_coords(&self, d: &Divisor) -> Result<Vec<BigInt>, DivisorError> {
        if d.len() != self.vertex_count {
            return Err(DivisorError::LengthMismatch {
                expected: self.vertex_count,
                found: d.len(),
            });
        }
        d.check_degree_zero()?;
        let x = restrict(d, self.base);
        Ok(self
            .coord_rows
            .iter()
            .zip(&self.invariant_factors)
            .map(|(row, m)| {
                row.iter()
                    .zip(&x)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
                    .mod_floor(m)
            })
            .collect())
    }

    /// `Σ c_i g_i` (not reduced).
    pub fn from_coords(&self, coords: &[BigInt]) -> Divisor {
        let mut acc = Divisor::zero(self.vertex_count);
        for (c, g) in coords.iter().zip(&self.generators) {
            acc = &acc + &g.scale(c);
        }
        acc
    }

    /// Order of the class of `d`.
    pub fn class_order(&self, d: &Divisor) -> Result<BigInt, DivisorError> {
        let c = self.to_coords(d)?;
        Ok(c.iter()
            .zip(&self.invariant_factors)
            .fold(BigInt::one(), |acc, (x, m)| acc.lcm(&(m / x.gcd(m)))))
    }

    /// The monodromy pairing on the generators.
    pub fn gram_matrix(&self) -> GroupWithPairing {
        let k = self.invariant_factors.len();
        let gram = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let num: BigInt = self.gen_cols[j].iter().zip(&self.v_cols[i]).map(|(a, b)| a * b).sum();
                        frac(&BigRational::new(num, self.invariant_factors[i].clone()))
                    })
                    .collect()
            })
            .collect();
        GroupWithPairing::new(self.invariant_factors.clone(), gram).expect("Laplacian pairing is a valid form")
    }
}

/// `⟨D1, D2⟩ = (1/m) Σ_v D2(v) f(v)` where `div(f) = m D1`, in `[0, 1)`.
pub fn monodromy_pairing(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> Result<BigRational, DivisorError> {
    d1.check_len(g)?;
    d2.check_len(g)?;
    d1.check_degree_zero()?;
    d2.check_degree_zero()?;
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    if g.vertex_count() == 1 {
        return Ok(BigRational::zero());
    }
    // With f(v_0) = 0 the equation div(f) = m D1 is L~ f = m D1 away from v_0.
    let x = solve_rational(&g.reduced_laplacian(0), &d1.values()[1..]).expect("nonsingular");
    let m = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let f: Vec<BigInt> = x.iter().map(|q| (q * BigRational::from(m.clone())).to_integer()).collect();
    let sum: BigInt = d2.values()[1..].iter().zip(&f).map(|(a, b)| a * b).sum();
    Ok(frac(&BigRational::new(sum, m)))
}

/// `Jac(G)` with its pairing, assembled block by block.
///
/// Each biconnected block is handled either through its reduced Laplacian
/// or, when it has more vertices than independent cycles, through its cycle
/// lattice after contracting 2-valent paths. The result is in invariant
/// form. This is the route for large graphs, where no explicit generators
/// are needed.
pub fn jacobian_form(g: &Multigraph) -> Result<GroupWithPairing, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut acc = GroupWithPairing::trivial();
    for block in g.blocks() {
        let h = &block.graph;
        let n = h.vertex_count() as u64;
        let genus = h.total_multiplicity() + 1 - n;
        if genus == 0 {
            continue;
        }
        let form = if n - 1 <= genus {
            discriminant_form(&h.reduced_laplacian(0), false)
        } else {
            discriminant_form(&cycle_lattice(h), true)
        };
        acc = acc.orthogonal_sum(&form);
    }
    Ok(acc.to_invariant_form())
}

/// `Z^k / A Z^k` with the pairing `±x^T A^-1 y`, for symmetric nonsingular `A`.
fn discriminant_form(a: &IntMatrix, negate: bool) -> GroupWithPairing {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let keep: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
    let gens: Vec<Vec<BigInt>> = keep.iter().map(|&i| snf.u_inv.column(i)).collect();
    let vs: Vec<Vec<BigInt>> = keep.iter().map(|&i| snf.v.column(i)).collect();
    let sign = if negate { -BigInt::one() } else { BigInt::one() };
    let gram = (0..keep.len())
        .map(|i| {
            (0..keep.len())
                .map(|j| {
                    let num: BigInt = gens[j].iter().zip(&vs[i]).map(|(a, b)| a * b).sum();
                    BigRational::new(&sign * num, diag[keep[i]].clone())
                })
                .collect()
        })
        .collect();
    GroupWithPairing::new(keep.iter().map(|&i| diag[i].clone()).collect(), gram)
        .expect("symmetric nonsingular matrix gives a valid form")
}

/// Gram matrix of the cycle lattice, each edge weighted by the length of
/// the 2-valent path it replaces.
fn cycle_lattice(h: &Multigraph) -> IntMatrix {
    let n = h.vertex_count();
    let adj = h.adjacency();
    let is_chain = |v: usize| adj[v].len() == 2 && adj[v].iter().all(|&(_, m)| m == 1);
    let mut kept: Vec<bool> = (0..n).map(|v| !is_chain(v)).collect();
    if !kept.iter().any(|&k| k) {
        kept[0] = true;
    }
    // Contracted edges (a, b, length).
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    let mut visited = vec![false; n];
    for e in h.edges() {
        if kept[e.u] && kept[e.v] {
            for _ in 0..e.mult {
                edges.push((e.u, e.v, 1));
            }
        }
    }
    for u in (0..n).filter(|&u| kept[u]) {
        for &(w, _) in &adj[u] {
            if kept[w] || visited[w] {
                continue;
            }
            let (mut prev, mut cur, mut len) = (u, w, 1u64);
            while !kept[cur] {
                visited[cur] = true;
                let next = adj[cur].iter().map(|&(x, _)| x).find(|&x| x != prev).expect("two neighbours");
                prev = cur;
                cur = next;
                len += 1;
            }
            edges.push((u, cur, len));
        }
    }

    // Spanning tree of the contracted graph.
    let mut hadj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b, _)) in edges.iter().enumerate() {
        hadj[a].push((b, i));
        if a != b {
            hadj[b].push((a, i));
        }
    }
    let root = (0..n).find(|&v| kept[v]).unwrap();
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree = vec![false; edges.len()];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &(w, i) in &hadj[v] {
            if !seen[w] {
                seen[w] = true;
                tree[i] = true;
                parent_edge[w] = Some(i);
                stack.push(w);
            }
        }
    }
    // Signed path from x to the root, as edge coefficients.
    let up = |mut x: usize, coeff: &mut Vec<i64>, sign: i64| {
        while let Some(i) = parent_edge[x] {
            let (a, b, _) = edges[i];
            let to = if a == x { b } else { a };
            coeff[i] += if a == x { sign } else { -sign };
            x = to;
        }
    };
    let mut cycles: Vec<Vec<i64>> = Vec::new();
    for (i, &(a, b, _)) in edges.iter().enumerate() {
        if tree[i] {
            continue;
        }
        let mut c = vec![0i64; edges.len()];
        c[i] += 1;
        up(b, &mut c, 1);
        up(a, &mut c, -1);
        cycles.push(c);
    }
    let g = cycles.len();
    let mut m = IntMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let s: i128 = (0..edges.len())
                .map(|e| edges[e].2 as i128 * cycles[i][e] as i128 * cycles[j][e] as i128)
                .sum();
            m[(i, j)] = BigInt::from(s);
            m[(j, i)] = BigInt::from(s);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{banana, complete, cycle, multicycle, subdivided_banana, wedge, STuple};

    fn factors(g: &Multigraph) -> Vec<u64> {
        jacobian(g, 0)
            .unwrap()
            .invariant_factors()
            .iter()
            .map(|d| d.try_into().unwrap())
            .collect()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(factors(&cycle(4).unwrap()), vec![4]);
        let w = wedge(&cycle(3).unwrap(), &cycle(4).unwrap(), 0, 0).unwrap();
        assert_eq!(factors(&w), vec![12]);
        assert_eq!(factors(&complete(4).unwrap()), vec![4, 4]);
        let b = subdivided_banana(&STuple::new(vec![2, 2, 2]).unwrap()).unwrap();
        assert_eq!(factors(&b), vec![2, 6]);
    }

    #[test]
    fn generators_have_the_right_orders() {
        let g = complete(4).unwrap();
        let j = jacobian(&g, 2).unwrap();
        for (gen, d) in j.generators().iter().zip(j.invariant_factors()) {
            assert_eq!(&crate::divisor::class_order(&g, gen).unwrap(), d);
            assert_eq!(&j.class_order(gen).unwrap(), d);
        }
    }

    #[test]
    fn pairing_examples() {
        for n in 2..9u64 {
            let b = banana(n).unwrap();
            let d = Divisor::difference(2, 1, 0);
            assert_eq!(monodromy_pairing(&b, &d, &d).unwrap(), q(1, n as i64));
            let c = cycle(n as usize).unwrap();
            let d = Divisor::difference(n as usize, 1, 0);
            assert_eq!(monodromy_pairing(&c, &d, &d).unwrap(), q(n as i64 - 1, n as i64));
        }
        // Multicycle (1,2,2): v2 - v0 pairs to 3/8 with itself.
        let m = multicycle(&STuple::new(vec![1, 2, 2]).unwrap()).unwrap();
        let d = Divisor::difference(3, 2, 0);
        assert_eq!(monodromy_pairing(&m, &d, &d).unwrap(), q(3, 8));
    }

    #[test]
    fn gram_examples() {
        let j = jacobian(&cycle(5).unwrap(), 0).unwrap();
        let gram = j.gram_matrix();
        assert_eq!(gram.gram()[0][0], q(4, 5));
        for (i, gi) in j.generators().iter().enumerate() {
            for (k, gk) in j.generators().iter().enumerate() {
                let direct = monodromy_pairing(&cycle(5).unwrap(), gi, gk).unwrap();
                assert_eq!(gram.gram()[i][k], direct);
            }
        }
    }

    #[test]
    fn fast_route_agrees_on_small_graphs() {
        let graphs = [
            cycle(6).unwrap(),
            complete(4).unwrap(),
            subdivided_banana(&STuple::new(vec![4, 2, 3]).unwrap()).unwrap(),
            multicycle(&STuple::new(vec![1, 3, 4, 2]).unwrap()).unwrap(),
            wedge(&cycle(3).unwrap(), &complete(4).unwrap(), 1, 2).unwrap(),
        ];
        for g in &graphs {
            let slow = jacobian(g, 0).unwrap().gram_matrix();
            let fast = jacobian_form(g).unwrap();
            assert_eq!(slow.orders(), fast.orders());
            assert_eq!(
                crate::classify::classify(&slow).unwrap(),
                crate::classify::classify(&fast).unwrap()
            );
        }
    }

    #[test]
    fn long_strand_uses_cycle_lattice() {
        let s = STuple::new(vec![1, 100_000]).unwrap();
        let g = subdivided_banana(&s).unwrap();
        let form = jacobian_form(&g).unwrap();
        assert_eq!(form.orders(), &[BigInt::from(100_001)]);
    }
}
