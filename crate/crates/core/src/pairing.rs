//! Finite abelian groups with a `Q/Z`-valued symmetric pairing.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{smith_normal_form, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("generator orders must be positive")]
    BadOrder,
    #[error("gram matrix must be {0}x{0}")]
    Shape(usize),
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("gram entry ({0}, {1}) is not killed by the generator order")]
    OrderMismatch(usize, usize),
    #[error("pairing is degenerate")]
    Degenerate,
    #[error("group order {order} exceeds the brute-force bound {bound}")]
    TooLarge { order: BigInt, bound: u64 },
}

/// `Γ = ⊕ Z/orders[i] · g_i` with `gram[i][j] = ⟨g_i, g_j⟩ ∈ [0, 1)`.
///
/// The orders need not form a divisibility chain; see
/// [`GroupWithPairing::to_invariant_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupWithPairing {
    orders: Vec<BigInt>,
    gram: Vec<Vec<BigRational>>,
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

impl GroupWithPairing {
    /// Validates and reduces the entries mod 1. Generators of order 1 are
    /// dropped.
    pub fn new(orders: Vec<BigInt>, gram: Vec<Vec<BigRational>>) -> Result<Self, PairingError> {
        let k = orders.len();
        if orders.iter().any(|d| d < &BigInt::one()) {
            return Err(PairingError::BadOrder);
        }
        if gram.len() != k || gram.iter().any(|row| row.len() != k) {
            return Err(PairingError::Shape(k));
        }
        let gram: Vec<Vec<BigRational>> = gram.iter().map(|row| row.iter().map(frac).collect()).collect();
        for i in 0..k {
            for j in 0..k {
                if gram[i][j] != gram[j][i] {
                    return Err(PairingError::Asymmetric(i, j));
                }
                if !(&gram[i][j] * BigRational::from(orders[i].clone())).is_integer() {
                    return Err(PairingError::OrderMismatch(i, j));
                }
            }
        }
        let keep: Vec<usize> = (0..k).filter(|&i| !orders[i].is_one()).collect();
        Ok(GroupWithPairing {
            orders: keep.iter().map(|&i| orders[i].clone()).collect(),
            gram: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| gram[i][j].clone()).collect())
                .collect(),
        })
    }

    /// Convenience constructor from small numerators over `denominators`.
    pub fn from_fractions(orders: &[u64], gram: &[Vec<(i64, u64)>]) -> Result<Self, PairingError> {
        GroupWithPairing::new(
            orders.iter().map(|&d| BigInt::from(d)).collect(),
            gram.iter()
                .map(|row| {
                    row.iter()
                        .map(|&(a, b)| BigRational::new(a.into(), b.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn trivial() -> Self {
        GroupWithPairing {
            orders: Vec::new(),
            gram: Vec::new(),
        }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn gram(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.orders.iter().fold(BigInt::one(), |a, d| a.lcm(d))
    }

    /// `⟨x, y⟩` for coordinate vectors.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += &self.gram[i][j] * BigRational::from(xi * yj);
                }
            }
        }
        frac(&acc)
    }

    /// Orthogonal direct sum.
    pub fn orthogonal_sum(&self, other: &GroupWithPairing) -> GroupWithPairing {
        let (a, b) = (self.rank(), other.rank());
        let mut gram = vec![vec![BigRational::zero(); a + b]; a + b];
        for i in 0..a {
            for j in 0..a {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                gram[a + i][a + j] = other.gram[i][j].clone();
            }
        }
        GroupWithPairing {
            orders: self.orders.iter().chain(&other.orders).cloned().collect(),
            gram,
        }
    }

    /// Invariant factors `d_1 | d_2 | ... | d_k`, each `> 1`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.to_invariant_form().orders
    }

    /// The same group with pairing on generators whose orders form a
    /// divisibility chain.
    pub fn to_invariant_form(&self) -> GroupWithPairing {
        let k = self.rank();
        if k == 0 {
            return self.clone();
        }
        let snf = smith_normal_form(&IntMatrix::diagonal(&self.orders));
        // x ↦ U x identifies ⊕ Z/orders with ⊕ Z/s_i; the new generators are
        // the columns of U^{-1}.
        let diag = snf.diagonal();
        let cols: Vec<Vec<BigInt>> = (0..k).map(|j| snf.u_inv.column(j)).collect();
        let keep: Vec<usize> = (0..k).filter(|&i| !diag[i].is_one()).collect();
        GroupWithPairing {
            orders: keep.iter().map(|&i| diag[i].clone()).collect(),
            gram: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| self.pair(&cols[i], &cols[j])).collect())
                .collect(),
        }
    }

    /// The map `Γ → Hom(Γ, Q/Z)` is injective.
    ///
    /// With `N` the exponent, the map is `x ↦ N·Q x` into `⊕ Z/N`, so its image
    /// is the column span of `[N Q | N I]`, whose index in `Z^k` is read off
    /// the Smith form.
    pub fn is_nondegenerate(&self) -> bool {
        let k = self.rank();
        if k == 0 {
            return true;
        }
        let n = self.exponent();
        let nr = BigRational::from(n.clone());
        let mut m = IntMatrix::zeros(k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = (&self.gram[i][j] * &nr).to_integer();
            }
            m[(i, k + i)] = n.clone();
        }
        let snf = smith_normal_form(&m);
        let index: BigInt = snf.diagonal().iter().product();
        let image = n.pow(k as u32) / index;
        image == self.order()
    }

    /// All elements as coordinate vectors, for brute force on small groups.
    fn elements(&self) -> Vec<Vec<u64>> {
        let orders: Vec<u64> = self.orders.iter().map(|d| d.to_u64().expect("small")).collect();
        let mut out = vec![vec![]];
        for &d in &orders {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// Default bound on `|Γ|` for [`isometric`].
pub const ISOMETRY_BOUND: u64 = 1 << 10;

/// Exhaustive search for a pairing-preserving group isomorphism.
pub fn isometric(a: &GroupWithPairing, b: &GroupWithPairing, bound: u64) -> Result<bool, PairingError> {
    for g in [a, b] {
        if g.order() > BigInt::from(bound) {
            return Err(PairingError::TooLarge {
                order: g.order(),
                bound,
            });
        }
    }
    let a = a.to_invariant_form();
    if a.order() != b.order() || a.orders != b.invariant_factors() {
        return Ok(false);
    }
    let n = b.exponent().to_u64().expect("small");
    let nr = BigRational::from(BigInt::from(n));
    // Pairings scaled to integers mod N.
    let scaled = |q: &BigRational| (q * &nr).to_integer().to_u64().expect("small");
    let target: Vec<Vec<u64>> = a.gram.iter().map(|row| row.iter().map(scaled).collect()).collect();
    let b_orders: Vec<u64> = b.orders.iter().map(|d| d.to_u64().unwrap()).collect();
    let b_gram: Vec<Vec<u64>> = b.gram.iter().map(|row| row.iter().map(scaled).collect()).collect();
    let elements = b.elements();
    let pair = |x: &[u64], y: &[u64]| -> u64 {
        let mut acc = 0u64;
        for i in 0..x.len() {
            for j in 0..y.len() {
                acc = (acc + x[i] * y[j] % n * b_gram[i][j]) % n;
            }
        }
        acc
    };
    let order_of = |x: &[u64]| -> u64 {
        x.iter()
            .zip(&b_orders)
            .map(|(&xi, &d)| d / xi.gcd(&d))
            .fold(1, |acc, o| acc.lcm(&o))
    };
    let a_orders: Vec<u64> = a.orders.iter().map(|d| d.to_u64().unwrap()).collect();
    let candidates: Vec<Vec<usize>> = a_orders
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            (0..elements.len())
                .filter(|&e| order_of(&elements[e]) == d && pair(&elements[e], &elements[e]) == target[i][i])
                .collect()
        })
        .collect();

    type Extend<'a> = dyn Fn(usize, &[usize], usize, &HashSet<Vec<u64>>) -> Option<HashSet<Vec<u64>>> + 'a;

    fn search(
        level: usize,
        chosen: &mut Vec<usize>,
        span: HashSet<Vec<u64>>,
        ctx: &Extend<'_>,
        candidates: &[Vec<usize>],
    ) -> bool {
        if level == candidates.len() {
            return true;
        }
        for &c in &candidates[level] {
            if let Some(next) = ctx(level, chosen, c, &span) {
                chosen.push(c);
                if search(level + 1, chosen, next, ctx, candidates) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    let add = |x: &[u64], y: &[u64]| -> Vec<u64> {
        x.iter().zip(y).zip(&b_orders).map(|((a, b), d)| (a + b) % d).collect()
    };
    let extend = |level: usize, chosen: &[usize], c: usize, span: &HashSet<Vec<u64>>| {
        let h = &elements[c];
        for (j, &prev) in chosen.iter().enumerate() {
            if pair(h, &elements[prev]) != target[level][j] {
                return None;
            }
        }
        // The new generator must meet the span of the previous ones only in 0.
        let d = a_orders[level];
        let mut multiples = Vec::with_capacity(d as usize);
        let mut m = vec![0u64; h.len()];
        for _ in 0..d {
            multiples.push(m.clone());
            m = add(&m, h);
        }
        if multiples[1..].iter().any(|x| span.contains(x)) {
            return None;
        }
        let mut next = HashSet::with_capacity(span.len() * d as usize);
        for s in span {
            for x in &multiples {
                next.insert(add(s, x));
            }
        }
        Some(next)
    };
    let start: HashSet<Vec<u64>> = [vec![0u64; b_orders.len()]].into_iter().collect();
    Ok(search(0, &mut Vec::new(), start, &extend, &candidates))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: u64, a: i64) -> GroupWithPairing {
        GroupWithPairing::from_fractions(&[n], &[vec![(a, n)]]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(GroupWithPairing::from_fractions(&[4], &[vec![(1, 8)]]).is_err());
        assert!(GroupWithPairing::from_fractions(&[2, 2], &[vec![(0, 1), (1, 2)], vec![(0, 1), (0, 1)]]).is_err());
        let g = GroupWithPairing::from_fractions(&[1, 4], &[vec![(0, 1), (0, 1)], vec![(0, 1), (5, 4)]]).unwrap();
        assert_eq!(g.orders(), &[BigInt::from(4)]);
        assert_eq!(g.gram()[0][0], BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn nondegeneracy() {
        assert!(cyclic(8, 3).is_nondegenerate());
        assert!(!cyclic(8, 2).is_nondegenerate());
        let e = GroupWithPairing::from_fractions(&[2, 2], &[vec![(0, 1), (1, 2)], vec![(1, 2), (0, 1)]]).unwrap();
        assert!(e.is_nondegenerate());
        let bad = GroupWithPairing::from_fractions(&[2, 2], &[vec![(1, 2), (1, 2)], vec![(1, 2), (1, 2)]]).unwrap();
        assert!(!bad.is_nondegenerate());
    }

    #[test]
    fn invariant_form_of_coprime_sum() {
        let g = cyclic(4, 1).orthogonal_sum(&cyclic(3, 1));
        let inv = g.to_invariant_form();
        assert_eq!(inv.orders(), &[BigInt::from(12)]);
        assert!(isometric(&g, &inv, ISOMETRY_BOUND).unwrap());
        assert!(inv.is_nondegenerate());
    }

    #[test]
    fn isometry_examples() {
        assert!(!isometric(&cyclic(4, 1), &cyclic(4, 3), ISOMETRY_BOUND).unwrap());
        assert!(isometric(&cyclic(5, 1), &cyclic(5, 4), ISOMETRY_BOUND).unwrap());
        assert!(!isometric(&cyclic(5, 1), &cyclic(5, 2), ISOMETRY_BOUND).unwrap());
        // A_2 + A_4 and A_2 + B_4 are isometric: (1, 1) has self-pairing 3/4.
        let a = cyclic(2, 1).orthogonal_sum(&cyclic(4, 1));
        let b = cyclic(2, 1).orthogonal_sum(&cyclic(4, 3));
        assert!(isometric(&a, &b, ISOMETRY_BOUND).unwrap());
        assert!(isometric(&a, &a, ISOMETRY_BOUND).unwrap());
        assert!(isometric(&cyclic(2048, 1), &cyclic(2048, 1), ISOMETRY_BOUND).is_err());
    }
}
