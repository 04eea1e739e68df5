//! Orthogonal decomposition of groups with pairing into the standard
//! blocks, and a canonical choice among equivalent decompositions.
//!
//! Odd primes contribute cyclic blocks `p^r:res` / `p^r:nonres`. The prime 2
//! contributes cyclic blocks `2^r:A..D` (self-pairing numerator `1, -1, 5, -5`
//! mod 8) and the rank-two blocks `E:2^r`, `F:2^r`.
//!
//! Decompositions are not unique (`2^1:A + 2^2:A` and `2^1:A + 2^2:B` are
//! isometric), so [`classify`] returns a normal form: for odd `p` all but one
//! block per `p^r` is `res`; for `p = 2` the first decomposition in a fixed
//! enumeration order whose Gauss sums match.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::number_theory::{factor_big, is_prime, jacobi, legendre_big};
use crate::pairing::{frac, GroupWithPairing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    /// Smallest `r` for which the class exists.
    pub fn min_exponent(self) -> u32 {
        match self {
            Letter::A => 1,
            Letter::B => 2,
            Letter::C | Letter::D => 3,
        }
    }

    /// Self-pairing numerator of the generator, over `2^r`, reduced mod 8.
    pub fn numerator_mod8(self) -> u64 {
        match self {
            Letter::A => 1,
            Letter::B => 7,
            Letter::C => 5,
            Letter::D => 3,
        }
    }

    fn from_numerator(c: &BigInt, r: u32) -> Letter {
        let m8 = c.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        match r {
            1 => Letter::A,
            2 => {
                if m8 % 4 == 1 {
                    Letter::A
                } else {
                    Letter::B
                }
            }
            _ => match m8 {
                1 => Letter::A,
                7 => Letter::B,
                5 => Letter::C,
                3 => Letter::D,
                _ => unreachable!("numerator is odd"),
            },
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One orthogonal summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    /// `Z/p^r` with `⟨x,x⟩ = a/p^r`, `residue` the Legendre class of `a`.
    Odd { p: u64, r: u32, residue: bool },
    /// `Z/2^r` with one of the classes `A..D`.
    Two { r: u32, letter: Letter },
    /// `(Z/2^r)^2` with zero self-pairings and `1/2^r` between the generators.
    E { r: u32 },
    /// `(Z/2^r)^2` with `2/2^r` on the diagonal and `1/2^r` off it.
    F { r: u32 },
}

impl Block {
    pub fn prime(&self) -> u64 {
        match *self {
            Block::Odd { p, .. } => p,
            _ => 2,
        }
    }

    pub fn exponent(&self) -> u32 {
        match *self {
            Block::Odd { r, .. } | Block::Two { r, .. } | Block::E { r } | Block::F { r } => r,
        }
    }

    fn sort_key(&self) -> (u64, u32, u8) {
        let kind = match *self {
            Block::Odd { residue, .. } => u8::from(!residue),
            Block::Two { letter, .. } => letter as u8,
            Block::E { .. } => 4,
            Block::F { .. } => 5,
        };
        (self.prime(), self.exponent(), kind)
    }

    /// Checks the existence constraints on `p` and `r`.
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Block::Odd { p, r, .. } => {
                if p < 3 || !is_prime(p) {
                    return Err(format!("{p} is not an odd prime; use the letters A-F for p = 2"));
                }
                if r == 0 {
                    return Err("exponent must be at least 1".into());
                }
            }
            Block::Two { r, letter } => {
                if r < letter.min_exponent() {
                    return Err(format!(
                        "{letter} requires r >= {}, got 2^{r}",
                        letter.min_exponent()
                    ));
                }
            }
            Block::E { r } => {
                if r == 0 {
                    return Err("E requires r >= 1".into());
                }
            }
            Block::F { r } => {
                if r < 2 {
                    return Err(format!("F requires r >= 2, got 2^{r}"));
                }
            }
        }
        Ok(())
    }

    /// The block as a group with pairing on its standard generators.
    pub fn form(&self) -> GroupWithPairing {
        let q = |a: BigInt, d: &BigInt| BigRational::new(a, d.clone());
        match *self {
            Block::Odd { p, r, residue } => {
                let d = BigInt::from(p).pow(r);
                let a = if residue {
                    1
                } else {
                    (2..p).find(|&a| jacobi(a as i128, p) == Ok(-1)).expect("odd prime has a nonresidue")
                };
                GroupWithPairing::new(vec![d.clone()], vec![vec![q(a.into(), &d)]]).unwrap()
            }
            Block::Two { r, letter } => {
                let d = BigInt::one() << r;
                let a: i64 = match letter {
                    Letter::A => 1,
                    Letter::B => -1,
                    Letter::C => 5,
                    Letter::D => -5,
                };
                GroupWithPairing::new(vec![d.clone()], vec![vec![q(a.into(), &d)]]).unwrap()
            }
            Block::E { r } | Block::F { r } => {
                let d = BigInt::one() << r;
                let diag = if matches!(self, Block::E { .. }) { 0 } else { 2 };
                let g = vec![
                    vec![q(diag.into(), &d), q(1.into(), &d)],
                    vec![q(1.into(), &d), q(diag.into(), &d)],
                ];
                GroupWithPairing::new(vec![d.clone(), d], g).unwrap()
            }
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Block::Odd { p, r, residue } => {
                write!(f, "{p}^{r}:{}", if residue { "res" } else { "nonres" })
            }
            Block::Two { r, letter } => write!(f, "2^{r}:{letter}"),
            Block::E { r } => write!(f, "E:2^{r}"),
            Block::F { r } => write!(f, "F:2^{r}"),
        }
    }
}

/// A multiset of blocks, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PairingDecomposition {
    blocks: Vec<Block>,
}

impl PairingDecomposition {
    pub fn new(mut blocks: Vec<Block>) -> Self {
        blocks.sort_by_key(Block::sort_key);
        PairingDecomposition { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Orthogonal sum of the block forms.
    pub fn form(&self) -> GroupWithPairing {
        self.blocks
            .iter()
            .fold(GroupWithPairing::trivial(), |acc, b| acc.orthogonal_sum(&b.form()))
    }

    /// The canonical representative of the isometry class.
    pub fn normalized(&self) -> PairingDecomposition {
        let mut out: Vec<Block> = Vec::new();
        // Odd primes: per (p, r), only the product of the Legendre classes
        // matters.
        let mut odd: Vec<(u64, u32, bool)> = self
            .blocks
            .iter()
            .filter_map(|b| match *b {
                Block::Odd { p, r, residue } => Some((p, r, residue)),
                _ => None,
            })
            .collect();
        odd.sort_unstable();
        for group in odd.chunk_by(|a, b| (a.0, a.1) == (b.0, b.1)) {
            let (p, r) = (group[0].0, group[0].1);
            let residue = group.iter().filter(|x| !x.2).count() % 2 == 0;
            for _ in 1..group.len() {
                out.push(Block::Odd { p, r, residue: true });
            }
            out.push(Block::Odd { p, r, residue });
        }
        let two: Vec<Block> = self.blocks.iter().copied().filter(|b| b.prime() == 2).collect();
        out.extend(normalize_two_part(&two));
        PairingDecomposition::new(out)
    }
}

impl fmt::Display for PairingDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at column {column}: {message}")]
pub struct ParseDecompositionError {
    /// 1-based character column of the offending block.
    pub column: usize,
    pub message: String,
}

impl FromStr for PairingDecomposition {
    type Err = ParseDecompositionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        if text.trim() == "0" {
            return Ok(PairingDecomposition::default());
        }
        let mut blocks = Vec::new();
        let mut offset = 0;
        for piece in text.split('+') {
            let lead = piece.len() - piece.trim_start().len();
            let column = text[..offset + lead].chars().count() + 1;
            offset += piece.len() + 1;
            let err = |message: String| ParseDecompositionError { column, message };
            let block = parse_block(piece.trim()).map_err(err)?;
            block.validate().map_err(err)?;
            blocks.push(block);
        }
        Ok(PairingDecomposition::new(blocks))
    }
}

fn parse_block(s: &str) -> Result<Block, String> {
    if s.is_empty() {
        return Err("empty block".into());
    }
    let (left, right) = s
        .split_once(':')
        .ok_or_else(|| format!("block {s:?} must look like p^r:res, 2^r:A or E:2^r"))?;
    let prime_power = |t: &str| -> Result<(u64, u32), String> {
        let (p, r) = t
            .split_once('^')
            .ok_or_else(|| format!("expected p^r, got {t:?}"))?;
        let p = p.trim().parse().map_err(|_| format!("bad prime {p:?}"))?;
        let r = r.trim().parse().map_err(|_| format!("bad exponent {r:?}"))?;
        Ok((p, r))
    };
    match left.trim() {
        kind @ ("E" | "F") => {
            let (two, r) = prime_power(right.trim())?;
            if two != 2 {
                return Err(format!("{kind} blocks live on 2-groups, got {two}^{r}"));
            }
            Ok(if kind == "E" { Block::E { r } } else { Block::F { r } })
        }
        pp => {
            let (p, r) = prime_power(pp)?;
            let class = right.trim();
            if p == 2 {
                let letter = match class {
                    "A" => Letter::A,
                    "B" => Letter::B,
                    "C" => Letter::C,
                    "D" => Letter::D,
                    _ => return Err(format!("2-blocks take a letter A-D, got {class:?}")),
                };
                Ok(Block::Two { r, letter })
            } else {
                let residue = match class {
                    "res" => true,
                    "nonres" => false,
                    _ => return Err(format!("odd blocks are res or nonres, got {class:?}")),
                };
                Ok(Block::Odd { p, r, residue })
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("pairing is degenerate")]
    Degenerate,
    #[error("group exponent {0} has a prime factor beyond 2^64")]
    Unfactorable(BigInt),
    #[error("internal inconsistency while splitting the {0}-part")]
    Internal(u64),
}

/// Splits `Γ` into blocks and returns the normal form.
pub fn classify(g: &GroupWithPairing) -> Result<PairingDecomposition, ClassifyError> {
    Ok(split_blocks(g)?.normalized())
}

/// An orthogonal decomposition of `Γ`, before normalization.
pub fn split_blocks(g: &GroupWithPairing) -> Result<PairingDecomposition, ClassifyError> {
    if !g.is_nondegenerate() {
        return Err(ClassifyError::Degenerate);
    }
    let exponent = g.exponent();
    let primes = factor_big(&exponent).ok_or(ClassifyError::Unfactorable(exponent))?;
    let mut blocks = Vec::new();
    for (p, _) in primes {
        let part = PrimePart::new(g, p);
        blocks.extend(part.split()?);
    }
    Ok(PairingDecomposition::new(blocks))
}

/// The `p`-primary part, with pairings stored as numerators over `p^e`.
struct PrimePart {
    p: u64,
    /// `p^e`, the exponent of the part.
    modulus: BigInt,
    e: u32,
    /// Basis elements as coordinate vectors, with their orders.
    basis: Vec<(Vec<BigInt>, BigInt)>,
    /// Numerators of the pairing on the coordinate generators.
    gram: Vec<Vec<BigInt>>,
    orders: Vec<BigInt>,
}

impl PrimePart {
    fn new(g: &GroupWithPairing, p: u64) -> Self {
        let bp = BigInt::from(p);
        let mut orders = Vec::new();
        let mut cofactors = Vec::new();
        for d in g.orders() {
            let mut pa = BigInt::one();
            let mut m = d.clone();
            while (&m % &bp).is_zero() {
                m /= &bp;
                pa *= &bp;
            }
            if !pa.is_one() {
                orders.push(pa);
                cofactors.push(Some(m));
            } else {
                cofactors.push(None);
            }
        }
        let idx: Vec<usize> = (0..cofactors.len()).filter(|&i| cofactors[i].is_some()).collect();
        let modulus = orders.iter().max().cloned().unwrap_or_else(BigInt::one);
        let mut e = 0;
        let mut t = modulus.clone();
        while !t.is_one() {
            t /= &bp;
            e += 1;
        }
        let mr = BigRational::from(modulus.clone());
        let gram = idx
            .iter()
            .map(|&i| {
                idx.iter()
                    .map(|&j| {
                        let mi = cofactors[i].as_ref().unwrap();
                        let mj = cofactors[j].as_ref().unwrap();
                        let v = frac(&(&g.gram()[i][j] * BigRational::from(mi * mj)));
                        (v * &mr).to_integer()
                    })
                    .collect()
            })
            .collect();
        let k = idx.len();
        let basis = (0..k)
            .map(|i| {
                let mut v = vec![BigInt::zero(); k];
                v[i] = BigInt::one();
                (v, orders[i].clone())
            })
            .collect();
        PrimePart {
            p,
            modulus,
            e,
            basis,
            gram,
            orders,
        }
    }

    /// Pairing numerator over `p^e`, reduced mod `p^e`.
    fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += xi * yj * &self.gram[i][j];
                }
            }
        }
        acc.mod_floor(&self.modulus)
    }

    fn reduce(&self, v: Vec<BigInt>) -> Vec<BigInt> {
        v.into_iter()
            .zip(&self.orders)
            .map(|(x, d)| x.mod_floor(d))
            .collect()
    }

    fn combine(&self, x: &[BigInt], y: &[BigInt], cy: &BigInt) -> Vec<BigInt> {
        self.reduce(x.iter().zip(y).map(|(a, b)| a + cy * b).collect())
    }

    /// `p`-adic valuation of a numerator over `p^e`, capped at `e`.
    fn val(&self, x: &BigInt) -> u32 {
        if x.is_zero() {
            return self.e;
        }
        let bp = BigInt::from(self.p);
        let mut v = 0;
        let mut x = x.clone();
        while (&x % &bp).is_zero() {
            x /= &bp;
            v += 1;
        }
        v
    }

    fn split(mut self) -> Result<Vec<Block>, ClassifyError> {
        let mut blocks = Vec::new();
        while !self.basis.is_empty() {
            let top = self.basis.iter().map(|(_, o)| o.clone()).max().unwrap();
            // Numerators are over p^e; an element of order p^r pairs with
            // denominator at most p^r, i.e. numerator divisible by p^(e-r).
            let r = {
                let mut r = 0;
                let mut t = top.clone();
                while !t.is_one() {
                    t /= self.p;
                    r += 1;
                }
                r
            };
            let shift = self.e - r;
            let unit_at_top = |x: &BigInt| self.val(x) == shift;
            let to_scale = |x: BigInt| -> BigInt {
                // numerator over p^r
                x / BigInt::from(self.p).pow(shift)
            };
            let k = self.basis.len();
            let top_idx: Vec<usize> = (0..k).filter(|&i| self.basis[i].1 == top).collect();
            let self_pair: Vec<BigInt> = (0..k)
                .map(|i| self.pair(&self.basis[i].0, &self.basis[i].0))
                .collect();

            if let Some(&i) = top_idx.iter().find(|&&i| unit_at_top(&self_pair[i])) {
                let c = to_scale(self_pair[i].clone());
                blocks.push(self.cyclic_block(r, &c));
                self.split_off_cyclic(i, &self_pair[i].clone());
                continue;
            }
            // Find a pair with a unit cross pairing at the top scale.
            let mut found = None;
            'outer: for (a, &i) in top_idx.iter().enumerate() {
                for &j in &top_idx[a + 1..] {
                    let cross = self.pair(&self.basis[i].0, &self.basis[j].0);
                    if unit_at_top(&cross) {
                        found = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = found else {
                return Err(ClassifyError::Internal(self.p));
            };
            if self.p != 2 {
                // b_i + b_j has a unit self-pairing since 2 is invertible.
                let sum = self.combine(&self.basis[i].0, &self.basis[j].0, &BigInt::one());
                let s = self.pair(&sum, &sum);
                if !unit_at_top(&s) {
                    return Err(ClassifyError::Internal(self.p));
                }
                self.basis[i].0 = sum;
                blocks.push(self.cyclic_block(r, &to_scale(s.clone())));
                self.split_off_cyclic(i, &s);
                continue;
            }
            blocks.push(self.split_off_plane(i, j, r)?);
        }
        Ok(blocks)
    }

    fn cyclic_block(&self, r: u32, c: &BigInt) -> Block {
        if self.p == 2 {
            Block::Two {
                r,
                letter: Letter::from_numerator(c, r),
            }
        } else {
            Block::Odd {
                p: self.p,
                r,
                residue: legendre_big(c, self.p) == 1,
            }
        }
    }

    /// Removes `x = basis[i]` (unit self-pairing `s` at the top scale) and
    /// projects the rest onto `x^⊥` by `y ↦ y - (⟨y,x⟩/⟨x,x⟩) x`.
    fn split_off_cyclic(&mut self, i: usize, s: &BigInt) {
        let (x, _) = self.basis.remove(i);
        let inv = mod_inverse(&(s / self.gcd_part(s)), &self.modulus);
        let g = self.gcd_part(s);
        for idx in 0..self.basis.len() {
            let yx = self.pair(&self.basis[idx].0, &x);
            // ⟨y,x⟩ is divisible by the same power of p as ⟨x,x⟩.
            let c = (&yx / &g * &inv).mod_floor(&self.modulus);
            let y = self.combine(&self.basis[idx].0, &x, &-c);
            self.basis[idx].0 = y;
        }
    }

    /// The largest power of `p` dividing `s` (a numerator over `p^e`).
    fn gcd_part(&self, s: &BigInt) -> BigInt {
        BigInt::from(self.p).pow(self.val(s))
    }

    /// Removes the plane spanned by `basis[i]`, `basis[j]` (even
    /// self-pairings, unit cross pairing) and classifies it as `E` or `F`.
    fn split_off_plane(&mut self, i: usize, j: usize, r: u32) -> Result<Block, ClassifyError> {
        let x = self.basis[i].0.clone();
        let y = self.basis[j].0.clone();
        let shift = BigInt::from(2).pow(self.e - r);
        let sxx = self.pair(&x, &x) / &shift;
        let syy = self.pair(&y, &y) / &shift;
        let sxy = self.pair(&x, &y) / &shift;
        let block = if r == 1 {
            Block::E { r }
        } else {
            let a: BigInt = &sxx / 2;
            let c: BigInt = &syy / 2;
            if (a * c).is_even() {
                Block::E { r }
            } else {
                Block::F { r }
            }
        };
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        self.basis.remove(hi);
        self.basis.remove(lo);
        // Solve [[sxx, sxy], [sxy, syy]] (α, β) = (⟨z,x⟩, ⟨z,y⟩) mod 2^r.
        let m = BigInt::from(2).pow(r);
        let det = (&sxx * &syy - &sxy * &sxy).mod_floor(&m);
        if det.is_even() {
            return Err(ClassifyError::Internal(2));
        }
        let dinv = mod_inverse(&det, &m);
        for idx in 0..self.basis.len() {
            let z = self.basis[idx].0.clone();
            let zx = self.pair(&z, &x) / &shift;
            let zy = self.pair(&z, &y) / &shift;
            let alpha = ((&syy * &zx - &sxy * &zy) * &dinv).mod_floor(&m);
            let beta = ((&sxx * &zy - &sxy * &zx) * &dinv).mod_floor(&m);
            let z = self.combine(&z, &x, &-alpha);
            let z = self.combine(&z, &y, &-beta);
            self.basis[idx].0 = z;
        }
        Ok(block)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

// ---------------------------------------------------------------------------
// Normal form of the 2-part.
//
// The isometry class of a 2-group with pairing is determined by the ranks of
// its homogeneous pieces together with the Gauss sums
//     GS_k = Σ_x exp(2πi · 2^(k-1) ⟨x,x⟩),   k = 1, 2, ...
// Each GS_k is multiplicative over orthogonal sums and is either zero or
// 2^(t/2) · ζ8^phase.

/// A Gauss sum value: zero, or `sqrt(2^log2_sq) · exp(2πi · phase / 8)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussSum {
    Zero,
    Value { log2_sq: u64, phase: u8 },
}

impl GaussSum {
    const ONE: GaussSum = GaussSum::Value { log2_sq: 0, phase: 0 };

    fn mul(self, other: GaussSum) -> GaussSum {
        match (self, other) {
            (GaussSum::Value { log2_sq: a, phase: p }, GaussSum::Value { log2_sq: b, phase: q }) => {
                GaussSum::Value {
                    log2_sq: a + b,
                    phase: (p + q) % 8,
                }
            }
            _ => GaussSum::Zero,
        }
    }
}

/// `GS_k` of a single 2-block.
pub fn block_gauss_sum(block: &Block, k: u32) -> GaussSum {
    let val = |log2_sq: i64, phase: u8| GaussSum::Value {
        log2_sq: log2_sq as u64,
        phase,
    };
    match *block {
        Block::Two { r, letter } => {
            let c = letter.numerator_mod8();
            let m = r as i64 - k as i64 + 1;
            let (r, k) = (r as i64, k as i64);
            if m <= 0 {
                val(2 * r, 0)
            } else if m == 1 {
                GaussSum::Zero
            } else {
                let base = if c % 4 == 1 { 1 } else { 7 };
                let twist = if m % 2 == 1 && (c == 3 || c == 5) { 4 } else { 0 };
                val(2 * (k - 1) + 1 + m, (base + twist) % 8)
            }
        }
        Block::E { r } | Block::F { r } => {
            let (r, k) = (r as i64, k as i64);
            if r <= k {
                val(4 * r, 0)
            } else {
                let sign = if matches!(block, Block::F { .. }) && (r - k) % 2 == 1 { 4 } else { 0 };
                val(2 * (r + k), sign)
            }
        }
        Block::Odd { .. } => panic!("Gauss sums here are for 2-blocks"),
    }
}

fn gauss_sums(blocks: &[Block], kmax: u32) -> Vec<GaussSum> {
    (1..=kmax)
        .map(|k| {
            blocks
                .iter()
                .fold(GaussSum::ONE, |acc, b| acc.mul(block_gauss_sum(b, k)))
        })
        .collect()
}

/// Candidate decompositions of one homogeneous piece of rank `n` at scale
/// `2^r`, in canonical preference order.
fn candidates(r: u32, n: usize) -> Vec<Vec<Block>> {
    let letters: Vec<Letter> = Letter::ALL
        .into_iter()
        .filter(|l| l.min_exponent() <= r)
        .collect();
    let mut out = Vec::new();
    let free = n.min(3);
    let mut multisets: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..free {
        multisets = multisets
            .into_iter()
            .flat_map(|m| {
                letters
                    .iter()
                    .filter(|&&l| m.last().is_none_or(|&last| last <= l))
                    .map(|&l| {
                        let mut m2 = m.clone();
                        m2.push(l);
                        m2
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    for m in multisets {
        let mut blocks = vec![
            Block::Two {
                r,
                letter: Letter::A
            };
            n - free
        ];
        blocks.extend(m.into_iter().map(|letter| Block::Two { r, letter }));
        blocks.sort_by_key(Block::sort_key);
        out.push(blocks);
    }
    if n.is_multiple_of(2) {
        out.push(vec![Block::E { r }; n / 2]);
        if r >= 2 {
            let mut b = vec![Block::E { r }; n / 2 - 1];
            b.push(Block::F { r });
            out.push(b);
        }
    }
    out
}

fn normalize_two_part(blocks: &[Block]) -> Vec<Block> {
    if blocks.is_empty() {
        return Vec::new();
    }
    let mut ranks: std::collections::BTreeMap<u32, usize> = Default::default();
    for b in blocks {
        let dim = if matches!(b, Block::E { .. } | Block::F { .. }) { 2 } else { 1 };
        *ranks.entry(b.exponent()).or_default() += dim;
    }
    let kmax = *ranks.keys().max().unwrap();
    let target = gauss_sums(blocks, kmax);
    let scales: Vec<(u32, Vec<Vec<Block>>)> = ranks.iter().map(|(&r, &n)| (r, candidates(r, n))).collect();

    fn dfs(
        scales: &[(u32, Vec<Vec<Block>>)],
        chosen: &mut Vec<Block>,
        target: &[GaussSum],
        kmax: u32,
    ) -> bool {
        let Some(((_, cands), rest)) = scales.split_first() else {
            return gauss_sums(chosen, kmax) == target;
        };
        for c in cands {
            let len = chosen.len();
            chosen.extend_from_slice(c);
            if dfs(rest, chosen, target, kmax) {
                return true;
            }
            chosen.truncate(len);
        }
        false
    }

    let mut chosen = Vec::new();
    if dfs(&scales, &mut chosen, &target, kmax) {
        chosen
    } else {
        // Every form has a representative among the candidates; keep the
        // input if that ever fails.
        debug_assert!(false, "no canonical candidate for {blocks:?}");
        blocks.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{isometric, ISOMETRY_BOUND};

    fn cyclic(n: u64, a: i64) -> GroupWithPairing {
        GroupWithPairing::from_fractions(&[n], &[vec![(a, n)]]).unwrap()
    }

    fn text(g: &GroupWithPairing) -> String {
        classify(g).unwrap().to_string()
    }

    #[test]
    fn single_blocks() {
        assert_eq!(text(&cyclic(8, 1)), "2^3:A");
        assert_eq!(text(&cyclic(8, 3)), "2^3:D");
        assert_eq!(text(&cyclic(8, 5)), "2^3:C");
        assert_eq!(text(&cyclic(8, 7)), "2^3:B");
        assert_eq!(text(&cyclic(5, 2)), "5^1:nonres");
        assert_eq!(text(&cyclic(5, 4)), "5^1:res");
        let e = GroupWithPairing::from_fractions(&[2, 2], &[vec![(0, 1), (1, 2)], vec![(1, 2), (0, 1)]]).unwrap();
        assert_eq!(text(&e), "E:2^1");
        let f = GroupWithPairing::from_fractions(&[4, 4], &[vec![(1, 2), (1, 4)], vec![(1, 4), (1, 2)]]).unwrap();
        assert_eq!(text(&f), "F:2^2");
        assert_eq!(text(&GroupWithPairing::trivial()), "0");
    }

    #[test]
    fn degenerate_is_rejected() {
        assert_eq!(classify(&cyclic(4, 2)), Err(ClassifyError::Degenerate));
    }

    #[test]
    fn text_round_trip() {
        let d: PairingDecomposition = "5^1:nonres + 2^3:C".parse().unwrap();
        assert_eq!(d.to_string(), "2^3:C + 5^1:nonres");
        let d: PairingDecomposition = "F:2^2 + E:2^2 + 2^2:B + 3^2:res + 3^2:nonres".parse().unwrap();
        assert_eq!(d.to_string(), "2^2:B + E:2^2 + F:2^2 + 3^2:res + 3^2:nonres");
        assert_eq!("0".parse::<PairingDecomposition>().unwrap().to_string(), "0");
    }

    #[test]
    fn parse_errors() {
        let e = "2^2:C".parse::<PairingDecomposition>().unwrap_err();
        assert!(e.message.contains("C requires r >= 3"), "{e}");
        let e = "3^1:res + 2^1:B".parse::<PairingDecomposition>().unwrap_err();
        assert_eq!(e.column, 11);
        assert!("9^1:res".parse::<PairingDecomposition>().is_err());
        assert!("2^1:res".parse::<PairingDecomposition>().is_err());
        assert!("F:2^1".parse::<PairingDecomposition>().is_err());
        assert!("E:3^1".parse::<PairingDecomposition>().is_err());
        assert!("5^1".parse::<PairingDecomposition>().is_err());
        assert!("5^1:res +".parse::<PairingDecomposition>().is_err());
    }

    #[test]
    fn odd_normal_form() {
        let d: PairingDecomposition = "3^1:nonres + 3^1:nonres + 5^2:nonres".parse().unwrap();
        assert_eq!(d.normalized().to_string(), "3^1:res + 3^1:res + 5^2:nonres");
    }

    #[test]
    fn two_normal_form_identifies_isometric_sums() {
        let a: PairingDecomposition = "2^1:A + 2^2:B".parse().unwrap();
        let b: PairingDecomposition = "2^1:A + 2^2:A".parse().unwrap();
        assert_eq!(a.normalized(), b.normalized());
        assert!(isometric(&a.form(), &b.form(), ISOMETRY_BOUND).unwrap());
        let c: PairingDecomposition = "2^2:A + 2^2:B".parse().unwrap();
        assert_ne!(c.normalized(), "E:2^2".parse::<PairingDecomposition>().unwrap());
    }

    #[test]
    fn block_forms_classify_to_themselves() {
        for s in ["2^1:A", "2^2:B", "2^4:C", "2^5:D", "E:2^3", "F:2^3", "7^2:nonres", "3^1:res"] {
            let d: PairingDecomposition = s.parse().unwrap();
            assert_eq!(classify(&d.form()).unwrap().to_string(), s);
        }
    }
}
