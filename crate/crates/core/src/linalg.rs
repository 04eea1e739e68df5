//! Exact integer matrices, Smith normal form and rational solving.
//!
//! Every Jacobian in this crate is presented as the cokernel of an integer
//! matrix, so this module is the arithmetic floor under everything else.
//! Entries are arbitrary precision; nothing here ever touches a float.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone().into();
        }
        m
    }

    /// Builds a matrix from rows of machine integers.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| x.into()));
        }
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn mul_rational_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += BigRational::from_integer(a.clone()) * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    ///
    /// This deliberately shares no code with [`smith_normal_form`] so the two
    /// can check each other.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let s = &self.data[src * self.cols + c];
            if !s.is_zero() {
                let delta = s * factor;
                self.data[dst * self.cols + c] += delta;
            }
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let s = &self.data[r * self.cols + src];
            if !s.is_zero() {
                let delta = s * factor;
                self.data[r * self.cols + dst] += delta;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = &mut self.data[i * self.cols + c];
            *v = -std::mem::take(v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = &mut self.data[r * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

/// `u * a * v == s` with `u`, `v` unimodular and `s` diagonal.
///
/// `u_inv` is carried along so callers can map cokernel coordinates back to
/// the original basis without a second inversion.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
}

impl SnfResult {
    /// Diagonal of `s`, `min(rows, cols)` entries, zeros last.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with both transformation matrices.
///
/// Pivots on the entry of least absolute value, so intermediate entries
/// stay close to the size of the input on Laplacian-like matrices.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    // Row operations are mirrored on u (left) and u_inv (right, inverse op).
    let row_swap = |s: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, i, j| {
        s.swap_rows(i, j);
        u.swap_rows(i, j);
        ui.swap_cols(i, j);
    };
    let row_add = |s: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, dst, src, f: &BigInt| {
        s.add_row_multiple(dst, src, f);
        u.add_row_multiple(dst, src, f);
        ui.add_col_multiple(src, dst, &-f);
    };

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&s, t..m, t..n) else {
            break;
        };
        row_swap(&mut s, &mut u, &mut u_inv, t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let pivot = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = s[(i, t)].div_floor(&pivot);
                row_add(&mut s, &mut u, &mut u_inv, i, t, &-q);
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = s[(t, j)].div_floor(&pivot);
                s.add_col_multiple(j, t, &-&q);
                v.add_col_multiple(j, t, &-q);
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                // A remainder smaller than the pivot survived; promote it.
                let in_col = min_abs_entry(&s, t..m, t..t + 1);
                let in_row = min_abs_entry(&s, t..t + 1, t..n);
                let pick = match (in_col, in_row) {
                    (Some(c), Some(r)) => {
                        if s[c].abs() <= s[r].abs() {
                            c
                        } else {
                            r
                        }
                    }
                    (Some(c), None) => c,
                    (None, Some(r)) => r,
                    (None, None) => unreachable!("pivot row and column cannot both vanish"),
                };
                row_swap(&mut s, &mut u, &mut u_inv, t, pick.0);
                s.swap_cols(t, pick.1);
                v.swap_cols(t, pick.1);
                continue;
            }
            // Row and column are clear; enforce divisibility on the rest.
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => row_add(&mut s, &mut u, &mut u_inv, t, i, &BigInt::one()),
                None => break,
            }
        }

        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    SnfResult { u, s, v, u_inv }
}

fn min_abs_entry(
    a: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, b)| ax < *b) {
                let done = ax.is_one();
                best = Some(((i, j), ax));
                if done {
                    return best.map(|(p, _)| p);
                }
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Solves `a * x = b` over the rationals.
///
/// Returns `None` when the system is inconsistent. Underdetermined systems
/// get the particular solution with free coordinates (in the Smith basis)
/// set to zero.
pub fn solve_rational(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let snf = smith_normal_form(a);
    solve_with_snf(&snf, b)
}

/// As [`solve_rational`], reusing a precomputed factorization.
pub fn solve_with_snf(snf: &SnfResult, b: &[BigInt]) -> Option<Vec<BigRational>> {
    assert_eq!(snf.u.cols, b.len(), "dimension mismatch");
    let c = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let rank = snf.rank();
    if c[rank..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut y = vec![BigRational::zero(); snf.v.rows];
    for i in 0..rank {
        y[i] = BigRational::new(c[i].clone(), diag[i].clone());
    }
    Some(snf.v.mul_rational_vec(&y))
}
