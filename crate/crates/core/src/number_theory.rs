//! Quadratic residues, primality, factoring and the nonresidue searches
//! behind the subdivided-banana realizations.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::STuple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumberTheoryError {
    #[error("Jacobi symbol needs an odd positive modulus, got {0}")]
    EvenModulus(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("exponent must be at least {min}, got {r}")]
    ExponentTooSmall { r: u32, min: u32 },
    #[error("{k} is divisible by {q}")]
    DivisibleByModulus { q: u64, k: i128 },
    #[error(
        "no a with a(q-a) = {k} (mod {q}): needs Legendre({k}/{q}) = Legendre(-1/{q}), got {got} vs {want}"
    )]
    LegendreCondition { q: u64, k: i128, got: i8, want: i8 },
    #[error("no usable nonresidue prime q for p = {p}, r = {r} below the bound q < {bound}")]
    NoWitness { p: u64, r: u32, bound: String },
    #[error("{0} does not fit in 64 bits")]
    Overflow(String),
}

/// The Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi(a: i128, n: u64) -> Result<i8, NumberTheoryError> {
    if n.is_multiple_of(2) {
        return Err(NumberTheoryError::EvenModulus(n));
    }
    let mut n = n as u128;
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Legendre symbol of an arbitrary-size integer modulo an odd prime.
pub fn legendre_big(a: &BigInt, p: u64) -> i8 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits");
    jacobi(r as i128, p).expect("odd modulus")
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for every `u64` (the first twelve primes are a complete
/// witness set below 3.3 * 10^24).
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact below `2^64`; above, Miller-Rabin with 64 fixed prime bases.
pub fn is_prime_big(n: &BigInt) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let m1 = n - &one;
    let s = m1.trailing_zeros().expect("nonzero");
    let d = &m1 >> s;
    let mut bases = Vec::with_capacity(64);
    let mut c = 2u64;
    while bases.len() < 64 {
        if is_prime(c) {
            bases.push(c);
        }
        c += 1;
    }
    'witness: for a in bases {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == m1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == m1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization, ascending.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn pollard_brent(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = x.abs_diff(y).gcd(&n);
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Factorization of a positive integer whose prime factors all fit in 64
/// bits; `None` otherwise.
pub fn factor_big(n: &BigInt) -> Option<Vec<(u64, u32)>> {
    if let Some(small) = n.to_u64() {
        return Some(factor_u64(small));
    }
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < 1 << 20 {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        if let Some(small) = n.to_u64() {
            for (q, e) in factor_u64(small) {
                match out.iter_mut().find(|(x, _)| *x == q) {
                    Some((_, f)) => *f += e,
                    None => out.push((q, e)),
                }
            }
            out.sort_unstable();
            return Some(out);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    None
}

/// A square root of `a` modulo the odd prime `q`, if one exists.
pub fn sqrt_mod(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (q - 1) / 2, q) != 1 {
        return None;
    }
    if q % 4 == 3 {
        return Some(pow_mod(a, (q + 1) / 4, q));
    }
    // Tonelli-Shanks.
    let s = (q - 1).trailing_zeros();
    let odd = (q - 1) >> s;
    let z = (2..q).find(|&z| pow_mod(z, (q - 1) / 2, q) == q - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, odd, q);
    let mut t = pow_mod(a, odd, q);
    let mut r = pow_mod(a, odd.div_ceil(2), q);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, q);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), q);
        m = i;
        c = mul_mod(b, b, q);
        t = mul_mod(t, c, q);
        r = mul_mod(r, b, q);
    }
    Some(r)
}

/// The least `0 < a < q` with `a(q - a) = k (mod q)`, i.e. `a^2 = -k`.
pub fn split_prime(q: u64, k: i128) -> Result<u64, NumberTheoryError> {
    if q < 3 || !is_prime(q) {
        return Err(NumberTheoryError::NotOddPrime(q));
    }
    let kq = k.rem_euclid(q as i128) as u64;
    if kq == 0 {
        return Err(NumberTheoryError::DivisibleByModulus { q, k });
    }
    let got = jacobi(k, q)?;
    let want = jacobi(-1, q)?;
    if got != want {
        return Err(NumberTheoryError::LegendreCondition { q, k, got, want });
    }
    let root = sqrt_mod(q - kq, q).expect("Legendre condition guarantees a root");
    Ok(root.min(q - root))
}

fn check_odd_prime(p: u64) -> Result<(), NumberTheoryError> {
    if p < 3 || !is_prime(p) {
        Err(NumberTheoryError::NotOddPrime(p))
    } else {
        Ok(())
    }
}

fn prime_power(p: u64, r: u32) -> Result<u128, NumberTheoryError> {
    (p as u128)
        .checked_pow(r)
        .filter(|&x| x <= u64::MAX as u128)
        .ok_or_else(|| NumberTheoryError::Overflow(format!("{p}^{r}")))
}

/// Whether `q^2 < 4 k^2 p^r`, the search bound `q < 2k p^(r/2)`.
fn below_bound(q: u64, pr: u128, multiplier: u64) -> bool {
    let lhs = BigInt::from(q).pow(2u32);
    let rhs = BigInt::from(4u32) * BigInt::from(multiplier).pow(2u32) * BigInt::from(pr);
    lhs < rhs
}

fn bound_text(pr: u128, multiplier: u64) -> String {
    let m = if multiplier == 1 {
        String::new()
    } else {
        format!("{multiplier}*")
    };
    format!("{m}2*sqrt({pr})")
}

/// Residue class mod 4 of the witness primes used for exponent `r`: the
/// split `a(q - a) = p^r (mod q)` needs `(p^r/q) = (-1/q)`, and `p^r` is a
/// square when `r` is even.
fn witness_class(r: u32) -> u64 {
    if r.is_multiple_of(2) {
        1
    } else {
        3
    }
}

/// Smallest prime `q` with `(q/p) = -1`, `q^2 < 4 k^2 p^r` and `q = 3 (mod 4)`
/// for odd `r`, `q = 1 (mod 4)` for even `r`. `k` is `multiplier`.
pub fn find_nonresidue_prime(p: u64, r: u32, multiplier: u64) -> Result<Option<u64>, NumberTheoryError> {
    check_odd_prime(p)?;
    if r == 0 {
        return Err(NumberTheoryError::ExponentTooSmall { r, min: 1 });
    }
    let pr = prime_power(p, r)?;
    Ok(witness_primes(p, r, pr, multiplier).next())
}

fn witness_primes(p: u64, r: u32, pr: u128, multiplier: u64) -> impl Iterator<Item = u64> {
    let class = witness_class(r);
    (0u64..)
        .map(move |i| 4 * i + class)
        .take_while(move |&q| below_bound(q, pr, multiplier))
        .filter(move |&q| q > 2 && is_prime(q) && jacobi(q as i128, p) == Ok(-1))
}

/// An s-tuple whose subdivided banana has Jacobian `Z/p^r` with the
/// nonresidue pairing. Sorted ascending.
pub fn nonresidue_tuple(p: u64, r: u32, multiplier: u64) -> Result<STuple, NumberTheoryError> {
    check_odd_prime(p)?;
    if r == 0 {
        return Err(NumberTheoryError::ExponentTooSmall { r, min: 1 });
    }
    let pr = prime_power(p, r)? as u64;
    let parts = if p % 4 == 3 {
        vec![1, pr - 1]
    } else if p % 8 == 5 {
        vec![1, 1, (pr - 1) / 2]
    } else if p % 3 == 2 {
        // p = 17 (mod 24): 2 is a residue here but 3 is not.
        if r % 2 == 1 {
            vec![1, 2, (pr - 2) / 3]
        } else {
            vec![1, 1, 1, (pr - 1) / 3]
        }
    } else {
        tuple_from_split(p, r, pr as u128, multiplier)?
    };
    let s = STuple::new(parts).expect("parts are positive").sorted();
    debug_assert!(is_nonresidue_tuple(&s, p, r));
    Ok(s)
}

fn tuple_from_split(p: u64, r: u32, pr: u128, multiplier: u64) -> Result<Vec<u64>, NumberTheoryError> {
    for q in witness_primes(p, r, pr, multiplier) {
        let Ok(a) = split_prime(q, pr as i128) else {
            continue;
        };
        let prod = a as u128 * (q - a) as u128;
        if prod >= pr || !(pr - prod).is_multiple_of(q as u128) {
            continue;
        }
        let parts = vec![a, q - a, ((pr - prod) / q as u128) as u64];
        let s = STuple::new(parts.clone()).expect("positive");
        if is_nonresidue_tuple(&s, p, r) {
            return Ok(parts);
        }
    }
    Err(NumberTheoryError::NoWitness {
        p,
        r,
        bound: bound_text(pr, multiplier),
    })
}

/// The three postconditions on a nonresidue tuple.
pub fn is_nonresidue_tuple(s: &STuple, p: u64, r: u32) -> bool {
    let Ok(pr) = prime_power(p, r) else {
        return false;
    };
    s.tree_count() == Some(pr)
        && s.parts().iter().all(|&x| x % p != 0)
        && s.parts()
            .iter()
            .fold(BigInt::one(), |acc, &x| acc * x)
            .mod_floor(&BigInt::from(p))
            .to_i128()
            .map(|m| jacobi(m, p) == Ok(-1))
            .unwrap_or(false)
}

/// The tuples realizing the cyclic classes with numerators `5`-type and
/// `3`-type on `Z/2^r`.
pub fn two_group_tuple(r: u32) -> Result<STuple, NumberTheoryError> {
    if r < 3 {
        return Err(NumberTheoryError::ExponentTooSmall { r, min: 3 });
    }
    if r > 63 {
        return Err(NumberTheoryError::Overflow(format!("2^{r}")));
    }
    let t = 1u64 << r;
    let parts = if r % 2 == 1 {
        vec![1, 2, (t - 2) / 3]
    } else {
        vec![1, 1, 1, (t - 1) / 3]
    };
    Ok(STuple::new(parts).expect("positive"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueFilter {
    All,
    OneMod24,
}

/// One certificate row; `a` is absent when the split condition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QRow {
    pub p: u64,
    pub q: Option<u64>,
    pub a: Option<u64>,
    /// `floor(10^6 q / sqrt(p))`.
    pub ratio_micro: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QReport {
    pub checked: u64,
    pub failures: Vec<u64>,
    pub max_q: u64,
    pub max_ratio_micro: u64,
    pub rows: Vec<QRow>,
}

impl QReport {
    pub fn summary(&self) -> String {
        format!(
            "checked={} failures={} max_q={} max_ratio={}",
            self.checked,
            self.failures.len(),
            self.max_q,
            format_micro(self.max_ratio_micro)
        )
    }

    pub fn tsv(&self) -> String {
        let mut out = String::from("p\tq\ta\tratio\n");
        for row in &self.rows {
            let opt = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                row.p,
                opt(row.q),
                opt(row.a),
                row.ratio_micro.map_or("-".to_string(), format_micro)
            ));
        }
        out
    }
}

fn format_micro(x: u64) -> String {
    format!("{}.{:06}", x / 1_000_000, x % 1_000_000)
}

/// Checks that every odd prime `p <= bound` (optionally only `p = 1 mod 24`)
/// has a nonresidue prime `q = 3 (mod 4)` below `2 sqrt(p)`.
///
/// The range is sieved in segments on `jobs` threads; the report does not
/// depend on `jobs`. Rows are kept only when `keep_rows` is set.
pub fn verify_q_range(bound: u64, filter: ResidueFilter, jobs: usize, keep_rows: bool) -> QReport {
    const SEGMENT: u64 = 1 << 16;
    let base = small_primes(bound.sqrt());
    let segments: Vec<u64> = (0..=bound / SEGMENT).map(|i| i * SEGMENT).collect();
    let work = |start: u64| -> Vec<QRow> {
        let end = (start + SEGMENT).min(bound.saturating_add(1));
        sieve_segment(start, end, &base)
            .into_iter()
            .filter(|&p| p >= 3 && (filter == ResidueFilter::All || p % 24 == 1))
            .map(certify)
            .collect()
    };
    let per_segment: Vec<Vec<QRow>> = if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool")
            .install(|| segments.par_iter().map(|&s| work(s)).collect())
    } else {
        segments.iter().map(|&s| work(s)).collect()
    };

    let mut report = QReport {
        checked: 0,
        failures: Vec::new(),
        max_q: 0,
        max_ratio_micro: 0,
        rows: Vec::new(),
    };
    for row in per_segment.into_iter().flatten() {
        report.checked += 1;
        match (row.q, row.ratio_micro) {
            (Some(q), Some(ratio)) => {
                report.max_q = report.max_q.max(q);
                report.max_ratio_micro = report.max_ratio_micro.max(ratio);
            }
            _ => report.failures.push(row.p),
        }
        if keep_rows {
            report.rows.push(row);
        }
    }
    report
}

fn certify(p: u64) -> QRow {
    let q = find_nonresidue_prime(p, 1, 1).ok().flatten();
    let a = q.and_then(|q| split_prime(q, p as i128).ok());
    let ratio_micro = q.map(|q| {
        let scaled = BigInt::from(q).pow(2u32) * BigInt::from(10u64).pow(12) / BigInt::from(p);
        scaled.sqrt().to_u64().expect("ratio fits")
    });
    QRow { p, q, a, ratio_micro }
}

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[start, end)`.
fn sieve_segment(start: u64, end: u64, base: &[u64]) -> Vec<u64> {
    if end <= start {
        return Vec::new();
    }
    let mut composite = vec![false; (end - start) as usize];
    for &p in base {
        if p * p >= end {
            break;
        }
        let first = (start.div_ceil(p) * p).max(p * p);
        let mut m = first;
        while m < end {
            composite[(m - start) as usize] = true;
            m += p;
        }
    }
    (start..end)
        .filter(|&x| x >= 2 && !composite[(x - start) as usize])
        .collect()
}
