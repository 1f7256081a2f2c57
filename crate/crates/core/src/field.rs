//! Arithmetic modulo a prime: powers, Legendre symbols, primitive roots,
//! discrete-log tables, multiplicative characters and orders.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Default ceiling for [`IndexTable`] construction.
pub const INDEX_TABLE_LIMIT: u64 = 1 << 22;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

/// `base^exp mod p` by square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    if p == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        exp >>= 1;
    }
    acc
}

/// Canonical representative of `x` in `[0, p)`.
#[inline]
pub fn residue(x: i64, p: u64) -> u64 {
    i128::from(x).rem_euclid(i128::from(p)) as u64
}

/// Deterministic Miller–Rabin. The first thirteen prime bases are a
/// certificate for every n < 3.3·10²⁴, which covers all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = mod_pow(a, d, n);
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

/// Factorization by trial division, as `(prime, exponent)` pairs in
/// ascending order. `factor(1)` is empty.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |q: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(q) {
            *n /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
    };
    push(2, &mut n);
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        push(d, &mut n);
        d += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Legendre symbol `(a/p)` for an odd prime `p`, computed with the
/// binary Jacobi-symbol recursion (no exponentiation).
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2);
    let mut a = residue(a, p);
    let mut n = p;
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
    if n == 1 {
        sign
    } else {
        0
    }
}

/// A prime `p > 3` together with the factorization of `p − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeModulus {
    p: u64,
    p_minus_1_factors: Vec<(u64, u32)>,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 3 || !is_prime(p) {
            return Err(domain(format!("{p} is not a prime greater than 3")));
        }
        Ok(Self {
            p,
            p_minus_1_factors: factor(p - 1),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_minus_1_factors(&self) -> &[(u64, u32)] {
        &self.p_minus_1_factors
    }
}

/// Smallest generator of `(ℤ/pℤ)*`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Multiplicative order of `lambda` modulo the prime `p`.
///
/// Starts from `p − 1` and strips each prime factor while the power stays 1.
pub fn mult_order(lambda: i64, p: u64) -> Result<u64> {
    let l = residue(lambda, p);
    if l == 0 {
        return Err(domain(format!("{p} divides {lambda}")));
    }
    let mut r = p - 1;
    for (q, _) in factor(p - 1) {
        while r.is_multiple_of(q) && mod_pow(l, r / q, p) == 1 {
            r /= q;
        }
    }
    Ok(r)
}

/// Bitset of nonzero quadratic residues modulo `p`.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    p: u64,
    bits: Vec<u64>,
}

impl ResidueTable {
    pub fn new(p: u64) -> Self {
        assert!(p > 2, "residue table needs an odd prime");
        let mut bits = vec![0u64; (p as usize).div_ceil(64)];
        // x² for x ≤ (p−1)/2 covers every nonzero square once; (x+1)² = x² + 2x + 1.
        let mut sq = 0u64;
        for x in 0..(p - 1) / 2 {
            sq += 2 * x + 1;
            if sq >= p {
                sq %= p;
            }
            bits[(sq >> 6) as usize] |= 1 << (sq & 63);
        }
        Self { p, bits }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn is_nonzero_square(&self, x: u64) -> bool {
        (self.bits[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    pub fn legendre(&self, x: u64) -> i8 {
        let x = x % self.p;
        if x == 0 {
            0
        } else if self.is_nonzero_square(x) {
            1
        } else {
            -1
        }
    }

    pub fn count_nonzero_squares(&self) -> u64 {
        self.bits.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// `Σ_{x ∈ 𝔽_p} (x³ + ax + b / p)`.
    ///
    /// Walks the cubic by finite differences in four interleaved strands so
    /// that the inner loop is additions and one table probe per `x`.
    pub fn cubic_character_sum(&self, a: u64, b: u64) -> i64 {
        const STRANDS: u64 = 4;
        let p = self.p;
        let (a, b) = (a % p, b % p);
        let len = p / STRANDS;
        let mut walkers: [CubicWalker; STRANDS as usize] =
            std::array::from_fn(|i| CubicWalker::at(i as u64 * len, a, b, p));
        let mut squares = 0u64;
        let mut zeros = 0u64;
        for _ in 0..len {
            for w in walkers.iter_mut() {
                squares += u64::from(self.is_nonzero_square(w.v));
                zeros += u64::from(w.v == 0);
                w.step(p);
            }
        }
        // The last strand continues through the remainder p mod 4.
        let tail = &mut walkers[STRANDS as usize - 1];
        for _ in STRANDS * len..p {
            squares += u64::from(self.is_nonzero_square(tail.v));
            zeros += u64::from(tail.v == 0);
            tail.step(p);
        }
        2 * squares as i64 - (p - zeros) as i64
    }
}

/// State of `v(x) = x³ + ax + b` and its first two forward differences.
#[derive(Clone, Copy)]
struct CubicWalker {
    v: u64,
    d1: u64,
    d2: u64,
}

impl CubicWalker {
    fn at(x: u64, a: u64, b: u64, p: u64) -> Self {
        let x = x % p;
        let x2 = mul_mod(x, x, p);
        let v = (mul_mod(x2, x, p) + mul_mod(a, x, p) + b) % p;
        let d1 = (mul_mod(3, x2, p) + mul_mod(3, x, p) + 1 + a) % p;
        let d2 = (mul_mod(6, x, p) + 6) % p;
        Self { v, d1, d2 }
    }

    #[inline(always)]
    fn step(&mut self, p: u64) {
        self.v += self.d1;
        if self.v >= p {
            self.v -= p;
        }
        self.d1 += self.d2;
        if self.d1 >= p {
            self.d1 -= p;
        }
        self.d2 += 6;
        if self.d2 >= p {
            self.d2 -= p;
        }
    }
}

/// Discrete logarithms to the smallest primitive root: `ind[g^z] = z`.
#[derive(Debug, Clone)]
pub struct IndexTable {
    p: u64,
    g: u64,
    ind: Vec<u32>,
}

impl IndexTable {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_limit(p, INDEX_TABLE_LIMIT)
    }

    /// Like [`IndexTable::new`] with an explicit size ceiling.
    pub fn with_limit(p: u64, limit: u64) -> Result<Self> {
        let modulus = PrimeModulus::new(p)?;
        if p > limit {
            return Err(Error::Refused(format!(
                "index table for p = {p} exceeds the limit {limit}"
            )));
        }
        let g = primitive_root(modulus.p());
        let mut ind = vec![u32::MAX; p as usize];
        let mut w = 1u64;
        for z in 0..p - 1 {
            ind[w as usize] = z as u32;
            w = w * g % p;
        }
        Ok(Self { p, g, ind })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// `ind w`, or `None` for `w ≡ 0`.
    pub fn index(&self, w: u64) -> Option<u64> {
        match self.ind[(w % self.p) as usize] {
            u32::MAX => None,
            z => Some(u64::from(z)),
        }
    }
}

/// `χ_s(w) = exp(2πi · s · ind w / (p − 1))`.
pub fn character_eval(s: u64, w: i64, tbl: &IndexTable) -> Result<Complex64> {
    let n = tbl.p - 1;
    if s >= n {
        return Err(domain(format!(
            "character index {s} outside [0, {}]",
            n - 1
        )));
    }
    let z = tbl
        .index(residue(w, tbl.p))
        .ok_or_else(|| domain(format!("character argument {w} is divisible by p")))?;
    let k = mul_mod(s, z, n);
    Ok(Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_primes(limit: u64) -> impl Iterator<Item = u64> {
        (5..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(2, 10, 1009), 15);
        assert_eq!(mod_pow(12345, 0, 1009), 1);
        assert_eq!(mod_pow(3, 6, 7), 1);
        assert_eq!(mod_pow(3, 3, 7), 6);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(0, 7), 0);
        assert_eq!(legendre(-1, 7), -1);
        assert_eq!(legendre(-1, 13), 1);
    }

    #[test]
    fn legendre_matches_euler_criterion() {
        for p in small_primes(10_000) {
            for a in 0..p {
                let euler = match mod_pow(a, (p - 1) / 2, p) {
                    0 => 0,
                    1 => 1,
                    e => {
                        assert_eq!(e, p - 1);
                        -1
                    }
                };
                assert_eq!(legendre(a as i64, p), euler, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn residue_table_agrees_with_legendre() {
        for p in small_primes(10_000) {
            let t = ResidueTable::new(p);
            assert_eq!(t.count_nonzero_squares(), (p - 1) / 2);
            for a in 0..p {
                assert_eq!(t.legendre(a), legendre(a as i64, p));
            }
        }
    }

    #[test]
    fn cubic_sum_matches_pointwise_sum() {
        for p in [5u64, 7, 11, 13, 101, 1009] {
            let t = ResidueTable::new(p);
            for (a, b) in [(0, 1), (1, 1), (3, 4), (p - 1, p - 2)] {
                let direct: i64 = (0..p)
                    .map(|x| {
                        let v = (mul_mod(mul_mod(x, x, p), x, p) + a * x % p + b) % p;
                        i64::from(legendre(v as i64, p))
                    })
                    .sum();
                assert_eq!(t.cubic_character_sum(a, b), direct, "p={p} a={a} b={b}");
            }
        }
    }

    #[test]
    fn primality() {
        let sieved: Vec<u64> = (0..2000)
            .filter(|&n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        let mr: Vec<u64> = (0..2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, mr);
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime(1_000_000_007 * 998_244_353));
    }

    #[test]
    fn prime_modulus_rejects_small_and_composite() {
        assert!(PrimeModulus::new(3).is_err());
        assert!(PrimeModulus::new(9).is_err());
        let m = PrimeModulus::new(1009).unwrap();
        let prod: u64 = m
            .p_minus_1_factors()
            .iter()
            .map(|&(q, e)| q.pow(e))
            .product();
        assert_eq!(prod, 1008);
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(1008), vec![(2, 4), (3, 2), (7, 1)]);
        assert_eq!(factor(1_000_000_007), vec![(1_000_000_007, 1)]);
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(11), 2);
        assert_eq!(primitive_root(41), 6);
    }

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(2, 7).unwrap(), 3);
        assert_eq!(mult_order(3, 7).unwrap(), 6);
        assert_eq!(mult_order(-1, 11).unwrap(), 2);
        assert!(matches!(mult_order(14, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn mult_order_is_least_period() {
        for p in small_primes(600) {
            for l in 1..p {
                let r = mult_order(l as i64, p).unwrap();
                assert_eq!((p - 1) % r, 0);
                assert_eq!(mod_pow(l, r, p), 1);
                for (q, _) in factor(r) {
                    assert_ne!(mod_pow(l, r / q, p), 1);
                }
                let brute = (1..p).find(|&k| mod_pow(l, k, p) == 1).unwrap();
                assert_eq!(r, brute);
            }
        }
    }

    #[test]
    fn index_table_is_bijection() {
        let t = IndexTable::new(101).unwrap();
        assert_eq!(t.index(1), Some(0));
        assert_eq!(t.index(t.generator()), Some(1));
        assert_eq!(t.index(0), None);
        let mut seen = [false; 100];
        for w in 1..101 {
            let z = t.index(w).unwrap() as usize;
            assert!(!seen[z]);
            seen[z] = true;
        }
        assert!(matches!(
            IndexTable::with_limit(1009, 1000),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn character_examples() {
        let p = 13;
        let t = IndexTable::new(p).unwrap();
        for w in 1..p as i64 {
            let c = character_eval(0, w, &t).unwrap();
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            let q = character_eval((p - 1) / 2, w, &t).unwrap();
            assert!((q.re - f64::from(legendre(w, p))).abs() < 1e-12);
            assert!(q.im.abs() < 1e-12);
        }
        let g = character_eval(1, t.generator() as i64, &t).unwrap();
        assert!((g - Complex64::from_polar(1.0, TAU / 12.0)).norm() < 1e-15);
        assert!(character_eval(1, 26, &t).is_err());
        assert!(character_eval(12, 1, &t).is_err());
    }

    #[test]
    fn characters_multiply_and_are_orthogonal() {
        for p in [5u64, 31, 101, 211] {
            let t = IndexTable::new(p).unwrap();
            for s in 0..p - 1 {
                let total: Complex64 = (1..p as i64)
                    .map(|w| character_eval(s, w, &t).unwrap())
                    .sum();
                let expect = if s == 0 { (p - 1) as f64 } else { 0.0 };
                assert!((total - Complex64::new(expect, 0.0)).norm() < 1e-9 * (p - 1) as f64);
            }
            for (s, u) in [(1, 2), (3, p - 3), (p - 2, p - 2)] {
                for w in [1i64, 2, 7] {
                    let lhs = character_eval(s, w, &t).unwrap() * character_eval(u, w, &t).unwrap();
                    let rhs = character_eval((s + u) % (p - 1), w, &t).unwrap();
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }
}
