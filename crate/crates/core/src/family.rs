//! The family `E(Z): Y² = X³ + f(Z)X + g(Z)` over `ℤ[Z]`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::field::{mul_mod, residue};
use crate::fnv1a64;

/// Outcome of a nondegeneracy check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nondegeneracy {
    Pass,
    DeltaZero,
    JConstant,
}

impl Nondegeneracy {
    pub fn is_pass(self) -> bool {
        self == Nondegeneracy::Pass
    }

    /// `"pass"`, `"delta_zero"` or `"j_constant"`.
    pub fn as_str(self) -> &'static str {
        match self {
            Nondegeneracy::Pass => "pass",
            Nondegeneracy::DeltaZero => "delta_zero",
            Nondegeneracy::JConstant => "j_constant",
        }
    }
}

impl fmt::Display for Nondegeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Integer polynomials `f`, `g` (ascending degree) with the expanded
/// discriminant `Δ(Z) = −16(4f³ + 27g²)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPoly {
    f: Vec<BigInt>,
    g: Vec<BigInt>,
    delta: Vec<BigInt>,
}

impl FamilyPoly {
    pub fn new(f: Vec<BigInt>, g: Vec<BigInt>) -> Result<Self> {
        let f = trim(f);
        let g = trim(g);
        if f.is_empty() && g.is_empty() {
            return Err(domain("f and g are both the zero polynomial"));
        }
        let f3 = poly_mul(&poly_mul(&f, &f), &f);
        let g2 = poly_mul(&g, &g);
        let inner = poly_add(
            &poly_scale(&f3, &BigInt::from(4)),
            &poly_scale(&g2, &BigInt::from(27)),
        );
        let delta = trim(poly_scale(&inner, &BigInt::from(-16)));
        Ok(Self { f, g, delta })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(f: &[i64], g: &[i64]) -> Result<Self> {
        Self::new(
            f.iter().copied().map(BigInt::from).collect(),
            g.iter().copied().map(BigInt::from).collect(),
        )
    }

    /// Parses two comma-separated, ascending-degree coefficient lists.
    pub fn parse(f: &str, g: &str) -> Result<Self> {
        Self::new(parse_coeffs(f)?, parse_coeffs(g)?)
    }

    pub fn f(&self) -> &[BigInt] {
        &self.f
    }

    pub fn g(&self) -> &[BigInt] {
        &self.g
    }

    /// Coefficients of `Δ(Z)`, ascending; empty when `Δ` is identically zero.
    pub fn delta(&self) -> &[BigInt] {
        &self.delta
    }

    /// Degree of `Δ`, or `None` for the zero polynomial.
    pub fn deg_delta(&self) -> Option<usize> {
        self.delta.len().checked_sub(1)
    }

    /// The byte string hashed into the family fingerprint.
    pub fn canonical_string(&self) -> String {
        format!("f={};g={}", join_coeffs(&self.f), join_coeffs(&self.g))
    }

    /// 64-bit FNV-1a of [`FamilyPoly::canonical_string`].
    pub fn fingerprint(&self) -> u64 {
        fnv1a64(self.canonical_string().as_bytes())
    }

    pub fn fingerprint_hex(&self) -> String {
        format!("{:016x}", self.fingerprint())
    }

    /// `Δ(Z) ≠ 0` and `j(Z)` non-constant over `ℚ`.
    ///
    /// `j = −1728(4f)³/Δ` is constant exactly when `(4f)³` and `Δ` are
    /// proportional, which is tested by cross-multiplying coefficients.
    pub fn check_nondeg_global(&self) -> Nondegeneracy {
        if self.delta.is_empty() {
            return Nondegeneracy::DeltaZero;
        }
        let f4 = poly_scale(&self.f, &BigInt::from(4));
        let p = poly_mul(&poly_mul(&f4, &f4), &f4);
        let q = &self.delta;
        let n = p.len().max(q.len());
        let at = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        for i in 0..n {
            for j in i + 1..n {
                if at(&p, i) * at(q, j) != at(&p, j) * at(q, i) {
                    return Nondegeneracy::Pass;
                }
            }
        }
        Nondegeneracy::JConstant
    }

    /// The same test over `𝔽_p`.
    pub fn check_nondeg_mod_p(&self, p: u64) -> Nondegeneracy {
        let red = self.reduce(p);
        if red.delta.iter().all(|&c| c == 0) {
            return Nondegeneracy::DeltaZero;
        }
        let f4: Vec<u64> = red.f.iter().map(|&c| mul_mod(4, c, p)).collect();
        let cube = poly_mul_mod(&poly_mul_mod(&f4, &f4, p), &f4, p);
        let q = &red.delta;
        let n = cube.len().max(q.len());
        let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        for i in 0..n {
            for j in i + 1..n {
                if mul_mod(at(&cube, i), at(q, j), p) != mul_mod(at(&cube, j), at(q, i), p) {
                    return Nondegeneracy::Pass;
                }
            }
        }
        Nondegeneracy::JConstant
    }

    /// Exact `Δ(t)`.
    pub fn delta_at(&self, t: i64) -> BigInt {
        eval_big(&self.delta, &BigInt::from(t))
    }

    pub fn f_at(&self, t: i64) -> BigInt {
        eval_big(&self.f, &BigInt::from(t))
    }

    pub fn g_at(&self, t: i64) -> BigInt {
        eval_big(&self.g, &BigInt::from(t))
    }

    /// Coefficients reduced modulo `p`.
    pub fn reduce(&self, p: u64) -> ReducedFamily {
        let red = |v: &[BigInt]| -> Vec<u64> {
            let m = BigInt::from(p);
            v.iter()
                .map(|c| {
                    let r = c % &m;
                    let r = if r.is_negative() { r + &m } else { r };
                    r.to_u64().expect("residue fits in u64")
                })
                .collect()
        };
        ReducedFamily {
            p,
            f: red(&self.f),
            g: red(&self.g),
            delta: red(&self.delta),
        }
    }

    /// `Δ(t) ≢ 0 (mod p)`, evaluated by Horner over residues.
    pub fn good_reduction(&self, t: i64, p: u64) -> bool {
        self.reduce(p).is_good(residue(t, p))
    }

    /// The specialization `E(t)` modulo `p`.
    pub fn reduce_at(&self, t: i64, p: u64) -> Result<CurveInstance> {
        let red = self.reduce(p);
        let tr = residue(t, p);
        if !red.is_good(tr) {
            return Err(Error::BadReduction { t, p });
        }
        let (a, b) = red.coeffs_at(tr);
        CurveInstance::new(p, a, b, t)
    }
}

/// A family with coefficients reduced modulo a fixed prime.
#[derive(Debug, Clone)]
pub struct ReducedFamily {
    p: u64,
    f: Vec<u64>,
    g: Vec<u64>,
    delta: Vec<u64>,
}

impl ReducedFamily {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn delta_at(&self, t: u64) -> u64 {
        horner(&self.delta, t, self.p)
    }

    pub fn is_good(&self, t: u64) -> bool {
        self.delta_at(t) != 0
    }

    /// `(f(t), g(t)) mod p`.
    pub fn coeffs_at(&self, t: u64) -> (u64, u64) {
        (horner(&self.f, t, self.p), horner(&self.g, t, self.p))
    }
}

/// `Y² = X³ + aX + b` over `𝔽_p` with `4a³ + 27b² ≢ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveInstance {
    p: u64,
    a: u64,
    b: u64,
    t: i64,
}

impl CurveInstance {
    pub fn new(p: u64, a: u64, b: u64, t: i64) -> Result<Self> {
        if p <= 3 {
            return Err(domain(format!("curve arithmetic needs p > 3, got {p}")));
        }
        let (a, b) = (a % p, b % p);
        let a3 = mul_mod(mul_mod(a, a, p), a, p);
        let disc = (mul_mod(4, a3, p) + mul_mod(27, mul_mod(b, b, p), p)) % p;
        if disc == 0 {
            return Err(Error::BadReduction { t, p });
        }
        Ok(Self { p, a, b, t })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn t(&self) -> i64 {
        self.t
    }
}

pub fn parse_coeffs(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<BigInt>()
                .map_err(|_| domain(format!("bad coefficient {c:?} in {s:?}")))
        })
        .collect()
}

fn join_coeffs(v: &[BigInt]) -> String {
    if v.is_empty() {
        return "0".to_string();
    }
    v.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn poly_scale(a: &[BigInt], k: &BigInt) -> Vec<BigInt> {
    a.iter().map(|c| c * k).collect()
}

fn poly_mul_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    out
}

fn eval_big(coeffs: &[BigInt], t: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * t + c)
}

fn horner(coeffs: &[u64], t: u64, p: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| (mul_mod(acc, t, p) + c) % p)
}
