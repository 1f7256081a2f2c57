//! Parameter sets (subgroups, product sets, primes, geometric progressions,
//! intervals) and arithmetic-function tables.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::field::{is_prime, mod_pow, mult_order, primitive_root, residue};
use crate::fnv1a64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamKind {
    Subgroup { p: u64, r: u64 },
    Product { p: u64, u: Vec<i64>, v: Vec<i64> },
    Primes { limit: u64 },
    Geometric { lambda: i64, t_max: u64, p: u64 },
    Interval { m: i64, n: u64 },
}

/// A materialized parameter set. Product and geometric sets are multisets:
/// product elements are stored row-major, so element `i` comes from the
/// pair `(u[i / #V], v[i % #V])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSet {
    pub kind: ParamKind,
    pub elements: Vec<i64>,
    pub descriptor: String,
}

impl ParamSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The `(u, v)` pair behind element `i` of a product set.
    pub fn pair_of(&self, i: usize) -> Option<(i64, i64)> {
        match &self.kind {
            ParamKind::Product { u, v, .. } if i < self.elements.len() => {
                Some((u[i / v.len()], v[i % v.len()]))
            }
            _ => None,
        }
    }
}

/// FNV-1a fingerprint of a list of integers, as 16 hex digits.
pub fn list_hash(xs: &[i64]) -> String {
    let s = xs.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    format!("{:016x}", fnv1a64(s.as_bytes()))
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(domain(format!("{p} is not prime")))
    }
}

/// The subgroup of order `r` in `𝔽_p*`, as powers of `g^((p−1)/r)`.
pub fn subgroup(p: u64, r: u64) -> Result<ParamSet> {
    require_prime(p)?;
    if r == 0 || !(p - 1).is_multiple_of(r) {
        return Err(domain(format!("{r} does not divide p − 1 = {}", p - 1)));
    }
    let h = mod_pow(primitive_root(p), (p - 1) / r, p);
    let mut elements = Vec::with_capacity(r as usize);
    let mut w = 1u64;
    for _ in 0..r {
        elements.push(w as i64);
        w = w * h % p;
    }
    Ok(ParamSet {
        kind: ParamKind::Subgroup { p, r },
        elements,
        descriptor: format!("subgroup:p={p}:r={r}"),
    })
}

/// The multiset `{uv mod p}` over `U × V`.
pub fn product_residues(u: &[i64], v: &[i64], p: u64) -> Result<ParamSet> {
    require_prime(p)?;
    if let Some(z) = u.iter().chain(v).find(|&&x| residue(x, p) == 0) {
        return Err(domain(format!("{z} is not a unit modulo {p}")));
    }
    let elements = u
        .iter()
        .flat_map(|&a| {
            v.iter()
                .map(move |&b| (residue(a, p) * residue(b, p) % p) as i64)
        })
        .collect();
    Ok(ParamSet {
        kind: ParamKind::Product {
            p,
            u: u.to_vec(),
            v: v.to_vec(),
        },
        elements,
        descriptor: format!("product:p={p}:U={}:V={}", list_hash(u), list_hash(v)),
    })
}

const SEGMENT: u64 = 1 << 15;

/// All primes `≤ limit` by a segmented sieve of Eratosthenes.
pub fn prime_list(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root {
        if small[i as usize] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                small[j as usize] = false;
                j += i;
            }
        }
    }
    let mut out = Vec::new();
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        seg.iter_mut().for_each(|b| *b = true);
        for &q in &base {
            if q * q > hi {
                break;
            }
            let mut j = (q * q).max(lo.div_ceil(q) * q);
            while j <= hi {
                seg[(j - lo) as usize] = false;
                j += q;
            }
        }
        out.extend((lo..=hi).filter(|&n| seg[(n - lo) as usize]));
        lo = hi + 1;
    }
    out
}

pub fn primes_upto(limit: u64) -> Result<ParamSet> {
    if limit < 2 {
        return Err(domain(format!("prime bound {limit} is below 2")));
    }
    Ok(ParamSet {
        kind: ParamKind::Primes { limit },
        elements: prime_list(limit).into_iter().map(|q| q as i64).collect(),
        descriptor: format!("primes:L={limit}"),
    })
}

/// `λ¹, λ², ..., λ^T mod p`. Any unit `λ` is accepted here; the `|λ| ≥ 2`
/// condition of the mixed experiment is enforced there.
pub fn geometric(lambda: i64, t_max: u64, p: u64) -> Result<ParamSet> {
    require_prime(p)?;
    if t_max == 0 {
        return Err(domain("T must be positive"));
    }
    let l = residue(lambda, p);
    if l == 0 {
        return Err(domain(format!("{p} divides λ = {lambda}")));
    }
    let mut elements = Vec::with_capacity(t_max as usize);
    let mut w = 1u64;
    for _ in 0..t_max {
        w = w * l % p;
        elements.push(w as i64);
    }
    Ok(ParamSet {
        kind: ParamKind::Geometric { lambda, t_max, p },
        elements,
        descriptor: format!("geom:lambda={lambda}:T={t_max}:p={p}"),
    })
}

/// The integers `M+1, ..., M+N`.
pub fn interval(m: i64, n: u64) -> ParamSet {
    ParamSet {
        kind: ParamKind::Interval { m, n },
        elements: (1..=n as i64).map(|i| m + i).collect(),
        descriptor: format!("interval:M={m}:N={n}"),
    }
}

/// `Λ`, `μ`, `ω` and `τ` on `1..=limit` (index 0 holds zeros).
#[derive(Debug, Clone)]
pub struct ArithTables {
    limit: usize,
    lambda: Vec<f64>,
    mu: Vec<i8>,
    omega: Vec<u8>,
    tau: Vec<u32>,
}

impl ArithTables {
    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn lambda(&self, t: usize) -> f64 {
        self.lambda[t]
    }

    pub fn mu(&self, t: usize) -> i8 {
        self.mu[t]
    }

    pub fn omega(&self, t: usize) -> u8 {
        self.omega[t]
    }

    pub fn tau(&self, t: usize) -> u32 {
        self.tau[t]
    }
}

/// Linear sieve. Each composite is visited once, through its least prime
/// factor; the power of that prime dividing `t` is tracked to update `τ`.
pub fn sieve_arith(limit: usize) -> Result<ArithTables> {
    if limit < 2 {
        return Err(domain(format!("sieve limit {limit} is below 2")));
    }
    let n = limit + 1;
    let mut lambda = vec![0.0; n];
    let mut mu = vec![0i8; n];
    let mut omega = vec![0u8; n];
    let mut tau = vec![0u32; n];
    let mut lp = vec![0usize; n];
    let mut lp_exp = vec![0u32; n];
    let mut lp_pow = vec![0usize; n];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    tau[1] = 1;
    for i in 2..n {
        if lp[i] == 0 {
            lp[i] = i;
            primes.push(i);
            lambda[i] = (i as f64).ln();
            mu[i] = -1;
            omega[i] = 1;
            tau[i] = 2;
            lp_exp[i] = 1;
            lp_pow[i] = i;
        }
        let lp_i = lp[i];
        for &q in &primes {
            let j = i * q;
            if j >= n || q > lp_i {
                break;
            }
            lp[j] = q;
            if q == lp_i {
                lp_exp[j] = lp_exp[i] + 1;
                lp_pow[j] = lp_pow[i] * q;
                mu[j] = 0;
                omega[j] = omega[i];
                tau[j] = tau[i] / (lp_exp[i] + 1) * (lp_exp[i] + 2);
                if lp_pow[j] == j {
                    lambda[j] = (q as f64).ln();
                }
            } else {
                lp_exp[j] = 1;
                lp_pow[j] = q;
                mu[j] = -mu[i];
                omega[j] = omega[i] + 1;
                tau[j] = 2 * tau[i];
            }
        }
    }
    Ok(ArithTables {
        limit,
        lambda,
        mu,
        omega,
        tau,
    })
}

/// `S_α(x; λ) = Σ_{p ≤ x, p ∤ λ} (ord_p λ)^{−α}`.
pub fn order_sum(x: u64, lambda: i64, alpha: f64) -> Result<f64> {
    if lambda.unsigned_abs() < 2 {
        return Err(domain(format!("|λ| must exceed 1, got {lambda}")));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(domain(format!("α = {alpha} outside (0, 2)")));
    }
    let mut total = 0.0;
    for p in prime_list(x) {
        if residue(lambda, p) == 0 {
            continue;
        }
        total += (mult_order(lambda, p)? as f64).powf(-alpha);
    }
    Ok(total)
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (q, e) in crate::field::factor(n) {
        let len = ds.len();
        let mut qk = 1;
        for _ in 0..e {
            qk *= q;
            for i in 0..len {
                ds.push(ds[i] * qk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// `H_P(x, y, 2y) = #{p ≤ x : some d ∈ (y, 2y] divides p − 1}`.
pub fn divisor_window_count(x: u64, y: u64) -> Result<u64> {
    if y < 3 {
        return Err(domain(format!("window start y = {y} is below 3")));
    }
    Ok(prime_list(x)
        .into_iter()
        .filter(|&p| divisors(p - 1).iter().any(|&d| y < d && d <= 2 * y))
        .count() as u64)
}

/// `δ = 1 − (1 + log log 2)/log 2`.
pub fn erdos_delta() -> f64 {
    let l2 = std::f64::consts::LN_2;
    1.0 - (1.0 + l2.ln()) / l2
}
