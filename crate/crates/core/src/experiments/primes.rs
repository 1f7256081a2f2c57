//! Sums over primes and squarefree numbers at a fixed prime `p`, with the
//! Vaughan decomposition `Σ₁..Σ₄` and its Möbius analogue `Ω₁..Ω₄`
//! evaluated term by term.

use serde::Serialize;

use super::{angles_with, ratio, Lab};
use crate::error::{domain, Result};
use crate::params::{prime_list, sieve_arith, ArithTables};
use crate::stats::sym;

/// What `ψ(t)` is in the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VaughanWeights {
    /// `sym_n(ψ_p(E(t)))·δ(t)` with `δ` the good-reduction indicator.
    Family,
    /// `ψ ≡ 1`, which turns the direct sum into Chebyshev's `ψ(L)`.
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VaughanReport {
    pub p: u64,
    pub l: u64,
    pub k: f64,
    pub m: f64,
    pub n: u32,
    pub weights: VaughanWeights,
    /// `Σ_{t ≤ L} Λ(t) ψ(t)`.
    pub direct_sum: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub sigma4: f64,
    /// `Σ₁ + Σ₂ log(KM) + Σ₃ log L + Σ₄`.
    pub vaughan_rhs: f64,
    /// `n(L p^{−1/2} + L^{5/6} + L^{1/2} p^{1/2})`.
    pub lambda_bracket: f64,
    pub ratio: f64,
    /// `Σ_{t ≤ L} Λ(t)`.
    pub chebyshev_psi: f64,
    /// `sup|ψ| · Σ_{t ≤ L} Λ(t)`.
    pub trivial_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobiusReport {
    pub p: u64,
    pub l: u64,
    pub k: f64,
    pub m: f64,
    pub n: u32,
    pub weights: VaughanWeights,
    /// `Σ_{t ≤ L} |μ(t)| ψ(t)`.
    pub abs_mu_sum: f64,
    /// `Σ_{t ≤ L} μ(t) ψ(t)`.
    pub mu_sum: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub omega4: f64,
    pub squarefree_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeSumReport {
    pub p: u64,
    pub l: u64,
    pub n: u32,
    /// `Σ_{ℓ ≤ L prime, Δ(ℓ) ≢ 0} sym_n(ψ_p(E(ℓ)))`.
    pub value: f64,
    pub terms: u64,
    pub prime_count: u64,
    /// `n(L p^{−1/2} + L^{5/6} + (Lp)^{1/2})`.
    pub bracket: f64,
    pub ratio: f64,
    /// `π(L)(1 + p/L)^{1/12}`, the shape of the non-effective bound.
    pub shape_bound: f64,
}

/// `⌊x⌋` for a non-negative real, as an index.
fn floor(x: f64) -> usize {
    x.floor() as usize
}

/// `ψ` on `0..=L`, index 0 unused.
struct PsiTable {
    values: Vec<f64>,
    sup: f64,
}

impl PsiTable {
    fn at(&self, t: usize) -> f64 {
        self.values[t]
    }

    /// `Σ_{m ≤ len} ψ(km)`.
    fn line_sum(&self, k: usize, len: usize) -> f64 {
        (1..=len).map(|m| self.values[k * m]).sum()
    }
}

impl Lab<'_> {
    fn psi_table(&self, p: u64, l: u64, n: u32, weights: VaughanWeights) -> Result<PsiTable> {
        match weights {
            VaughanWeights::Surrogate => {
                let mut values = vec![1.0; l as usize + 1];
                values[0] = 0.0;
                Ok(PsiTable { values, sup: 1.0 })
            }
            VaughanWeights::Family => {
                self.require_nondeg_mod_p(p)?;
                let residues: Vec<u64> = (1..=l).map(|t| t % p).collect();
                let mut values = vec![0.0];
                values.extend(
                    angles_with(&self.tracer(p)?, &residues)?
                        .into_iter()
                        .map(|psi| psi.map_or(0.0, |psi| sym(n, psi))),
                );
                Ok(PsiTable {
                    values,
                    sup: f64::from(n + 1),
                })
            }
        }
    }

    /// Exact evaluation of the direct sum and the four Vaughan terms.
    /// `K` and `M` default to `L^{1/3}`.
    pub fn vaughan_decompose(
        &self,
        p: u64,
        l: u64,
        k: Option<f64>,
        m: Option<f64>,
        n: u32,
        weights: VaughanWeights,
    ) -> Result<VaughanReport> {
        let (k, m) = check_km(l, k, m, n)?;
        let psi = self.psi_table(p, l, n, weights)?;
        let tables = sieve_arith(l as usize)?;
        let lu = l as usize;

        let direct_sum: f64 = (1..=lu).map(|t| tables.lambda(t) * psi.at(t)).sum();
        let chebyshev_psi: f64 = (1..=lu).map(|t| tables.lambda(t)).sum();
        let sigma1 = (1..=floor(m))
            .map(|t| tables.lambda(t) * psi.at(t))
            .sum::<f64>()
            .abs();
        let sigma2: f64 = (1..=floor(k * m).min(lu))
            .map(|kk| psi.line_sum(kk, lu / kk).abs())
            .sum();
        let sigma3: f64 = (1..=floor(k).min(lu))
            .map(|kk| {
                // largest |tail sum| over starting points w
                let mut tail = 0.0f64;
                let mut best = 0.0f64;
                for mm in (1..=lu / kk).rev() {
                    tail += psi.at(kk * mm);
                    best = best.max(tail.abs());
                }
                best
            })
            .sum();
        let sigma4 = bilinear_tail(&tables, &psi, lu, k, m, |t| tables.lambda(t));

        let log_km = (k * m).ln();
        let vaughan_rhs = sigma1 + sigma2 * log_km + sigma3 * (l as f64).ln() + sigma4;
        let (lf, pf) = (l as f64, p as f64);
        let lambda_bracket =
            f64::from(n) * (lf / pf.sqrt() + lf.powf(5.0 / 6.0) + lf.sqrt() * pf.sqrt());
        Ok(VaughanReport {
            p,
            l,
            k,
            m,
            n,
            weights,
            direct_sum,
            sigma1,
            sigma2,
            sigma3,
            sigma4,
            vaughan_rhs,
            lambda_bracket,
            ratio: ratio(direct_sum.abs(), lambda_bracket),
            chebyshev_psi,
            trivial_bound: psi.sup * chebyshev_psi,
        })
    }

    /// Möbius-weighted sums and the terms `Ω₁..Ω₄` (with `Ω₃ = 0`).
    pub fn mobius_sums(
        &self,
        p: u64,
        l: u64,
        k: Option<f64>,
        m: Option<f64>,
        n: u32,
        weights: VaughanWeights,
    ) -> Result<MobiusReport> {
        let (k, m) = check_km(l, k, m, n)?;
        let psi = self.psi_table(p, l, n, weights)?;
        let tables = sieve_arith(l as usize)?;
        let lu = l as usize;
        let mu = |t: usize| f64::from(tables.mu(t));

        let abs_mu_sum: f64 = (1..=lu).map(|t| mu(t).abs() * psi.at(t)).sum();
        let mu_sum: f64 = (1..=lu).map(|t| mu(t) * psi.at(t)).sum();
        let squarefree_count = (1..=lu).filter(|&t| tables.mu(t) != 0).count() as u64;
        let omega1 = (1..=floor(k.max(m)).min(lu))
            .map(|t| mu(t) * psi.at(t))
            .sum::<f64>()
            .abs();
        let omega2: f64 = (1..=floor(k * m).min(lu))
            .map(|kk| f64::from(tables.tau(kk)) * psi.line_sum(kk, lu / kk).abs())
            .sum();
        let omega4 = bilinear_tail(&tables, &psi, lu, k, m, mu);
        Ok(MobiusReport {
            p,
            l,
            k,
            m,
            n,
            weights,
            abs_mu_sum,
            mu_sum,
            omega1,
            omega2,
            omega3: 0.0,
            omega4,
            squarefree_count,
        })
    }

    /// `Σ_{ℓ ≤ L prime, Δ(ℓ) ≢ 0} sym_n(ψ_p(E(ℓ)))`.
    pub fn prime_sym_sum(&self, p: u64, l: u64, n: u32) -> Result<PrimeSumReport> {
        self.require_nondeg_mod_p(p)?;
        if l < 2 {
            return Err(domain(format!("L = {l} is below 2")));
        }
        if n == 0 {
            return Err(domain("n must be at least 1"));
        }
        let ells = prime_list(l);
        let residues: Vec<u64> = ells.iter().map(|&e| e % p).collect();
        let mut value = 0.0;
        let mut terms = 0;
        for psi in angles_with(&self.tracer(p)?, &residues)?
            .into_iter()
            .flatten()
        {
            value += sym(n, psi);
            terms += 1;
        }
        let (lf, pf) = (l as f64, p as f64);
        let bracket = f64::from(n) * (lf / pf.sqrt() + lf.powf(5.0 / 6.0) + (lf * pf).sqrt());
        Ok(PrimeSumReport {
            p,
            l,
            n,
            value,
            terms,
            prime_count: ells.len() as u64,
            bracket,
            ratio: ratio(value.abs(), bracket),
            shape_bound: ells.len() as f64 * (1.0 + pf / lf).powf(1.0 / 12.0),
        })
    }
}

fn check_km(l: u64, k: Option<f64>, m: Option<f64>, n: u32) -> Result<(f64, f64)> {
    if l < 2 {
        return Err(domain(format!("L = {l} is below 2")));
    }
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let default = (l as f64).cbrt();
    let (k, m) = (k.unwrap_or(default), m.unwrap_or(default));
    if !(k >= 1.0 && m >= 1.0) || !k.is_finite() || !m.is_finite() {
        return Err(domain(format!("K = {k} and M = {m} must be at least 1")));
    }
    if k * m > l as f64 {
        return Err(domain(format!("KM = {} exceeds L = {l}", k * m)));
    }
    Ok((k, m))
}

/// `|Σ_{M < m ≤ L/K} w(m) Σ_{K < k ≤ L/m} (Σ_{d | k, d ≤ K} μ(d)) ψ(km)|`.
fn bilinear_tail(
    tables: &ArithTables,
    psi: &PsiTable,
    l: usize,
    k: f64,
    m: f64,
    weight: impl Fn(usize) -> f64,
) -> f64 {
    let (k_lo, m_lo) = (floor(k), floor(m));
    let k_hi = l / (m_lo + 1).max(1);
    // truncated divisor sums c(k) = Σ_{d | k, d ≤ K} μ(d) for k ≤ L/M
    let mut c = vec![0i64; k_hi + 1];
    for d in 1..=k_lo.min(k_hi) {
        let mu = i64::from(tables.mu(d));
        if mu != 0 {
            for kk in (d..=k_hi).step_by(d) {
                c[kk] += mu;
            }
        }
    }
    let m_hi = floor(l as f64 / k);
    let mut total = 0.0;
    for mm in m_lo + 1..=m_hi {
        let w = weight(mm);
        if w == 0.0 {
            continue;
        }
        let inner: f64 = (k_lo + 1..=l / mm)
            .map(|kk| c[kk] as f64 * psi.at(kk * mm))
            .sum();
        total += w * inner;
    }
    total.abs()
}
