//! Averages over primes `p ≤ x` and over parameter sets.
//!
//! Each experiment accumulates per-prime counts `M_p` (the vertical count
//! at `p`) and sums them, which is exactly the exchanged-summation form
//! `Σ_t π_{E(t)}(α, β; x) = Σ_{p ≤ x} M_p`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{angles_with, ratio, Lab};
use crate::error::{domain, Error, Result};
use crate::field::{mult_order, residue};
use crate::params::{erdos_delta, list_hash, order_sum, prime_list};
use crate::stats::{mu_st, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeCount {
    pub p: u64,
    pub count: u64,
    pub good: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedReport {
    pub x: u64,
    pub set_descriptor: String,
    pub interval: Interval,
    /// `Σ_p M_p`.
    pub total_count: u64,
    /// `π(x) · (number of parameters)`.
    pub normalizer: u64,
    pub normalized_average: f64,
    pub mu: f64,
    pub deviation: f64,
    pub theorem_bracket: f64,
    pub ratio: f64,
    pub bracket_note: Option<String>,
    pub pi_x: u64,
    pub primes_used: u64,
    /// Primes `p ≤ 3`, always skipped but still counted in `π(x)`.
    pub skipped_small_primes: Vec<u64>,
    /// Primes where the family is degenerate modulo `p`.
    pub skipped_degenerate_primes: Vec<u64>,
    /// Primes dividing `λ` (geometric progressions only).
    pub skipped_divisor_primes: Vec<u64>,
    /// Parameter/prime incidences excluded for bad reduction.
    pub bad_reduction: u64,
    /// `S_{1/2}(x; λ)` (geometric progressions only).
    pub order_sum_half: Option<f64>,
    /// Smallest `T` covered by the theorem for this `x` (geometric only).
    pub t_threshold: Option<f64>,
    pub per_prime: Vec<PrimeCount>,
}

/// Primes partitioned for a mixed run.
struct PrimePlan {
    pi_x: u64,
    small: Vec<u64>,
    divisors: Vec<u64>,
    degenerate: Vec<u64>,
    usable: Vec<u64>,
}

impl Lab<'_> {
    fn plan_primes(&self, x: u64, lambda: Option<i64>) -> PrimePlan {
        let all = prime_list(x);
        let mut plan = PrimePlan {
            pi_x: all.len() as u64,
            small: Vec::new(),
            divisors: Vec::new(),
            degenerate: Vec::new(),
            usable: Vec::new(),
        };
        for p in all {
            if p <= 3 {
                plan.small.push(p);
            } else if lambda.is_some_and(|l| residue(l, p) == 0) {
                plan.divisors.push(p);
            } else if !self.family.check_nondeg_mod_p(p).is_pass() {
                plan.degenerate.push(p);
            } else {
                plan.usable.push(p);
            }
        }
        plan
    }

    /// Counts at each usable prime; `weighted` lists `(parameter, multiplicity)`.
    fn per_prime_counts(
        &self,
        primes: &[u64],
        weighted: &[(i64, u64)],
        iv: &Interval,
    ) -> Result<Vec<PrimeCount>> {
        primes
            .par_iter()
            .map(|&p| {
                let residues: Vec<u64> = weighted.iter().map(|&(t, _)| residue(t, p)).collect();
                let angles = angles_with(&self.tracer(p)?, &residues)?;
                let mut pc = PrimeCount {
                    p,
                    count: 0,
                    good: 0,
                };
                for (psi, &(_, mult)) in angles.into_iter().zip(weighted) {
                    if let Some(psi) = psi {
                        pc.good += mult;
                        if iv.contains(psi) {
                            pc.count += mult;
                        }
                    }
                }
                Ok(pc)
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &self,
        x: u64,
        set_descriptor: String,
        iv: &Interval,
        params: u64,
        plan: PrimePlan,
        per_prime: Vec<PrimeCount>,
        theorem_bracket: f64,
        bracket_note: Option<String>,
    ) -> MixedReport {
        let total_count: u64 = per_prime.iter().map(|c| c.count).sum();
        let good: u64 = per_prime.iter().map(|c| c.good).sum();
        let normalizer = plan.pi_x * params;
        let normalized_average = if normalizer > 0 {
            total_count as f64 / normalizer as f64
        } else {
            0.0
        };
        let mu = mu_st(iv);
        let deviation = (normalized_average - mu).abs();
        MixedReport {
            x,
            set_descriptor,
            interval: *iv,
            total_count,
            normalizer,
            normalized_average,
            mu,
            deviation,
            theorem_bracket,
            ratio: ratio(deviation, theorem_bracket),
            bracket_note,
            pi_x: plan.pi_x,
            primes_used: plan.usable.len() as u64,
            skipped_small_primes: plan.small,
            skipped_divisor_primes: plan.divisors,
            skipped_degenerate_primes: plan.degenerate,
            bad_reduction: params * per_prime.len() as u64 - good,
            order_sum_half: None,
            t_threshold: None,
            per_prime,
        }
    }

    /// `(1/(π(x)·#U·#V)) Σ_{u,v} π_{E(uv)}(α, β; x)` for integer sets `U, V ⊆ [1, x]`.
    pub fn mixed_product(
        &self,
        x: u64,
        u: &[i64],
        v: &[i64],
        iv: &Interval,
    ) -> Result<MixedReport> {
        self.require_nondeg_global()?;
        if u.is_empty() || v.is_empty() {
            return Err(domain("U and V must be non-empty"));
        }
        if let Some(bad) = u.iter().chain(v).find(|&&w| w < 1 || w as u64 > x) {
            return Err(domain(format!("{bad} is outside [1, {x}]")));
        }
        let mut products: BTreeMap<i64, u64> = BTreeMap::new();
        for &a in u {
            for &b in v {
                let t = a
                    .checked_mul(b)
                    .ok_or_else(|| domain("product overflows i64"))?;
                *products.entry(t).or_default() += 1;
            }
        }
        let weighted: Vec<(i64, u64)> = products.into_iter().collect();
        let plan = self.plan_primes(x, None);
        let per_prime = self.per_prime_counts(&plan.usable, &weighted, iv)?;
        let size = (u.len() * v.len()) as u64;
        let bracket = (x as f64 / size as f64).powf(0.25);
        let descriptor = format!("mixed-product:x={x}:U={}:V={}", list_hash(u), list_hash(v));
        Ok(self.assemble(x, descriptor, iv, size, plan, per_prime, bracket, None))
    }

    /// `(1/(π(x)·T)) Σ_{t ≤ T} π_λ(α, β; t, x)` for the progression `λ^t`.
    ///
    /// At each prime the residues `λ^t` repeat with period `r = ord_p λ`, so
    /// with `T = k_p·r + s_p` only `min(r, T)` traces are needed.
    pub fn mixed_geometric(
        &self,
        x: u64,
        lambda: i64,
        t_max: u64,
        iv: &Interval,
    ) -> Result<MixedReport> {
        self.require_nondeg_global()?;
        if lambda.unsigned_abs() < 2 {
            return Err(domain(format!("|λ| must be at least 2, got {lambda}")));
        }
        if t_max == 0 {
            return Err(domain("T must be positive"));
        }
        if x < 3 {
            return Err(domain(format!("x = {x} is below 3")));
        }
        let plan = self.plan_primes(x, Some(lambda));
        let per_prime: Vec<PrimeCount> = plan
            .usable
            .par_iter()
            .map(|&p| {
                let r = mult_order(lambda, p)?;
                let len = r.min(t_max);
                let l = residue(lambda, p);
                let mut residues = Vec::with_capacity(len as usize);
                let mut w = 1u64;
                for _ in 0..len {
                    w = w * l % p;
                    residues.push(w);
                }
                let angles = angles_with(&self.tracer(p)?, &residues)?;
                let (k, s) = (t_max / r, t_max % r);
                let mut pc = PrimeCount {
                    p,
                    count: 0,
                    good: 0,
                };
                for (j, psi) in angles.into_iter().enumerate() {
                    if let Some(psi) = psi {
                        // λ^{j+1} occurs k times in full periods, once more if j < s
                        let mult = if len < r {
                            1
                        } else {
                            k + u64::from((j as u64) < s)
                        };
                        pc.good += mult;
                        if iv.contains(psi) {
                            pc.count += mult;
                        }
                    }
                }
                Ok(pc)
            })
            .collect::<Result<_>>()?;
        let delta = erdos_delta();
        let (lx, llx) = ((x as f64).ln(), (x as f64).ln().ln());
        let bracket = lx.powf(-0.75 * delta) * llx.powf(-9.0 / 8.0);
        let threshold = (x as f64).sqrt() * lx.powf(1.0 + 1.5 * delta) * llx.powf(2.25);
        let descriptor = format!("mixed-geom:x={x}:lambda={lambda}:T={t_max}");
        let mut report = self.assemble(
            x,
            descriptor,
            iv,
            t_max,
            plan,
            per_prime,
            bracket,
            Some("implied constant depends on λ".into()),
        );
        report.order_sum_half = Some(order_sum(x, lambda, 0.5)?);
        report.t_threshold = Some(threshold);
        Ok(report)
    }

    /// `(1/(π(x)·π(L))) Σ_{ℓ ≤ L} π_{E(ℓ)}(α, β; x)`.
    pub fn mixed_primes(&self, x: u64, limit: u64, iv: &Interval) -> Result<MixedReport> {
        self.require_nondeg_global()?;
        if limit < 3 {
            return Err(domain(format!("L = {limit} is below 3")));
        }
        if x < 2 {
            return Err(Error::Domain(format!("x = {x} is below 2")));
        }
        let weighted: Vec<(i64, u64)> = prime_list(limit)
            .into_iter()
            .map(|l| (l as i64, 1))
            .collect();
        let plan = self.plan_primes(x, None);
        let per_prime = self.per_prime_counts(&plan.usable, &weighted, iv)?;
        let (xf, lf) = (x as f64, limit as f64);
        let bracket = xf.powf(-0.25) + lf.powf(-1.0 / 12.0) + lf.powf(-0.25) * xf.powf(0.25);
        let descriptor = format!("mixed-primes:x={x}:L={limit}");
        Ok(self.assemble(
            x,
            descriptor,
            iv,
            weighted.len() as u64,
            plan,
            per_prime,
            bracket,
            Some("omits the factor L^(c/log log L); c is not effective".into()),
        ))
    }
}
