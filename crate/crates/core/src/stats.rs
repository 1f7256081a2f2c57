//! Sato–Tate measure, `sym_n` test functions and discrepancy estimators.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};

/// Samples above this size get the `2·D*` bound instead of the exact scan.
pub const EXACT_INTERVAL_LIMIT: usize = 5000;

/// Closed interval `[α, β] ⊆ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub alpha: f64,
    pub beta: f64,
}

impl Interval {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0 <= alpha && alpha <= beta && beta <= PI) {
            return Err(domain(format!(
                "[{alpha}, {beta}] is not a subinterval of [0, π]"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn full() -> Self {
        Self {
            alpha: 0.0,
            beta: PI,
        }
    }

    #[inline]
    pub fn contains(&self, psi: f64) -> bool {
        self.alpha <= psi && psi <= self.beta
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.alpha <= self.alpha && self.beta <= other.beta
    }
}

/// `μ_ST([α, β]) = (β − α)/π − (sin 2β − sin 2α)/(2π)`.
pub fn mu_st(iv: &Interval) -> f64 {
    cdf_unchecked(iv.beta) - cdf_unchecked(iv.alpha)
}

fn cdf_unchecked(theta: f64) -> f64 {
    theta / PI - (2.0 * theta).sin() / (2.0 * PI)
}

pub fn st_cdf(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(domain(format!("angle {theta} outside [0, π]")));
    }
    Ok(cdf_unchecked(theta))
}

/// `U_n(z)` by the three-term recurrence.
pub fn chebyshev_u(n: u32, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * z);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        (prev, cur) = (cur, 2.0 * z * cur - prev);
    }
    cur
}

/// `sym_n(θ) = sin((n+1)θ)/sin θ = U_n(cos θ)`, evaluated through the
/// recurrence so that θ = 0 and θ = π need no special case.
pub fn sym(n: u32, theta: f64) -> f64 {
    chebyshev_u(n, theta.cos())
}

/// Angles in `[0, π]` with a free-form provenance descriptor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSample {
    psis: Vec<f64>,
    descriptor: String,
}

impl AngleSample {
    pub fn new(psis: Vec<f64>, descriptor: impl Into<String>) -> Result<Self> {
        if let Some(bad) = psis.iter().find(|x| !(0.0..=PI).contains(*x)) {
            return Err(domain(format!("angle {bad} outside [0, π]")));
        }
        Ok(Self {
            psis,
            descriptor: descriptor.into(),
        })
    }

    pub fn psis(&self) -> &[f64] {
        &self.psis
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.psis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psis.is_empty()
    }

    pub fn count_in(&self, iv: &Interval) -> usize {
        self.psis.iter().filter(|&&x| iv.contains(x)).count()
    }

    /// Sorted probability-integral transforms `st_cdf(ψ_i)`.
    fn transformed(&self) -> Vec<f64> {
        let mut u: Vec<f64> = self.psis.iter().map(|&x| cdf_unchecked(x)).collect();
        u.sort_by(f64::total_cmp);
        u
    }
}

/// `Σ_i w_i · sym_n(ψ_i)`; unit weights when `weights` is `None`.
pub fn sym_sum(sample: &AngleSample, n: u32, weights: Option<&[Complex64]>) -> Result<Complex64> {
    match weights {
        None => Ok(Complex64::new(
            sample.psis.iter().map(|&x| sym(n, x)).sum(),
            0.0,
        )),
        Some(w) if w.len() != sample.len() => Err(domain(format!(
            "{} weights for {} angles",
            w.len(),
            sample.len()
        ))),
        Some(w) => Ok(sample
            .psis
            .iter()
            .zip(w)
            .map(|(&x, &c)| c * sym(n, x))
            .sum()),
    }
}

/// `[S_1, ..., S_k]` with `S_n = Σ_i sym_n(ψ_i)`, one recurrence pass per angle.
pub fn sym_sums_upto(sample: &AngleSample, k: u32) -> Vec<f64> {
    let mut sums = vec![0.0; k as usize];
    for &x in &sample.psis {
        let z = x.cos();
        let (mut prev, mut cur) = (1.0, 2.0 * z);
        for s in sums.iter_mut() {
            *s += cur;
            (prev, cur) = (cur, 2.0 * z * cur - prev);
        }
    }
    sums
}

/// Exact star discrepancy of `st_cdf(ψ_i)` against the uniform law.
pub fn star_discrepancy(sample: &AngleSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(domain("star discrepancy of an empty sample"));
    }
    let u = sample.transformed();
    let m = u.len() as f64;
    Ok(u.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / m - x).max(x - i as f64 / m))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalDiscrepancy {
    pub value: f64,
    /// `false` when `value` is the bound `2·D*` rather than the exact sup.
    pub exact: bool,
}

/// `sup_{[α,β]} |#{ψ_i ∈ [α,β]}/m − μ_ST([α,β])|`.
///
/// For `m ≤ EXACT_INTERVAL_LIMIT` the sup is taken over all pairs of
/// transformed sample points: closed intervals spanning `u_i..u_j` give the
/// excess side, gaps between consecutive chosen points (with 0 and 1 as
/// sentinels) give the deficit side.
pub fn interval_discrepancy(sample: &AngleSample) -> Result<IntervalDiscrepancy> {
    let star = star_discrepancy(sample)?;
    if sample.len() > EXACT_INTERVAL_LIMIT {
        return Ok(IntervalDiscrepancy {
            value: 2.0 * star,
            exact: false,
        });
    }
    let u = sample.transformed();
    let m = u.len();
    let mf = m as f64;
    let mut best = 0.0f64;
    for i in 0..m {
        for j in i..m {
            best = best.max((j - i + 1) as f64 / mf - (u[j] - u[i]));
        }
    }
    let ext = |k: usize| -> f64 {
        match k {
            0 => 0.0,
            k if k == m + 1 => 1.0,
            k => u[k - 1],
        }
    };
    for i in 0..=m {
        for j in i + 1..=m + 1 {
            best = best.max(ext(j) - ext(i) - (j - i - 1) as f64 / mf);
        }
    }
    Ok(IntervalDiscrepancy {
        value: best,
        exact: true,
    })
}

/// `m/k + Σ_{n ≤ k} |S_n|/n`: the bracket of the Niederreiter-type bound
/// without its implied constant.
pub fn niederreiter_rhs(sample: &AngleSample, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(domain("k must be at least 1"));
    }
    let sums = sym_sums_upto(sample, k);
    Ok(sample.len() as f64 / f64::from(k)
        + sums
            .iter()
            .enumerate()
            .map(|(i, s)| s.abs() / (i + 1) as f64)
            .sum::<f64>())
}

/// Number of `sym_n` sums inspected when no `σ` is supplied.
pub const SIGMA_PROBE_DEPTH: u32 = 20;

/// `k = ⌈(m/σ)^{1/(A+1)}⌉`, with `k = 1` once `σ ≥ m` and `k ≤ m`.
pub fn recipe_k(m: usize, sigma: f64, a: f64) -> u32 {
    let mf = m.max(1) as f64;
    if sigma >= mf {
        return 1;
    }
    let k = if sigma > 0.0 {
        (mf / sigma).powf(1.0 / (a + 1.0)).ceil()
    } else {
        mf
    };
    k.clamp(1.0, mf.min(f64::from(u32::MAX))) as u32
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub descriptor: String,
    pub m: usize,
    pub star: f64,
    pub interval_bound: f64,
    pub interval_exact: bool,
    pub sigma: f64,
    pub a_hint: f64,
    pub k_used: u32,
    pub niederreiter_rhs: f64,
    /// `m · interval_bound`, the left side of the Niederreiter-type bound.
    pub lhs: f64,
    /// `lhs / niederreiter_rhs`; an empirical stand-in for the implied constant.
    pub ratio: f64,
}

pub fn discrepancy_report(
    sample: &AngleSample,
    sigma_hint: Option<f64>,
    a_hint: f64,
) -> Result<DiscrepancyReport> {
    if a_hint.is_nan() || a_hint <= 0.0 {
        return Err(domain(format!("A must be positive, got {a_hint}")));
    }
    let star = star_discrepancy(sample)?;
    let interval = interval_discrepancy(sample)?;
    let m = sample.len();
    let sigma = match sigma_hint {
        Some(s) => s,
        None => sym_sums_upto(sample, SIGMA_PROBE_DEPTH)
            .iter()
            .enumerate()
            .map(|(i, s)| s.abs() / ((i + 1) as f64).powf(a_hint))
            .fold(0.0, f64::max),
    };
    let k = recipe_k(m, sigma, a_hint);
    let rhs = niederreiter_rhs(sample, k)?;
    let lhs = m as f64 * interval.value;
    Ok(DiscrepancyReport {
        descriptor: sample.descriptor.clone(),
        m,
        star,
        interval_bound: interval.value,
        interval_exact: interval.exact,
        sigma,
        a_hint,
        k_used: k,
        niederreiter_rhs: rhs,
        lhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}
