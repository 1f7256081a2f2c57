//! Frobenius traces `a_p = p + 1 − #E(𝔽_p)` and angles.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::family::{CurveInstance, FamilyPoly, ReducedFamily};
use crate::field::{residue, ResidueTable};
use crate::store::TraceCache;

/// Largest prime accepted by [`count_points_naive`].
pub const NAIVE_COUNT_LIMIT: u64 = 10_000;

static HASSE_CHECKED: AtomicU64 = AtomicU64::new(0);
static HASSE_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Process-wide tally of Hasse checks: `(checked, violations)`.
pub fn hasse_stats() -> (u64, u64) {
    (
        HASSE_CHECKED.load(Ordering::Relaxed),
        HASSE_VIOLATIONS.load(Ordering::Relaxed),
    )
}

/// `a² ≤ 4p`, checked in exact integer arithmetic.
pub fn satisfies_hasse(p: u64, a: i64) -> bool {
    i128::from(a) * i128::from(a) <= 4 * i128::from(p)
}

fn check_hasse(p: u64, a: i64) -> Result<()> {
    HASSE_CHECKED.fetch_add(1, Ordering::Relaxed);
    if satisfies_hasse(p, a) {
        Ok(())
    } else {
        HASSE_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
        Err(Error::Internal(format!(
            "Hasse bound violated: a = {a} at p = {p}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TraceRecord {
    pub p: u64,
    pub t: i64,
    pub a: i64,
}

impl TraceRecord {
    pub fn new(p: u64, t: i64, a: i64) -> Result<Self> {
        if !satisfies_hasse(p, a) {
            return Err(domain(format!("|{a}| exceeds 2√{p}")));
        }
        Ok(Self { p, t, a })
    }
}

/// A Frobenius angle in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Angle {
    pub psi: f64,
}

impl Angle {
    pub fn from_trace(p: u64, a: i64) -> Result<Self> {
        if !satisfies_hasse(p, a) {
            return Err(domain(format!("|{a}| exceeds 2√{p}: no Frobenius angle")));
        }
        let c = (a as f64 / (2.0 * (p as f64).sqrt())).clamp(-1.0, 1.0);
        Ok(Self { psi: c.acos() })
    }
}

/// `ψ = arccos(a / 2√p)`.
pub fn angle(rec: &TraceRecord) -> Result<Angle> {
    Angle::from_trace(rec.p, rec.a)
}

/// Exhaustive count of `𝔽_p`-points, including the point at infinity.
/// Only for `p ≤ NAIVE_COUNT_LIMIT`; this is the oracle for [`trace`].
pub fn count_points_naive(c: &CurveInstance) -> Result<u64> {
    let p = c.p();
    if p > NAIVE_COUNT_LIMIT {
        return Err(Error::Refused(format!(
            "naive point count at p = {p} exceeds oracle limit {NAIVE_COUNT_LIMIT}"
        )));
    }
    // p ≤ 10⁴, so every product below fits in u64.
    let squares: Vec<u64> = (0..p).map(|y| y * y % p).collect();
    let mut count = 1u64;
    for x in 0..p {
        let rhs = ((x * x % p) * x + c.a() * x + c.b()) % p;
        count += squares.iter().filter(|&&s| s == rhs).count() as u64;
    }
    Ok(count)
}

/// `a = −Σ_x (x³ + ax + b / p)` using a prebuilt residue table.
pub fn trace(c: &CurveInstance, tbl: &ResidueTable) -> Result<i64> {
    if tbl.p() != c.p() {
        return Err(domain(format!(
            "residue table for {} used with a curve over 𝔽_{}",
            tbl.p(),
            c.p()
        )));
    }
    let a = -tbl.cubic_character_sum(c.a(), c.b());
    check_hasse(c.p(), a)?;
    Ok(a)
}

/// Trace computation for one family at one prime: the reduced family and
/// the residue table are built once and shared by every parameter.
pub struct PrimeTracer<'a> {
    reduced: ReducedFamily,
    table: ResidueTable,
    cache: Option<&'a TraceCache>,
}

impl<'a> PrimeTracer<'a> {
    pub fn new(family: &FamilyPoly, p: u64, cache: Option<&'a TraceCache>) -> Result<Self> {
        if p <= 3 || !crate::field::is_prime(p) {
            return Err(domain(format!("{p} is not a prime greater than 3")));
        }
        if let Some(c) = cache {
            c.check_family(family)?;
        }
        Ok(Self {
            reduced: family.reduce(p),
            table: ResidueTable::new(p),
            cache,
        })
    }

    pub fn p(&self) -> u64 {
        self.reduced.p()
    }

    pub fn reduced(&self) -> &ReducedFamily {
        &self.reduced
    }

    pub fn is_good(&self, t: u64) -> bool {
        self.reduced.is_good(t % self.p())
    }

    fn compute(&self, t: u64) -> Result<i64> {
        let (a, b) = self.reduced.coeffs_at(t);
        let curve = CurveInstance::new(self.p(), a, b, t as i64)?;
        trace(&curve, &self.table)
    }

    /// Trace of `E(t) mod p` for a residue `t`, or `None` on bad reduction.
    pub fn trace_residue(&self, t: u64) -> Result<Option<i64>> {
        Ok(self.traces(&[t])?[0])
    }

    /// Traces for a list of residues, in input order. Each distinct residue
    /// is computed (or fetched from the cache) once.
    pub fn traces(&self, residues: &[u64]) -> Result<Vec<Option<i64>>> {
        let p = self.p();
        let mut known: BTreeMap<u64, Option<i64>> = BTreeMap::new();
        let mut missing = Vec::new();
        for &t in residues {
            let t = t % p;
            if known.contains_key(&t) {
                continue;
            }
            if !self.reduced.is_good(t) {
                known.insert(t, None);
                continue;
            }
            match self.cache.and_then(|c| c.get(p, t as i64)) {
                Some(a) => {
                    check_hasse(p, a)?;
                    known.insert(t, Some(a));
                }
                None => {
                    known.insert(t, None);
                    missing.push(t);
                }
            }
        }
        let computed: Vec<(u64, i64)> = missing
            .par_iter()
            .map(|&t| self.compute(t).map(|a| (t, a)))
            .collect::<Result<_>>()?;
        if let Some(cache) = self.cache {
            cache.put_all(
                computed
                    .iter()
                    .map(|&(t, a)| TraceRecord { p, t: t as i64, a }),
            )?;
        }
        for (t, a) in computed {
            known.insert(t, Some(a));
        }
        Ok(residues.iter().map(|&t| known[&(t % p)]).collect())
    }
}

/// Result of [`batch_traces`]: one record per good parameter, in input
/// order, and the parameters skipped for bad reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchTraces {
    pub records: Vec<TraceRecord>,
    pub skipped: Vec<i64>,
}

pub fn batch_traces(
    p: u64,
    family: &FamilyPoly,
    ts: &[i64],
    cache: Option<&TraceCache>,
) -> Result<BatchTraces> {
    let tracer = PrimeTracer::new(family, p, cache)?;
    let residues: Vec<u64> = ts.iter().map(|&t| residue(t, p)).collect();
    let traces = tracer.traces(&residues)?;
    let mut out = BatchTraces {
        records: Vec::with_capacity(ts.len()),
        skipped: Vec::new(),
    };
    for (&t, a) in ts.iter().zip(traces) {
        match a {
            Some(a) => out.records.push(TraceRecord { p, t, a }),
            None => out.skipped.push(t),
        }
    }
    Ok(out)
}
