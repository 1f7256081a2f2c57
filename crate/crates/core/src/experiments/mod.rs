//! Runnable experiments: vertical counts at a fixed prime, mixed averages
//! over primes, character and bilinear sums, and sums over primes.
//!
//! Every report carries the theorem's error term without its implied
//! constant (`theorem_bracket`) next to the observed error, and their ratio.

mod charsum;
mod mixed;
mod primes;
mod vertical;

use crate::error::{Error, Result};
use crate::family::FamilyPoly;
use crate::field::INDEX_TABLE_LIMIT;
use crate::params::ParamSet;
use crate::points::{Angle, PrimeTracer};
use crate::stats::AngleSample;
use crate::store::TraceCache;

pub use charsum::{BilinearReport, CharSumDomain, CharSumMode, CharSumReport, SingleSumReport};
pub use mixed::{MixedReport, PrimeCount};
pub use primes::{MobiusReport, PrimeSumReport, VaughanReport, VaughanWeights};
pub use vertical::{PairCount, VerticalReport};

/// Shared context for experiments on one family: the family itself, an
/// optional trace cache, and the index-table ceiling for character sums.
#[derive(Clone, Copy)]
pub struct Lab<'a> {
    family: &'a FamilyPoly,
    cache: Option<&'a TraceCache>,
    index_limit: u64,
}

impl<'a> Lab<'a> {
    pub fn new(family: &'a FamilyPoly) -> Self {
        Self {
            family,
            cache: None,
            index_limit: INDEX_TABLE_LIMIT,
        }
    }

    pub fn with_cache(mut self, cache: &'a TraceCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_index_limit(mut self, limit: u64) -> Self {
        self.index_limit = limit;
        self
    }

    pub fn family(&self) -> &'a FamilyPoly {
        self.family
    }

    pub fn fingerprint(&self) -> String {
        self.family.fingerprint_hex()
    }

    pub(crate) fn tracer(&self, p: u64) -> Result<PrimeTracer<'a>> {
        PrimeTracer::new(self.family, p, self.cache)
    }

    pub(crate) fn require_nondeg_mod_p(&self, p: u64) -> Result<()> {
        match self.family.check_nondeg_mod_p(p) {
            r if r.is_pass() => Ok(()),
            r => Err(Error::Hypothesis(format!(
                "family {} is degenerate modulo {p}: {r}",
                self.family.canonical_string()
            ))),
        }
    }

    pub(crate) fn require_nondeg_global(&self) -> Result<()> {
        match self.family.check_nondeg_global() {
            r if r.is_pass() => Ok(()),
            r => Err(Error::Hypothesis(format!(
                "family {} is degenerate: {r}",
                self.family.canonical_string()
            ))),
        }
    }

    /// Frobenius angles of `E(t) mod p` for residues `t`, `None` on bad reduction.
    pub fn angles(&self, p: u64, residues: &[u64]) -> Result<Vec<Option<f64>>> {
        angles_with(&self.tracer(p)?, residues)
    }

    /// Angles of the good-reduction members of a parameter set.
    pub fn angle_sample(&self, p: u64, set: &ParamSet) -> Result<AngleSample> {
        let residues: Vec<u64> = set
            .elements
            .iter()
            .map(|&t| crate::field::residue(t, p))
            .collect();
        let psis = self.angles(p, &residues)?.into_iter().flatten().collect();
        AngleSample::new(
            psis,
            format!("family={}:p={p}:{}", self.fingerprint(), set.descriptor),
        )
    }
}

pub(crate) fn angles_with(tracer: &PrimeTracer<'_>, residues: &[u64]) -> Result<Vec<Option<f64>>> {
    let p = tracer.p();
    tracer
        .traces(residues)?
        .into_iter()
        .map(|a| {
            a.map(|a| Angle::from_trace(p, a).map(|x| x.psi))
                .transpose()
        })
        .collect()
}

/// `|observed − expected| / bracket`, or 0 when the bracket vanishes.
pub(crate) fn ratio(err: f64, bracket: f64) -> f64 {
    if bracket > 0.0 {
        err / bracket
    } else {
        0.0
    }
}
