//! Counts at a fixed prime `p` over subgroups, product sets and primes.

use serde::Serialize;

use super::{angles_with, ratio, Lab};
use crate::error::{domain, Result};
use crate::field::residue;
use crate::params::{list_hash, prime_list, subgroup};
use crate::stats::{mu_st, Interval};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerticalReport {
    pub p: u64,
    pub set_descriptor: String,
    pub interval: Interval,
    /// Parameters with good reduction and angle in the interval.
    pub count: u64,
    /// Parameters with good reduction.
    pub good: u64,
    pub sample_size: u64,
    pub mu: f64,
    pub expected: f64,
    pub empirical_error: f64,
    pub theorem_bracket: f64,
    pub ratio: f64,
    pub bracket_note: Option<String>,
}

impl VerticalReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        p: u64,
        set_descriptor: String,
        interval: Interval,
        count: u64,
        good: u64,
        sample_size: u64,
        theorem_bracket: f64,
        bracket_note: Option<String>,
    ) -> Self {
        let mu = mu_st(&interval);
        let expected = mu * sample_size as f64;
        let empirical_error = (count as f64 - expected).abs();
        Self {
            p,
            set_descriptor,
            interval,
            count,
            good,
            sample_size,
            mu,
            expected,
            empirical_error,
            theorem_bracket,
            ratio: ratio(empirical_error, theorem_bracket),
            bracket_note,
        }
    }
}

/// Pair count at one prime: `count` pairs hit the interval, `good` pairs
/// have good reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub count: u64,
    pub good: u64,
}

impl Lab<'_> {
    fn count_residues(&self, p: u64, residues: &[u64], iv: &Interval) -> Result<PairCount> {
        let angles = angles_with(&self.tracer(p)?, residues)?;
        let mut out = PairCount { count: 0, good: 0 };
        for psi in angles.into_iter().flatten() {
            out.good += 1;
            if iv.contains(psi) {
                out.count += 1;
            }
        }
        Ok(out)
    }

    /// `N_p(α, β; G)` for the subgroup `G` of order `r`.
    pub fn vertical_subgroup(&self, p: u64, r: u64, iv: &Interval) -> Result<VerticalReport> {
        self.require_nondeg_mod_p(p)?;
        let set = subgroup(p, r)?;
        let residues: Vec<u64> = set.elements.iter().map(|&w| w as u64).collect();
        let c = self.count_residues(p, &residues, iv)?;
        let bracket = (r as f64).sqrt() * (p as f64).powf(0.25);
        Ok(VerticalReport::new(
            p,
            set.descriptor,
            *iv,
            c.count,
            c.good,
            r,
            bracket,
            None,
        ))
    }

    /// Pairs `(u, v) ∈ U × V` with `Δ(uv) ≢ 0 (mod p)` and angle in `iv`.
    /// Unlike [`Lab::vertical_product`] this accepts non-units, which the
    /// mixed experiments need at small primes.
    pub fn pair_count(&self, p: u64, u: &[i64], v: &[i64], iv: &Interval) -> Result<PairCount> {
        let residues: Vec<u64> = u
            .iter()
            .flat_map(|&a| v.iter().map(move |&b| residue(a, p) * residue(b, p) % p))
            .collect();
        self.count_residues(p, &residues, iv)
    }

    /// `N_p(α, β; U, V)`, counting pairs with multiplicity.
    pub fn vertical_product(
        &self,
        p: u64,
        u: &[i64],
        v: &[i64],
        iv: &Interval,
    ) -> Result<VerticalReport> {
        self.require_nondeg_mod_p(p)?;
        if u.is_empty() || v.is_empty() {
            return Err(domain("U and V must be non-empty"));
        }
        if let Some(z) = u.iter().chain(v).find(|&&x| residue(x, p) == 0) {
            return Err(domain(format!("{z} is not a unit modulo {p}")));
        }
        let c = self.pair_count(p, u, v, iv)?;
        let size = (u.len() * v.len()) as u64;
        let bracket = (size as f64).powf(0.75) * (p as f64).powf(0.25);
        let descriptor = format!("product:p={p}:U={}:V={}", list_hash(u), list_hash(v));
        Ok(VerticalReport::new(
            p, descriptor, *iv, c.count, c.good, size, bracket, None,
        ))
    }

    /// `Q_p(α, β; L)`: primes `ℓ ≤ L` with good reduction and angle in `iv`.
    pub fn vertical_primes(&self, p: u64, limit: u64, iv: &Interval) -> Result<VerticalReport> {
        self.require_nondeg_mod_p(p)?;
        if limit < 3 {
            return Err(domain(format!("L = {limit} is below 3")));
        }
        let ells = prime_list(limit);
        let residues: Vec<u64> = ells.iter().map(|&l| l % p).collect();
        let c = self.count_residues(p, &residues, iv)?;
        let (l, pf) = (limit as f64, p as f64);
        let bracket = l * pf.powf(-0.25) + l.powf(11.0 / 12.0) + l.powf(0.75) * pf.powf(0.25);
        Ok(VerticalReport::new(
            p,
            format!("primes:L={limit}"),
            *iv,
            c.count,
            c.good,
            ells.len() as u64,
            bracket,
            Some("omits the factor L^(c/log log L); c is not effective".into()),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilyPoly;
    use crate::points::{count_points_naive, Angle};

    fn zz() -> FamilyPoly {
        FamilyPoly::from_i64(&[0, 1], &[0, 1]).unwrap()
    }

    /// Angle of `E(t) mod p` by exhaustive point counting.
    fn oracle_angle(fam: &FamilyPoly, t: i64, p: u64) -> Option<f64> {
        let c = fam.reduce_at(t, p).ok()?;
        let a = p as i64 + 1 - count_points_naive(&c).unwrap() as i64;
        Some(Angle::from_trace(p, a).unwrap().psi)
    }

    #[test]
    fn subgroup_full_interval_counts_good_members() {
        let fam = zz();
        let lab = Lab::new(&fam);
        let r = lab.vertical_subgroup(13, 12, &Interval::full()).unwrap();
        assert_eq!(r.count, r.good);
        assert!(r.count >= 12 - 3);
        assert_eq!(r.sample_size, 12);
    }

    #[test]
    fn subgroup_matches_oracle() {
        let fam = zz();
        let lab = Lab::new(&fam);
        let iv = Interval::new(0.8, 2.2).unwrap();
        let r = lab.vertical_subgroup(13, 4, &iv).unwrap();
        let set = subgroup(13, 4).unwrap();
        let expect = set
            .elements
            .iter()
            .filter_map(|&w| oracle_angle(&fam, w, 13))
            .filter(|&x| iv.contains(x))
            .count() as u64;
        assert_eq!(r.count, expect);
        assert_eq!(r.theorem_bracket, 2.0 * 13f64.powf(0.25));
    }

    #[test]
    fn degenerate_point_interval() {
        let fam = zz();
        let lab = Lab::new(&fam);
        let iv = Interval::new(0.123456789, 0.123456789).unwrap();
        let r = lab.vertical_subgroup(101, 100, &iv).unwrap();
        assert_eq!(r.count, 0);
        assert_eq!(r.expected, 0.0);
    }

    #[test]
    fn subgroup_errors() {
        let fam = zz();
        let lab = Lab::new(&fam);
        assert!(matches!(
            lab.vertical_subgroup(13, 5, &Interval::full()),
            Err(crate::Error::Domain(_))
        ));
        let iso = FamilyPoly::from_i64(&[0], &[0, 1]).unwrap();
        assert!(matches!(
            Lab::new(&iso).vertical_subgroup(13, 4, &Interval::full()),
            Err(crate::Error::Hypothesis(_))
        ));
    }

    #[test]
    fn product_matches_oracle() {
        let fam = zz();
        let lab = Lab::new(&fam);
        let u = [1i64, 2, 3];
        let iv = Interval::new(0.0, 1.9).unwrap();
        let r = lab.vertical_product(13, &u, &u, &iv).unwrap();
        let mut expect = 0;
        for &a in &u {
            for &b in &u {
                if oracle_angle(&fam, a * b, 13).is_some_and(|x| iv.contains(x)) {
                    expect += 1;
                }
            }
        }
        assert_eq!(r.count, expect);
        assert_eq!(r.sample_size, 9);

        let one = lab
            .vertical_product(13, &[5], &[7], &Interval::full())
            .unwrap();
        assert!(one.count <= 1);
        assert!(lab.vertical_product(13, &[13], &[1], &iv).is_err());
        assert!(lab.vertical_product(13, &[], &[1], &iv).is_err());
    }

    #[test]
    fn full_product_set_is_weighted_residue_count() {
        let fam = zz();
        let lab = Lab::new(&fam);
        let p = 17u64;
        let all: Vec<i64> = (1..p as i64).collect();
        let r = lab
            .vertical_product(p, &all, &all, &Interval::full())
            .unwrap();
        // every w ∈ 𝔽_p* is hit by exactly p − 1 pairs
        let good_units = (1..p).filter(|&w| fam.good_reduction(w as i64, p)).count() as u64;
        assert_eq!(r.count, (p - 1) * good_units);
    }

    #[test]
    fn primes_match_oracle() {
        let fam = zz();
        let lab = Lab::new(&fam);
        let iv = Interval::new(1.0, 2.5).unwrap();
        let r = lab.vertical_primes(13, 100, &iv).unwrap();
        assert_eq!(r.sample_size, 25);
        let expect = prime_list(100)
            .into_iter()
            .filter_map(|l| oracle_angle(&fam, l as i64, 13))
            .filter(|&x| iv.contains(x))
            .count() as u64;
        assert_eq!(r.count, expect);
        let full = lab.vertical_primes(13, 100, &Interval::full()).unwrap();
        let good = prime_list(100)
            .into_iter()
            .filter(|&l| fam.good_reduction(l as i64, 13))
            .count();
        assert_eq!(full.count, good as u64);
        let small = lab.vertical_primes(13, 3, &Interval::full()).unwrap();
        assert!(small.count <= 2);
        assert!(lab.vertical_primes(13, 2, &iv).is_err());
    }

    #[test]
    fn counts_are_monotone_in_the_interval() {
        let fam = FamilyPoly::from_i64(&[1, 2], &[3, 0, 1]).unwrap();
        let lab = Lab::new(&fam);
        let nested = [
            (1.2, 1.4),
            (1.0, 1.6),
            (0.5, 2.5),
            (0.0, std::f64::consts::PI),
        ];
        let mut last = 0;
        for (a, b) in nested {
            let c = lab
                .vertical_subgroup(101, 50, &Interval::new(a, b).unwrap())
                .unwrap()
                .count;
            assert!(c >= last);
            last = c;
        }
    }
}
