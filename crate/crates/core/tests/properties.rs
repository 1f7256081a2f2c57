use std::f64::consts::PI;

use num_bigint::BigInt;
use proptest::prelude::*;
use stlab::experiments::{CharSumDomain, CharSumMode};
use stlab::family::CurveInstance;
use stlab::field::{is_prime, ResidueTable};
use stlab::params::prime_list;
use stlab::points::{batch_traces, count_points_naive, trace};
use stlab::stats::{interval_discrepancy, mu_st, star_discrepancy, sym};
use stlab::{AngleSample, FamilyPoly, Interval, Lab, TraceCache};

fn small_prime(lo: u64, hi: u64) -> impl Strategy<Value = u64> {
    (lo..hi).prop_filter("prime", |&p| is_prime(p))
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, 1..4)
}

/// Families that pass the global check.
fn family() -> impl Strategy<Value = FamilyPoly> {
    (coeffs(), coeffs()).prop_filter_map("degenerate", |(f, g)| {
        let fam = FamilyPoly::from_i64(&f, &g).ok()?;
        fam.check_nondeg_global().is_pass().then_some(fam)
    })
}

fn interval() -> impl Strategy<Value = Interval> {
    (0.0..PI, 0.0..PI).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residue_and_integer_paths_agree(fam in family(), p in small_prime(5, 1000), t in -500i64..500) {
        let exact = fam.delta_at(t) % BigInt::from(p) != BigInt::from(0);
        prop_assert_eq!(fam.good_reduction(t, p), exact);
        let f = fam.f_at(t);
        let g = fam.g_at(t);
        let expect = BigInt::from(-16) * (BigInt::from(4) * &f * &f * &f + BigInt::from(27) * &g * &g);
        prop_assert_eq!(fam.delta_at(t), expect);
    }

    #[test]
    fn fast_trace_matches_point_count(p in small_prime(5, 1500), a in 0u64..1500, b in 0u64..1500) {
        let (a, b) = (a % p, b % p);
        prop_assume!((4 * a * a % p * a + 27 * b * b) % p != 0);
        let c = CurveInstance::new(p, a, b, 0).unwrap();
        let fast = trace(&c, &ResidueTable::new(p)).unwrap();
        prop_assert_eq!(fast, p as i64 + 1 - count_points_naive(&c).unwrap() as i64);
        prop_assert!((fast * fast) as u64 <= 4 * p);
    }

    #[test]
    fn fingerprint_ignores_trailing_zeros(f in coeffs(), g in coeffs()) {
        let Ok(a) = FamilyPoly::from_i64(&f, &g) else { return Ok(()) };
        let mut f2 = f.clone();
        f2.extend([0, 0]);
        let b = FamilyPoly::from_i64(&f2, &g).unwrap();
        prop_assert_eq!(a.fingerprint(), b.fingerprint());
        prop_assert_eq!(a.canonical_string(), b.canonical_string());
    }

    #[test]
    fn measure_is_additive(a in 0.0..PI, b in 0.0..PI, c in 0.0..PI) {
        let mut e = [a, b, c];
        e.sort_by(f64::total_cmp);
        let whole = mu_st(&Interval::new(e[0], e[2]).unwrap());
        let parts = mu_st(&Interval::new(e[0], e[1]).unwrap()) + mu_st(&Interval::new(e[1], e[2]).unwrap());
        prop_assert!((whole - parts).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&whole));
    }

    #[test]
    fn sym_is_bounded(n in 0u32..60, theta in 0.0..=PI) {
        prop_assert!(sym(n, theta).abs() <= f64::from(n + 1) + 1e-9);
    }

    #[test]
    fn discrepancies_are_ordered(psis in prop::collection::vec(0.0..=PI, 1..300)) {
        let s = AngleSample::new(psis, "prop").unwrap();
        let star = star_discrepancy(&s).unwrap();
        let iv = interval_discrepancy(&s).unwrap();
        prop_assert!(iv.exact);
        prop_assert!(star <= iv.value + 1e-12);
        prop_assert!(iv.value <= 2.0 * star + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vertical_counts_are_monotone(fam in family(), p in small_prime(11, 400), a in interval(), b in interval()) {
        prop_assume!(fam.check_nondeg_mod_p(p).is_pass());
        let lab = Lab::new(&fam);
        let hull = Interval::new(a.alpha.min(b.alpha), a.beta.max(b.beta)).unwrap();
        let small = lab.vertical_subgroup(p, p - 1, &a).unwrap();
        let big = lab.vertical_subgroup(p, p - 1, &hull).unwrap();
        prop_assert!(small.count <= big.count);
        prop_assert!(big.count <= big.good);
    }

    #[test]
    fn mixed_sum_is_sum_of_pair_counts(
        fam in family(),
        x in 20u64..150,
        u in prop::collection::vec(1i64..20, 1..5),
        v in prop::collection::vec(1i64..20, 1..5),
        iv in interval(),
    ) {
        prop_assume!(u.iter().chain(&v).all(|&w| w as u64 <= x));
        let lab = Lab::new(&fam);
        let rep = lab.mixed_product(x, &u, &v, &iv).unwrap();
        let mut total = 0;
        for p in prime_list(x).into_iter().filter(|&p| p > 3) {
            if fam.check_nondeg_mod_p(p).is_pass() {
                total += lab.pair_count(p, &u, &v, &iv).unwrap().count;
            }
        }
        prop_assert_eq!(rep.total_count, total);
        prop_assert!(rep.normalized_average <= 1.0);
    }

    #[test]
    fn character_sums_respect_the_bound(fam in family(), p in small_prime(11, 300), n in 1u32..4) {
        prop_assume!(fam.check_nondeg_mod_p(p).is_pass());
        // exhaustive mode turns a violation into an error
        let reports = Lab::new(&fam)
            .charsum_verify(p, n, CharSumDomain::Full, CharSumMode::Exhaustive)
            .unwrap();
        prop_assert!(reports.iter().all(|r| r.within_bound));
    }
}

#[test]
fn batches_do_not_depend_on_threads_or_cache() {
    let fam = FamilyPoly::from_i64(&[1, 2], &[3, 0, 1]).unwrap();
    let ts: Vec<i64> = (-300..700).collect();
    let p = 1009;
    let plain = batch_traces(p, &fam, &ts, None).unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let again = pool.install(|| batch_traces(p, &fam, &ts, None).unwrap());
        assert_eq!(plain.records, again.records);
        assert_eq!(plain.skipped, again.skipped);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c");
    for _ in 0..2 {
        let cache = TraceCache::open(&path, &fam).unwrap();
        let cached = batch_traces(p, &fam, &ts, Some(&cache)).unwrap();
        assert_eq!(plain.records, cached.records);
        cache.close().unwrap();
    }
}
