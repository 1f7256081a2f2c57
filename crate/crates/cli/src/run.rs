//! Command dispatch. Every command yields one JSON object with the fixed
//! top-level keys plus a command-specific `report`.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use stlab::experiments::{CharSumDomain, CharSumMode, VaughanWeights};
use stlab::params::{self, ParamSet};
use stlab::points::{Angle, PrimeTracer};
use stlab::stats::{discrepancy_report, mu_st};
use stlab::{Error, FamilyPoly, Interval, Lab, TraceCache};

use crate::args::{
    AnglesArgs, CacheCmd, Cli, Command, DecompArgs, ExperimentCmd, FamilyCmd, GlobalOpts, SetKind,
    SumsCmd, VerifyCmd,
};
use crate::histogram::write_outputs;

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) => 1,
            Error::Hypothesis(_) | Error::BadReduction { .. } => 2,
            Error::Refused(_) => 3,
            Error::Cache { .. } | Error::CacheRow { .. } | Error::Io { .. } => 4,
            Error::Internal(_) => 5,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Successful output; `code` is non-zero when the report itself records a
/// failed check (a degenerate family).
pub struct Outcome {
    pub json: Value,
    pub code: i32,
}

/// Fields shared by every report.
#[derive(Default)]
struct Summary {
    mu: Option<f64>,
    count_or_average: Option<f64>,
    bracket: Option<f64>,
    ratio: Option<f64>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialise to JSON")
}

fn cache_path(global: &GlobalOpts) -> Option<PathBuf> {
    std::env::var_os("STLAB_CACHE")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| global.cache.clone())
}

fn family(global: &GlobalOpts) -> Result<FamilyPoly, Failure> {
    match (&global.f, &global.g) {
        (Some(f), Some(g)) => Ok(FamilyPoly::parse(f, g)?),
        _ => Err(Failure::usage("both --f and --g are required")),
    }
}

fn interval(global: &GlobalOpts) -> Result<Interval, Failure> {
    Ok(Interval::new(global.alpha, global.beta)?)
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let global = &cli.global;
    let fam = family(global)?;
    interval(global)?;
    if global.bins == 0 {
        return Err(Failure::usage("--bins must be at least 1"));
    }
    let cache = match cache_path(global) {
        Some(path) => Some(TraceCache::open(path, &fam)?),
        None => None,
    };
    let mut lab = Lab::new(&fam);
    if let Some(c) = &cache {
        lab = lab.with_cache(c);
    }

    let mut params = Map::new();
    params.insert("f".into(), json!(global.f));
    params.insert("g".into(), json!(global.g));
    let mut code = 0;
    let (name, summary, report) = match &cli.command {
        Command::Family(FamilyCmd::Check { p }) => {
            let (report, ok) = family_check(&fam, *p);
            if !ok {
                code = 2;
            }
            if let Some(p) = p {
                params.insert("p".into(), json!(p));
            }
            ("family check", Summary::default(), report)
        }
        Command::Trace { p, t } => {
            params.insert("p".into(), json!(p));
            params.insert("t".into(), json!(t));
            (
                "trace",
                Summary::default(),
                trace(&fam, cache.as_ref(), *p, *t)?,
            )
        }
        Command::Angles(a) => {
            params.insert("alpha".into(), json!(global.alpha));
            params.insert("beta".into(), json!(global.beta));
            params.insert("p".into(), json!(a.p));
            let (summary, report) = angles(&lab, global, a, &mut params)?;
            ("angles", summary, report)
        }
        Command::Verify(VerifyCmd::Charsum {
            p,
            n_max,
            r,
            sampled,
        }) => {
            let domain = r.map_or(CharSumDomain::Full, CharSumDomain::Subgroup);
            let mode = match sampled {
                Some(count) => CharSumMode::Sampled {
                    seed: global.seed,
                    count: *count,
                },
                None => CharSumMode::Exhaustive,
            };
            params.insert("p".into(), json!(p));
            params.insert("n_max".into(), json!(n_max));
            params.insert("domain".into(), to_value(&domain));
            params.insert("mode".into(), to_value(&mode));
            let reports = lab.charsum_verify(*p, *n_max, domain, mode)?;
            let worst = reports
                .iter()
                .max_by(|a, b| (a.max_abs / a.bound).total_cmp(&(b.max_abs / b.bound)))
                .expect("n_max ≥ 1 gives at least one report");
            let summary = Summary {
                mu: None,
                count_or_average: Some(worst.max_abs),
                bracket: Some(worst.bound),
                ratio: Some(worst.max_abs / worst.bound),
            };
            (
                "verify charsum",
                summary,
                json!({ "per_n": to_value(&reports) }),
            )
        }
        Command::Experiment(e) => {
            params.insert("alpha".into(), json!(global.alpha));
            params.insert("beta".into(), json!(global.beta));
            let (name, summary, report) = experiment(&lab, global, e, &mut params)?;
            (name, summary, report)
        }
        Command::Sums(s) => sums(&lab, s, &mut params)?,
        Command::Cache(CacheCmd::Stats) => {
            let c = cache
                .as_ref()
                .ok_or_else(|| Failure::usage("cache stats needs --cache or STLAB_CACHE"))?;
            ("cache stats", Summary::default(), to_value(&c.stats()))
        }
    };
    if let Some(c) = cache {
        c.close()?;
    }

    let mut out = Map::new();
    out.insert("command".into(), json!(name));
    out.insert("family_fingerprint".into(), json!(fam.fingerprint_hex()));
    out.insert("params".into(), Value::Object(params));
    out.insert("mu".into(), json!(summary.mu));
    out.insert("count_or_average".into(), json!(summary.count_or_average));
    out.insert("bracket".into(), json!(summary.bracket));
    out.insert("ratio".into(), json!(summary.ratio));
    out.insert("report".into(), report);
    out.insert(
        "runtime_ms".into(),
        json!(start.elapsed().as_millis() as u64),
    );
    Ok(Outcome {
        json: Value::Object(out),
        code,
    })
}

fn family_check(fam: &FamilyPoly, p: Option<u64>) -> (Value, bool) {
    let global = fam.check_nondeg_global();
    let mut report = Map::new();
    report.insert("canonical".into(), json!(fam.canonical_string()));
    report.insert("nondeg_global".into(), json!(global.as_str()));
    report.insert("deg_delta".into(), json!(fam.deg_delta()));
    report.insert(
        "delta".into(),
        json!(fam
            .delta()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()),
    );
    let mut ok = global.is_pass();
    if !ok {
        report.insert("reason".into(), json!(global.as_str()));
    }
    if let Some(p) = p {
        let local = fam.check_nondeg_mod_p(p);
        report.insert("nondeg_mod_p".into(), json!(local.as_str()));
        if !local.is_pass() && ok {
            report.insert("reason".into(), json!(local.as_str()));
        }
        ok &= local.is_pass();
    }
    (Value::Object(report), ok)
}

fn trace(fam: &FamilyPoly, cache: Option<&TraceCache>, p: u64, t: i64) -> Result<Value, Failure> {
    let tracer = PrimeTracer::new(fam, p, cache)?;
    let r = stlab::field::residue(t, p);
    let a = tracer
        .trace_residue(r)?
        .ok_or(Error::BadReduction { t, p })?;
    let psi = Angle::from_trace(p, a)?.psi;
    let (ca, cb) = tracer.reduced().coeffs_at(r);
    Ok(json!({ "p": p, "t": t, "a": a, "psi": psi, "curve_a": ca, "curve_b": cb }))
}

fn need<T: Copy>(x: Option<T>, flag: &str, set: &str) -> Result<T, Failure> {
    x.ok_or_else(|| Failure::usage(format!("--set {set} needs --{flag}")))
}

fn angles(
    lab: &Lab<'_>,
    global: &GlobalOpts,
    a: &AnglesArgs,
    params: &mut Map<String, Value>,
) -> Result<(Summary, Value), Failure> {
    let p = a.p;
    let set: ParamSet = match a.set {
        SetKind::Subgroup => params::subgroup(p, a.r.unwrap_or(p.saturating_sub(1)))?,
        SetKind::Product => {
            let u =
                a.u.as_ref()
                    .ok_or_else(|| Failure::usage("--set product needs --u"))?;
            let v =
                a.v.as_ref()
                    .ok_or_else(|| Failure::usage("--set product needs --v"))?;
            params::product_residues(&u.0, &v.0, p)?
        }
        SetKind::Primes => params::primes_upto(need(a.limit, "limit", "primes")?)?,
        SetKind::Geometric => params::geometric(
            need(a.lambda, "lambda", "geometric")?,
            need(a.t_max, "t-max", "geometric")?,
            p,
        )?,
        SetKind::Interval => params::interval(
            need(a.start, "start", "interval")?,
            need(a.len, "len", "interval")?,
        ),
    };
    params.insert("set".into(), json!(set.descriptor));
    let sample = lab.angle_sample(p, &set)?;
    let iv = interval(global)?;
    let disc = discrepancy_report(&sample, a.sigma, a.a_hint)?;
    write_outputs(
        &sample,
        global.bins,
        global.csv.as_deref(),
        global.svg.as_deref(),
    )
    .map_err(|e| Failure::usage(format!("cannot write histogram: {e}")))?;
    let count = sample.count_in(&iv);
    let summary = Summary {
        mu: Some(mu_st(&iv)),
        count_or_average: Some(count as f64),
        bracket: None,
        ratio: None,
    };
    let report = json!({
        "set_size": set.len(),
        "good": sample.len(),
        "count": count,
        "discrepancy": to_value(&disc),
    });
    Ok((summary, report))
}

fn experiment(
    lab: &Lab<'_>,
    global: &GlobalOpts,
    e: &ExperimentCmd,
    params: &mut Map<String, Value>,
) -> Result<(&'static str, Summary, Value), Failure> {
    let iv = interval(global)?;
    let vertical = |r: stlab::experiments::VerticalReport| Summary {
        mu: Some(r.mu),
        count_or_average: Some(r.count as f64),
        bracket: Some(r.theorem_bracket),
        ratio: Some(r.ratio),
    };
    let mixed = |r: &stlab::experiments::MixedReport| Summary {
        mu: Some(r.mu),
        count_or_average: Some(r.normalized_average),
        bracket: Some(r.theorem_bracket),
        ratio: Some(r.ratio),
    };
    Ok(match e {
        ExperimentCmd::VerticalSubgroup { p, r } => {
            params.insert("p".into(), json!(p));
            params.insert("r".into(), json!(r));
            let rep = lab.vertical_subgroup(*p, *r, &iv)?;
            (
                "experiment vertical-subgroup",
                vertical(rep.clone()),
                to_value(&rep),
            )
        }
        ExperimentCmd::VerticalProduct { p, u, v } => {
            params.insert("p".into(), json!(p));
            params.insert("u".into(), json!(u.0));
            params.insert("v".into(), json!(v.0));
            let rep = lab.vertical_product(*p, &u.0, &v.0, &iv)?;
            (
                "experiment vertical-product",
                vertical(rep.clone()),
                to_value(&rep),
            )
        }
        ExperimentCmd::VerticalPrimes { p, limit } => {
            params.insert("p".into(), json!(p));
            params.insert("limit".into(), json!(limit));
            let rep = lab.vertical_primes(*p, *limit, &iv)?;
            (
                "experiment vertical-primes",
                vertical(rep.clone()),
                to_value(&rep),
            )
        }
        ExperimentCmd::MixedProduct { x, u, v } => {
            params.insert("x".into(), json!(x));
            params.insert("u".into(), json!(u.0));
            params.insert("v".into(), json!(v.0));
            let rep = lab.mixed_product(*x, &u.0, &v.0, &iv)?;
            ("experiment mixed-product", mixed(&rep), to_value(&rep))
        }
        ExperimentCmd::MixedGeometric { x, lambda, t_max } => {
            params.insert("x".into(), json!(x));
            params.insert("lambda".into(), json!(lambda));
            params.insert("t_max".into(), json!(t_max));
            let rep = lab.mixed_geometric(*x, *lambda, *t_max, &iv)?;
            ("experiment mixed-geometric", mixed(&rep), to_value(&rep))
        }
        ExperimentCmd::MixedPrimes { x, limit } => {
            params.insert("x".into(), json!(x));
            params.insert("limit".into(), json!(limit));
            let rep = lab.mixed_primes(*x, *limit, &iv)?;
            ("experiment mixed-primes", mixed(&rep), to_value(&rep))
        }
    })
}

fn decomp_params(d: &DecompArgs, params: &mut Map<String, Value>) -> VaughanWeights {
    params.insert("p".into(), json!(d.p));
    params.insert("limit".into(), json!(d.limit));
    params.insert("n".into(), json!(d.n));
    params.insert("k".into(), json!(d.k));
    params.insert("m".into(), json!(d.m));
    params.insert("surrogate".into(), json!(d.surrogate));
    if d.surrogate {
        VaughanWeights::Surrogate
    } else {
        VaughanWeights::Family
    }
}

fn sums(
    lab: &Lab<'_>,
    s: &SumsCmd,
    params: &mut Map<String, Value>,
) -> Result<(&'static str, Summary, Value), Failure> {
    Ok(match s {
        SumsCmd::Vaughan(d) => {
            let w = decomp_params(d, params);
            let rep = lab.vaughan_decompose(d.p, d.limit, d.k, d.m, d.n, w)?;
            let summary = Summary {
                mu: None,
                count_or_average: Some(rep.direct_sum),
                bracket: Some(rep.lambda_bracket),
                ratio: Some(rep.ratio),
            };
            ("sums vaughan", summary, to_value(&rep))
        }
        SumsCmd::Mobius(d) => {
            let w = decomp_params(d, params);
            let rep = lab.mobius_sums(d.p, d.limit, d.k, d.m, d.n, w)?;
            let summary = Summary {
                count_or_average: Some(rep.mu_sum),
                ..Summary::default()
            };
            ("sums mobius", summary, to_value(&rep))
        }
        SumsCmd::PrimeSym { p, limit, n } => {
            params.insert("p".into(), json!(p));
            params.insert("limit".into(), json!(limit));
            params.insert("n".into(), json!(n));
            let rep = lab.prime_sym_sum(*p, *limit, *n)?;
            let summary = Summary {
                mu: None,
                count_or_average: Some(rep.value),
                bracket: Some(rep.bracket),
                ratio: Some(rep.ratio),
            };
            ("sums prime-sym", summary, to_value(&rep))
        }
        SumsCmd::Orders {
            x,
            lambda,
            exponent,
            y,
        } => {
            params.insert("x".into(), json!(x));
            params.insert("lambda".into(), json!(lambda));
            params.insert("exponent".into(), json!(exponent));
            params.insert("y".into(), json!(y));
            let s = params::order_sum(*x, *lambda, *exponent)?;
            let h = y.map(|y| params::divisor_window_count(*x, y)).transpose()?;
            let summary = Summary {
                count_or_average: Some(s),
                ..Summary::default()
            };
            let report = json!({
                "order_sum": s,
                "divisor_window_count": h,
                "erdos_delta": params::erdos_delta(),
            });
            ("sums orders", summary, report)
        }
    })
}
