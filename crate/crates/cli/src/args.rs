use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "stlab",
    version,
    about = "Sato-Tate statistics for one-parameter families of elliptic curves"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Coefficients of f(Z), constant term first, e.g. 0,1 for f = Z
    #[arg(long, global = true, display_order = 100, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Coefficients of g(Z), constant term first
    #[arg(long, global = true, display_order = 100, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Left end of the angle interval, in radians
    #[arg(long, global = true, display_order = 100, default_value_t = 0.0)]
    pub alpha: f64,
    /// Right end of the angle interval, in radians
    #[arg(long, global = true, display_order = 100, default_value_t = std::f64::consts::PI)]
    pub beta: f64,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true, display_order = 100)]
    pub threads: Option<usize>,
    /// Trace cache file; STLAB_CACHE takes precedence when set
    #[arg(long, global = true, display_order = 100)]
    pub cache: Option<PathBuf>,
    /// Write an angle histogram as CSV
    #[arg(long, global = true, display_order = 100)]
    pub csv: Option<PathBuf>,
    /// Write an angle histogram with the Sato-Tate density as SVG
    #[arg(long, global = true, display_order = 100)]
    pub svg: Option<PathBuf>,
    /// Histogram bins for --csv and --svg
    #[arg(long, global = true, display_order = 100, default_value_t = 20)]
    pub bins: usize,
    /// Seed for sampled character sums
    #[arg(long, global = true, display_order = 100, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nondegeneracy checks for the family
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Trace and angle of one specialisation E(t) mod p
    Trace {
        /// Prime modulus
        #[arg(short)]
        p: u64,
        /// Parameter value
        #[arg(short, allow_hyphen_values = true)]
        t: i64,
    },
    /// Angle sample of a parameter set at one prime, with discrepancies
    Angles(AnglesArgs),
    /// Verifiers for exact bounds
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Vertical and mixed experiments
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Sums over primes and order statistics
    #[command(subcommand)]
    Sums(SumsCmd),
    /// Trace cache maintenance
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Subcommand, Debug)]
pub enum FamilyCmd {
    /// Global (and optionally mod p) nondegeneracy
    Check {
        /// Also check nondegeneracy modulo this prime
        #[arg(short)]
        p: Option<u64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    Subgroup,
    Product,
    Primes,
    Geometric,
    Interval,
}

#[derive(Args, Debug)]
pub struct AnglesArgs {
    /// Prime modulus
    #[arg(short)]
    pub p: u64,
    /// Parameter set to sample
    #[arg(long, value_enum, default_value_t = SetKind::Subgroup)]
    pub set: SetKind,
    /// Subgroup order (default p - 1)
    #[arg(long)]
    pub r: Option<u64>,
    /// First factor set for --set product, e.g. 1..10,17
    #[arg(long, value_parser = parse_int_set)]
    pub u: Option<IntSet>,
    /// Second factor set for --set product
    #[arg(long, value_parser = parse_int_set)]
    pub v: Option<IntSet>,
    /// Largest prime for --set primes
    #[arg(long)]
    pub limit: Option<u64>,
    /// Ratio of the progression for --set geometric
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<i64>,
    /// Number of terms for --set geometric
    #[arg(long)]
    pub t_max: Option<u64>,
    /// First parameter for --set interval
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
    /// Length for --set interval
    #[arg(long)]
    pub len: Option<u64>,
    /// Bound on the normalised sym sums; probed from the sample when absent
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Decay exponent A used by the choice of k
    #[arg(long, default_value_t = 1.0)]
    pub a_hint: f64,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Twisted sums against multiplicative characters
    Charsum {
        /// Prime modulus
        #[arg(short)]
        p: u64,
        /// Largest symmetric power n
        #[arg(long, default_value_t = 1)]
        n_max: u32,
        /// Restrict to the subgroup of this order
        #[arg(long)]
        r: Option<u64>,
        /// Check this many random characters instead of all of them
        #[arg(long)]
        sampled: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCmd {
    /// Count over the subgroup of order r at one prime
    VerticalSubgroup {
        /// Prime modulus
        #[arg(short)]
        p: u64,
        /// Subgroup order
        #[arg(long)]
        r: u64,
    },
    /// Count over the products uv at one prime
    VerticalProduct {
        #[arg(short)]
        /// Prime modulus
        p: u64,
        /// First factor set
        #[arg(long, value_parser = parse_int_set)]
        u: IntSet,
        /// Second factor set
        #[arg(long, value_parser = parse_int_set)]
        v: IntSet,
    },
    /// Count over the primes up to a limit at one prime
    VerticalPrimes {
        /// Prime modulus
        #[arg(short)]
        p: u64,
        /// Largest prime parameter
        #[arg(long)]
        limit: u64,
    },
    /// Average over primes up to x of the products uv
    MixedProduct {
        /// Prime range
        #[arg(long)]
        x: u64,
        /// First factor set
        #[arg(long, value_parser = parse_int_set)]
        u: IntSet,
        /// Second factor set
        #[arg(long, value_parser = parse_int_set)]
        v: IntSet,
    },
    /// Average over primes up to x of the progression lambda^t
    MixedGeometric {
        /// Prime range
        #[arg(long)]
        x: u64,
        /// Ratio of the progression
        #[arg(long, allow_hyphen_values = true)]
        lambda: i64,
        /// Number of terms
        #[arg(long)]
        t_max: u64,
    },
    /// Average over primes up to x of the prime parameters
    MixedPrimes {
        /// Prime range
        #[arg(long)]
        x: u64,
        /// Largest prime parameter
        #[arg(long)]
        limit: u64,
    },
}

#[derive(Args, Debug)]
pub struct DecompArgs {
    /// Prime modulus
    #[arg(short)]
    pub p: u64,
    /// Summation limit
    #[arg(short = 'L', long = "limit")]
    pub limit: u64,
    /// Symmetric power
    #[arg(short, default_value_t = 1)]
    pub n: u32,
    /// Cutoff K (default L^(1/3))
    #[arg(short = 'K')]
    pub k: Option<f64>,
    /// Cutoff M (default L^(1/3))
    #[arg(short = 'M')]
    pub m: Option<f64>,
    /// Use psi = 1 in place of the family weights
    #[arg(long)]
    pub surrogate: bool,
}

#[derive(Subcommand, Debug)]
pub enum SumsCmd {
    /// Vaughan decomposition of the von Mangoldt-weighted sum
    Vaughan(DecompArgs),
    /// Moebius-weighted sums and their decomposition
    Mobius(DecompArgs),
    /// Sum of sym_n over primes
    PrimeSym {
        /// Prime modulus
        #[arg(short)]
        p: u64,
        /// Summation limit
        #[arg(short = 'L', long = "limit")]
        limit: u64,
        /// Symmetric power
        #[arg(short, default_value_t = 1)]
        n: u32,
    },
    /// S_a(x; lambda), the divisor window count and the Erdos constant
    Orders {
        /// Prime range
        #[arg(long)]
        x: u64,
        /// Base of the orders
        #[arg(long, allow_hyphen_values = true)]
        lambda: i64,
        /// Exponent a
        #[arg(long, default_value_t = 0.5)]
        exponent: f64,
        /// Count n <= x with a divisor in (y, 2y]
        #[arg(long)]
        y: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheCmd {
    /// Entry counts and size of the cache file
    Stats,
}

/// Integer list given as comma-separated values and inclusive `a..b` ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSet(pub Vec<i64>);

pub fn parse_int_set(s: &str) -> Result<IntSet, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|e| format!("{part}: {e}"))?;
                let b: i64 = b.trim().parse().map_err(|e| format!("{part}: {e}"))?;
                if b < a {
                    return Err(format!("empty range {part}"));
                }
                if b - a >= 10_000_000 {
                    return Err(format!("range {part} is too long"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|e| format!("{part}: {e}"))?),
        }
    }
    if out.is_empty() {
        return Err("empty set".into());
    }
    Ok(IntSet(out))
}
