use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "dbarg", version, about = "Bargmann representations for deformed oscillators")]
pub struct Cli {
    /// TOML run configuration; `DBARG_CONFIG` is used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Report format; falls back to the config, then CSV for `weight` and `ring-demo`, JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Embed wall-clock time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radii of the coherent ring.
    Radii(PsiArgs),
    /// psi-factorials and moments over an index range.
    Factorials {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long, default_value = "-6..6", value_parser = parse_range, allow_hyphen_values = true)]
        n: RangeInclusive<i64>,
    },
    /// Coefficients of the coherent vector at z.
    Coherent {
        #[command(flatten)]
        psi: PsiArgs,
        /// `re` or `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// Reproducing kernel G(x) by certified series.
    Kernel {
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        points: PointArgs,
    },
    /// Weight function samples on a log-spaced grid.
    Weight {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long, default_value_t = 1e-3)]
        lo: f64,
        #[arg(long, default_value_t = 1e3)]
        hi: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Radial moments by quadrature against the psi-factorial oracle.
    Moments {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long, default_value = "-6..6", value_parser = parse_range, allow_hyphen_values = true)]
        n: RangeInclusive<i64>,
    },
    /// Norm equivalence on random finite vectors.
    Parseval {
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        vectors: VectorArgs,
    },
    /// Reproducing property at a point for random finite vectors.
    Reproduce {
        #[command(flatten)]
        psi: PsiArgs,
        #[command(flatten)]
        vectors: VectorArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.7,0.2")]
        zeta: Complex64,
    },
    /// Adjointness of z and the annihilator on basis pairs.
    Adjoint {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long, default_value = "-4..4", value_parser = parse_range, allow_hyphen_values = true)]
        m: RangeInclusive<i64>,
        #[arg(long, default_value = "-4..4", value_parser = parse_range, allow_hyphen_values = true)]
        n: RangeInclusive<i64>,
    },
    /// psi recovered from a weight's Mellin transform.
    PsiFromF {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "-2,-1,0,1,2"
        )]
        rho: Vec<f64>,
    },
    /// Transported weight and its moment recursion.
    Transport {
        #[command(flatten)]
        psi: PsiArgs,
        /// JSON list of `[a, alpha]` pairs.
        #[arg(long, value_parser = parse_choice, allow_hyphen_values = true)]
        choice: dbarg_core::transport::ExpSumChoice,
        #[arg(long, default_value = "-4..4", value_parser = parse_range, allow_hyphen_values = true)]
        n: RangeInclusive<i64>,
    },
    /// Propagation of vanishing in the ring cases.
    RingDemo {
        #[arg(long, value_enum)]
        variant: Variant,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 10)]
        steps: u32,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PsiFamily {
    Qexp,
    Expoly,
    Logpower,
    CustomTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Exterior,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Grid,
}

#[derive(Debug, Clone, Args)]
pub struct PsiArgs {
    #[arg(long, value_enum, default_value = "qexp")]
    pub psi: PsiFamily,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Amplitude `A` of the modulation `1 + A cos(2π ln x / ln q)` (qexp weights).
    #[arg(long, allow_hyphen_values = true)]
    pub modulation: Option<f64>,
    /// Exponent polynomial coefficients a0,a1,... (expoly).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// `ν` in `exp(−ν (ln x)^{2n})` (logpower).
    #[arg(long, default_value_t = 0.5)]
    pub nu: f64,
    /// `n` in `exp(−ν (ln x)^{2n})` (logpower).
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    /// CSV of `x,psi` samples (custom-table).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Declared limit of psi at −∞ (custom-table).
    #[arg(long, allow_hyphen_values = true)]
    pub limit_neg: Option<f64>,
    /// Declared limit of psi at +∞ (custom-table).
    #[arg(long, allow_hyphen_values = true)]
    pub limit_pos: Option<f64>,
    /// Eigenvalue offset of the reference vector.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Real evaluation points.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Log-spaced grid `lo:hi:count`, used when `--x` is absent.
    #[arg(long, value_parser = parse_grid, default_value = "0.001:1000:13")]
    pub grid: (f64, f64, usize),
}

#[derive(Debug, Clone, Args)]
pub struct VectorArgs {
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value = "-4..4", value_parser = parse_range, allow_hyphen_values = true)]
    pub support: RangeInclusive<i64>,
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: Mode,
}

/// `a..b`, inclusive on both ends.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `a..b`, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start `{a}`: {e}"))?;
    let b: i64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("bad range end `{b}`: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number `{p}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

pub fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected `lo:hi:count`, got `{s}`"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("bad grid start: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("bad grid end: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("bad grid count: {e}"))?;
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err("grid needs 0 < lo < hi and count >= 2".into());
    }
    Ok((lo, hi, n))
}

pub fn parse_choice(s: &str) -> Result<dbarg_core::transport::ExpSumChoice, String> {
    serde_json::from_str(s).map_err(|e| format!("bad exponential-sum choice: {e}"))
}
