//! The deformed oscillator algebra `a†a = ψ(N)`, `aa† = ψ(N+1)` in its
//! two-sided (non-Fock) representation.
//!
//! Basis vectors `|n⟩`, `n ∈ ℤ`, are normalized by the ψ-factorial
//!
//! ```text
//! ψ(μ+n)! = ψ(μ+1)···ψ(μ+n)      n > 0
//!         = 1                    n = 0
//!         = ψ(μ)ψ(μ−1)···ψ(μ+n+1) n < 0
//! ```
//!
//! and the moment sequence `M(n) = ψ(n)!` for `n ≥ 0`, `M(n) = 1/ψ(n)!` for
//! `n < 0` obeys `M(n+1) = ψ(n+1) M(n)` for every integer `n`. (The printed
//! recursion `M(n+1) = ψ(n) M(n)` in the original derivation is off by one;
//! this crate uses the form consistent with `F̂(ρ+1) = ψ(ρ) F̂(ρ)`.)
//!
//! Products are accumulated in log space; `λⁿq^{−n(n+1)/2}` leaves the
//! double range already near `|n| ≈ 40`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series;
use crate::transport::ExpSumChoice;
use crate::weight::logpower::LogPowerWeight;

/// `ψ(x) = exp(a₀ + a₁x + … + a_{2p+1}x^{2p+1})` with `a_{2p+1} > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    coeffs: Vec<f64>,
}

impl ExpPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidSpec("exp-poly coefficients must be finite".into()));
        }
        let degree = coeffs.len().saturating_sub(1);
        if coeffs.len() < 2 || degree.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!(
                "exp-poly exponent must have odd degree, got {degree}"
            )));
        }
        if coeffs[degree] <= 0.0 {
            return Err(Error::InvalidSpec(
                "exp-poly leading coefficient must be strictly positive".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `p` in `degree = 2p + 1`.
    pub fn p(&self) -> usize {
        (self.degree() - 1) / 2
    }

    pub fn ln_psi(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc.mul_add(x, a))
    }
}

/// Limits of `ψ` at `−∞` and `+∞` (not of `ψ^{1/2}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeclaredLimits {
    pub at_neg_inf: f64,
    pub at_pos_inf: f64,
}

/// User-supplied deformation function.
#[derive(Clone)]
pub struct CustomPsi {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    limits: Option<DeclaredLimits>,
}

impl CustomPsi {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            limits: None,
        }
    }

    pub fn with_limits(mut self, limits: DeclaredLimits) -> Self {
        self.limits = Some(limits);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn raw(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for CustomPsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPsi")
            .field("label", &self.label)
            .field("limits", &self.limits)
            .finish()
    }
}

/// The deformation function ψ.
#[derive(Debug, Clone)]
pub enum PsiSpec {
    /// `ψ(x) = λ q^{−x}`, the q-oscillator family.
    QExp {
        lambda: f64,
        q: f64,
    },
    ExpPoly(ExpPoly),
    /// `ψ(ρ) = F̂(ρ+1)/F̂(ρ)` for the weight `F(x) = exp(−ν (ln x)^{2n})`.
    LogPowerDerived(LogPowerWeight),
    Custom(CustomPsi),
    /// `ψ₂(ρ) = ψ₁(ρ) a₁₂²(ρ)/a₁₂²(ρ−1)` for an exponential-sum `a₁₂²`.
    Transported {
        base: Box<PsiSpec>,
        choice: ExpSumChoice,
    },
}

impl PsiSpec {
    pub fn q_exp(lambda: f64, q: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidSpec(format!("lambda must be positive, got {lambda}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidSpec(format!("q must lie in (0, 1), got {q}")));
        }
        Ok(PsiSpec::QExp { lambda, q })
    }

    pub fn exp_poly(coeffs: Vec<f64>) -> Result<Self> {
        ExpPoly::new(coeffs).map(PsiSpec::ExpPoly)
    }

    pub fn log_power(nu: f64, n: u32) -> Result<Self> {
        LogPowerWeight::new(nu, n).map(PsiSpec::LogPowerDerived)
    }

    pub fn transported(base: PsiSpec, choice: ExpSumChoice) -> Self {
        PsiSpec::Transported {
            base: Box::new(base),
            choice,
        }
    }

    /// `ln ψ(x)`; the primary evaluation path, free of under/overflow for
    /// the closed-form families.
    pub fn ln_psi(&self, x: f64) -> Result<f64> {
        match self {
            PsiSpec::QExp { lambda, q } => Ok(lambda.ln() - x * q.ln()),
            PsiSpec::ExpPoly(e) => Ok(e.ln_psi(x)),
            PsiSpec::LogPowerDerived(w) => w.ln_psi(x),
            PsiSpec::Custom(c) => {
                let value = c.raw(x);
                if value > 0.0 && value.is_finite() {
                    Ok(value.ln())
                } else {
                    Err(Error::NonPositivePsi { x, value })
                }
            }
            PsiSpec::Transported { base, choice } => {
                Ok(base.ln_psi(x)? + choice.ln_a12_sq(x) - choice.ln_a12_sq(x - 1.0))
            }
        }
    }

    /// `ψ(x)`; fails with `NonPositivePsi` if the value is not strictly
    /// positive in double precision.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if let PsiSpec::QExp { lambda, q } = self {
            let value = lambda * q.powf(-x);
            return if value > 0.0 {
                Ok(value)
            } else {
                Err(Error::NonPositivePsi { x, value })
            };
        }
        if let PsiSpec::Custom(c) = self {
            let value = c.raw(x);
            return if value > 0.0 && !value.is_nan() {
                Ok(value)
            } else {
                Err(Error::NonPositivePsi { x, value })
            };
        }
        let value = self.ln_psi(x)?.exp();
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::NonPositivePsi { x, value })
        }
    }

    /// Limits of ψ at ±∞.
    pub fn limits(&self) -> Result<DeclaredLimits> {
        match self {
            PsiSpec::QExp { .. } | PsiSpec::ExpPoly(_) | PsiSpec::LogPowerDerived(_) => Ok(DeclaredLimits {
                at_neg_inf: 0.0,
                at_pos_inf: f64::INFINITY,
            }),
            PsiSpec::Custom(c) => match c.limits {
                Some(l) => Ok(l),
                None => Ok(DeclaredLimits {
                    at_neg_inf: probe_limit(c, -1.0)?,
                    at_pos_inf: probe_limit(c, 1.0)?,
                }),
            },
            PsiSpec::Transported { base, choice } => {
                let l = base.limits()?;
                let (lo, hi) = choice.ratio_limits();
                Ok(DeclaredLimits {
                    at_neg_inf: scale_limit(l.at_neg_inf, lo),
                    at_pos_inf: scale_limit(l.at_pos_inf, hi),
                })
            }
        }
    }
}

fn scale_limit(limit: f64, factor: f64) -> f64 {
    if limit == 0.0 || limit.is_infinite() {
        limit
    } else {
        limit * factor
    }
}

/// Probe schedule for undeclared limits: `x = ±2^k`, `k = 4..=20`.
pub const PROBE_EXPONENTS: std::ops::RangeInclusive<i32> = 4..=20;
/// Relative change between the last two probes that counts as stable.
pub const PROBE_STABILITY: f64 = 1e-6;

fn probe_limit(c: &CustomPsi, sign: f64) -> Result<f64> {
    let side = if sign < 0.0 { "-inf" } else { "+inf" };
    let values: Vec<f64> = PROBE_EXPONENTS.map(|k| c.raw(sign * 2f64.powi(k))).collect();
    let last = values[values.len() - 1];
    let prev = values[values.len() - 2];
    if last.is_nan() || prev.is_nan() || last < 0.0 {
        return Err(Error::LimitUndetermined { side });
    }
    if last.is_infinite() || last > 1e100 {
        return Ok(f64::INFINITY);
    }
    if last < 1e-100 {
        return Ok(0.0);
    }
    if (last - prev).abs() <= PROBE_STABILITY * last.abs() {
        return Ok(last);
    }
    Err(Error::LimitUndetermined { side })
}

/// Shape of the region where coherent vectors exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RingClass {
    /// `r₁ = 0` and `r₂ = ∞`: the punctured plane.
    FullPlane,
    Ring,
    /// `r₁ ≥ r₂`: `a` has no eigenvectors.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Radii {
    #[serde(serialize_with = "crate::serde_ext::extended_f64")]
    pub r1: f64,
    #[serde(serialize_with = "crate::serde_ext::extended_f64")]
    pub r2: f64,
    #[serde(rename = "class")]
    pub class: RingClass,
}

impl Radii {
    pub fn contains(&self, modulus: f64) -> bool {
        modulus > self.r1 && modulus < self.r2
    }
}

/// `r₁ = lim_{p→−∞} ψ(p)^{1/2}` and `r₂ = lim_{p→+∞} ψ(p)^{1/2}`.
pub fn convergence_radii(spec: &PsiSpec) -> Result<Radii> {
    let limits = spec.limits()?;
    let r1 = limits.at_neg_inf.sqrt();
    let r2 = limits.at_pos_inf.sqrt();
    let class = if r1 >= r2 {
        RingClass::Empty
    } else if r1 == 0.0 && r2.is_infinite() {
        RingClass::FullPlane
    } else {
        RingClass::Ring
    };
    Ok(Radii { r1, r2, class })
}

/// A representation: the deformation plus the eigenvalue offset μ of `|0⟩`.
#[derive(Debug, Clone)]
pub struct Representation {
    pub psi: PsiSpec,
    pub mu: f64,
}

impl Representation {
    pub fn new(psi: PsiSpec) -> Self {
        Self { psi, mu: 0.0 }
    }

    pub fn with_mu(psi: PsiSpec, mu: f64) -> Self {
        Self { psi, mu }
    }

    /// Inequivalent representations are labelled by the fractional part of μ.
    pub fn label(&self) -> f64 {
        self.mu.rem_euclid(1.0)
    }

    pub fn ln_psi_at(&self, n: i64) -> Result<f64> {
        self.psi.ln_psi(self.mu + n as f64)
    }

    pub fn ln_factorial(&self, n: i64) -> Result<f64> {
        let mut acc = 0.0;
        if n > 0 {
            for i in 1..=n {
                acc += self.ln_psi_at(i)?;
            }
        } else {
            for i in (n + 1)..=0 {
                acc += self.ln_psi_at(i)?;
            }
        }
        Ok(acc)
    }

    /// `ψ(μ+n)!`
    pub fn psi_factorial(&self, n: i64) -> Result<f64> {
        Ok(self.ln_factorial(n)?.exp())
    }

    pub fn ln_moment(&self, n: i64) -> Result<f64> {
        let f = self.ln_factorial(n)?;
        Ok(if n >= 0 { f } else { -f })
    }

    pub fn moment(&self, n: i64) -> Result<f64> {
        Ok(self.ln_moment(n)?.exp())
    }

    /// `(ψ(μ+n)^{1/2}, ψ(μ+n+1)^{1/2})`: the actions `a|n⟩ = ψ(μ+n)^{1/2}|n−1⟩`
    /// and `a†|n⟩ = ψ(μ+n+1)^{1/2}|n+1⟩`.
    pub fn ladder_coefficients(&self, n: i64) -> Result<(f64, f64)> {
        let a = (0.5 * self.ln_psi_at(n)?).exp();
        let adag = (0.5 * self.ln_psi_at(n + 1)?).exp();
        Ok((a, adag))
    }

    pub fn factorial_table(&self, nmin: i64, nmax: i64) -> Result<FactorialTable> {
        FactorialTable::new(self, nmin, nmax)
    }

    /// Truncated coherent vector `|z⟩` with certified discarded norm mass.
    pub fn coherent_vector(&self, z: Complex64, norm_tail_tol: f64) -> Result<CoherentVector> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroPoint);
        }
        let radii = convergence_radii(&self.psi)?;
        let modulus = z.norm();
        if !radii.contains(modulus) {
            return Err(Error::OutsideRing {
                modulus,
                r1: radii.r1,
                r2: radii.r2,
            });
        }
        let window = series::certify_window(self, modulus * modulus, norm_tail_tol, series::MAX_TERMS_PER_SIDE)?;
        let ln_z = z.ln();
        let coefficients = window
            .indices()
            .zip(window.ln_moments.iter())
            .map(|(n, &ln_m)| (ln_z * n as f64 - 0.5 * ln_m).exp())
            .collect();
        Ok(CoherentVector {
            z,
            nmin: window.nmin,
            nmax: window.nmax,
            coefficients,
            tail_bound: window.tail_bound,
        })
    }
}

/// Cached `ψ(n)!` over `[nmin, nmax]` together with the moment sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorialTable {
    pub nmin: i64,
    pub nmax: i64,
    // ln ψ(n)! for n in [lo, hi] ⊇ [nmin, nmax] ∪ {0}
    lo: i64,
    ln_values: Vec<f64>,
}

impl FactorialTable {
    pub fn new(rep: &Representation, nmin: i64, nmax: i64) -> Result<Self> {
        if nmin > nmax {
            return Err(Error::InvalidSpec(format!("empty index range [{nmin}, {nmax}]")));
        }
        let lo = nmin.min(0);
        let hi = nmax.max(0);
        let mut ln_values = vec![0.0; (hi - lo + 1) as usize];
        let zero = (-lo) as usize;
        for n in 1..=hi {
            let i = zero + n as usize;
            ln_values[i] = ln_values[i - 1] + rep.ln_psi_at(n)?;
        }
        for n in (lo..0).rev() {
            let i = (n - lo) as usize;
            ln_values[i] = ln_values[i + 1] + rep.ln_psi_at(n + 1)?;
        }
        Ok(Self {
            nmin,
            nmax,
            lo,
            ln_values,
        })
    }

    fn slot(&self, n: i64) -> usize {
        assert!(
            n >= self.nmin && n <= self.nmax,
            "index {n} outside table [{}, {}]",
            self.nmin,
            self.nmax
        );
        (n - self.lo) as usize
    }

    pub fn ln_value(&self, n: i64) -> f64 {
        self.ln_values[self.slot(n)]
    }

    /// `ψ(n)!`
    pub fn value(&self, n: i64) -> f64 {
        self.ln_value(n).exp()
    }

    pub fn ln_moment(&self, n: i64) -> f64 {
        let v = self.ln_value(n);
        if n >= 0 {
            v
        } else {
            -v
        }
    }

    pub fn moment(&self, n: i64) -> f64 {
        self.ln_moment(n).exp()
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.nmin..=self.nmax
    }
}

/// Truncation of `|z⟩ = Σ cₙ|n⟩`, `cₙ = zⁿ M(n)^{−1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentVector {
    pub z: Complex64,
    pub nmin: i64,
    pub nmax: i64,
    pub coefficients: Vec<Complex64>,
    /// Upper bound on `Σ |cₙ|²` over the discarded indices.
    pub tail_bound: f64,
}

impl CoherentVector {
    pub fn coefficient(&self, n: i64) -> Option<Complex64> {
        if n < self.nmin || n > self.nmax {
            return None;
        }
        self.coefficients.get((n - self.nmin) as usize).copied()
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.nmin..=self.nmax
    }

    pub fn squared_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Partial sums of `|cₙ|²` in index order.
    pub fn partial_norms(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.norm_sqr();
                Some(*acc)
            })
            .collect()
    }

    /// `max |cₙ ψ(n)^{1/2} − z c_{n−1}|` over the interior of the truncation,
    /// relative to the largest coefficient.
    pub fn eigen_residual(&self, rep: &Representation) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let scale = self
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for n in (self.nmin + 1)..=self.nmax {
            let cn = self.coefficient(n).unwrap_or_default();
            let prev = self.coefficient(n - 1).unwrap_or_default();
            let lhs = cn * (0.5 * rep.ln_psi_at(n)?).exp();
            worst = worst.max((lhs - self.z * prev).norm() / scale);
        }
        Ok(worst)
    }
}

/// Finitely supported coefficient sequence `(fₙ)` on `[start, start + len)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients {
    pub start: i64,
    pub values: Vec<Complex64>,
}

impl Coefficients {
    pub fn new(start: i64, values: Vec<Complex64>) -> Self {
        Self { start, values }
    }

    /// The basis vector `eₙ`.
    pub fn basis(n: i64) -> Self {
        Self::new(n, vec![Complex64::new(1.0, 0.0)])
    }

    /// Independent standard-normal real and imaginary parts on `[nmin, nmax]`.
    pub fn random<R: rand::Rng>(rng: &mut R, nmin: i64, nmax: i64) -> Self {
        let values = (nmin..=nmax)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::new(nmin, values)
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.start + k as i64, v))
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.start {
            return Complex64::default();
        }
        self.values.get((n - self.start) as usize).copied().unwrap_or_default()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `f(z) = Σ fₙ zⁿ M(n)^{−1/2}`, the holomorphic image of `Σ fₙ|n⟩`.
    pub fn evaluate(&self, rep: &Representation, z: Complex64) -> Result<Complex64> {
        if z == Complex64::default() {
            return Err(Error::ZeroPoint);
        }
        let ln_z = z.ln();
        let mut acc = Complex64::default();
        for (n, fnv) in self.iter() {
            acc += fnv * (ln_z * n as f64 - 0.5 * rep.ln_moment(n)?).exp();
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_half() -> Representation {
        Representation::new(PsiSpec::q_exp(1.0, 0.5).unwrap())
    }

    #[test]
    fn psi_eval_examples() {
        assert_eq!(PsiSpec::q_exp(1.0, 0.5).unwrap().psi(3.0).unwrap(), 8.0);
        let e = PsiSpec::exp_poly(vec![0.0, 2f64.ln()]).unwrap();
        assert!((e.psi(3.0).unwrap() - 8.0).abs() < 1e-14);
        assert_eq!(PsiSpec::q_exp(2.0, 0.5).unwrap().psi(-1.0).unwrap(), 1.0);
    }

    #[test]
    fn custom_non_positive_is_rejected() {
        let spec = PsiSpec::Custom(CustomPsi::new("bad", |x| x));
        assert!(matches!(spec.psi(-1.0), Err(Error::NonPositivePsi { .. })));
        assert!(matches!(spec.ln_psi(0.0), Err(Error::NonPositivePsi { .. })));
    }

    #[test]
    fn invalid_specs() {
        assert!(PsiSpec::q_exp(1.0, 1.0).is_err());
        assert!(PsiSpec::q_exp(-1.0, 0.5).is_err());
        assert!(PsiSpec::exp_poly(vec![0.0, 0.0, 1.0]).is_err());
        assert!(PsiSpec::exp_poly(vec![0.0, -1.0]).is_err());
        assert!(PsiSpec::exp_poly(vec![1.0]).is_err());
    }

    #[test]
    fn factorial_examples() {
        let rep = q_half();
        assert!((rep.psi_factorial(3).unwrap() - 64.0).abs() < 1e-12);
        assert_eq!(rep.psi_factorial(0).unwrap(), 1.0);
        assert!((rep.psi_factorial(-2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn table_matches_direct_products() {
        let rep = Representation::with_mu(PsiSpec::q_exp(1.7, 0.35).unwrap(), 0.25);
        let table = rep.factorial_table(-9, 7).unwrap();
        for n in table.indices() {
            let direct = rep.ln_factorial(n).unwrap();
            assert!((table.ln_value(n) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
        assert_eq!(table.value(0), 1.0);
    }

    #[test]
    fn ladder_examples() {
        let (a, adag) = q_half().ladder_coefficients(0).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (adag - 2f64.sqrt()).abs() < 1e-15);
        let (a, adag) = q_half().ladder_coefficients(-1).unwrap();
        assert!((a - 0.5f64.sqrt()).abs() < 1e-15 && (adag - 1.0).abs() < 1e-15);
        let rep = Representation::with_mu(PsiSpec::q_exp(4.0, 0.5).unwrap(), 0.5);
        let (a, adag) = rep.ladder_coefficients(0).unwrap();
        assert!((a - (4.0 * 2f64.sqrt()).sqrt()).abs() < 1e-14);
        // ψ(1.5) = 4·2^{1.5}
        assert!((adag - (4.0 * 2f64.powf(1.5)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn radii_examples() {
        let r = convergence_radii(&PsiSpec::q_exp(1.0, 0.5).unwrap()).unwrap();
        assert_eq!((r.r1, r.r2, r.class), (0.0, f64::INFINITY, RingClass::FullPlane));

        let ext = PsiSpec::Custom(
            CustomPsi::new("1+2^x", |x| 1.0 + 2f64.powf(x)).with_limits(DeclaredLimits {
                at_neg_inf: 1.0,
                at_pos_inf: f64::INFINITY,
            }),
        );
        let r = convergence_radii(&ext).unwrap();
        assert_eq!((r.r1, r.r2, r.class), (1.0, f64::INFINITY, RingClass::Ring));

        let disk = PsiSpec::Custom(
            CustomPsi::new("2^x/(1+2^x)", |x| 1.0 / (1.0 + 2f64.powf(-x))).with_limits(DeclaredLimits {
                at_neg_inf: 0.0,
                at_pos_inf: 1.0,
            }),
        );
        let r = convergence_radii(&disk).unwrap();
        assert_eq!((r.r1, r.r2, r.class), (0.0, 1.0, RingClass::Ring));

        let empty = PsiSpec::Custom(CustomPsi::new("1-ish", |_| 1.0).with_limits(DeclaredLimits {
            at_neg_inf: 4.0,
            at_pos_inf: 1.0,
        }));
        assert_eq!(convergence_radii(&empty).unwrap().class, RingClass::Empty);
    }

    #[test]
    fn probed_limits() {
        let ext = PsiSpec::Custom(CustomPsi::new("1+2^x", |x| 1.0 + 2f64.powf(x)));
        let r = convergence_radii(&ext).unwrap();
        assert_eq!((r.r1, r.r2), (1.0, f64::INFINITY));

        let disk = PsiSpec::Custom(CustomPsi::new("logistic", |x| 1.0 / (1.0 + 2f64.powf(-x))));
        let r = convergence_radii(&disk).unwrap();
        assert_eq!((r.r1, r.r2), (0.0, 1.0));

        let wobbly = PsiSpec::Custom(CustomPsi::new("wobble", |x: f64| 2.0 + x.sin()));
        assert!(matches!(
            convergence_radii(&wobbly),
            Err(Error::LimitUndetermined { .. })
        ));
    }

    #[test]
    fn coherent_vector_first_coefficients() {
        let v = q_half().coherent_vector(Complex64::new(1.0, 0.0), 1e-14).unwrap();
        assert!((v.coefficient(0).unwrap().re - 1.0).abs() < 1e-15);
        assert!((v.coefficient(1).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((v.coefficient(-1).unwrap().re - 1.0).abs() < 1e-15);
        assert!(v.tail_bound <= 1e-14 * v.squared_norm().max(1.0));
    }

    #[test]
    fn coherent_vector_domain_errors() {
        let ring = Representation::new(PsiSpec::Custom(
            CustomPsi::new("1+2^x", |x| 1.0 + 2f64.powf(x)).with_limits(DeclaredLimits {
                at_neg_inf: 1.0,
                at_pos_inf: f64::INFINITY,
            }),
        ));
        assert!(matches!(
            ring.coherent_vector(Complex64::new(0.5, 0.0), 1e-10),
            Err(Error::OutsideRing { .. })
        ));
        assert_eq!(
            q_half().coherent_vector(Complex64::new(0.0, 0.0), 1e-10).unwrap_err(),
            Error::ZeroPoint
        );
    }
}
