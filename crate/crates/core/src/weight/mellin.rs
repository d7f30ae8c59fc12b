//! Mellin transforms `F̂(ρ) = ∫₀^∞ F(x) x^{ρ−1} dx` solving
//! `F̂(ρ+1) = ψ(ρ) F̂(ρ)`, and their numeric inversion along a vertical line.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::bernoulli;
use super::logpower::LogPowerWeight;
use crate::algebra::{ExpPoly, PsiSpec};
use crate::error::{Error, Result};
use crate::quadrature::engine::{integrate_line, LineWindow, QuadratureOptions, QuadratureReport, TAIL_CUTOFF};
use crate::transport::ExpSumChoice;

#[derive(Debug, Clone)]
enum MellinKind {
    /// `exp(ρ ln λ − ½(ρ² − ρ) ln q)`
    QOscillator {
        lambda: f64,
        q: f64,
    },
    /// `exp(Σ aₙ/(n+1) B_{n+1}(ρ))`
    Bernoulli(ExpPoly),
    LogPower(LogPowerWeight),
    /// `F̂₁(ρ) a₁₂²(ρ−1)`
    Transported {
        base: Box<MellinTransform>,
        choice: ExpSumChoice,
    },
}

/// An evaluable Mellin transform, stored in log form.
#[derive(Debug, Clone)]
pub struct MellinTransform {
    kind: MellinKind,
    ln_offset: f64,
}

/// `ln F̂(ρ) = Σₙ aₙ/(n+1) B_{n+1}(ρ)`.
pub fn ln_mellin_hat_expoly(spec: &ExpPoly, rho: f64) -> f64 {
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(n, &a)| {
            if a == 0.0 {
                0.0
            } else {
                a / (n + 1) as f64 * bernoulli::bernoulli_poly(n + 1, rho).unwrap_or(f64::NAN)
            }
        })
        .sum()
}

pub fn mellin_hat_expoly(spec: &ExpPoly, rho: f64) -> f64 {
    ln_mellin_hat_expoly(spec, rho).exp()
}

fn ln_mellin_hat_expoly_complex(spec: &ExpPoly, rho: Complex64) -> Complex64 {
    spec.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(n, &a)| bernoulli::bernoulli_poly_complex(n + 1, rho).unwrap_or_default() * (a / (n + 1) as f64))
        .sum()
}

/// The inverse transform of the Bernoulli solution decays on vertical lines
/// exactly when `p` is even (degree `2p+1 ≡ 1 mod 4`): the leading term
/// behaves like `(−1)^{p+1} σ^{2p+2}` at `ρ = iσ`.
pub fn inverse_mellin_admissible(spec: &ExpPoly) -> bool {
    spec.p().is_multiple_of(2)
}

impl MellinTransform {
    fn from_kind(kind: MellinKind) -> Self {
        Self { kind, ln_offset: 0.0 }
    }

    pub fn q_oscillator(lambda: f64, q: f64) -> Result<Self> {
        PsiSpec::q_exp(lambda, q)?;
        Ok(Self::from_kind(MellinKind::QOscillator { lambda, q }))
    }

    pub fn bernoulli(spec: ExpPoly) -> Self {
        Self::from_kind(MellinKind::Bernoulli(spec))
    }

    pub fn log_power(weight: LogPowerWeight) -> Self {
        Self::from_kind(MellinKind::LogPower(weight))
    }

    pub fn transported(base: MellinTransform, choice: ExpSumChoice) -> Self {
        Self::from_kind(MellinKind::Transported {
            base: Box::new(base),
            choice,
        })
    }

    /// Rescaled so that `F̂(1) = M(0) = 1`.
    pub fn normalized(mut self) -> Result<Self> {
        self.ln_offset = 0.0;
        self.ln_offset = self.ln_eval(1.0)?;
        Ok(self)
    }

    /// `ψ` for which this transform solves the recursion, when it is one of
    /// the closed families.
    pub fn natural_psi(&self) -> Option<PsiSpec> {
        match &self.kind {
            MellinKind::QOscillator { lambda, q } => Some(PsiSpec::QExp { lambda: *lambda, q: *q }),
            MellinKind::Bernoulli(e) => Some(PsiSpec::ExpPoly(e.clone())),
            MellinKind::LogPower(w) => Some(PsiSpec::LogPowerDerived(*w)),
            MellinKind::Transported { base, choice } => {
                base.natural_psi().map(|b| PsiSpec::transported(b, choice.clone()))
            }
        }
    }

    fn ln_raw(&self, rho: f64) -> Result<f64> {
        match &self.kind {
            MellinKind::QOscillator { lambda, q } => Ok(rho * lambda.ln() - 0.5 * (rho * rho - rho) * q.ln()),
            MellinKind::Bernoulli(e) => Ok(ln_mellin_hat_expoly(e, rho)),
            MellinKind::LogPower(w) => w.ln_mellin(rho),
            MellinKind::Transported { base, choice } => Ok(base.ln_eval(rho)? + choice.ln_a12_sq(rho - 1.0)),
        }
    }

    pub fn ln_eval(&self, rho: f64) -> Result<f64> {
        Ok(self.ln_raw(rho)? - self.ln_offset)
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        Ok(self.ln_eval(rho)?.exp())
    }

    /// `ln F̂` continued to complex `ρ` (any branch; only `exp` of it is used).
    pub fn ln_eval_complex(&self, rho: Complex64) -> Result<Complex64> {
        let raw = match &self.kind {
            MellinKind::QOscillator { lambda, q } => rho * lambda.ln() - (rho * rho - rho) * (0.5 * q.ln()),
            MellinKind::Bernoulli(e) => ln_mellin_hat_expoly_complex(e, rho),
            MellinKind::LogPower(_) => {
                return Err(Error::UnsupportedProvenance(
                    "log-power Mellin transforms are only tabulated on the real axis".into(),
                ))
            }
            MellinKind::Transported { base, choice } => {
                base.ln_eval_complex(rho)? + choice.ln_a12_sq_complex(rho - 1.0)
            }
        };
        Ok(raw - self.ln_offset)
    }

    /// `|ln F̂(ρ+1) − ln F̂(ρ) − ln ψ(ρ)|`
    pub fn recursion_residual(&self, psi: &PsiSpec, rho: f64) -> Result<f64> {
        Ok((self.ln_eval(rho + 1.0)? - self.ln_eval(rho)? - psi.ln_psi(rho)?).abs())
    }

    /// Whether inversion along vertical lines is expected to converge.
    pub fn admissible(&self) -> bool {
        match &self.kind {
            MellinKind::QOscillator { .. } => true,
            MellinKind::Bernoulli(e) => inverse_mellin_admissible(e),
            MellinKind::LogPower(_) => false,
            MellinKind::Transported { base, .. } => base.admissible(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseMellinOptions {
    /// Abscissa `c` of the vertical line `ρ = c + iσ`.
    pub abscissa: f64,
    pub quadrature: QuadratureOptions,
}

impl Default for InverseMellinOptions {
    fn default() -> Self {
        Self {
            abscissa: 0.5,
            quadrature: QuadratureOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseMellinValue {
    pub x: f64,
    pub value: f64,
    /// Imaginary part of the contour integral; zero up to quadrature error
    /// for transforms with `F̂(ρ̄) = conj F̂(ρ)`.
    pub imag: f64,
    pub report: QuadratureReport<Complex64>,
}

const SIGMA_PROBE_MAX_DOUBLINGS: i32 = 14;

/// `F(x) = (1/2π) ∫ F̂(c+iσ) x^{−c−iσ} dσ`.
pub fn inverse_mellin_numeric(
    mellin: &MellinTransform,
    x: f64,
    opts: &InverseMellinOptions,
) -> Result<InverseMellinValue> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::OutsideDomain {
            modulus: x,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    let c = opts.abscissa;
    let limit = 2f64.powi(SIGMA_PROBE_MAX_DOUBLINGS);
    if !mellin.admissible() {
        return Err(Error::NonDecayingIntegrand { limit });
    }
    let ln_peak = mellin.ln_eval_complex(Complex64::new(c, 0.0))?.re;
    let ln_cut = ln_peak + TAIL_CUTOFF.ln();
    let mut sigma_max = None;
    for k in 0..=SIGMA_PROBE_MAX_DOUBLINGS {
        let s = 2f64.powi(k);
        if mellin.ln_eval_complex(Complex64::new(c, s))?.re < ln_cut {
            sigma_max = Some(s);
            break;
        }
    }
    let sigma_max = sigma_max.ok_or(Error::NonDecayingIntegrand { limit })?;

    let ln_x = x.ln();
    let integrand = |sigma: f64| -> Result<Complex64> {
        let rho = Complex64::new(c, sigma);
        let ln = mellin.ln_eval_complex(rho)? - rho * ln_x;
        Ok(ln.exp() / (2.0 * PI))
    };
    let report = integrate_line(integrand, LineWindow::centered(0.0, sigma_max), &opts.quadrature)
        .map_err(|e| match e {
            Error::DecayTooSlow { limit } => Error::NonDecayingIntegrand { limit },
            other => other,
        })?
        .require_converged()?;
    Ok(InverseMellinValue {
        x,
        value: report.value.re,
        imag: report.value.im,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_matches_q_oscillator_up_to_constant() {
        // a₀ = ln λ, a₁ = −ln q gives ψ = λ q^{−ρ}
        let (lambda, q) = (1.7f64, 0.4f64);
        let e = ExpPoly::new(vec![lambda.ln(), -q.ln()]).unwrap();
        let q0 = MellinTransform::q_oscillator(lambda, q).unwrap();
        let offset = ln_mellin_hat_expoly(&e, 0.0) - q0.ln_eval(0.0).unwrap();
        for rho in [-2.5, -0.3, 0.0, 1.0, 3.25] {
            let d = ln_mellin_hat_expoly(&e, rho) - q0.ln_eval(rho).unwrap();
            assert!((d - offset).abs() < 1e-13);
        }
        let a = MellinTransform::bernoulli(e).normalized().unwrap();
        let b = q0.normalized().unwrap();
        for rho in [-1.0, 0.5, 2.0] {
            assert!((a.ln_eval(rho).unwrap() - b.ln_eval(rho).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn degree_five_recursion() {
        let e = ExpPoly::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let r = ln_mellin_hat_expoly(&e, 1.3) - ln_mellin_hat_expoly(&e, 0.3) - 0.3f64.powi(5);
        assert!(r.abs() <= 1e-12);
    }

    #[test]
    fn ratio_at_zero_is_psi_zero() {
        let e = ExpPoly::new(vec![0.7, 1.2, 0.0, 0.4]).unwrap();
        let ratio = mellin_hat_expoly(&e, 1.0) / mellin_hat_expoly(&e, 0.0);
        assert!((ratio - 0.7f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn admissibility_gate() {
        assert!(inverse_mellin_admissible(&ExpPoly::new(vec![0.0, 1.0]).unwrap()));
        assert!(!inverse_mellin_admissible(
            &ExpPoly::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap()
        ));
        assert!(inverse_mellin_admissible(
            &ExpPoly::new(vec![0.0; 5].into_iter().chain([1.0]).collect()).unwrap()
        ));
    }

    #[test]
    fn non_admissible_inversion_fails() {
        let m = MellinTransform::bernoulli(ExpPoly::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap());
        assert!(matches!(
            inverse_mellin_numeric(&m, 1.0, &InverseMellinOptions::default()),
            Err(Error::NonDecayingIntegrand { .. })
        ));
    }
}
