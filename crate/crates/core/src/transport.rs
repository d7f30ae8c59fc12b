//! Unitary correspondence between the Bargmann spaces of two deformations
//! `ψ₁`, `ψ₂`, for exponential-sum choices `a₁₂²(ρ) = Σ aₙ e^{αₙρ}`.
//!
//! The coefficient map is the identity; `ψ₂(ρ) = ψ₁(ρ) a₁₂²(ρ)/a₁₂²(ρ−1)`
//! and `F̂₂(ρ) = F̂₁(ρ) a₁₂²(ρ−1)`, i.e.
//! `F₂(x) = Σ aₙ e^{−αₙ} F₁(x e^{−αₙ})`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::PsiSpec;
use crate::error::{Error, Result};
use crate::quadrature::LogWindow;
use crate::weight::{MellinTransform, Provenance, WeightFunction};

/// Pairs `(aₙ, αₙ)` with `aₙ > 0` and `αₙ` strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct ExpSumChoice {
    terms: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for ExpSumChoice {
    type Error = Error;

    fn try_from(terms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<ExpSumChoice> for Vec<(f64, f64)> {
    fn from(c: ExpSumChoice) -> Self {
        c.terms
    }
}

impl ExpSumChoice {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("exponential sum needs at least one term".into()));
        }
        for &(a, alpha) in &terms {
            if !(a > 0.0 && a.is_finite() && alpha.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "exponential-sum term ({a}, {alpha}) needs a > 0 and finite exponent"
                )));
            }
        }
        if terms.windows(2).any(|w| !(w[1].1 > w[0].1)) {
            return Err(Error::InvalidSpec("exponents must be strictly increasing".into()));
        }
        Ok(Self { terms })
    }

    /// `a₁₂² ≡ 1`.
    pub fn identity() -> Self {
        Self {
            terms: vec![(1.0, 0.0)],
        }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn a12_sq(&self, rho: f64) -> f64 {
        self.terms.iter().map(|&(a, alpha)| a * (alpha * rho).exp()).sum()
    }

    /// `ln Σ aₙ e^{αₙρ}` without overflow.
    pub fn ln_a12_sq(&self, rho: f64) -> f64 {
        let top = self
            .terms
            .iter()
            .map(|&(a, alpha)| a.ln() + alpha * rho)
            .fold(f64::NEG_INFINITY, f64::max);
        let rest: f64 = self
            .terms
            .iter()
            .map(|&(a, alpha)| (a.ln() + alpha * rho - top).exp())
            .sum();
        top + rest.ln()
    }

    pub fn ln_a12_sq_complex(&self, rho: Complex64) -> Complex64 {
        let top = self
            .terms
            .iter()
            .map(|&(a, alpha)| a.ln() + alpha * rho.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let rest: Complex64 = self
            .terms
            .iter()
            .map(|&(a, alpha)| (rho * alpha + (a.ln() - top)).exp())
            .sum();
        rest.ln() + top
    }

    /// `a₁₂²(ρ)/a₁₂²(ρ−1)`, which lies in `[e^{α₀}, e^{αₚ}]`.
    pub fn ratio(&self, rho: f64) -> f64 {
        (self.ln_a12_sq(rho) - self.ln_a12_sq(rho - 1.0)).exp()
    }

    /// Limits of [`ratio`](Self::ratio) at `−∞` and `+∞`.
    pub fn ratio_limits(&self) -> (f64, f64) {
        let first = self.terms[0].1;
        let last = self.terms[self.terms.len() - 1].1;
        (first.exp(), last.exp())
    }

    /// Choice whose exponential sum is the product of the two.
    pub fn compose(&self, other: &ExpSumChoice) -> Self {
        let mut terms: Vec<(f64, f64)> = Vec::new();
        for &(a, alpha) in &self.terms {
            for &(b, beta) in &other.terms {
                terms.push((a * b, alpha + beta));
            }
        }
        terms.sort_by(|x, y| x.1.total_cmp(&y.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (c, gamma) in terms {
            match merged.last_mut() {
                Some(last) if last.1 == gamma => last.0 += c,
                _ => merged.push((c, gamma)),
            }
        }
        Self { terms: merged }
    }
}

/// `ψ₂(ρ) = ψ₁(ρ) Σaₙe^{αₙρ} / Σaₙe^{αₙ(ρ−1)}`.
pub fn psi2_induced(psi1: &PsiSpec, choice: &ExpSumChoice, rho: f64) -> Result<f64> {
    PsiSpec::transported(psi1.clone(), choice.clone()).psi(rho)
}

/// `F₂(x) = Σ aₙ e^{−αₙ} F₁(x e^{−αₙ}) / a₁₂²(0)`, normalized to `M₂(0) = 1`.
pub fn transport_weight(base: &WeightFunction, choice: &ExpSumChoice) -> Result<WeightFunction> {
    let norm = choice.a12_sq(0.0);
    let shifts: Vec<(f64, f64)> = choice
        .terms()
        .iter()
        .map(|&(a, alpha)| (a * (-alpha).exp() / norm, (-alpha).exp()))
        .collect();
    let f1 = base.clone();
    let eval = Arc::new(move |x: f64| -> Result<f64> {
        let mut acc = 0.0;
        for &(c, s) in &shifts {
            acc += c * f1.eval(x * s)?;
        }
        Ok(acc)
    });
    let mellin = match base.mellin() {
        Some(m) => Some(MellinTransform::transported(m.clone(), choice.clone()).normalized()?),
        None => None,
    };
    let w = base.log_window();
    let terms = choice.terms();
    let (lo, hi) = (terms[0].1, terms[terms.len() - 1].1);
    Ok(WeightFunction::from_parts(
        eval,
        Provenance::Transported,
        base.positivity(),
        mellin,
        LogWindow::new(w.center + 0.5 * (lo + hi), w.half_width + 0.5 * (hi - lo)),
    ))
}
