//! The reproducing kernel
//!
//! ```text
//! G(x) = Σ_{n≥0} xⁿ/ψ(n)! + Σ_{n<0} xⁿ ψ(n)! = Σₙ xⁿ/M(n)
//! ```
//!
//! evaluated as a certified two-sided Laurent series. `G(ζz)` represents the
//! coherent state `|ζ⟩` and controls the growth of every function in the
//! space through `|f(z)| ≤ ‖f‖ G(|z|²)^{1/2}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{convergence_radii, Coefficients, Representation, RingClass};
use crate::error::{Error, Result};
use crate::series::{self, LaurentWindow};
use crate::weight::MellinTransform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub x: Complex64,
    pub value: Complex64,
    /// Bound on the modulus of the discarded terms.
    pub tail_bound: f64,
    pub terms_used: (i64, i64),
    /// `ln Σ |x|ⁿ/M(n)`; equals `ln G(x)` for positive real `x`.
    pub ln_abs_sum: f64,
}

fn check_domain(rep: &Representation, x: Complex64) -> Result<()> {
    if x == Complex64::default() {
        return Err(Error::ZeroPoint);
    }
    let radii = convergence_radii(&rep.psi)?;
    if radii.class == RingClass::FullPlane {
        return Ok(());
    }
    let (lower, upper) = (radii.r1 * radii.r1, radii.r2 * radii.r2);
    let modulus = x.norm();
    if radii.class == RingClass::Empty || !(modulus > lower && modulus < upper) {
        return Err(Error::OutsideDomain { modulus, lower, upper });
    }
    Ok(())
}

fn sum_window(window: &LaurentWindow, x: Complex64) -> Complex64 {
    let ln_x = x.ln();
    let ln_abs = ln_x.re;
    let lmax = window
        .indices()
        .map(|n| n as f64 * ln_abs - window.ln_moment(n))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = Complex64::default();
    for n in window.indices() {
        acc += (ln_x * n as f64 - window.ln_moment(n) - lmax).exp();
    }
    acc * lmax.exp()
}

/// `G(x)` with tail bounded by `tol · max(1, Σ|terms|)`.
pub fn kernel_g(rep: &Representation, x: Complex64, tol: f64) -> Result<KernelEval> {
    check_domain(rep, x)?;
    let window = series::certify_window(rep, x.norm(), tol, series::MAX_TERMS_PER_SIDE)?;
    Ok(KernelEval {
        x,
        value: sum_window(&window, x),
        tail_bound: window.tail_bound,
        terms_used: (window.nmin, window.nmax),
        ln_abs_sum: window.ln_abs_sum,
    })
}

/// `G(x) = F̂(1) Σₙ xⁿ/F̂(n+1)`, built from a Mellin transform alone.
pub fn kernel_from_mellin(mellin: &MellinTransform, x: Complex64, tol: f64) -> Result<KernelEval> {
    if x == Complex64::default() {
        return Err(Error::ZeroPoint);
    }
    // ln ψ(n) = ln F̂(n+1) − ln F̂(n) makes ln M(n) = ln F̂(n+1) − ln F̂(1).
    let ln_psi = |n: i64| -> Result<f64> { Ok(mellin.ln_eval(n as f64 + 1.0)? - mellin.ln_eval(n as f64)?) };
    let window = series::certify_window_with(&ln_psi, x.norm(), tol, series::MAX_TERMS_PER_SIDE)?;
    let ln_f1 = mellin.ln_eval(1.0)?;
    let ln_x = x.ln();
    let mut acc = Complex64::default();
    for n in window.indices() {
        acc += (ln_x * n as f64 + ln_f1 - mellin.ln_eval(n as f64 + 1.0)?).exp();
    }
    Ok(KernelEval {
        x,
        value: acc,
        tail_bound: window.tail_bound,
        terms_used: (window.nmin, window.nmax),
        ln_abs_sum: window.ln_abs_sum,
    })
}

/// `G⁰(x) = exp(−ln²(x/λ)/(2 ln q) − ln(x/λ)/2)`.
pub fn kernel_g0_q(lambda: f64, q: f64, x: f64) -> f64 {
    let l = (x / lambda).ln();
    let s = q.ln();
    (-l * l / (2.0 * s) - 0.5 * l).exp()
}

/// `Σₙ exp((ln q/2)(n + 1/2 + ln(x/λ)/ln q)²)`, bounded and periodic in
/// `ln(x/λ)/ln q` with period 1.
pub fn theta_factor_q(lambda: f64, q: f64, x: f64) -> f64 {
    let s = q.ln();
    let shift = 0.5 + (x / lambda).ln() / s;
    // Gaussian in n centred at −shift; sum outward from the nearest integer.
    let center = (-shift).round() as i64;
    let term = |n: i64| (0.5 * s * (n as f64 + shift).powi(2)).exp();
    let mut total = term(center);
    for k in 1.. {
        let pair = term(center + k) + term(center - k);
        total += pair;
        if pair < 1e-18 * total {
            break;
        }
    }
    total
}

/// `G_{λ,q}(x) = q^{−1/8} G⁰(x) θ(x)`, the closed form of the q-oscillator
/// kernel.
pub fn kernel_g_q_closed(lambda: f64, q: f64, x: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) || !(lambda > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "need λ > 0 and 0 < q < 1, got λ = {lambda}, q = {q}"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::OutsideDomain {
            modulus: x,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    let s = q.ln();
    let l = (x / lambda).ln();
    // Combine the exponentials before exponentiating to delay overflow.
    let ln_prefactor = -s / 8.0 - l * l / (2.0 * s) - 0.5 * l;
    Ok(ln_prefactor.exp() * theta_factor_q(lambda, q, x))
}

/// `|x G(x) − Σₙ ψ(n) gₙ xⁿ|` with `gₙ = 1/M(n)`: the functional equation
/// `x G(x) = ψ(x d/dx) G(x)` applied termwise.
///
/// The right side is summed over the window shifted up by one, with ψ(n)
/// evaluated directly, so the residual measures arithmetic consistency
/// plus at most `|x|` times the certified tail.
pub fn kernel_feq_residual(rep: &Representation, x: f64, tol: f64) -> Result<f64> {
    let xc = Complex64::new(x, 0.0);
    check_domain(rep, xc)?;
    let window = series::certify_window(rep, x.abs(), tol, series::MAX_TERMS_PER_SIDE)?;
    let lhs = sum_window(&window, xc) * x;

    let table = rep.factorial_table(window.nmin, window.nmax + 1)?;
    let ln_x = xc.ln();
    let mut rhs = Complex64::default();
    for n in (window.nmin + 1)..=(window.nmax + 1) {
        rhs += (ln_x * n as f64 + rep.ln_psi_at(n)? - table.ln_moment(n)).exp();
    }
    Ok((lhs - rhs).norm())
}

/// `|x G(x) − λ G(x/q)|` from two independent kernel evaluations.
pub fn kernel_q_shift_residual(lambda: f64, q: f64, x: f64, tol: f64) -> Result<f64> {
    let rep = Representation::new(crate::algebra::PsiSpec::q_exp(lambda, q)?);
    let here = kernel_g(&rep, Complex64::new(x, 0.0), tol)?;
    let shifted = kernel_g(&rep, Complex64::new(x / q, 0.0), tol)?;
    Ok((here.value * x - shifted.value * lambda).norm())
}

/// `⟨z̄|ζ⟩ = G(ζz)`.
pub fn coherent_overlap(rep: &Representation, zeta: Complex64, z: Complex64, tol: f64) -> Result<KernelEval> {
    kernel_g(rep, zeta * z, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseBound {
    /// `|f(z)|`
    pub lhs: f64,
    /// `‖f‖ G(|z|²)^{1/2}`
    pub rhs: f64,
}

impl PointwiseBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

pub fn pointwise_bound(rep: &Representation, coeffs: &Coefficients, z: Complex64, tol: f64) -> Result<PointwiseBound> {
    let lhs = coeffs.evaluate(rep, z)?.norm();
    let g = kernel_g(rep, Complex64::new(z.norm_sqr(), 0.0), tol)?;
    let rhs = coeffs.l2_norm_sq().sqrt() * (g.value.re + g.tail_bound).sqrt();
    Ok(PointwiseBound { lhs, rhs })
}

/// `|f(z)| ≤ ‖f‖ G(z z̄)^{1/2} + tol`.
pub fn pointwise_bound_check(rep: &Representation, coeffs: &Coefficients, z: Complex64, tol: f64) -> Result<bool> {
    Ok(pointwise_bound(rep, coeffs, z, tol)?.holds(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PsiSpec;

    fn q_half() -> Representation {
        Representation::new(PsiSpec::q_exp(1.0, 0.5).unwrap())
    }

    fn brute_q_kernel(lambda: f64, q: f64, x: f64) -> f64 {
        (-40i64..=40)
            .map(|n| (x / lambda).powi(n as i32) * q.powf((n * (n + 1)) as f64 / 2.0))
            .sum()
    }

    #[test]
    fn kernel_at_one_matches_brute_force() {
        let g = kernel_g(&q_half(), Complex64::new(1.0, 0.0), 1e-15).unwrap();
        let brute = brute_q_kernel(1.0, 0.5, 1.0);
        assert!((g.value.re - brute).abs() < 1e-13 * brute);
        assert!((brute - 3.283_265_121_310_3).abs() < 1e-12);
    }

    #[test]
    fn series_matches_theta_closed_form() {
        for (lambda, q, x) in [
            (1.0, 0.5, 0.1),
            (1.0, 0.5, 1.0),
            (1.0, 0.5, 10.0),
            (1.0, 0.5, 2.0),
            (2.5, 0.8, 7.0),
        ] {
            let rep = Representation::new(PsiSpec::q_exp(lambda, q).unwrap());
            let series = kernel_g(&rep, Complex64::new(x, 0.0), 1e-16).unwrap().value.re;
            let closed = kernel_g_q_closed(lambda, q, x).unwrap();
            assert!(((series - closed) / closed).abs() < 1e-12, "{lambda} {q} {x}");
        }
    }

    #[test]
    fn g0_shift_identity() {
        let (lambda, q, x) = (1.0, 0.5, 3.7);
        let lhs = lambda * kernel_g0_q(lambda, q, x / q);
        let rhs = x * kernel_g0_q(lambda, q, x);
        assert!((lhs - rhs).abs() < 1e-14 * rhs);
    }

    #[test]
    fn theta_symmetry_point() {
        // x = λ√q puts the Gaussian centre on an integer.
        let (lambda, q): (f64, f64) = (1.3, 0.5);
        let x = lambda * q.sqrt();
        let s = q.ln();
        let direct: f64 = (-30i64..=30).map(|n| (0.5 * s * (n * n) as f64).exp()).sum();
        assert!((theta_factor_q(lambda, q, x) - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn functional_equation_residuals() {
        assert!(kernel_feq_residual(&q_half(), 1.3, 1e-15).unwrap() <= 1e-10);
        let expoly = Representation::new(PsiSpec::exp_poly(vec![0.0, 2f64.ln()]).unwrap());
        assert!(kernel_feq_residual(&expoly, 0.7, 1e-15).unwrap() <= 1e-10);
        assert!(kernel_q_shift_residual(1.0, 0.5, 1.3, 1e-15).unwrap() <= 1e-10);
    }

    #[test]
    fn coefficient_shift_identity_on_table() {
        let rep = q_half();
        let t = rep.factorial_table(-10, 10).unwrap();
        for n in -9..=10 {
            let lhs = rep.psi.psi(n as f64).unwrap() / t.moment(n);
            let rhs = 1.0 / t.moment(n - 1);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs);
        }
    }

    #[test]
    fn overlap_equals_squared_norm() {
        let rep = q_half();
        let one = Complex64::new(1.0, 0.0);
        let overlap = coherent_overlap(&rep, one, one, 1e-14).unwrap();
        let v = rep.coherent_vector(one, 1e-14).unwrap();
        assert!((overlap.value.re - v.squared_norm()).abs() < 1e-8);
    }

    #[test]
    fn zero_argument_rejected() {
        assert_eq!(
            kernel_g(&q_half(), Complex64::default(), 1e-12).unwrap_err(),
            Error::ZeroPoint
        );
    }

    #[test]
    fn pointwise_bound_basis_and_saturation() {
        let rep = q_half();
        let z = Complex64::new(1.0, 0.0);
        assert!(pointwise_bound_check(&rep, &Coefficients::basis(0), z, 1e-12).unwrap());

        // f aligned with the coherent coefficients saturates Schwarz.
        let z = Complex64::new(0.8, 0.6);
        let v = rep.coherent_vector(z, 1e-16).unwrap();
        let aligned = Coefficients::new(v.nmin, v.coefficients.iter().map(|c| c.conj()).collect());
        let b = pointwise_bound(&rep, &aligned, z, 1e-16).unwrap();
        assert!((b.lhs - b.rhs).abs() < 1e-10 * b.rhs);
    }
}
