//! Radial integrals over `(0, ∞)` and the checks that together express the
//! resolution of the identity: moments, Parseval, adjointness and the
//! reproducing property.
//!
//! Measure: `dz dz̄ = dA/π`. With `z = √x e^{iθ}` this is `dx dθ/(2π)`, so
//! `∫ F(zz̄) |z|^{2n} dz dz̄ = ∫₀^∞ F(x) xⁿ dx` with no stray constant.

pub mod engine;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

pub use engine::{
    integrate, integrate_line, LineWindow, QuadValue, QuadratureOptions, QuadratureReport, LINE_LIMIT, TAIL_CUTOFF,
};

use crate::algebra::{Coefficients, PsiSpec, Representation};
use crate::error::Result;
use crate::kernel::kernel_g;
use crate::weight::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureConvention {
    /// `dz dz̄ = area_factor · dA`
    pub area_factor: f64,
}

impl Default for MeasureConvention {
    fn default() -> Self {
        Self { area_factor: 1.0 / PI }
    }
}

impl MeasureConvention {
    /// Factor turning `dx dθ` into `dz dz̄` (`dA = dx dθ / 2`).
    pub fn polar_factor(&self) -> f64 {
        0.5 * self.area_factor
    }
}

/// Initial window in `u = ln x`; the engine widens it as needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogWindow {
    pub center: f64,
    pub half_width: f64,
}

impl LogWindow {
    pub fn new(center: f64, half_width: f64) -> Self {
        Self { center, half_width }
    }
}

/// `∫₀^∞ g(x) dx` as `∫ g(e^u) e^u du`. A zero integrand value is taken as
/// exactly zero even where `e^u` overflows.
pub fn integrate_positive_axis<T, F>(
    mut g: F,
    window: LogWindow,
    opts: &QuadratureOptions,
) -> Result<QuadratureReport<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    integrate_line(
        |u: f64| {
            let v = g(u.exp())?;
            if v.magnitude() == 0.0 {
                Ok(T::default())
            } else {
                Ok(v * u.exp())
            }
        },
        LineWindow::centered(window.center, window.half_width),
        opts,
    )
}

/// `M_F(n) = ∫₀^∞ F(x) xⁿ dx`, integrated as `∫ F(e^u) e^{(n+1)u} du`.
pub fn radial_moment(weight: &WeightFunction, n: i64, opts: &QuadratureOptions) -> Result<QuadratureReport<f64>> {
    let w = weight.log_window();
    integrate_line(
        |u: f64| {
            let f = weight.eval(u.exp())?;
            Ok(if f == 0.0 { 0.0 } else { f * ((n + 1) as f64 * u).exp() })
        },
        LineWindow::centered(w.center, w.half_width),
        opts,
    )?
    .require_converged()
}

fn moments(
    weight: &WeightFunction,
    nmin: i64,
    nmax: i64,
    opts: &QuadratureOptions,
) -> Result<Vec<QuadratureReport<f64>>> {
    (nmin..=nmax).map(|n| radial_moment(weight, n, opts)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRow {
    pub n: i64,
    pub moment: f64,
    pub abs_err_estimate: f64,
    /// `|M(n+1) − ψ(n+1)M(n)| / M(n+1)`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRecursion {
    pub rows: Vec<MomentRow>,
    pub max_residual: f64,
}

/// Checks `M(n+1) = ψ(n+1)M(n)` for `n ∈ [nmin, nmax]`.
pub fn moment_recursion_check(
    weight: &WeightFunction,
    spec: &PsiSpec,
    nmin: i64,
    nmax: i64,
    opts: &QuadratureOptions,
) -> Result<MomentRecursion> {
    let m = moments(weight, nmin, nmax + 1, opts)?;
    let mut rows = Vec::with_capacity(m.len() - 1);
    for (k, n) in (nmin..=nmax).enumerate() {
        let (cur, next) = (m[k].value, m[k + 1].value);
        rows.push(MomentRow {
            n,
            moment: cur,
            abs_err_estimate: m[k].abs_err_estimate,
            residual: (next - spec.psi((n + 1) as f64)? * cur).abs() / next.abs(),
        });
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(MomentRecursion { rows, max_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionMode {
    /// Angular integral done exactly by orthogonality of `e^{ikθ}`.
    Analytic,
    /// Radial quadrature times a 256-node angular rule.
    TensorGrid,
}

pub const ANGULAR_NODES: usize = 256;

fn combine(parts: impl Iterator<Item = (f64, QuadratureReport<f64>)>) -> (f64, f64, usize, bool) {
    let (mut abs_err, mut nodes, mut converged, mut value) = (0.0, 0, true, 0.0);
    for (scale, r) in parts {
        value += scale * r.value;
        abs_err += scale.abs() * r.abs_err_estimate;
        nodes += r.nodes_used;
        converged &= r.converged;
    }
    (value, abs_err, nodes, converged)
}

/// Angular nodes `e^{inθ_k}` for `n` over the support of `coeffs`.
struct AngularTable {
    phases: Vec<Vec<Complex64>>,
}

impl AngularTable {
    fn new(coeffs: &Coefficients, sign: f64) -> Self {
        let phases = (0..ANGULAR_NODES)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / ANGULAR_NODES as f64;
                coeffs
                    .iter()
                    .map(|(n, _)| Complex64::from_polar(1.0, sign * n as f64 * theta))
                    .collect()
            })
            .collect();
        Self { phases }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsevalReport {
    pub mode: ReductionMode,
    pub l2_norm_sq: f64,
    pub report: QuadratureReport<f64>,
    pub rel_err: f64,
}

/// Compares `∫ F(zz̄)|f(z)|² dz dz̄` with `Σ|fₙ|²`, where
/// `f(z) = Σ fₙ zⁿ M(n)^{−1/2}`.
pub fn parseval_check(
    weight: &WeightFunction,
    rep: &Representation,
    coeffs: &Coefficients,
    mode: ReductionMode,
    opts: &QuadratureOptions,
) -> Result<ParsevalReport> {
    let l2 = coeffs.l2_norm_sq();
    let report = match mode {
        ReductionMode::Analytic => {
            let mut parts = Vec::new();
            for (n, f) in coeffs.iter() {
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                let m = radial_moment(weight, n, opts)?;
                parts.push((f.norm_sqr() / rep.moment(n)?, m));
            }
            let (value, abs_err, nodes, converged) = combine(parts.into_iter());
            QuadratureReport {
                value,
                abs_err_estimate: abs_err,
                rel_err_estimate: abs_err / value.abs(),
                nodes_used: nodes,
                converged,
            }
        }
        ReductionMode::TensorGrid => {
            let table = AngularTable::new(coeffs, 1.0);
            let ln_m: Vec<f64> = coeffs.iter().map(|(n, _)| rep.ln_moment(n)).collect::<Result<_>>()?;
            let scale = MeasureConvention::default().polar_factor() * 2.0 * PI / ANGULAR_NODES as f64;
            let w = weight.log_window();
            let mut radial = vec![Complex64::default(); ln_m.len()];
            integrate_line(
                |u: f64| {
                    let x = u.exp();
                    let fx = weight.eval(x)?;
                    if fx == 0.0 {
                        return Ok(0.0);
                    }
                    let half_u = 0.5 * u;
                    for (slot, ((n, f), lm)) in radial.iter_mut().zip(coeffs.iter().zip(&ln_m)) {
                        *slot = f * (n as f64 * half_u - 0.5 * lm).exp();
                    }
                    let angular: f64 = table
                        .phases
                        .iter()
                        .map(|row| {
                            row.iter()
                                .zip(&radial)
                                .map(|(p, c)| p * c)
                                .sum::<Complex64>()
                                .norm_sqr()
                        })
                        .sum();
                    Ok(fx * x * angular * scale)
                },
                LineWindow::centered(w.center, w.half_width),
                opts,
            )?
            .require_converged()?
        }
    };
    let rel_err = (report.value - l2).abs() / l2;
    Ok(ParsevalReport {
        mode,
        l2_norm_sq: l2,
        report,
        rel_err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointReport {
    pub m: i64,
    pub n: i64,
    /// `⟨eₘ, a† eₙ⟩`
    pub lhs: f64,
    /// `⟨a eₘ, eₙ⟩`
    pub rhs: f64,
    pub residual: f64,
}

/// `a†` acts as multiplication by `z` and `a` as `z⁻¹ψ(z d/dz)` on
/// `eₙ = zⁿ M(n)^{−1/2}`. Both pairings vanish by angular orthogonality
/// unless `m = n + 1`, where they reduce to `M_F(n+1)` and `ψ(n+1) M_F(n)`
/// over `√(M(m)M(n))`.
pub fn adjointness_residual(
    weight: &WeightFunction,
    rep: &Representation,
    m: i64,
    n: i64,
    opts: &QuadratureOptions,
) -> Result<AdjointReport> {
    let (lhs, rhs) = if m == n + 1 {
        let norm = (0.5 * (rep.ln_moment(m)? + rep.ln_moment(n)?)).exp();
        let upper = radial_moment(weight, n + 1, opts)?.value;
        let lower = radial_moment(weight, n, opts)?.value;
        (upper / norm, rep.ln_psi_at(n + 1)?.exp() * lower / norm)
    } else {
        (0.0, 0.0)
    };
    Ok(AdjointReport {
        m,
        n,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproducingReport {
    pub mode: ReductionMode,
    pub zeta: Complex64,
    /// `f(ζ)` from the coefficients.
    pub direct: Complex64,
    /// `∫ F(zz̄) G(ζz̄) f(z) dz dz̄`
    pub integral: Complex64,
    pub residual: f64,
    pub nodes_used: usize,
}

/// `f(ζ) = ∫ F(zz̄) G(ζz̄) f(z) dz dz̄`.
pub fn reproducing_check(
    weight: &WeightFunction,
    rep: &Representation,
    zeta: Complex64,
    coeffs: &Coefficients,
    mode: ReductionMode,
    opts: &QuadratureOptions,
) -> Result<ReproducingReport> {
    let direct = coeffs.evaluate(rep, zeta)?;
    let (integral, nodes_used) = match mode {
        ReductionMode::Analytic => {
            let mut acc = Complex64::default();
            let mut nodes = 0;
            for (n, f) in coeffs.iter() {
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                let m = radial_moment(weight, n, opts)?;
                nodes += m.nodes_used;
                let ln_m = rep.ln_moment(n)?;
                acc += f * zeta.powi(n as i32) * (m.value * (-1.5 * ln_m).exp());
            }
            (acc, nodes)
        }
        ReductionMode::TensorGrid => {
            let table = AngularTable::new(coeffs, 1.0);
            let ln_m: Vec<f64> = coeffs.iter().map(|(n, _)| rep.ln_moment(n)).collect::<Result<_>>()?;
            let scale = MeasureConvention::default().polar_factor() * 2.0 * PI / ANGULAR_NODES as f64;
            let tol = opts.rel_tol.max(1e-15) * 1e-2;
            let w = weight.log_window();
            let mut radial = vec![Complex64::default(); ln_m.len()];
            let report = integrate_line(
                |u: f64| {
                    let x = u.exp();
                    let fx = weight.eval(x)?;
                    if fx == 0.0 {
                        return Ok(Complex64::default());
                    }
                    let r = x.sqrt();
                    for (slot, ((n, f), lm)) in radial.iter_mut().zip(coeffs.iter().zip(&ln_m)) {
                        *slot = f * (n as f64 * 0.5 * u - 0.5 * lm).exp();
                    }
                    let mut acc = Complex64::default();
                    for (k, row) in table.phases.iter().enumerate() {
                        let theta = 2.0 * PI * k as f64 / ANGULAR_NODES as f64;
                        let zbar = Complex64::from_polar(r, -theta);
                        let g = kernel_g(rep, zeta * zbar, tol)?.value;
                        let f: Complex64 = row.iter().zip(&radial).map(|(p, c)| p * c).sum();
                        acc += g * f;
                    }
                    Ok(acc * (fx * x * scale))
                },
                LineWindow::centered(w.center, w.half_width),
                opts,
            )?
            .require_converged()?;
            (report.value, report.nodes_used)
        }
    };
    Ok(ReproducingReport {
        mode,
        zeta,
        direct,
        integral,
        residual: (direct - integral).norm(),
        nodes_used,
    })
}
