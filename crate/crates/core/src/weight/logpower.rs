//! Weights `F(x) = exp(−ν (ln x)^{2n})` and the deformation they induce,
//! `ψ(ρ) = F̂(ρ+1)/F̂(ρ)`.
//!
//! `F̂(ρ) = ∫ exp(−ν t^{2n} + ρ t) dt` is integrated in `t = ln x` around the
//! unique maximum `t* = sgn ρ (|ρ|/(2nν))^{1/(2n−1)}`, with the peak value
//! factored out so that only `ln F̂` is ever formed.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{PsiSpec, Representation};
use crate::error::{Error, Result};
use crate::kernel::kernel_g;
use crate::quadrature::engine::{integrate_line, LineWindow, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogPowerWeight {
    pub nu: f64,
    pub n: u32,
}

const HALF_WIDTHS: f64 = 8.0;

impl LogPowerWeight {
    pub fn new(nu: f64, n: u32) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidSpec(format!("log-power weight needs nu > 0, got {nu}")));
        }
        if n == 0 {
            return Err(Error::InvalidSpec("log-power weight needs n >= 1".into()));
        }
        Ok(Self { nu, n })
    }

    fn power(&self) -> i32 {
        2 * self.n as i32
    }

    pub fn weight(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        (-self.nu * x.ln().powi(self.power())).exp()
    }

    fn phase(&self, rho: f64, t: f64) -> f64 {
        -self.nu * t.powi(self.power()) + rho * t
    }

    fn peak(&self, rho: f64) -> f64 {
        let k = self.power() as f64;
        rho.signum() * (rho.abs() / (k * self.nu)).powf(1.0 / (k - 1.0))
    }

    /// `ln F̂(ρ)` by quadrature to relative accuracy near `1e-12`.
    pub fn ln_mellin(&self, rho: f64) -> Result<f64> {
        let k = self.power() as f64;
        let t_star = self.peak(rho);
        let phi_star = self.phase(rho, t_star);
        let curvature = k * (k - 1.0) * self.nu * t_star.abs().powf(k - 2.0);
        let scale = self.nu.powf(-1.0 / k);
        let half = HALF_WIDTHS
            * if curvature > 0.0 {
                curvature.sqrt().recip().min(scale)
            } else {
                scale
            };
        let report = integrate_line(
            |t| Ok((self.phase(rho, t) - phi_star).exp()),
            LineWindow::centered(t_star, half),
            &QuadratureOptions::default(),
        )?
        .require_converged()?;
        Ok(phi_star + report.value.ln())
    }

    pub fn ln_psi(&self, rho: f64) -> Result<f64> {
        Ok(self.ln_mellin(rho + 1.0)? - self.ln_mellin(rho)?)
    }

    pub fn psi(&self, rho: f64) -> Result<f64> {
        let value = self.ln_psi(rho)?.exp();
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonPositivePsi { x: rho, value })
        }
    }
}

pub fn weight_logpower(nu: f64, n: u32, x: f64) -> Result<f64> {
    Ok(LogPowerWeight::new(nu, n)?.weight(x))
}

pub fn psi_from_weight(nu: f64, n: u32, rho: f64) -> Result<f64> {
    LogPowerWeight::new(nu, n)?.psi(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub x: f64,
    pub ln_g: f64,
    /// `ν ln^{2n} x − α ln x`
    pub ln_bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthWitness {
    pub nu: f64,
    pub n: u32,
    pub alpha: f64,
    pub points: Vec<GrowthPoint>,
    pub min_margin: f64,
}

impl GrowthWitness {
    pub fn holds(&self) -> bool {
        self.min_margin >= 0.0
    }
}

/// Compares `ln G(x)` for the induced `ψ` against `ν ln^{2n} x − α ln x`
/// on each grid point. The kernel itself behaves like
/// `ν ln^{2n} x − ln x + O(ln ln x)`, so the comparison is informative for
/// `α ≥ 1` and fails for large `x` once `α < 1`.
pub fn kernel_growth_witness(nu: f64, n: u32, grid: &[f64], alpha: f64, tol: f64) -> Result<GrowthWitness> {
    let w = LogPowerWeight::new(nu, n)?;
    let rep = Representation::new(PsiSpec::LogPowerDerived(w));
    let mut points = Vec::with_capacity(grid.len());
    for &x in grid {
        let g = kernel_g(&rep, Complex64::new(x, 0.0), tol)?;
        let ln_g = g.value.re.ln();
        let l = x.ln();
        let ln_bound = nu * l.powi(2 * n as i32) - alpha * l;
        points.push(GrowthPoint {
            x,
            ln_g,
            ln_bound,
            margin: ln_g - ln_bound,
        });
    }
    let min_margin = points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    Ok(GrowthWitness {
        nu,
        n,
        alpha,
        points,
        min_margin,
    })
}
