//! Ring-shaped coherent domains, where no weight exists.
//!
//! For `ψ(x) = 1 + q^x` (coherent states on `|z| > 1`) the weight equation
//! reads `(qx − 1)F(qx) = F(x)`, and for `ψ(x) = q^x/(1 + q^x)` (`|z| < 1`)
//! it reads `xF(x) = (1 − x/q)F(x/q)`. Together with vanishing outside the
//! ring, either recursion forces `F = 0` on `(0, ∞)` except on the orbit of
//! `x = 1` under `x ↦ qx`, where the multiplier vanishes and the recursion
//! carries no information.

use serde::Serialize;

use crate::algebra::{CustomPsi, DeclaredLimits, PsiSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RingVariant {
    /// `ψ = 1 + q^x`, `(r₁, r₂) = (1, ∞)`
    ExteriorDisk,
    /// `ψ = q^x/(1 + q^x)`, `(r₁, r₂) = (0, 1)`
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingCase {
    pub variant: RingVariant,
    pub q: f64,
}

/// Open interval `(lower, upper)` minus isolated `excluded` points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    #[serde(serialize_with = "crate::serde_ext::extended_f64")]
    pub upper: f64,
    pub excluded: Vec<f64>,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper && !self.excluded.contains(&x)
    }
}

impl RingCase {
    pub fn new(variant: RingVariant, q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidSpec(format!("ring case needs q > 1, got {q}")));
        }
        Ok(Self { variant, q })
    }

    pub fn psi_spec(&self) -> PsiSpec {
        let q = self.q;
        match self.variant {
            RingVariant::ExteriorDisk => PsiSpec::Custom(
                CustomPsi::new(format!("1+{q}^x"), move |x| 1.0 + q.powf(x)).with_limits(DeclaredLimits {
                    at_neg_inf: 1.0,
                    at_pos_inf: f64::INFINITY,
                }),
            ),
            RingVariant::Disk => PsiSpec::Custom(
                CustomPsi::new(format!("{q}^x/(1+{q}^x)"), move |x| 1.0 / (1.0 + q.powf(-x))).with_limits(
                    DeclaredLimits {
                        at_neg_inf: 0.0,
                        at_pos_inf: 1.0,
                    },
                ),
            ),
        }
    }

    /// `(r₁², r₂²)`: the weight must vanish outside this interval.
    pub fn support(&self) -> (f64, f64) {
        match self.variant {
            RingVariant::ExteriorDisk => (1.0, f64::INFINITY),
            RingVariant::Disk => (0.0, 1.0),
        }
    }

    fn outside_support(&self, x: f64) -> bool {
        match self.variant {
            RingVariant::ExteriorDisk => x < 1.0,
            RingVariant::Disk => x > 1.0,
        }
    }

    /// Smallest step count whose vanishing interval reaches `x`. Orbit
    /// points stay excluded at every step.
    pub fn steps_to_reach(&self, x: f64) -> u32 {
        let mut k = match self.variant {
            RingVariant::ExteriorDisk => x.ln() / self.q.ln(),
            RingVariant::Disk => -x.ln() / self.q.ln(),
        }
        .ceil()
        .max(0.0) as u32;
        loop {
            let i = self.vanishing_propagation(k);
            if x > i.lower && x < i.upper {
                return k;
            }
            k += 1;
        }
    }

    /// Interval on which `F` is forced to vanish after `steps` applications
    /// of the recursion: `(0, q^k)` or `(q^{−k}, ∞)`, minus the orbit points
    /// `q^{±j}`, `0 ≤ j < k`.
    pub fn vanishing_propagation(&self, steps: u32) -> Interval {
        let q = self.q;
        let k = steps as i32;
        match self.variant {
            RingVariant::ExteriorDisk => Interval {
                lower: 0.0,
                upper: q.powi(k),
                excluded: (0..k).map(|j| q.powi(j)).collect(),
            },
            RingVariant::Disk => Interval {
                lower: q.powi(-k),
                upper: f64::INFINITY,
                excluded: (0..k).map(|j| q.powi(-j)).collect(),
            },
        }
    }
}

/// `|(qx − 1)F(qx) − F(x)|` or `|xF(x) − (1 − x/q)F(x/q)|`.
pub fn ring_feq(case: &RingCase, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let q = case.q;
    match case.variant {
        RingVariant::ExteriorDisk => ((q * x - 1.0) * f(q * x) - f(x)).abs(),
        RingVariant::Disk => (x * f(x) - (1.0 - x / q) * f(x / q)).abs(),
    }
}

/// Samples on `x_j = x₀ q^{j/m}`, so that `x ↦ qx` maps node `j` to `j + m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub x0: f64,
    pub q: f64,
    pub per_period: usize,
    pub jmin: i64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn x(&self, j: i64) -> f64 {
        self.x0 * self.q.powf(j as f64 / self.per_period as f64)
    }

    pub fn jmax(&self) -> i64 {
        self.jmin + self.values.len() as i64 - 1
    }

    pub fn get(&self, j: i64) -> Option<f64> {
        if j < self.jmin || j > self.jmax() {
            None
        } else {
            Some(self.values[(j - self.jmin) as usize])
        }
    }

    /// Grid covering one period beyond the support boundary plus the
    /// `steps`-fold propagated interval, offset by half a node from the
    /// orbit of 1.
    pub fn for_case(case: &RingCase, steps: u32, per_period: usize, f: impl Fn(f64) -> f64) -> Self {
        let m = per_period.max(1) as i64;
        let s = steps as i64;
        let (jmin, jmax) = match case.variant {
            RingVariant::ExteriorDisk => (-m, s * m - 1),
            RingVariant::Disk => (-s * m, m - 1),
        };
        let mut g = Self {
            x0: case.q.powf(0.5 / m as f64),
            q: case.q,
            per_period: m as usize,
            jmin,
            values: Vec::new(),
        };
        g.values = (jmin..=jmax).map(|j| f(g.x(j))).collect();
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoWeightCertificate {
    pub variant: RingVariant,
    pub q: f64,
    pub interval: Interval,
    /// `max |residual|` of the recursion over nodes where both sides exist.
    pub max_residual: f64,
    /// `max |F|` over nodes outside the ring's support.
    pub support_violation: f64,
    /// `max(max_residual, support_violation)`
    pub violation_scale: f64,
    /// `C` with `|F| ≤ C·violation_scale` on the propagated nodes.
    pub amplification: f64,
    /// `max |F|` over propagated nodes inside the support.
    pub sup_norm: f64,
    pub consistent: bool,
    pub bound_holds: bool,
}

/// Orbit nodes are where the multiplier vanishes; none lies on a
/// [`GridFunction::for_case`] grid, but arbitrary grids may hit them.
fn on_orbit(q: f64, x: f64) -> bool {
    let k = (x.ln() / q.ln()).round();
    (x / q.powf(k) - 1.0).abs() < 1e-12
}

/// Checks the sampled `F` against the recursion and the support
/// constraint, and bounds `|F|` on the propagated nodes by linear
/// propagation of unit errors through the recursion.
pub fn no_weight_certificate(case: &RingCase, grid: &GridFunction, tol: f64) -> Result<NoWeightCertificate> {
    if (grid.q - case.q).abs() > 1e-15 * case.q {
        return Err(Error::InvalidSpec("grid ratio does not match the ring case".into()));
    }
    let q = case.q;
    let m = grid.per_period as i64;
    let (jmin, jmax) = (grid.jmin, grid.jmax());
    let mut max_residual: f64 = 0.0;
    let mut support_violation: f64 = 0.0;
    // c[j]: bound on |F(x_j)| per unit violation scale
    let mut c = vec![f64::INFINITY; grid.values.len()];
    let idx = |j: i64| (j - jmin) as usize;

    for j in jmin..=jmax {
        let x = grid.x(j);
        let fj = grid.values[idx(j)];
        if case.outside_support(x) {
            support_violation = support_violation.max(fj.abs());
            c[idx(j)] = 1.0;
        }
        let partner = match case.variant {
            RingVariant::ExteriorDisk => j + m,
            RingVariant::Disk => j - m,
        };
        if let Some(fp) = grid.get(partner) {
            let r = match case.variant {
                RingVariant::ExteriorDisk => (q * x - 1.0) * fp - fj,
                RingVariant::Disk => x * fj - (1.0 - x / q) * fp,
            };
            max_residual = max_residual.max(r.abs());
        }
    }

    // Propagate away from the support boundary.
    let order: Vec<i64> = match case.variant {
        RingVariant::ExteriorDisk => (jmin..=jmax).collect(),
        RingVariant::Disk => (jmin..=jmax).rev().collect(),
    };
    for j in order {
        let x = grid.x(j);
        if case.outside_support(x) {
            continue;
        }
        let (source, multiplier, coeff) = match case.variant {
            // F(x) = (F(x/q) + r)/(x − 1)
            RingVariant::ExteriorDisk => (j - m, x - 1.0, 1.0),
            // F(x) = (qx F(qx) − r)/(1 − x)
            RingVariant::Disk => (j + m, 1.0 - x, q * x),
        };
        if on_orbit(q, x) || multiplier == 0.0 {
            continue;
        }
        if let Some(cs) = source.checked_sub(jmin).and_then(|k| c.get(k as usize)).copied() {
            if grid.get(source).is_some() {
                c[idx(j)] = (coeff * cs + 1.0) / multiplier.abs();
            }
        }
    }

    let steps = match case.variant {
        RingVariant::ExteriorDisk => (jmax + 1) / m,
        RingVariant::Disk => (-jmin) / m,
    }
    .max(0) as u32;
    let interval = case.vanishing_propagation(steps);
    let mut amplification: f64 = 0.0;
    let mut sup_norm: f64 = 0.0;
    for j in jmin..=jmax {
        let x = grid.x(j);
        if case.outside_support(x) || !interval.contains(x) || on_orbit(q, x) || !c[idx(j)].is_finite() {
            continue;
        }
        amplification = amplification.max(c[idx(j)]);
        sup_norm = sup_norm.max(grid.values[idx(j)].abs());
    }
    let violation_scale = max_residual.max(support_violation);
    Ok(NoWeightCertificate {
        variant: case.variant,
        q,
        interval,
        max_residual,
        support_violation,
        violation_scale,
        amplification,
        sup_norm,
        consistent: max_residual <= tol && support_violation <= tol,
        bound_holds: sup_norm <= amplification * violation_scale * (1.0 + 1e-12),
    })
}
