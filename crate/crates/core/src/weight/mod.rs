//! Weight functions `F` on `(0, ∞)` solving `xF(x) = ψ(−x d/dx) F(x)`,
//! together with their Mellin transforms.
//!
//! Every constructed weight is normalized so that `M(0) = ∫F = 1`.

pub mod bernoulli;
pub mod logpower;
pub mod mellin;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use bernoulli::{bernoulli_number, bernoulli_poly, bernoulli_poly_complex};
pub use logpower::{kernel_growth_witness, psi_from_weight, weight_logpower, GrowthWitness, LogPowerWeight};
pub use mellin::{
    inverse_mellin_admissible, inverse_mellin_numeric, ln_mellin_hat_expoly, mellin_hat_expoly, InverseMellinOptions,
    InverseMellinValue, MellinTransform,
};

use crate::algebra::{ExpPoly, PsiSpec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_positive_axis, LogWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    QClosedForm,
    BernoulliMellin,
    NumericInverseMellin,
    LogPowerClosedForm,
    Transported,
    UserGiven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Positivity {
    ProvenPositive,
    SampledPositive,
    Indefinite,
}

type Evaluator = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Multiplicative freedom `h` with `h(qx) = h(x)`.
#[derive(Clone)]
pub struct Modulation {
    q: f64,
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

pub const MODULATION_SAMPLES: usize = 32;
pub const MODULATION_REL_TOL: f64 = 1e-10;

impl Modulation {
    /// Checks positivity and `h(qx) = h(x)` at 32 log-spaced points in
    /// `[1e-3, 1e3]`.
    pub fn new(q: f64, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidSpec(format!("modulation needs 0 < q < 1, got {q}")));
        }
        for x in log_grid(1e-3, 1e3, MODULATION_SAMPLES) {
            let (a, b) = (h(x), h(q * x));
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::NotPositive { x, value: a });
            }
            let mismatch = (a - b).abs() / a;
            if !(mismatch <= MODULATION_REL_TOL) {
                return Err(Error::NotPeriodic { x, mismatch });
            }
        }
        Ok(Self { q, h: Arc::new(h) })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.h)(x)
    }
}

impl fmt::Debug for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulation").field("q", &self.q).finish_non_exhaustive()
    }
}

/// `n` points `lo·(hi/lo)^{k/(n−1)}`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
            .collect(),
    }
}

/// `F⁰(x) = exp(ln²(x/λ)/(2 ln q) − ln(x/λ)/2)`, unnormalized (`F⁰(λ) = 1`).
pub fn weight_q_closed(lambda: f64, q: f64, x: f64) -> Result<f64> {
    PsiSpec::q_exp(lambda, q)?;
    if !(x > 0.0) {
        return Err(Error::OutsideDomain {
            modulus: x,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(f0(lambda, q, x))
}

fn f0(lambda: f64, q: f64, x: f64) -> f64 {
    let l = (x / lambda).ln();
    (l * l / (2.0 * q.ln()) - 0.5 * l).exp()
}

/// `ln M(0)` of the unnormalized `F⁰`: `ln(λ √(−2π ln q) q^{−1/8})`.
fn ln_mass_f0(lambda: f64, q: f64) -> f64 {
    let s = q.ln();
    lambda.ln() + 0.5 * (-2.0 * std::f64::consts::PI * s).ln() - s / 8.0
}

/// `F⁰(x)·h(x)`, unnormalized.
pub fn weight_q_modulated(lambda: f64, q: f64, h: &Modulation, x: f64) -> Result<f64> {
    Ok(weight_q_closed(lambda, q, x)? * h.eval(x))
}

pub const POSITIVITY_SAMPLES: usize = 512;
pub const POSITIVITY_RANGE: (f64, f64) = (1e-4, 1e4);

/// An evaluable weight with its metadata.
#[derive(Clone)]
pub struct WeightFunction {
    eval: Evaluator,
    provenance: Provenance,
    positivity: Positivity,
    modulation: Option<Modulation>,
    mellin: Option<MellinTransform>,
    q_family: Option<(f64, f64)>,
    log_window: LogWindow,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("provenance", &self.provenance)
            .field("positivity", &self.positivity)
            .field("modulation", &self.modulation)
            .field("q_family", &self.q_family)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSummary {
    pub provenance: Provenance,
    pub positivity: Positivity,
    pub modulated: bool,
    pub has_mellin: bool,
}

impl WeightFunction {
    pub(crate) fn from_parts(
        eval: Evaluator,
        provenance: Provenance,
        positivity: Positivity,
        mellin: Option<MellinTransform>,
        log_window: LogWindow,
    ) -> Self {
        Self {
            eval,
            provenance,
            positivity,
            modulation: None,
            mellin,
            q_family: None,
            log_window,
        }
    }

    /// Normalized closed-form q-oscillator weight.
    pub fn q_closed(lambda: f64, q: f64) -> Result<Self> {
        PsiSpec::q_exp(lambda, q)?;
        let scale = (-ln_mass_f0(lambda, q)).exp();
        let mut w = Self::from_parts(
            Arc::new(move |x| Ok(f0(lambda, q, x) * scale)),
            Provenance::QClosedForm,
            Positivity::ProvenPositive,
            Some(MellinTransform::q_oscillator(lambda, q)?.normalized()?),
            q_window(lambda, q),
        );
        w.q_family = Some((lambda, q));
        Ok(w)
    }

    /// `F⁰·h`, normalized by quadrature. Moments at integer order are those
    /// of `F⁰`; the Mellin transform at non-integer order is not, so none is
    /// attached.
    pub fn q_modulated(lambda: f64, q: f64, h: Modulation) -> Result<Self> {
        PsiSpec::q_exp(lambda, q)?;
        if (h.q() - q).abs() > 1e-15 * q {
            return Err(Error::InvalidSpec(format!(
                "modulation period {} does not match q = {q}",
                h.q()
            )));
        }
        let window = q_window(lambda, q);
        let hh = h.clone();
        let mass = integrate_positive_axis(|x| Ok(f0(lambda, q, x) * hh.eval(x)), window, &Default::default())?
            .require_converged()?
            .value;
        let hh = h.clone();
        let mut w = Self::from_parts(
            Arc::new(move |x| Ok(f0(lambda, q, x) * hh.eval(x) / mass)),
            Provenance::QClosedForm,
            Positivity::ProvenPositive,
            None,
            window,
        );
        w.q_family = Some((lambda, q));
        w.modulation = Some(h);
        Ok(w)
    }

    /// Weight obtained by inverting the Bernoulli-polynomial Mellin transform.
    pub fn bernoulli(spec: ExpPoly, opts: InverseMellinOptions) -> Result<Self> {
        if !inverse_mellin_admissible(&spec) {
            return Err(Error::NonDecayingIntegrand {
                limit: crate::quadrature::engine::LINE_LIMIT,
            });
        }
        let mellin = MellinTransform::bernoulli(spec).normalized()?;
        let mut w = Self::from_mellin(mellin, opts)?;
        w.provenance = Provenance::BernoulliMellin;
        Ok(w)
    }

    /// Weight defined pointwise by numeric inverse Mellin transform; sign is
    /// sampled on [`POSITIVITY_SAMPLES`] log-spaced points.
    pub fn from_mellin(mellin: MellinTransform, opts: InverseMellinOptions) -> Result<Self> {
        let mellin = mellin.normalized()?;
        let m = mellin.clone();
        let eval: Evaluator = Arc::new(move |x| Ok(inverse_mellin_numeric(&m, x, &opts)?.value));
        let mut negative = false;
        for x in log_grid(POSITIVITY_RANGE.0, POSITIVITY_RANGE.1, POSITIVITY_SAMPLES) {
            let v = inverse_mellin_numeric(&mellin, x, &opts)?;
            if v.value < -v.report.abs_err_estimate {
                negative = true;
                break;
            }
        }
        let positivity = if negative {
            Positivity::Indefinite
        } else {
            Positivity::SampledPositive
        };
        Ok(Self::from_parts(
            eval,
            Provenance::NumericInverseMellin,
            positivity,
            Some(mellin),
            LogWindow::new(0.0, 4.0),
        ))
    }

    /// `exp(−ν ln^{2n} x)/F̂(1)`.
    pub fn log_power(weight: LogPowerWeight) -> Result<Self> {
        let raw = MellinTransform::log_power(weight);
        let ln_mass = raw.ln_eval(1.0)?;
        let scale = (-ln_mass).exp();
        let half = 4.0 * weight.nu.powf(-1.0 / (2.0 * weight.n as f64));
        Ok(Self::from_parts(
            Arc::new(move |x| Ok(weight.weight(x) * scale)),
            Provenance::LogPowerClosedForm,
            Positivity::ProvenPositive,
            Some(raw.normalized()?),
            LogWindow::new(0.0, half),
        ))
    }

    /// Arbitrary positive callback, taken as already normalized. Sign is
    /// sampled as for numeric weights.
    pub fn user_given(f: impl Fn(f64) -> f64 + Send + Sync + 'static, window: LogWindow) -> Self {
        let negative = log_grid(POSITIVITY_RANGE.0, POSITIVITY_RANGE.1, POSITIVITY_SAMPLES)
            .into_iter()
            .any(|x| f(x) < 0.0);
        Self::from_parts(
            Arc::new(move |x| Ok(f(x))),
            Provenance::UserGiven,
            if negative {
                Positivity::Indefinite
            } else {
                Positivity::SampledPositive
            },
            None,
            window,
        )
    }

    /// `F(x)`, zero outside `(0, ∞)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Ok(0.0);
        }
        (self.eval)(x)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn positivity(&self) -> Positivity {
        self.positivity
    }

    pub fn modulation(&self) -> Option<&Modulation> {
        self.modulation.as_ref()
    }

    pub fn mellin(&self) -> Option<&MellinTransform> {
        self.mellin.as_ref()
    }

    /// `(λ, q)` when this is a (possibly modulated) q-oscillator weight.
    pub fn q_family(&self) -> Option<(f64, f64)> {
        self.q_family
    }

    /// Where the mass of `F(e^u)e^u` sits in `u = ln x`.
    pub fn log_window(&self) -> LogWindow {
        self.log_window
    }

    pub fn summary(&self) -> WeightSummary {
        WeightSummary {
            provenance: self.provenance,
            positivity: self.positivity,
            modulated: self.modulation.is_some(),
            has_mellin: self.mellin.is_some(),
        }
    }

    /// `x,F` rows on a log-spaced grid, with header.
    pub fn sample_csv(&self, lo: f64, hi: f64, points: usize) -> Result<String> {
        let mut out = String::from("x,F\n");
        for x in log_grid(lo, hi, points) {
            out.push_str(&format!("{x:e},{:e}\n", self.eval(x)?));
        }
        Ok(out)
    }
}

fn q_window(lambda: f64, q: f64) -> LogWindow {
    // F⁰(λe^L)e^L is Gaussian in L with variance −ln q, centered at −(ln q)/2.
    let s = q.ln();
    LogWindow::new(lambda.ln() - 0.5 * s, 8.0 * (-s).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FeqMode {
    /// `|xF(x) − λF(qx)|` for q-oscillator deformations.
    Pointwise,
    /// `|F̂(ρ+1) − ψ(ρ)F̂(ρ)| / |F̂(ρ+1)|` in Mellin space.
    Mellin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeqResidual {
    pub mode: FeqMode,
    /// `x` in pointwise mode, `ρ` in Mellin mode.
    pub at: f64,
    pub residual: f64,
}

/// Residual of `xF(x) = ψ(−x d/dx)F(x)`. For `ψ = λq^{−ρ}` the operator is
/// the dilation `F ↦ λF(q·)` and the check is pointwise at `at = x`;
/// otherwise it runs on the Mellin side at `ρ = at`.
pub fn weight_feq_residual(spec: &PsiSpec, weight: &WeightFunction, at: f64) -> Result<FeqResidual> {
    if let PsiSpec::QExp { lambda, q } = spec {
        let x = at;
        let residual = (x * weight.eval(x)? - lambda * weight.eval(q * x)?).abs();
        return Ok(FeqResidual {
            mode: FeqMode::Pointwise,
            at,
            residual,
        });
    }
    let mellin = weight.mellin().ok_or_else(|| {
        Error::UnsupportedProvenance(format!(
            "{:?} weight has no Mellin transform for a non-dilation deformation",
            weight.provenance()
        ))
    })?;
    let rho = at;
    let d = mellin.ln_eval(rho)? + spec.ln_psi(rho)? - mellin.ln_eval(rho + 1.0)?;
    Ok(FeqResidual {
        mode: FeqMode::Mellin,
        at,
        residual: d.exp_m1().abs(),
    })
}
