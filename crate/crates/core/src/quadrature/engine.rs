//! Adaptive Gauss-Kronrod (7/15) integration.
//!
//! Global adaptive bisection: the segment with the largest error estimate is
//! split until the summed estimate meets the tolerance, the roundoff floor
//! is reached, or the node budget runs out. Everything is sequential and the
//! final sum runs left to right, so results are bit-reproducible.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], XGK[5] and 0.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const NODES_PER_SEGMENT: usize = 15;
const INITIAL_SEGMENTS: usize = 8;

/// Values the engine can integrate: reals and complex numbers.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_nodes: 200_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }
}

/// Uniform result record for every integral the crate evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureReport<T> {
    pub value: T,
    pub abs_err_estimate: f64,
    pub rel_err_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadratureReport<T> {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::QuadratureNoConvergence {
                nodes: self.nodes_used,
                abs_err: self.abs_err_estimate,
            })
        }
    }

    pub fn map<U: QuadValue>(self, f: impl FnOnce(T) -> U, scale: f64) -> QuadratureReport<U> {
        QuadratureReport {
            value: f(self.value),
            abs_err_estimate: self.abs_err_estimate * scale.abs(),
            rel_err_estimate: self.rel_err_estimate,
            nodes_used: self.nodes_used,
            converged: self.converged,
        }
    }

    fn zero() -> Self {
        Self {
            value: T::default(),
            abs_err_estimate: 0.0,
            rel_err_estimate: 0.0,
            nodes_used: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    resabs: f64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err.abs();
    if resasc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / resasc).powf(1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gauss_kronrod<T, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [T::default(); 15];
    values[7] = f(center)?;
    for j in 0..7 {
        let dx = half * XGK[j];
        values[j] = f(center - dx)?;
        values[14 - j] = f(center + dx)?;
    }

    let mut kronrod = values[7] * WGK[7];
    let mut gauss = values[7] * WG[3];
    let mut resabs = values[7].magnitude() * WGK[7];
    for j in 0..7 {
        let pair = values[j] + values[14 - j];
        kronrod = kronrod + pair * WGK[j];
        resabs += WGK[j] * (values[j].magnitude() + values[14 - j].magnitude());
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (values[7] - mean).magnitude();
    for j in 0..7 {
        resasc += WGK[j] * ((values[j] - mean).magnitude() + (values[14 - j] - mean).magnitude());
    }

    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let err = rescale_error((kronrod - gauss).magnitude() * half, resabs, resasc);
    for v in values {
        if !v.magnitude().is_finite() {
            return Err(Error::QuadratureNoConvergence {
                nodes: 0,
                abs_err: f64::INFINITY,
            });
        }
    }
    Ok(Segment {
        a,
        b,
        value,
        err,
        resabs,
    })
}

/// Integrates a possibly fallible integrand over the finite interval `[a, b]`.
///
/// A report with `converged == false` is returned when the node budget is
/// exhausted; errors raised by the integrand are propagated unchanged.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<QuadratureReport<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    if a == b {
        return Ok(QuadratureReport::zero());
    }
    if opts.max_nodes < INITIAL_SEGMENTS * NODES_PER_SEGMENT {
        return Ok(QuadratureReport {
            value: T::default(),
            abs_err_estimate: f64::INFINITY,
            rel_err_estimate: f64::INFINITY,
            nodes_used: 0,
            converged: false,
        });
    }

    let width = (b - a) / INITIAL_SEGMENTS as f64;
    let mut segments = Vec::with_capacity(64);
    for k in 0..INITIAL_SEGMENTS {
        let lo = a + width * k as f64;
        let hi = if k + 1 == INITIAL_SEGMENTS { b } else { lo + width };
        segments.push(gauss_kronrod(&mut f, lo, hi)?);
    }
    let mut nodes = INITIAL_SEGMENTS * NODES_PER_SEGMENT;

    loop {
        let (value, err, resabs) = totals(&segments);
        let target = opts.abs_tol.max(opts.rel_tol * value.magnitude());
        let roundoff_floor = 100.0 * f64::EPSILON * resabs;
        if err <= target || err <= roundoff_floor {
            return Ok(finish(value, err, nodes, true));
        }
        if nodes + 2 * NODES_PER_SEGMENT > opts.max_nodes {
            return Ok(finish(value, err, nodes, false));
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Ok(finish(value, err, nodes, false));
        }
        let left = gauss_kronrod(&mut f, seg.a, mid)?;
        let right = gauss_kronrod(&mut f, mid, seg.b)?;
        nodes += 2 * NODES_PER_SEGMENT;
        segments[worst] = left;
        segments.push(right);
    }
}

fn totals<T: QuadValue>(segments: &[Segment<T>]) -> (T, f64, f64) {
    let mut order: Vec<&Segment<T>> = segments.iter().collect();
    order.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = T::default();
    let mut err = 0.0;
    let mut resabs = 0.0;
    for s in order {
        value = value + s.value;
        err += s.err;
        resabs += s.resabs;
    }
    (value, err, resabs)
}

fn finish<T: QuadValue>(value: T, err: f64, nodes: usize, converged: bool) -> QuadratureReport<T> {
    let mag = value.magnitude();
    QuadratureReport {
        value,
        abs_err_estimate: err,
        rel_err_estimate: if mag > 0.0 { err / mag } else { err },
        nodes_used: nodes,
        converged,
    }
}

/// Search window for [`integrate_line`]; expanded outward as needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineWindow {
    pub lower: f64,
    pub upper: f64,
}

impl LineWindow {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }
}

/// Integrand magnitude below which tails are discarded, relative to the peak.
pub const TAIL_CUTOFF: f64 = 1e-18;
/// Farthest the search window may be pushed from the origin.
pub const LINE_LIMIT: f64 = 1e4;
const SCAN_POINTS: usize = 257;

/// Integrates over the whole real line an integrand that decays in both
/// directions, after locating the region where it exceeds
/// `TAIL_CUTOFF` times its sampled peak.
pub fn integrate_line<T, F>(mut f: F, window: LineWindow, opts: &QuadratureOptions) -> Result<QuadratureReport<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let (lo, hi) = locate_support(&mut f, window)?;
    match (lo, hi) {
        (Some(lo), Some(hi)) => integrate(f, lo, hi, opts),
        _ => Ok(QuadratureReport::zero()),
    }
}

fn locate_support<T, F>(f: &mut F, window: LineWindow) -> Result<(Option<f64>, Option<f64>)>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let mut lo = window.lower;
    let mut hi = window.upper;
    if !(hi > lo) {
        return Err(Error::InvalidSpec(format!("empty integration window [{lo}, {hi}]")));
    }
    loop {
        let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
        let mut samples = Vec::with_capacity(SCAN_POINTS);
        for k in 0..SCAN_POINTS {
            let u = lo + step * k as f64;
            let m = f(u)?.magnitude();
            if !m.is_finite() {
                return Err(Error::QuadratureNoConvergence {
                    nodes: 0,
                    abs_err: f64::INFINITY,
                });
            }
            samples.push(m);
        }
        let peak = samples.iter().cloned().fold(0.0, f64::max);
        let cut = TAIL_CUTOFF * peak;
        let width = hi - lo;
        let grow_left = peak == 0.0 || samples[0] > cut;
        let grow_right = peak == 0.0 || samples[SCAN_POINTS - 1] > cut;
        if !grow_left && !grow_right {
            let first = samples.iter().position(|&m| m > cut).unwrap_or(0);
            let last = samples.iter().rposition(|&m| m > cut).unwrap_or(SCAN_POINTS - 1);
            let a = lo + step * first.saturating_sub(1) as f64;
            let b = lo + step * (last + 1).min(SCAN_POINTS - 1) as f64;
            return Ok((Some(a), Some(b)));
        }
        if lo.abs() >= LINE_LIMIT && hi.abs() >= LINE_LIMIT {
            if peak == 0.0 {
                return Ok((None, None));
            }
            return Err(Error::DecayTooSlow { limit: LINE_LIMIT });
        }
        if grow_left {
            if lo <= -LINE_LIMIT {
                if peak == 0.0 {
                    return Ok((None, None));
                }
                return Err(Error::DecayTooSlow { limit: LINE_LIMIT });
            }
            lo = (lo - width).max(-LINE_LIMIT);
        }
        if grow_right {
            if hi >= LINE_LIMIT {
                if peak == 0.0 {
                    return Ok((None, None));
                }
                return Err(Error::DecayTooSlow { limit: LINE_LIMIT });
            }
            hi = (hi + width).min(LINE_LIMIT);
        }
    }
}
