//! Certified truncation of the two-sided series `Σₙ xⁿ / M(n)`.
//!
//! Starting from `n = 0` the window grows in each direction until the term
//! ratio drops below 1/2, is no larger than the previous ratio, and the
//! geometric majorant of the remaining tail is below the requested share
//! of the tolerance. The majorant is valid as long as the ratio keeps
//! decreasing, which holds whenever ψ is eventually monotone in the
//! relevant direction.

use crate::algebra::Representation;
use crate::error::{Error, Result};

pub const MAX_TERMS_PER_SIDE: usize = 1_000_000;
const RATIO_GATE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentWindow {
    pub nmin: i64,
    pub nmax: i64,
    /// `ln M(n)` for `n` in `nmin..=nmax`.
    pub ln_moments: Vec<f64>,
    /// Bound on `Σ |x|ⁿ/M(n)` over the discarded indices.
    pub tail_bound: f64,
    /// `ln Σ |x|ⁿ/M(n)` over the window.
    pub ln_abs_sum: f64,
}

impl LaurentWindow {
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.nmin..=self.nmax
    }

    pub fn ln_moment(&self, n: i64) -> f64 {
        self.ln_moments[(n - self.nmin) as usize]
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

struct SideResult {
    ln_moments: Vec<f64>,
    ln_sum: f64,
    ln_tail: f64,
}

/// Walks one side; `step` is +1 or −1. The returned moments exclude `n = 0`.
fn walk_side(ln_psi: &dyn Fn(i64) -> Result<f64>, ln_x: f64, step: i64, tol: f64, cap: usize) -> Result<SideResult> {
    let mut ln_moments = Vec::new();
    let mut ln_m = 0.0;
    let mut ln_sum: f64 = 0.0; // the n = 0 term
    let mut prev_ratio = f64::INFINITY;
    let ln_gate = RATIO_GATE.ln();
    let ln_tol = (0.5 * tol).ln();
    let mut n = 0i64;
    for _ in 0..cap {
        // ln of term(n + step) / term(n)
        let ln_ratio = if step > 0 {
            ln_x - ln_psi(n + 1)?
        } else {
            ln_psi(n)? - ln_x
        };
        let ln_term = n as f64 * ln_x - ln_m;
        if n != 0 && ln_ratio < ln_gate && ln_ratio <= prev_ratio {
            let r = ln_ratio.exp();
            let ln_tail = ln_term + ln_ratio - (-r).ln_1p();
            if ln_tail <= ln_tol + ln_sum.max(0.0) {
                return Ok(SideResult {
                    ln_moments,
                    ln_sum,
                    ln_tail,
                });
            }
        }
        prev_ratio = ln_ratio;
        // advance to n + step
        if step > 0 {
            ln_m += ln_psi(n + 1)?;
        } else {
            ln_m -= ln_psi(n)?;
        }
        n += step;
        ln_moments.push(ln_m);
        ln_sum = log_add(ln_sum, n as f64 * ln_x - ln_m);
    }
    Err(Error::DivergentSeries { terms: cap })
}

/// Certified window for `Σ xⁿ/M(n)` at `|x| = modulus`. `tol` is a mixed
/// tolerance: the tail is bounded by `tol · max(1, Σ|terms|)`.
pub fn certify_window(rep: &Representation, modulus: f64, tol: f64, cap: usize) -> Result<LaurentWindow> {
    certify_window_with(&|n| rep.ln_psi_at(n), modulus, tol, cap)
}

/// Same as [`certify_window`] with `ln ψ(n)` supplied directly.
pub fn certify_window_with(
    ln_psi: &dyn Fn(i64) -> Result<f64>,
    modulus: f64,
    tol: f64,
    cap: usize,
) -> Result<LaurentWindow> {
    if !(modulus > 0.0) {
        return Err(Error::ZeroPoint);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    let ln_x = modulus.ln();
    let pos = walk_side(ln_psi, ln_x, 1, tol, cap)?;
    let neg = walk_side(ln_psi, ln_x, -1, tol, cap)?;

    let nmax = pos.ln_moments.len() as i64;
    let nmin = -(neg.ln_moments.len() as i64);
    let mut ln_moments: Vec<f64> = neg.ln_moments.into_iter().rev().collect();
    ln_moments.push(0.0);
    ln_moments.extend(pos.ln_moments);

    // Both sides counted the n = 0 term once.
    let ln_abs_sum = log_add(pos.ln_sum, neg.ln_sum + (-(-neg.ln_sum).exp()).ln_1p());
    Ok(LaurentWindow {
        nmin,
        nmax,
        ln_moments,
        tail_bound: pos.ln_tail.exp() + neg.ln_tail.exp(),
        ln_abs_sum,
    })
}
