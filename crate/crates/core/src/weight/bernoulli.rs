//! Bernoulli numbers and polynomials up to degree 64.
//!
//! Numbers come from the exact rational recurrence
//! `Σ_{j=0}^{m} C(m+1, j) B_j = 0` (so `B₁ = −1/2`), and polynomial
//! coefficients `C(k, j) B_{k−j}` are rounded to double only once. Real
//! arguments use compensated Horner evaluation.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 64;

struct Tables {
    numbers: Vec<f64>,
    // poly[k][j] is the coefficient of ρ^j in B_k(ρ)
    poly: Vec<Vec<f64>>,
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exact: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..=MAX_DEGREE {
            let row = binomial_row(m + 1);
            let mut acc = BigRational::zero();
            for (j, b) in exact.iter().enumerate() {
                acc += BigRational::from_integer(row[j].clone()) * b;
            }
            exact.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        let numbers = exact.iter().map(|b| b.to_f64().unwrap_or(f64::NAN)).collect();
        let poly = (0..=MAX_DEGREE)
            .map(|k| {
                let row = binomial_row(k);
                (0..=k)
                    .map(|j| {
                        (BigRational::from_integer(row[j].clone()) * &exact[k - j])
                            .to_f64()
                            .unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect();
        Tables { numbers, poly }
    })
}

fn check_degree(k: usize) -> Result<()> {
    if k > MAX_DEGREE {
        Err(Error::DegreeTooLarge {
            degree: k,
            max: MAX_DEGREE,
        })
    } else {
        Ok(())
    }
}

pub fn bernoulli_number(k: usize) -> Result<f64> {
    check_degree(k)?;
    Ok(tables().numbers[k])
}

/// Coefficients of `B_k` in increasing powers.
pub fn bernoulli_coefficients(k: usize) -> Result<&'static [f64]> {
    check_degree(k)?;
    Ok(&tables().poly[k])
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Horner with error-free transformations; accurate to about one ulp
/// unless the polynomial value itself suffers cancellation beyond `1/ε`.
pub(crate) fn compensated_horner(coeffs: &[f64], x: f64) -> f64 {
    let Some((&last, rest)) = coeffs.split_last() else {
        return 0.0;
    };
    let mut s = last;
    let mut c: f64 = 0.0;
    for &a in rest.iter().rev() {
        let p = s * x;
        let pi = s.mul_add(x, -p);
        let (t, sigma) = two_sum(p, a);
        s = t;
        c = c.mul_add(x, pi + sigma);
    }
    s + c
}

pub fn bernoulli_poly(k: usize, rho: f64) -> Result<f64> {
    Ok(compensated_horner(bernoulli_coefficients(k)?, rho))
}

pub fn bernoulli_poly_complex(k: usize, rho: Complex64) -> Result<Complex64> {
    let coeffs = bernoulli_coefficients(k)?;
    Ok(coeffs.iter().rev().fold(Complex64::default(), |acc, &a| acc * rho + a))
}
