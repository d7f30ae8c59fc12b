//! Bargmann-type holomorphic representations for deformed oscillators
//! `a†a = ψ(N)`, `aa† = ψ(N+1)` with two-sided spectrum.
//!
//! - [`algebra`]: ψ-factorials, moments, convergence radii, coherent vectors
//! - [`kernel`]: the reproducing kernel `G(x) = Σ xⁿ/M(n)`
//! - [`weight`]: weights `F` and Mellin transforms `F̂(ρ+1) = ψ(ρ)F̂(ρ)`
//! - [`quadrature`]: moment, Parseval, adjointness and reproducing checks
//! - [`transport`]: correspondence between deformations
//! - [`ring`]: non-existence of weights when coherent states live on a ring

// Negated comparisons are how NaN parameters get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod ring;
pub mod selftest;
pub mod serde_ext;
pub mod series;
pub mod transport;
pub mod weight;

pub use algebra::{
    convergence_radii, Coefficients, CoherentVector, CustomPsi, DeclaredLimits, ExpPoly, FactorialTable, PsiSpec,
    Radii, Representation, RingClass,
};
pub use error::{Error, ErrorClass, Result};
pub use kernel::{kernel_g, kernel_g_q_closed, KernelEval};
pub use quadrature::{QuadratureOptions, QuadratureReport};
pub use weight::{MellinTransform, WeightFunction};
