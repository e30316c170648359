//! Conditional orthogonal polynomial ensembles of rigid point processes.
//!
//! A configuration `… < p₋₁ < 0 ≤ p₀ < p₁ < …` on the line induces, on the
//! window `[-R, R]`, the weight `ρ_R(t) = ∏_{|pₙ|>R} (1 - t/pₙ)²`. The points
//! inside the window then form an orthogonal polynomial ensemble for that
//! weight. This crate builds those ensembles numerically, evaluates their
//! Christoffel–Darboux kernels and compares them with the sine kernel, together
//! with the comparison weights, equilibrium measures and contour bounds that
//! control the limit.
//!
//! Module map:
//!
//! * [`pointconf`]: configurations (finite window plus exact lattice tail),
//!   `N(R)`, `ε_R` and assumption diagnostics.
//! * [`sampler`]: finite-window sine-process sampling.
//! * [`weights`]: `ρ_R`, `w_R`, the field `V`, comparison weights and their
//!   inequality checks.
//! * [`orthopoly`]: quadrature, discretized Stieltjes recurrences and kernels.
//! * [`equilibrium`]: equilibrium densities, logarithmic potentials, the
//!   `ξ` contour bound.
//! * [`universality`] and [`expfield`]: the end-to-end kernel experiments.
//! * [`cli`]: the `rkl` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod equilibrium;
mod error;
pub mod expfield;
pub mod numerics;
pub mod orthopoly;
pub mod pointconf;
pub mod sampler;
pub mod universality;
pub mod weights;

pub use error::{Error, Result};
