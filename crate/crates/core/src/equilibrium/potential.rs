//! Logarithmic potentials `U(x) = ∫ log(1/|x-t|) ρ(t) dt` of densities on
//! `[-1, 1]`, and the variational check `2U + V = ℓ`.
//!
//! With `t = cos θ` the endpoint factors `(1-t²)^{∓1/2}` become smooth, and
//! `x - cos θ = 2 sin((θ+θ₀)/2) sin((θ-θ₀)/2)` for `x = cos θ₀` is evaluated
//! from the offset `θ - θ₀` directly. Each side of `θ₀` is integrated with
//! Gauss–Legendre after the graded substitution `θ = θ₀ ± L s^q`, which turns
//! the logarithmic singularity into an `s^{q-1} log s` factor.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use super::EquilibriumParams;
use crate::numerics::CompensatedSum;
use crate::orthopoly::{gauss_legendre, Quadrature};
use crate::{Error, Result};

const GRADING: i32 = 6;
const SIDE_NODES: usize = 96;
const SIDE_PANELS: usize = 2;

fn unit_rule() -> &'static Quadrature {
    static RULE: OnceLock<Quadrature> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(SIDE_NODES, (0.0, 1.0)).expect("fixed order"))
}

/// `log |cos θ₀ - cos(θ₀ + d)|`.
fn log_cos_gap(theta0: f64, d: f64) -> f64 {
    let a = (theta0 + 0.5 * d).sin();
    let b = (0.5 * d).sin();
    (2.0 * a * b).abs().ln()
}

/// A density on `[-1, 1]`, possibly with `(1-t²)^{-1/2}` endpoint growth.
pub trait Density {
    fn density(&self, t: f64) -> f64;

    /// `density(cos θ) sin θ`; override when it can be evaluated without
    /// forming `1 - cos²θ`, which loses everything for tiny `θ`.
    fn angular(&self, theta: f64) -> f64 {
        self.density(theta.cos()) * theta.sin()
    }
}

impl<F: Fn(f64) -> f64> Density for F {
    fn density(&self, t: f64) -> f64 {
        self(t)
    }
}

/// A density given through its angular form `θ ↦ ρ(cos θ) sin θ`.
#[derive(Clone, Copy, Debug)]
pub struct Angular<F>(pub F);

impl<F: Fn(f64) -> f64> Density for Angular<F> {
    fn density(&self, t: f64) -> f64 {
        (self.0)(t.acos()) / ((1.0 - t) * (1.0 + t)).sqrt()
    }

    fn angular(&self, theta: f64) -> f64 {
        (self.0)(theta)
    }
}

impl Density for EquilibriumParams {
    fn density(&self, t: f64) -> f64 {
        EquilibriumParams::density(self, t)
    }

    fn angular(&self, theta: f64) -> f64 {
        let (alpha, eps) = (self.alpha, self.eps);
        if alpha == 1.0 {
            return 0.5 * theta.sin();
        }
        let c = (alpha * alpha - 1.0).sqrt();
        let s = theta.sin();
        let pi = std::f64::consts::PI;
        (2.0 * c - alpha * eps * theta.cos()) / (2.0 * alpha * pi) + s * s.atan2(c) / (alpha * pi)
    }
}

/// `U(x) = ∫_{-1}^{1} log(1/|x-t|) ρ(t) dt` for `x ∈ [-1, 1]`.
pub fn log_potential(density: &impl Density, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(format!(
            "potential evaluated at |x| > 1: {x}"
        )));
    }
    let theta0 = x.clamp(-1.0, 1.0).acos();
    let rule = unit_rule();
    let mut acc = CompensatedSum::new();
    let q = GRADING as f64;
    for (len, dir) in [(std::f64::consts::PI - theta0, 1.0), (theta0, -1.0)] {
        if len <= 0.0 {
            continue;
        }
        let h = 1.0 / SIDE_PANELS as f64;
        for p in 0..SIDE_PANELS {
            let s0 = p as f64 * h;
            for (&node, &w) in rule.nodes.iter().zip(&rule.weights) {
                let s = s0 + h * node;
                let d = dir * len * s.powi(GRADING);
                let theta = theta0 + d;
                let jac = q * len * s.powi(GRADING - 1) * h;
                let f = density.angular(theta);
                acc.add(-w * jac * f * log_cos_gap(theta0, d));
            }
        }
    }
    Ok(acc.value())
}

/// `∫ density` over `[-1, 1]`, in the `cos θ` variable.
pub fn normalization(density: &impl Density) -> f64 {
    static RULE: OnceLock<Quadrature> = OnceLock::new();
    let rule =
        RULE.get_or_init(|| gauss_legendre(256, (0.0, std::f64::consts::PI)).expect("fixed order"));
    rule.integrate(|th| density.angular(th))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VariationalSample {
    pub x: f64,
    pub psi: f64,
    /// `2U(x) + V_{α,ε}(x)`.
    pub two_u_plus_v: f64,
}

/// Summary of `2U^μ + V_{α,ε}` for the closed-form equilibrium density.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumReport {
    pub params: EquilibriumParams,
    pub normalization: f64,
    pub ell_estimate: f64,
    pub max_variational_deviation: f64,
    pub density_min: f64,
    pub grid: Vec<VariationalSample>,
}

/// Evaluates `2U + V` on `grid ⊂ (-1, 1)`; `ℓ` is estimated by the median.
pub fn verify_variational(params: &EquilibriumParams, grid: &[f64]) -> Result<EquilibriumReport> {
    if grid.is_empty() {
        return Err(Error::param("empty grid"));
    }
    let samples: Vec<VariationalSample> = grid
        .par_iter()
        .map(|&x| {
            let psi = super::psi_alpha_eps(params, x)?;
            let u = log_potential(params, x)?;
            Ok(VariationalSample {
                x,
                psi,
                two_u_plus_v: 2.0 * u + params.field(x),
            })
        })
        .collect::<Result<_>>()?;
    let mut vals: Vec<f64> = samples.iter().map(|s| s.two_u_plus_v).collect();
    vals.sort_by(f64::total_cmp);
    let m = vals.len();
    let ell = if m % 2 == 1 {
        vals[m / 2]
    } else {
        0.5 * (vals[m / 2 - 1] + vals[m / 2])
    };
    Ok(EquilibriumReport {
        params: *params,
        normalization: normalization(params),
        ell_estimate: ell,
        max_variational_deviation: vals.iter().map(|v| (v - ell).abs()).fold(0.0, f64::max),
        density_min: samples.iter().map(|s| s.psi).fold(f64::INFINITY, f64::min),
        grid: samples,
    })
}

/// `∫ g` over `[a, b]` by composite Gauss–Legendre, for test oracles.
#[cfg(test)]
pub(crate) fn composite(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20, (0.0, 1.0)).unwrap();
    let h = (b - a) / panels as f64;
    crate::numerics::csum((0..panels).flat_map(|p| {
        let lo = a + p as f64 * h;
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&s, &w)| w * h * g(lo + h * s))
            .collect::<Vec<_>>()
    }))
}
