//! The phase function `ξ(z) = ∫_1^z ρ(s) / (s²-1)^{1/2} ds` of the scaled
//! density `ρ(x) = 2π√(1-x²) ψ_{α,ε}(x)`, and its real part on the ellipses
//! `Γ_τ = {|φ(z)| = τ}` of the conformal map `φ(z) = z + (z²-1)^{1/2}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::EquilibriumParams;
use crate::numerics::linspace;
use crate::orthopoly::{gauss_legendre, Quadrature};
use crate::{Error, Result};

/// Number of `θ` samples on an ellipse.
pub const XI_THETA_SAMPLES: usize = 720;
const RADIAL_SAMPLES: usize = 41;

// atan(√w)/√w, analytic off (-∞, -1]
fn atan_sqrt_ratio(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..8 {
            sum += term / (2 * k + 1) as f64;
            term *= -w;
        }
        sum
    } else {
        let r = w.sqrt();
        r.atan() / r
    }
}

// derivative of atan(√w)/√w
fn atan_sqrt_ratio_prime(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 1..9 {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sum += pow * (sign * k as f64 / (2 * k + 1) as f64);
            pow *= w;
        }
        sum
    } else {
        (0.5 / (1.0 + w) - 0.5 * atan_sqrt_ratio(w)) / w
    }
}

fn require_alpha(params: &EquilibriumParams) -> Result<f64> {
    if !(params.alpha > 1.0) {
        return Err(Error::param("ξ needs α > 1"));
    }
    Ok((params.alpha * params.alpha - 1.0).sqrt())
}

/// Analytic continuation of `ρ(s) = ε_α - εs + (2/α)√(1-s²) arctan(√(1-s²)/√(α²-1))`
/// to `ℂ \ ((-∞, -α] ∪ [α, ∞))`.
pub fn rho_analytic(params: &EquilibriumParams, s: Complex64) -> Result<Complex64> {
    let c = require_alpha(params)?;
    Ok(rho_inner(params, c, s))
}

fn rho_inner(params: &EquilibriumParams, c: f64, s: Complex64) -> Complex64 {
    let u = 1.0 - s * s;
    let w = u / (c * c);
    // √u·arctan(√u/c) = (u/c)·atan(√w)/√w
    params.eps_alpha() - params.eps * s + (2.0 / params.alpha) * (u / c) * atan_sqrt_ratio(w)
}

/// `ρ'(s)` of the continuation.
pub fn rho_derivative(params: &EquilibriumParams, s: Complex64) -> Result<Complex64> {
    let c = require_alpha(params)?;
    let u = 1.0 - s * s;
    let w = u / (c * c);
    let d = atan_sqrt_ratio(w) / c + u / (c * c * c) * atan_sqrt_ratio_prime(w);
    Ok(-params.eps + (2.0 / params.alpha) * (-2.0 * s) * d)
}

/// `φ(z) = z + (z²-1)^{1/2}` with the root analytic off `[-1, 1]`.
pub fn phi_conformal(z: Complex64) -> Complex64 {
    z + (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// The point of `Γ_τ` with `φ(z) = τ e^{iθ}`.
pub fn ellipse_point(tau: f64, theta: f64) -> Complex64 {
    let w = Complex64::from_polar(tau, theta);
    0.5 * (w + 1.0 / w)
}

fn segment_rule() -> &'static Quadrature {
    static RULE: std::sync::OnceLock<Quadrature> = std::sync::OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16, (0.0, 1.0)).expect("fixed order"))
}

fn panel(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let rule = segment_rule();
    let h = b - a;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| f(a + h * s) * (w * h))
        .sum()
}

fn adaptive(
    f: &impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let both = left + right;
    if depth == 0 || (both - whole).norm() <= tol {
        return both;
    }
    adaptive(f, a, m, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, right, 0.5 * tol, depth - 1)
}

/// `ξ(z)` along the segment from `1` to `z`.
///
/// For real `z < 1` the value is the limit from the upper half plane.
pub fn xi(params: &EquilibriumParams, z: Complex64) -> Result<Complex64> {
    let c = require_alpha(params)?;
    if z.re.abs() >= params.alpha && z.im == 0.0 {
        return Err(Error::domain(format!("z = {z} lies on a cut of ρ")));
    }
    let z = if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    if z == Complex64::new(1.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // s = 1 + (z-1)u² removes the inverse square root at s = 1
    let dz = z - 1.0;
    let root = dz.sqrt();
    let integrand = |u: f64| {
        let s = 1.0 + dz * (u * u);
        2.0 * root * rho_inner(params, c, s) / (s + 1.0).sqrt()
    };
    let whole = panel(&integrand, 0.0, 1.0);
    Ok(adaptive(&integrand, 0.0, 1.0, whole, 1e-13, 30))
}

/// `Re ξ` on `Γ_τ` from the radial integral `Re ∫_1^τ ρ(½(re^{iθ}+e^{-iθ}/r)) dr/r`.
///
/// `Re ξ` vanishes on the image `[-1, 1]` of the unit circle and the integrand
/// is smooth inside `Γ_τ`, so a fixed Gauss rule suffices.
pub fn re_xi_radial(params: &EquilibriumParams, tau: f64, theta: f64) -> Result<f64> {
    let c = require_alpha(params)?;
    Ok(radial(
        params,
        c,
        &gauss_legendre(RADIAL_NODES, (1.0, tau))?,
        theta,
    ))
}

const RADIAL_NODES: usize = 40;

fn radial(params: &EquilibriumParams, c: f64, rule: &Quadrature, theta: f64) -> f64 {
    rule.integrate(|r| {
        let w = Complex64::from_polar(r, theta);
        let s = 0.5 * (w + 1.0 / w);
        rho_inner(params, c, s).re / r
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct XiReport {
    pub tau: f64,
    pub min_re_xi: f64,
    pub argmin_theta: f64,
    /// Sampled `max |ρ'|` over the closed interior of `Γ_τ`.
    pub m_bound: f64,
    /// `(ε_α - |ε|) log τ - M (τ-1)²`.
    pub lower_bound: f64,
}

impl XiReport {
    pub fn positive(&self) -> bool {
        self.min_re_xi > 0.0
    }

    pub fn bound_holds(&self) -> bool {
        self.min_re_xi >= self.lower_bound
    }
}

/// Minimum of `Re ξ` over `Γ_τ` and the lower bound built from the sampled
/// derivative bound `M`.
pub fn min_re_xi_on_ellipse(params: &EquilibriumParams, tau: f64) -> Result<XiReport> {
    let c = require_alpha(params)?;
    let tau_max = params.alpha + c;
    if !(tau > 1.0 && tau < tau_max) {
        return Err(Error::param(format!(
            "τ must lie in (1, φ(α)) = (1, {tau_max}), got {tau}"
        )));
    }
    let thetas: Vec<f64> = (0..XI_THETA_SAMPLES)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / XI_THETA_SAMPLES as f64)
        .collect();
    let rule = gauss_legendre(RADIAL_NODES, (1.0, tau))?;
    let re: Vec<f64> = thetas
        .par_iter()
        .map(|&th| radial(params, c, &rule, th))
        .collect();
    let (k, &min) = re
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let m_bound = linspace(1.0, tau, RADIAL_SAMPLES)
        .par_iter()
        .map(|&r| {
            thetas
                .iter()
                .map(|&th| {
                    let w = Complex64::from_polar(r, th);
                    rho_derivative(params, 0.5 * (w + 1.0 / w))
                        .map(|d| d.norm())
                        .unwrap_or(f64::INFINITY)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let lower_bound =
        (params.eps_alpha() - params.eps.abs()) * tau.ln() - m_bound * (tau - 1.0).powi(2);
    Ok(XiReport {
        tau,
        min_re_xi: min,
        argmin_theta: thetas[k],
        m_bound,
        lower_bound,
    })
}
