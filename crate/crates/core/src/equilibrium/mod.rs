//! Equilibrium measures on `[-1, 1]` for the external fields
//! `V_{α,ε}(x) = V(x/α) + εx`, their logarithmic potentials, and the phase
//! function `ξ` whose real part controls the lens jumps on ellipses.

mod discrete;
mod potential;
mod xi;

use std::f64::consts::PI;

use serde::Serialize;

use crate::{Error, Result};

pub use discrete::{discrete_equilibrium, DiscreteEquilibrium};
pub use potential::{
    log_potential, normalization, verify_variational, Angular, Density, EquilibriumReport,
    VariationalSample,
};
pub use xi::{
    ellipse_point, min_re_xi_on_ellipse, phi_conformal, re_xi_radial, rho_analytic, rho_derivative,
    xi, XiReport, XI_THETA_SAMPLES,
};

/// Field parameters `α ≥ 1` and `|ε| ≤ ε_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquilibriumParams {
    pub alpha: f64,
    pub eps: f64,
}

/// `ε_α = 2√(1 - α⁻²)`.
pub fn eps_alpha(alpha: f64) -> f64 {
    2.0 * (1.0 - 1.0 / (alpha * alpha)).max(0.0).sqrt()
}

impl EquilibriumParams {
    pub fn new(alpha: f64, eps: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::param(format!("α must be ≥ 1, got {alpha}")));
        }
        if !eps.is_finite() {
            return Err(Error::param("ε must be finite"));
        }
        let bound = eps_alpha(alpha);
        if eps.abs() > bound {
            return Err(Error::param(format!(
                "|ε| = {} exceeds ε_α = {bound}; the density would turn negative",
                eps.abs()
            )));
        }
        Ok(Self { alpha, eps })
    }

    pub fn eps_alpha(&self) -> f64 {
        eps_alpha(self.alpha)
    }

    /// `V_{α,ε}(x)`.
    pub fn field(&self, x: f64) -> f64 {
        crate::weights::v_unchecked(x / self.alpha) + self.eps * x
    }

    /// `ψ_{α,ε}(x)`; see [`psi_alpha_eps`].
    pub fn density(&self, x: f64) -> f64 {
        density_unchecked(self.alpha, self.eps, x)
    }
}

fn check_open(x: f64) -> Result<()> {
    if !(x.abs() < 1.0) {
        return Err(Error::domain(format!("density needs |x| < 1, got {x}")));
    }
    Ok(())
}

fn density_unchecked(alpha: f64, eps: f64, x: f64) -> f64 {
    if alpha == 1.0 {
        return 0.5;
    }
    let c = (alpha * alpha - 1.0).sqrt();
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    (2.0 * c - alpha * eps * x) / (2.0 * alpha * PI * s) + s.atan2(c) / (alpha * PI)
}

/// Equilibrium density `ψ_{α,ε}(x)` of `V_{α,ε}` on `(-1, 1)`.
pub fn psi_alpha_eps(params: &EquilibriumParams, x: f64) -> Result<f64> {
    check_open(x)?;
    Ok(params.density(x))
}

/// `ψ_{α,0}(x)` from its own closed form (the `ε = 0` balayage formula).
pub fn psi_alpha_0(alpha: f64, x: f64) -> Result<f64> {
    check_open(x)?;
    if alpha < 1.0 {
        return Err(Error::param(format!("α must be ≥ 1, got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(0.5);
    }
    let c = (alpha * alpha - 1.0).sqrt();
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    Ok(1.0 / (2.0 * alpha) + (c - s * c.atan2(s)) / (alpha * PI * s))
}

/// Density `x / (π√(1-x²))` of the signed measure whose potential is `x`.
pub fn nu_density(x: f64) -> f64 {
    x / (PI * ((1.0 - x) * (1.0 + x)).sqrt())
}

/// Arcsine density `1 / (π√(1-x²))`.
pub fn arcsine_density(x: f64) -> f64 {
    1.0 / (PI * ((1.0 - x) * (1.0 + x)).sqrt())
}

/// `ψ_{α,ε}(0)`, the same for every admissible `ε`.
pub fn psi_at_zero(alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::param(format!("α must be ≥ 1, got {alpha}")));
    }
    let c = (alpha * alpha - 1.0).sqrt();
    Ok(1.0 / (2.0 * alpha) + (c - c.atan()) / (alpha * PI))
}

/// Limits `c±_α` of the diagonal of the comparison kernels:
/// `c⁺ = ψ_{α,0}(0)`, `c⁻ = α² ψ_{α,0}(0)`.
pub fn c_alpha(sign: crate::weights::Sign, alpha: f64) -> Result<f64> {
    let p = psi_at_zero(alpha)?;
    Ok(match sign {
        crate::weights::Sign::Plus => p,
        crate::weights::Sign::Minus => alpha * alpha * p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;
    use crate::weights::Sign;

    #[test]
    fn flat_density_at_alpha_one() {
        let p = EquilibriumParams::new(1.0, 0.0).unwrap();
        for x in linspace(-0.999, 0.999, 17) {
            assert_eq!(psi_alpha_eps(&p, x).unwrap(), 0.5);
        }
        assert!(EquilibriumParams::new(1.0, 0.1).is_err());
        assert!(psi_alpha_eps(&p, 1.0).is_err());
    }

    #[test]
    fn value_at_zero_is_independent_of_eps() {
        for alpha in [1.1, 1.3, 2.0] {
            let e = eps_alpha(alpha);
            let want = psi_at_zero(alpha).unwrap();
            for eps in [-e, -0.3 * e, 0.0, 0.7 * e, e] {
                let p = EquilibriumParams::new(alpha, eps).unwrap();
                assert!((p.density(0.0) - want).abs() < 1e-15);
            }
            assert!((psi_alpha_0(alpha, 0.0).unwrap() - want).abs() < 1e-15);
        }
        assert!((psi_at_zero(1.0).unwrap() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn psi_at_zero_decreases_in_alpha() {
        let vals: Vec<f64> = linspace(1.0, 2.0, 11)
            .into_iter()
            .map(|a| psi_at_zero(a).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn c_alpha_brackets_one_half() {
        for alpha in [1.05, 1.1, 1.2] {
            let lo = c_alpha(Sign::Plus, alpha).unwrap();
            let hi = c_alpha(Sign::Minus, alpha).unwrap();
            assert!(lo <= 0.5 && 0.5 <= hi, "{alpha}: {lo} {hi}");
        }
        assert_eq!(c_alpha(Sign::Plus, 1.0).unwrap(), 0.5);
        assert_eq!(c_alpha(Sign::Minus, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn eps_shift_is_a_multiple_of_nu() {
        for (alpha, frac) in [(1.2, 0.4), (1.7, -0.9)] {
            let eps = frac * eps_alpha(alpha);
            let p = EquilibriumParams::new(alpha, eps).unwrap();
            for x in linspace(-0.98, 0.98, 25) {
                let lhs = p.density(x);
                let rhs = psi_alpha_0(alpha, x).unwrap() - 0.5 * eps * nu_density(x);
                assert!((lhs - rhs).abs() < 1e-12, "x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn positivity_threshold() {
        let alpha = 1.3;
        let e = eps_alpha(alpha);
        let p = EquilibriumParams::new(alpha, e).unwrap();
        assert!(linspace(-0.999_999, 0.999_999, 201)
            .into_iter()
            .all(|x| p.density(x) >= 0.0));
        // density vanishes at the right endpoint when ε = ε_α
        let mut prev = f64::INFINITY;
        for k in 2..=6 {
            let v = p.density(1.0 - 10f64.powi(-k));
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 2e-3);
        // just past the threshold the formula goes negative near x = 1
        assert!(density_unchecked(alpha, 1.05 * e, 0.999_999) < 0.0);
        assert!(EquilibriumParams::new(alpha, 1.05 * e).is_err());
    }
}
