//! Bulk scaling limits for the exponential field weights
//! `(1-t²)^γ e^{-N V_{α,ε}(t)}`, `γ = ±1/2`, and for the comparison weights
//! `w±_{R,α}` built from them.

use serde::Serialize;

use crate::equilibrium::{c_alpha, EquilibriumParams};
use crate::orthopoly::{stieltjes_checked, RecurrenceCoeffs};
use crate::universality::{default_quad_order, sine_kernel};
use crate::weights::{JacobiExponent, Sign, WeightSpec};
use crate::{Error, Result};

fn build(weight: WeightSpec, n: usize, quad_order: Option<usize>) -> Result<RecurrenceCoeffs> {
    let order = quad_order.unwrap_or_else(|| default_quad_order(n));
    let desc = weight.to_string();
    let coeffs = stieltjes_checked(weight.validated()?.into_weight(), n, order)?;
    if !coeffs.is_stable() {
        return Err(Error::numerical(format!(
            "{desc}: coefficients moved by {:.3e} when the quadrature order was doubled",
            coeffs.stability.unwrap_or(f64::NAN)
        )));
    }
    Ok(coeffs)
}

/// Kernel of `(1-t²)^γ e^{-N V_{α,ε}}` in bulk scaling around `x0`.
#[derive(Clone, Debug)]
pub struct ExpFieldKernel {
    pub params: EquilibriumParams,
    pub n: usize,
    pub exponent: JacobiExponent,
    pub x0: f64,
    /// `ψ_{α,ε}(x0)`.
    pub density: f64,
    pub coeffs: RecurrenceCoeffs,
}

impl ExpFieldKernel {
    pub fn build(
        alpha: f64,
        eps: f64,
        n: usize,
        exponent: JacobiExponent,
        x0: f64,
        quad_order: Option<usize>,
    ) -> Result<Self> {
        let params = EquilibriumParams::new(alpha, eps)?;
        if eps.abs() >= params.eps_alpha() && alpha > 1.0 {
            return Err(Error::param(format!(
                "|ε| must be below ε_α = {}",
                params.eps_alpha()
            )));
        }
        if !(x0.abs() < 1.0) {
            return Err(Error::param(format!("x0 must lie in (-1, 1), got {x0}")));
        }
        if n == 0 {
            return Err(Error::param("N must be at least 1"));
        }
        let coeffs = build(
            WeightSpec::ExpField {
                alpha,
                eps,
                n,
                exponent,
            },
            n,
            quad_order,
        )?;
        Ok(Self {
            params,
            n,
            exponent,
            x0,
            density: params.density(x0),
            coeffs,
        })
    }

    /// `(1/(ψN)) K_N(x0 + x/(ψN), x0 + y/(ψN))`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let scale = self.density * self.n as f64;
        let (u, v) = (self.x0 + x / scale, self.x0 + y / scale);
        if !(u.abs() < 1.0 && v.abs() < 1.0) {
            return Err(Error::domain(format!(
                "rescaled arguments ({u}, {v}) leave (-1, 1)"
            )));
        }
        Ok(self.coeffs.cd_kernel(self.n, u, v, true)? / scale)
    }

    /// `|eval(x, y) - sine(x, y)|`.
    pub fn error(&self, x: f64, y: f64) -> Result<f64> {
        Ok((self.eval(x, y)? - sine_kernel(x, y)).abs())
    }
}

/// Bulk-rescaled kernel of `(1-t²)^γ e^{-N V_{α,ε}}` at `x0`.
#[allow(clippy::too_many_arguments)]
pub fn expfield_kernel(
    alpha: f64,
    eps: f64,
    n: usize,
    exponent: JacobiExponent,
    x0: f64,
    x: f64,
    y: f64,
    quad_order: Option<usize>,
) -> Result<f64> {
    ExpFieldKernel::build(alpha, eps, n, exponent, x0, quad_order)?.eval(x, y)
}

/// `sin(πc(x-y)) / (π(x-y))`, equal to `c` on the diagonal.
pub fn scaled_sine(c: f64, x: f64, y: f64) -> f64 {
    c * sine_kernel(c * x, c * y)
}

/// `(1/N) K_N(x/N, y/N; w±_{R,α})` with field parameter `eps`, against the
/// limit `sin(πc±(x-y))/(π(x-y))`. Returns `(value, limit)`.
pub fn prop22b_check(
    sign: Sign,
    alpha: f64,
    eps: f64,
    n: usize,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let coeffs = comparison_coeffs(sign, alpha, eps, n)?;
    let nf = n as f64;
    let value = coeffs.cd_kernel(n, x / nf, y / nf, true)? / nf;
    Ok((value, scaled_sine(c_alpha(sign, alpha)?, x, y)))
}

/// Orthonormal system of `w±_{R,α}` with field parameter `eps`.
pub fn comparison_coeffs(sign: Sign, alpha: f64, eps: f64, n: usize) -> Result<RecurrenceCoeffs> {
    let weight = match sign {
        Sign::Plus => WeightSpec::ComparisonPlus { alpha, eps, n },
        Sign::Minus => WeightSpec::ComparisonMinus { alpha, eps, n },
    };
    build(weight, n, None)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalingSample {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub kernel: f64,
    pub sine: f64,
    pub abs_err: f64,
}

/// Rescaled kernel against the sine kernel for every `N` and test pair.
pub fn expfield_sweep(
    params: EquilibriumParams,
    exponent: JacobiExponent,
    x0: f64,
    sizes: &[usize],
    pairs: &[(f64, f64)],
) -> Result<Vec<ScalingSample>> {
    use rayon::prelude::*;
    let per_n = sizes
        .par_iter()
        .map(|&n| {
            let k = ExpFieldKernel::build(params.alpha, params.eps, n, exponent, x0, None)?;
            pairs
                .iter()
                .map(|&(x, y)| {
                    let kernel = k.eval(x, y)?;
                    let sine = sine_kernel(x, y);
                    Ok(ScalingSample {
                        n,
                        x,
                        y,
                        kernel,
                        sine,
                        abs_err: (kernel - sine).abs(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_n.into_iter().flatten().collect())
}
