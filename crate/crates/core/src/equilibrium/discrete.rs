//! A direct discretization of the weighted energy problem, used to confirm the
//! closed-form densities independently.
//!
//! `[-1, 1]` is cut into cells with Chebyshev-spaced edges; the measure is
//! piecewise constant on cells. Cell–cell interaction integrals of
//! `log(1/|x-y|)` are exact, the field is integrated per cell, and the
//! stationarity conditions `2 A m + v = ℓ 1`, `Σ m = 1` are solved as one
//! linear system. Cells that come out negative are frozen at zero and the
//! system is solved again.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::EquilibriumParams;
use crate::orthopoly::gauss_legendre;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct DiscreteEquilibrium {
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub ell: f64,
    /// Total-variation distance to the closed-form density, cellwise.
    pub tv_distance: f64,
}

// Second antiderivative of log|u| vanishing at 0.
fn g2(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.abs().ln() - 0.75 * u * u
    }
}

/// `∫_a^b ∫_c^d log|x - y| dy dx`.
fn cell_log_integral(a: f64, b: f64, c: f64, d: f64) -> f64 {
    g2(b - c) - g2(a - c) - g2(b - d) + g2(a - d)
}

/// Solves the discretized problem on `cells` cells and compares with `ψ_{α,ε}`.
pub fn discrete_equilibrium(
    params: &EquilibriumParams,
    cells: usize,
) -> Result<DiscreteEquilibrium> {
    if cells < 4 {
        return Err(Error::param("need at least 4 cells"));
    }
    let n = cells;
    let edges: Vec<f64> = (0..=n)
        .map(|k| -(std::f64::consts::PI * k as f64 / n as f64).cos())
        .collect();
    let width: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    // energy of cell densities m_i / h_i
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = -cell_log_integral(edges[i], edges[i + 1], edges[j], edges[j + 1])
                / (width[i] * width[j]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let rule = gauss_legendre(8, (0.0, 1.0))?;
    let field: Vec<f64> = (0..n)
        .map(|i| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&s, &w)| w * params.field(edges[i] + width[i] * s))
                .sum()
        })
        .collect();

    let mut active = vec![true; n];
    let mut masses = vec![0.0; n];
    let mut ell = 0.0;
    for _ in 0..n {
        let idx: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let k = idx.len();
        let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
        let mut rhs = DVector::<f64>::zeros(k + 1);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                m[(r, c)] = 2.0 * a[(i, j)];
            }
            m[(r, k)] = -1.0;
            m[(k, r)] = 1.0;
            rhs[r] = -field[i];
        }
        rhs[k] = 1.0;
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::numerical("singular discrete equilibrium system"))?;
        masses.iter_mut().for_each(|v| *v = 0.0);
        for (r, &i) in idx.iter().enumerate() {
            masses[i] = sol[r];
        }
        ell = sol[k];
        let negative: Vec<usize> = idx.iter().copied().filter(|&i| masses[i] < 0.0).collect();
        if negative.is_empty() {
            break;
        }
        for i in negative {
            active[i] = false;
        }
    }

    let exact = gauss_legendre(16, (0.0, 1.0))?;
    let tv = 0.5
        * (0..n)
            .map(|i| {
                let th0 = std::f64::consts::PI * (n - i) as f64 / n as f64;
                let th1 = std::f64::consts::PI * (n - i - 1) as f64 / n as f64;
                // cell mass of ψ in the cos θ variable
                let cell: f64 = exact
                    .nodes
                    .iter()
                    .zip(&exact.weights)
                    .map(|(&s, &w)| {
                        let th = th1 + (th0 - th1) * s;
                        w * (th0 - th1) * params.density(th.cos()) * th.sin()
                    })
                    .sum();
                (masses[i] - cell).abs()
            })
            .sum::<f64>();
    Ok(DiscreteEquilibrium {
        edges,
        masses,
        ell,
        tv_distance: tv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::eps_alpha;

    #[test]
    fn cell_integral_diagonal_is_self_energy() {
        let h: f64 = 0.1;
        let v = cell_log_integral(0.0, h, 0.0, h) / (h * h);
        assert!((v - (h.ln() - 1.5)).abs() < 1e-14);
    }

    #[test]
    fn discrete_solution_matches_closed_form() {
        for (alpha, frac) in [(1.0, 0.0), (1.3, 0.5), (1.1, -0.5)] {
            let p = EquilibriumParams::new(alpha, frac * eps_alpha(alpha)).unwrap();
            let d = discrete_equilibrium(&p, 200).unwrap();
            assert!((d.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(
                d.tv_distance <= 2e-2,
                "({alpha},{frac}): tv {}",
                d.tv_distance
            );
        }
    }
}
