//! Gauss rules: Legendre by Golub–Welsch with Newton polishing, and the two
//! Chebyshev rules in closed form.

use crate::{Error, Result};

/// A quadrature rule on `interval`. Nodes are strictly increasing and interior.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

/// The endpoint factor a Gauss rule integrates exactly, written in the
/// variable `s ∈ [-1, 1]` affinely mapped from the interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    /// `1`
    Legendre,
    /// `(1 - s²)^{-1/2}`
    ChebyshevFirst,
    /// `(1 - s²)^{1/2}`
    ChebyshevSecond,
}

impl Endpoint {
    /// `log (1 - s²)^γ` at `t`, `s` being `t` mapped to `[-1, 1]`.
    pub fn log_factor(self, t: f64, interval: (f64, f64)) -> f64 {
        let (lo, hi) = interval;
        let s = (2.0 * t - lo - hi) / (hi - lo);
        let one_minus_s2 = (1.0 - s) * (1.0 + s);
        match self {
            Endpoint::Legendre => 0.0,
            Endpoint::ChebyshevFirst => -0.5 * one_minus_s2.ln(),
            Endpoint::ChebyshevSecond => 0.5 * one_minus_s2.ln(),
        }
    }

    pub fn rule(self, order: usize, interval: (f64, f64)) -> Result<Quadrature> {
        match self {
            Endpoint::Legendre => gauss_legendre(order, interval),
            Endpoint::ChebyshevFirst => gauss_chebyshev_first(order, interval),
            Endpoint::ChebyshevSecond => gauss_chebyshev_second(order, interval),
        }
    }
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        crate::numerics::csum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(x)),
        )
    }

    fn mapped(nodes: Vec<f64>, weights: Vec<f64>, interval: (f64, f64)) -> Self {
        let (lo, hi) = interval;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        Quadrature {
            nodes: nodes.into_iter().map(|s| mid + half * s).collect(),
            weights: weights.into_iter().map(|w| w * half).collect(),
            interval,
        }
    }
}

fn check_interval(order: usize, interval: (f64, f64)) -> Result<()> {
    if order == 0 {
        return Err(Error::param("quadrature order must be at least 1"));
    }
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(format!(
            "bad quadrature interval [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Eigenvalues and squared first eigenvector components of the symmetric
/// tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() - 1`). Implicit QL with Wilkinson shifts.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    // first row of the accumulated rotation matrix
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::numerical(
                    "tridiagonal QL iteration did not converge",
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok((
        idx.iter().map(|&i| d[i]).collect(),
        idx.iter().map(|&i| z[i] * z[i]).collect(),
    ))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule of `order` nodes on `interval`, exact for polynomials
/// of degree `2·order - 1`.
///
/// Nodes come from the eigenvalues of the Legendre Jacobi matrix, are then
/// polished by Newton steps on `P_order`, and the weights are recomputed from
/// `2 / ((1 - x²) P'(x)²)`.
pub fn gauss_legendre(order: usize, interval: (f64, f64)) -> Result<Quadrature> {
    check_interval(order, interval)?;
    let n = order;
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (mut nodes, _) = tridiagonal_eigen(&diag, &off)?;
    let mut weights = vec![0.0; n];
    for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        for _ in 0..3 {
            let (p, dp) = legendre_with_derivative(n, *x);
            let step = p / dp;
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, *x);
        *w = 2.0 / ((1.0 - *x * *x) * dp * dp);
    }
    // exact reflection symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(Quadrature::mapped(nodes, weights, interval))
}

/// Gauss rule for `(1 - s²)^{-1/2}` on `interval` (weights include the
/// Jacobian of the affine map, so `Σ wᵢ = π (hi - lo)/2`).
pub fn gauss_chebyshev_first(order: usize, interval: (f64, f64)) -> Result<Quadrature> {
    check_interval(order, interval)?;
    let n = order as f64;
    let nodes: Vec<f64> = (1..=order)
        .rev()
        .map(|k| ((2.0 * k as f64 - 1.0) * std::f64::consts::PI / (2.0 * n)).cos())
        .collect();
    let weights = vec![std::f64::consts::PI / n; order];
    Ok(Quadrature::mapped(nodes, weights, interval))
}

/// Gauss rule for `(1 - s²)^{1/2}` on `interval`.
pub fn gauss_chebyshev_second(order: usize, interval: (f64, f64)) -> Result<Quadrature> {
    check_interval(order, interval)?;
    let n1 = order as f64 + 1.0;
    let (nodes, weights): (Vec<f64>, Vec<f64>) = (1..=order)
        .rev()
        .map(|k| {
            let th = k as f64 * std::f64::consts::PI / n1;
            (th.cos(), std::f64::consts::PI / n1 * th.sin().powi(2))
        })
        .unzip();
    Ok(Quadrature::mapped(nodes, weights, interval))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_is_midpoint() {
        let q = gauss_legendre(1, (-1.0, 1.0)).unwrap();
        assert_eq!(q.nodes, vec![0.0]);
        assert!((q.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn order_two_integrates_cubics() {
        let q = gauss_legendre(2, (-1.0, 1.0)).unwrap();
        assert!((q.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-15);
        assert!(q.integrate(|x| x * x * x).abs() < 1e-15);
    }

    #[test]
    fn high_order_rule_is_symmetric_and_sums_to_length() {
        let q = gauss_legendre(64, (-1.0, 1.0)).unwrap();
        for i in 0..32 {
            assert!((q.nodes[i] + q.nodes[63 - i]).abs() < 1e-14);
        }
        assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
        let total: f64 = q.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        let q = gauss_legendre(37, (0.0, 3.0)).unwrap();
        assert!((q.weights.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        assert!((q.integrate(|x| x.powi(73)) - 3f64.powi(74) / 74.0).abs() < 1e-12 * 3f64.powi(74));
    }

    #[test]
    fn large_rule_matches_exponential_integral() {
        let q = gauss_legendre(1024, (-1.0, 1.0)).unwrap();
        let exact = 1f64.exp() - (-1f64).exp();
        assert!((q.integrate(f64::exp) - exact).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_rules_are_exact_on_monomials() {
        // ∫ x² (1-x²)^{-1/2} = π/2, ∫ x² (1-x²)^{1/2} = π/8
        let q1 = gauss_chebyshev_first(5, (-1.0, 1.0)).unwrap();
        assert!((q1.integrate(|x| x * x) - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        let q2 = gauss_chebyshev_second(5, (-1.0, 1.0)).unwrap();
        assert!((q2.integrate(|x| x * x) - std::f64::consts::PI / 8.0).abs() < 1e-14);
        assert!(q2.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tridiagonal_eigen_small_case() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3, first components 1/2 each
        let (ev, z2) = tridiagonal_eigen(&[2.0, 2.0], &[1.0]).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
        assert!((z2[0] - 0.5).abs() < 1e-15 && (z2[1] - 0.5).abs() < 1e-15);
    }
}
