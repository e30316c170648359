//! Orthonormal polynomials for positive weights on an interval and their
//! Christoffel–Darboux kernels.
//!
//! Recurrence coefficients come from the discretized Stieltjes procedure: the
//! weight is replaced by a Gauss rule whose endpoint factor matches the
//! weight's own (Legendre, or Chebyshev of the first/second kind), and the
//! three-term recurrence is run on the nodes with compensated inner products.
//! Weights are handled in the log domain and rescaled by their maximum on the
//! nodes, so no evaluation underflows; the true mass is carried separately as
//! `log_norm0`.

pub mod quadrature;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::numerics::{csum, CompensatedSum};
use crate::{Error, Result};

pub use quadrature::{
    gauss_chebyshev_first, gauss_chebyshev_second, gauss_legendre, Endpoint, Quadrature,
};

/// A positive weight on a compact interval.
///
/// The weight is `exp(log_smooth(t))` times the endpoint factor selected by
/// [`Weight::endpoint`], so that quadrature can integrate the endpoint
/// behaviour exactly.
pub trait Weight: Send + Sync + fmt::Debug {
    fn support(&self) -> (f64, f64);

    fn endpoint(&self) -> Endpoint {
        Endpoint::Legendre
    }

    /// Log of the weight with the endpoint factor divided out.
    fn log_smooth(&self, t: f64) -> f64;

    /// Log of the full weight; `-∞` outside the support.
    fn log_weight(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t < lo || t > hi {
            return f64::NEG_INFINITY;
        }
        self.log_smooth(t) + self.endpoint().log_factor(t, (lo, hi))
    }

    fn describe(&self) -> String;
}

/// `w ≡ 1` on an interval (Legendre).
#[derive(Clone, Copy, Debug)]
pub struct UnitWeight {
    pub interval: (f64, f64),
}

impl Weight for UnitWeight {
    fn support(&self) -> (f64, f64) {
        self.interval
    }

    fn log_smooth(&self, _t: f64) -> f64 {
        0.0
    }

    fn describe(&self) -> String {
        format!("unit[{},{}]", self.interval.0, self.interval.1)
    }
}

/// `c · w` for a constant `c = exp(log_scale)`.
#[derive(Clone, Debug)]
pub struct ScaledWeight<W> {
    pub inner: W,
    pub log_scale: f64,
}

impl<W: Weight> Weight for ScaledWeight<W> {
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn endpoint(&self) -> Endpoint {
        self.inner.endpoint()
    }

    fn log_smooth(&self, t: f64) -> f64 {
        self.inner.log_smooth(t) + self.log_scale
    }

    fn describe(&self) -> String {
        format!("exp({})*{}", self.log_scale, self.inner.describe())
    }
}

/// Doubling check: coefficients at twice the quadrature order must agree to this.
pub const STABILITY_TOL: f64 = 1e-11;

/// Three-term recurrence `t φ_k = b_k φ_{k+1} + a_k φ_k + b_{k-1} φ_{k-1}`
/// for the orthonormal polynomials of `weight`, `k = 0..N-1`.
#[derive(Clone)]
pub struct RecurrenceCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `log ∫ w`, so that `φ₀ = exp(-log_norm0 / 2)`.
    pub log_norm0: f64,
    pub weight: Arc<dyn Weight>,
    pub quad_order: usize,
    /// `max |Δa|, |Δb|` against a rebuild at twice the order, when checked.
    pub stability: Option<f64>,
}

impl fmt::Debug for RecurrenceCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecurrenceCoeffs")
            .field("len", &self.a.len())
            .field("log_norm0", &self.log_norm0)
            .field("weight", &self.weight.describe())
            .field("quad_order", &self.quad_order)
            .field("stability", &self.stability)
            .finish()
    }
}

/// Discretized Stieltjes procedure for the first `n` recurrence coefficients.
pub fn stieltjes_recurrence(
    weight: Arc<dyn Weight>,
    n: usize,
    quad_order: usize,
) -> Result<RecurrenceCoeffs> {
    if n == 0 {
        return Err(Error::param("N must be at least 1"));
    }
    if quad_order < 4 * n {
        return Err(Error::param(format!(
            "quadrature order {quad_order} is below 4N = {}",
            4 * n
        )));
    }
    let support = weight.support();
    let quad = weight.endpoint().rule(quad_order, support)?;
    let logs: Vec<f64> = quad.nodes.iter().map(|&t| weight.log_smooth(t)).collect();
    let lmax = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lmax.is_finite() {
        return Err(Error::numerical(format!(
            "weight {} is not finite and positive on the quadrature nodes",
            weight.describe()
        )));
    }
    let lam: Vec<f64> = quad
        .weights
        .iter()
        .zip(&logs)
        .map(|(q, l)| q * (l - lmax).exp())
        .collect();
    let mass = csum(lam.iter().copied());
    let prob: Vec<f64> = lam.iter().map(|l| l / mass).collect();
    let t = &quad.nodes;

    let m = t.len();
    let mut a = Vec::with_capacity(n);
    let mut b: Vec<f64> = Vec::with_capacity(n);
    let mut prev = vec![0.0; m];
    let mut cur = vec![1.0; m];
    let mut next = vec![0.0; m];
    for k in 0..n {
        let ak = csum((0..m).map(|i| prob[i] * t[i] * cur[i] * cur[i]));
        let b_prev = if k > 0 { b[k - 1] } else { 0.0 };
        for i in 0..m {
            next[i] = (t[i] - ak) * cur[i] - b_prev * prev[i];
        }
        // one reorthogonalization pass against the two previous polynomials
        let c0 = csum((0..m).map(|i| prob[i] * next[i] * cur[i]));
        let c1 = if k > 0 {
            csum((0..m).map(|i| prob[i] * next[i] * prev[i]))
        } else {
            0.0
        };
        for i in 0..m {
            next[i] -= c0 * cur[i] + c1 * prev[i];
        }
        let nrm2 = csum((0..m).map(|i| prob[i] * next[i] * next[i]));
        let bk = nrm2.sqrt();
        if !(bk.is_finite() && bk > 1e-150) {
            return Err(Error::numerical(format!(
                "b_{k} lost positivity for {} (N = {n}, order = {quad_order}): \
                 quadrature order insufficient or weight underflow",
                weight.describe()
            )));
        }
        a.push(ak + c0);
        b.push(bk);
        for i in 0..m {
            next[i] /= bk;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(RecurrenceCoeffs {
        a,
        b,
        log_norm0: mass.ln() + lmax,
        weight,
        quad_order,
        stability: None,
    })
}

/// Stieltjes at `quad_order` and at `2·quad_order`; the returned coefficients
/// carry the maximal difference in `stability`.
pub fn stieltjes_checked(
    weight: Arc<dyn Weight>,
    n: usize,
    quad_order: usize,
) -> Result<RecurrenceCoeffs> {
    let mut base = stieltjes_recurrence(weight.clone(), n, quad_order)?;
    let fine = stieltjes_recurrence(weight, n, 2 * quad_order)?;
    let delta = base
        .a
        .iter()
        .zip(&fine.a)
        .chain(base.b.iter().zip(&fine.b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    base.stability = Some(delta);
    Ok(base)
}

impl RecurrenceCoeffs {
    /// Number of recurrence steps available; kernels up to this `N` can be formed.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn is_stable(&self) -> bool {
        self.stability.is_none_or(|d| d <= STABILITY_TOL)
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::param(format!(
                "kernel size {n} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }

    /// `φ̃_0 … φ̃_upto` at `x`, normalized so that `φ̃_0 = 1`.
    fn unscaled_values(&self, x: f64, upto: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(upto + 1);
        out.push(1.0);
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..upto {
            let b_prev = if k > 0 { self.b[k - 1] } else { 0.0 };
            let next = ((x - self.a[k]) * cur - b_prev * prev) / self.b[k];
            out.push(next);
            prev = cur;
            cur = next;
        }
        out
    }

    /// `(φ̃_{n-1}, φ̃_n, φ̃'_{n-1}, φ̃'_n)` at `x`.
    fn top_pair(&self, x: f64, n: usize) -> [f64; 4] {
        let (mut p0, mut p1) = (0.0, 1.0);
        let (mut d0, mut d1) = (0.0, 0.0);
        for k in 0..n {
            let b_prev = if k > 0 { self.b[k - 1] } else { 0.0 };
            let p2 = ((x - self.a[k]) * p1 - b_prev * p0) / self.b[k];
            let d2 = ((x - self.a[k]) * d1 + p1 - b_prev * d0) / self.b[k];
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
        }
        [p0, p1, d0, d1]
    }

    /// Orthonormal `φ_j(x)`, `0 ≤ j ≤ N`, with positive leading coefficient.
    pub fn eval_orthonormal(&self, j: usize, x: f64) -> Result<f64> {
        if j > self.len() {
            return Err(Error::param(format!("degree {j} exceeds {}", self.len())));
        }
        let v = self.unscaled_values(x, j);
        Ok(v[j] * (-0.5 * self.log_norm0).exp())
    }

    /// `Σ_{j<n} φ̃_j(x) φ̃_j(y)` (unscaled).
    fn unscaled_kernel(&self, n: usize, x: f64, y: f64) -> f64 {
        let bn = self.b[n - 1];
        if x == y {
            let [p0, p1, d0, d1] = self.top_pair(x, n);
            bn * (d1 * p0 - d0 * p1)
        } else if (x - y).abs() <= CONFLUENT_BAND {
            let vx = self.unscaled_values(x, n - 1);
            let vy = self.unscaled_values(y, n - 1);
            csum(vx.iter().zip(&vy).map(|(u, v)| u * v))
        } else {
            let [px0, px1, ..] = self.top_pair(x, n);
            let [py0, py1, ..] = self.top_pair(y, n);
            bn * (px1 * py0 - px0 * py1) / (x - y)
        }
    }

    /// `K̂_N(x, y)`, or `K_N(x, y) = √(w(x) w(y)) K̂_N(x, y)` when `with_weight`.
    pub fn cd_kernel(&self, n: usize, x: f64, y: f64, with_weight: bool) -> Result<f64> {
        self.check_n(n)?;
        Ok(self.unscaled_kernel(n, x, y) * self.kernel_scale(x, y, with_weight))
    }

    fn kernel_scale(&self, x: f64, y: f64, with_weight: bool) -> f64 {
        if with_weight {
            let lw = 0.5 * (self.weight.log_weight(x) + self.weight.log_weight(y));
            (lw - self.log_norm0).exp()
        } else {
            (-self.log_norm0).exp()
        }
    }

    /// Direct summation `Σ_{j<n} φ_j(x) φ_j(y)`, without the closed form.
    pub fn kernel_by_summation(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        self.check_n(n)?;
        let vx = self.unscaled_values(x, n - 1);
        let vy = self.unscaled_values(y, n - 1);
        Ok(csum(vx.iter().zip(&vy).map(|(u, v)| u * v)) * (-self.log_norm0).exp())
    }

    /// Christoffel function `1 / K̂_N(x, x)`.
    pub fn christoffel_function(&self, n: usize, x: f64) -> Result<f64> {
        Ok(1.0 / self.cd_kernel(n, x, x, false)?)
    }

    /// `max |∫ φ_j φ_k w - δ_jk|` over `j, k < n`, using an independent Gauss
    /// rule of `quad_order` nodes.
    pub fn gram_deviation(&self, n: usize, quad_order: usize) -> Result<f64> {
        self.check_n(n)?;
        let (rows, lam) = self.sampled(n, quad_order)?;
        let dev = (0..n)
            .into_par_iter()
            .map(|j| {
                (0..=j)
                    .map(|k| {
                        let g = csum(rows.iter().zip(&lam).map(|(r, l)| l * r[j] * r[k]));
                        (g - if j == k { 1.0 } else { 0.0 }).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(dev)
    }

    /// `∫ K̂_N(x, x) w(x) dx` with an independent rule; equals `N` exactly in theory.
    pub fn trace(&self, n: usize, quad_order: usize) -> Result<f64> {
        self.check_n(n)?;
        let (rows, lam) = self.sampled(n, quad_order)?;
        Ok(csum(rows.iter().zip(&lam).map(|(r, l)| {
            l * r[..n].iter().map(|v| v * v).sum::<f64>()
        })))
    }

    // Unscaled polynomial values and the matching quadrature masses
    // `qᵢ w(tᵢ) / ∫w` on a fresh rule.
    fn sampled(&self, n: usize, quad_order: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let quad = self
            .weight
            .endpoint()
            .rule(quad_order, self.weight.support())?;
        let rows: Vec<Vec<f64>> = quad
            .nodes
            .par_iter()
            .map(|&t| self.unscaled_values(t, n - 1))
            .collect();
        let lam = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .map(|(&t, q)| q * (self.weight.log_smooth(t) - self.log_norm0).exp())
            .collect();
        Ok((rows, lam))
    }

    /// Jacobi-matrix Gauss rule with `n` nodes for this weight.
    pub fn gauss_rule(&self, n: usize) -> Result<Quadrature> {
        self.check_n(n)?;
        let (nodes, z2) = quadrature::tridiagonal_eigen(&self.a[..n], &self.b[..n - 1])?;
        let mass = self.log_norm0.exp();
        Ok(Quadrature {
            nodes,
            weights: z2.into_iter().map(|z| z * mass).collect(),
            interval: self.weight.support(),
        })
    }
}

/// Off-diagonal pairs closer than this are summed directly instead of through
/// the Christoffel–Darboux quotient; exact coincidence uses the confluent form.
pub const CONFLUENT_BAND: f64 = 1e-6;

/// Kernel values over a tensor grid.
#[derive(Clone, Debug)]
pub struct KernelGrid {
    pub x_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    /// `values[i][j]` is the kernel at `(x_grid[i], y_grid[j])`.
    pub values: Vec<Vec<f64>>,
    pub weight: String,
    pub n: usize,
    pub reference: Option<Vec<Vec<f64>>>,
    pub sup_error: Option<f64>,
}

impl KernelGrid {
    /// Evaluates `K_N` (or `K̂_N`) on `x_grid × y_grid`, parallel over rows.
    pub fn evaluate(
        coeffs: &RecurrenceCoeffs,
        n: usize,
        x_grid: &[f64],
        y_grid: &[f64],
        with_weight: bool,
    ) -> Result<Self> {
        coeffs.check_n(n)?;
        let ty: Vec<[f64; 4]> = y_grid.iter().map(|&y| coeffs.top_pair(y, n)).collect();
        let values = x_grid
            .par_iter()
            .map(|&x| {
                let tx = coeffs.top_pair(x, n);
                y_grid
                    .iter()
                    .zip(&ty)
                    .map(|(&y, py)| {
                        let raw = if x == y {
                            coeffs.b[n - 1] * (tx[3] * tx[0] - tx[2] * tx[1])
                        } else if (x - y).abs() <= CONFLUENT_BAND {
                            coeffs.unscaled_kernel(n, x, y)
                        } else {
                            coeffs.b[n - 1] * (tx[1] * py[0] - tx[0] * py[1]) / (x - y)
                        };
                        raw * coeffs.kernel_scale(x, y, with_weight)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            x_grid: x_grid.to_vec(),
            y_grid: y_grid.to_vec(),
            values,
            weight: coeffs.weight.describe(),
            n,
            reference: None,
            sup_error: None,
        })
    }

    /// Attaches a reference kernel and records the sup-norm difference.
    pub fn with_reference(mut self, reference: impl Fn(f64, f64) -> f64) -> Self {
        let mut sup = 0.0f64;
        let refs: Vec<Vec<f64>> = self
            .x_grid
            .iter()
            .zip(&self.values)
            .map(|(&x, row)| {
                self.y_grid
                    .iter()
                    .zip(row)
                    .map(|(&y, &v)| {
                        let r = reference(x, y);
                        sup = sup.max((v - r).abs());
                        r
                    })
                    .collect()
            })
            .collect();
        self.reference = Some(refs);
        self.sup_error = Some(sup);
        self
    }

    /// True when the value matrix is symmetric to `tol` (square grids only).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.x_grid == self.y_grid
            && (0..self.values.len())
                .all(|i| (0..i).all(|j| (self.values[i][j] - self.values[j][i]).abs() <= tol))
    }
}

/// Compensated sum helper re-exported for tests that build kernels by hand.
pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (a, b) in u.iter().zip(v) {
        acc.add(a * b);
    }
    acc.value()
}
