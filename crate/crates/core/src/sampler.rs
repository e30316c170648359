//! Finite-window sampling of the sine process.
//!
//! The sine kernel restricted to `[-L, L]` is discretized by Gauss–Legendre
//! (Nyström), diagonalized, and sampled with the spectral algorithm of Hough,
//! Krishnapur, Peres and Virág: each eigenfunction is kept with probability
//! equal to its eigenvalue, then points are drawn one at a time from the
//! projection kernel of the kept eigenfunctions, projecting out each chosen
//! direction. The continuous conditional densities are sampled from their
//! piecewise-linear interpolant on a fine grid.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numerics::{linspace, sinc_pi};
use crate::orthopoly::gauss_legendre;
use crate::pointconf::{make_lattice_config, PointConfiguration, TailModel};
use crate::{Error, Result};

/// Quadrature nodes per unit length required for the discretization.
pub const NODES_PER_UNIT: f64 = 8.0;
const GRID_PER_UNIT: f64 = 32.0;
const COLLISION_GAP: f64 = 1e-9;

/// Gauss–Legendre discretization of the sine-kernel operator on `[-L, L]`.
#[derive(Clone, Debug)]
pub struct SineOperator {
    pub half_width: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `√wᵢ K(xᵢ, xⱼ) √wⱼ`.
    pub matrix: DMatrix<f64>,
}

/// Builds the symmetrized Nyström matrix; `order ≥ 8L` is required.
pub fn sine_operator_discretization(half_width: f64, order: usize) -> Result<SineOperator> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::param(format!(
            "L must be positive, got {half_width}"
        )));
    }
    if (order as f64) < NODES_PER_UNIT * half_width {
        return Err(Error::param(format!(
            "order {order} is below {NODES_PER_UNIT}·L = {}",
            NODES_PER_UNIT * half_width
        )));
    }
    let q = gauss_legendre(order, (-half_width, half_width))?;
    let sw: Vec<f64> = q.weights.iter().map(|w| w.sqrt()).collect();
    let n = q.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        sw[i] * sw[j] * sinc_pi(q.nodes[i] - q.nodes[j])
    });
    Ok(SineOperator {
        half_width,
        nodes: q.nodes,
        weights: q.weights,
        matrix,
    })
}

/// Smallest admissible discretization order for `L`.
pub fn default_order(half_width: f64) -> usize {
    ((NODES_PER_UNIT * half_width).ceil() as usize).max(16)
}

#[derive(Clone, Debug, Serialize)]
pub struct DppSample {
    pub points: Vec<f64>,
    pub window: f64,
    /// Eigenvalues of the discretized operator, clipped to `[0, 1]`, ascending.
    pub eigenvalue_spectrum: Vec<f64>,
    pub seed: u64,
}

/// Reusable sampler holding the eigendecomposition for one window.
#[derive(Clone, Debug)]
pub struct SineDppSampler {
    op: SineOperator,
    eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    eigenvectors: DMatrix<f64>,
    grid: Vec<f64>,
}

impl SineDppSampler {
    pub fn new(half_width: f64, order: usize) -> Result<Self> {
        let op = sine_operator_discretization(half_width, order)?;
        let eig = SymmetricEigen::new(op.matrix.clone());
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = idx
            .iter()
            .map(|&k| eig.eigenvalues[k].clamp(0.0, 1.0))
            .collect();
        let eigenvectors = DMatrix::from_fn(op.nodes.len(), idx.len(), |i, k| {
            eig.eigenvectors[(i, idx[k])]
        });
        let cells = (GRID_PER_UNIT * 2.0 * half_width).ceil() as usize;
        let grid = linspace(-half_width, half_width, cells + 1);
        Ok(Self {
            op,
            eigenvalues,
            eigenvectors,
            grid,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Expected number of points, `Σ λ`.
    pub fn expected_count(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    // Nyström extension of the selected eigenvectors to x.
    fn features(&self, selected: &[usize], x: f64) -> DVector<f64> {
        let kx: Vec<f64> = self
            .op
            .nodes
            .iter()
            .zip(&self.op.weights)
            .map(|(&xj, &wj)| sinc_pi(x - xj) * wj.sqrt())
            .collect();
        DVector::from_iterator(
            selected.len(),
            selected.iter().map(|&k| {
                let v = self.eigenvectors.column(k);
                kx.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>() / self.eigenvalues[k]
            }),
        )
    }

    pub fn sample(&self, seed: u64) -> DppSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let selected: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&k| {
                let u: f64 = rng.random();
                u < self.eigenvalues[k]
            })
            .collect();
        let r = selected.len();
        let mut points = Vec::with_capacity(r);
        if r > 0 {
            // rows of `basis` span the remaining subspace; `proj` holds the
            // grid features expressed in that basis
            let mut basis = DMatrix::<f64>::identity(r, r);
            let mut proj = DMatrix::from_fn(self.grid.len(), r, |_, _| 0.0);
            for (g, &x) in self.grid.iter().enumerate() {
                proj.row_mut(g)
                    .copy_from(&self.features(&selected, x).transpose());
            }
            for _ in 0..r {
                let dens: Vec<f64> = proj.row_iter().map(|row| row.norm_squared()).collect();
                let x = sample_piecewise_linear(&self.grid, &dens, &mut rng);
                points.push(x);
                let dir = &basis * self.features(&selected, x);
                match householder(&dir) {
                    Some(v) => {
                        basis = (&basis - 2.0 * &v * (v.transpose() * &basis))
                            .rows(1, basis.nrows() - 1)
                            .into_owned();
                        proj = (&proj - 2.0 * (&proj * &v) * v.transpose())
                            .columns(1, proj.ncols() - 1)
                            .into_owned();
                    }
                    None => break,
                }
                if basis.nrows() == 0 {
                    break;
                }
            }
        }
        points.sort_by(f64::total_cmp);
        DppSample {
            points,
            window: self.op.half_width,
            eigenvalue_spectrum: self.eigenvalues.clone(),
            seed,
        }
    }
}

/// One sample of the sine process restricted to `[-L, L]`.
pub fn sample_sine_dpp(half_width: f64, order: usize, seed: u64) -> Result<DppSample> {
    Ok(SineDppSampler::new(half_width, order)?.sample(seed))
}

// Draws from the density that interpolates `dens` linearly on `grid`.
fn sample_piecewise_linear(grid: &[f64], dens: &[f64], rng: &mut impl Rng) -> f64 {
    let masses: Vec<f64> = grid
        .windows(2)
        .zip(dens.windows(2))
        .map(|(g, d)| 0.5 * (g[1] - g[0]) * (d[0].max(0.0) + d[1].max(0.0)))
        .collect();
    let total: f64 = masses.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut cell = masses.len() - 1;
    for (i, &m) in masses.iter().enumerate() {
        if u < m {
            cell = i;
            break;
        }
        u -= m;
    }
    let (a, b) = (grid[cell], grid[cell + 1]);
    let (fa, fb) = (dens[cell].max(0.0), dens[cell + 1].max(0.0));
    let v: f64 = rng.random();
    // invert the CDF of the linear density on [0, 1]
    let s = if (fb - fa).abs() < 1e-12 * (fa + fb) {
        v
    } else {
        let disc = fa * fa + v * (fb * fb - fa * fa);
        (disc.max(0.0).sqrt() - fa) / (fb - fa)
    };
    a + (b - a) * s.clamp(0.0, 1.0)
}

// Unit vector `v` with `(I - 2vvᵀ) dir ∥ e₁`; `None` for a zero direction.
fn householder(dir: &DVector<f64>) -> Option<DVector<f64>> {
    let norm = dir.norm();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    let mut v = dir / norm;
    v[0] -= 1.0;
    let vn = v.norm();
    if vn < 1e-300 {
        // already along e₁; any unit vector orthogonal to e₁ would do, but
        // a zero reflector keeps the basis unchanged
        return Some(DVector::zeros(dir.len()));
    }
    Some(v / vn)
}

/// Window points from the sample with the half-integer lattice grafted beyond
/// the window; an empty sample gives the plain half-integer lattice.
pub fn to_configuration(sample: &DppSample) -> Result<PointConfiguration> {
    if sample.points.is_empty() {
        return make_lattice_config(sample.window.max(1.5), 0.5);
    }
    let mut radius = sample.window;
    loop {
        let trial = PointConfiguration::new(Vec::new(), radius, TailModel::Lattice { shift: 0.5 })?;
        let (a, b) = trial.tail_starts().expect("lattice tail");
        let last = *sample.points.last().expect("non-empty");
        let first = sample.points[0];
        if a - last > COLLISION_GAP && first + b > COLLISION_GAP {
            return PointConfiguration::new(
                sample.points.clone(),
                radius,
                TailModel::Lattice { shift: 0.5 },
            );
        }
        radius += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_is_symmetric_with_trace_2l() {
        let op = sine_operator_discretization(5.0, 40).unwrap();
        let m = &op.matrix;
        assert_eq!(m, &m.transpose());
        assert!((m.trace() - 10.0).abs() < 1e-12);
        let eig = SymmetricEigen::new(m.clone());
        assert!(eig
            .eigenvalues
            .iter()
            .all(|&l| (-1e-8..=1.0 + 1e-8).contains(&l)));
        assert!(sine_operator_discretization(5.0, 39).is_err());
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = sample_sine_dpp(4.0, 32, 11).unwrap();
        let b = sample_sine_dpp(4.0, 32, 11).unwrap();
        assert_eq!(a.points, b.points);
        assert!(a.points.iter().all(|p| p.abs() <= 4.0));
        assert!(a.points.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn householder_step_removes_direction() {
        let basis = DMatrix::<f64>::identity(3, 3);
        let dir = DVector::from_vec(vec![1.0, 2.0, 2.0]);
        let v = householder(&dir).unwrap();
        let rest = (&basis - 2.0 * &v * (v.transpose() * &basis))
            .rows(1, 2)
            .into_owned();
        assert!((&rest * &dir).norm() < 1e-14);
        assert!((&rest * rest.transpose() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
        assert!(householder(&DVector::zeros(3)).is_none());
    }

    #[test]
    fn mean_cardinality_is_window_length() {
        let sampler = SineDppSampler::new(10.0, default_order(10.0)).unwrap();
        assert!((sampler.expected_count() - 20.0).abs() < 0.2);
        let counts: Vec<f64> = (0..200)
            .map(|s| sampler.sample(s).points.len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / 200.0;
        assert!((19.0..=21.0).contains(&mean), "mean {mean}");
        // Bernoulli selection: Var = Σ λ(1-λ)
        let var: f64 = sampler.eigenvalues().iter().map(|l| l * (1.0 - l)).sum();
        let se = (var / 200.0).sqrt();
        assert!(
            (mean - sampler.expected_count()).abs() < 3.0 * se,
            "mean {mean}, se {se}"
        );
    }

    #[test]
    fn grafted_configuration() {
        let s = DppSample {
            points: vec![-2.3, -0.1, 0.4, 2.9],
            window: 3.0,
            eigenvalue_spectrum: vec![],
            seed: 0,
        };
        let c = to_configuration(&s).unwrap();
        assert_eq!(c.index_offset(), -2);
        assert_eq!(c.point(2), Some(3.5));
        let close = DppSample {
            points: vec![-1.0, 3.5 - 1e-10],
            window: 3.5 - 1e-10,
            ..s.clone()
        };
        let c = to_configuration(&close).unwrap();
        assert!(c.tail_starts().unwrap().0 > 4.0);
        let empty = DppSample {
            points: vec![],
            ..s
        };
        assert_eq!(
            to_configuration(&empty).unwrap(),
            make_lattice_config(3.0, 0.5).unwrap()
        );
    }
}
