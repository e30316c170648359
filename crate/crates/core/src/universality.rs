//! Sine-kernel universality for the conditional weights `ρ_R`: the rescaled
//! kernel, the convergence sweep over `R`, the Christoffel-function sandwich
//! between the comparison weights, and Lubinsky's off-diagonal inequality.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::c_alpha;
use crate::numerics::{linspace, sinc_pi};
use crate::orthopoly::{stieltjes_checked, KernelGrid, RecurrenceCoeffs};
use crate::pointconf::PointConfiguration;
use crate::weights::{Sign, WeightSpec};
use crate::{Error, Result};

/// `sin(π(x-y)) / (π(x-y))`.
pub fn sine_kernel(x: f64, y: f64) -> f64 {
    sinc_pi(x - y)
}

/// Default quadrature order `max(4N, 256)`.
pub fn default_quad_order(n: usize) -> usize {
    (4 * n).max(256)
}

/// How the kernel size and the microscopic scale are tied to `R`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Scaling {
    /// `N = N(R)`, value `(1/R) K_N(x/R, y/R; w_R)`.
    #[default]
    CountPoints,
    /// `N = ⌊2R⌋`, value `(2/N) K_N(2x/N, 2y/N; w_R)`.
    DoubleRadius,
}

impl Scaling {
    fn size(self, config: &PointConfiguration, r: f64) -> Result<usize> {
        match self {
            Scaling::CountPoints => config.count_points(r),
            Scaling::DoubleRadius => Ok((2.0 * r).floor() as usize),
        }
    }

    fn factor(self, r: f64, n: usize) -> f64 {
        match self {
            Scaling::CountPoints => 1.0 / r,
            Scaling::DoubleRadius => 2.0 / n as f64,
        }
    }
}

fn checked_build(
    weight: WeightSpec,
    n: usize,
    quad_order: usize,
    what: &str,
) -> Result<RecurrenceCoeffs> {
    let context = |e: Error| match e {
        Error::Numerical(m) => {
            Error::Numerical(format!("{what}, N={n}, quad_order={quad_order}: {m}"))
        }
        other => other,
    };
    let coeffs =
        stieltjes_checked(weight.validated()?.into_weight(), n, quad_order).map_err(context)?;
    if !coeffs.is_stable() {
        return Err(context(Error::numerical(format!(
            "coefficients moved by {:.3e} when the quadrature order was doubled",
            coeffs.stability.unwrap_or(f64::NAN)
        ))));
    }
    Ok(coeffs)
}

/// Orthonormal system of `w_R` together with the microscopic scaling.
#[derive(Clone, Debug)]
pub struct RescaledKernel {
    pub r: f64,
    pub n: usize,
    pub scaling: Scaling,
    pub coeffs: RecurrenceCoeffs,
}

impl RescaledKernel {
    pub fn build(
        config: Arc<PointConfiguration>,
        r: f64,
        scaling: Scaling,
        quad_order: Option<usize>,
    ) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::param(format!("R must be positive, got {r}")));
        }
        let n = scaling.size(&config, r)?;
        if n == 0 {
            return Err(Error::param(format!("no points in [-{r}, {r}]")));
        }
        let order = quad_order.unwrap_or_else(|| default_quad_order(n));
        let coeffs = checked_build(
            WeightSpec::WR { config, r },
            n,
            order,
            &format!("w_R at R={r}"),
        )?;
        Ok(Self {
            r,
            n,
            scaling,
            coeffs,
        })
    }

    fn factor(&self) -> f64 {
        self.scaling.factor(self.r, self.n)
    }

    /// Rescaled kernel at microscopic `(x, y)`; both must map into `(-1, 1)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let s = self.factor();
        if !((s * x).abs() < 1.0 && (s * y).abs() < 1.0) {
            return Err(Error::domain(format!(
                "({x}, {y}) leaves the window at R={}",
                self.r
            )));
        }
        Ok(s * self.coeffs.cd_kernel(self.n, s * x, s * y, true)?)
    }

    /// Rescaled kernel on `grid × grid`, with the sine kernel as reference.
    pub fn grid(&self, grid: &[f64]) -> Result<KernelGrid> {
        let s = self.factor();
        if grid.iter().any(|x| (s * x).abs() >= 1.0) {
            return Err(Error::domain(format!(
                "grid leaves the window at R={}",
                self.r
            )));
        }
        let macro_grid: Vec<f64> = grid.iter().map(|x| s * x).collect();
        let mut kg = KernelGrid::evaluate(&self.coeffs, self.n, &macro_grid, &macro_grid, true)?;
        kg.x_grid = grid.to_vec();
        kg.y_grid = grid.to_vec();
        kg.values.iter_mut().flatten().for_each(|v| *v *= s);
        Ok(kg.with_reference(sine_kernel))
    }
}

/// `(1/R) K_N(x/R, y/R; w_R)` with `N = N(R)`, i.e. `K_N(x, y; ρ_R)`.
pub fn rescaled_kernel(
    config: Arc<PointConfiguration>,
    r: f64,
    x: f64,
    y: f64,
    quad_order: Option<usize>,
) -> Result<f64> {
    RescaledKernel::build(config, r, Scaling::CountPoints, quad_order)?.eval(x, y)
}

/// Compact set `[-A, A]` sampled at `grid_n` points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub grid_n: usize,
}

impl GridSpec {
    /// `A = 0` degenerates to the single point `0`.
    pub fn points(&self) -> Vec<f64> {
        if self.half_width == 0.0 || self.grid_n <= 1 {
            vec![0.0]
        } else {
            linspace(-self.half_width, self.half_width, self.grid_n)
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.points().len() == 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub r: f64,
    pub n: usize,
    pub eps_r: f64,
    /// `None` for a degenerate grid or an aborted row.
    pub sup_error: Option<f64>,
    /// `max |K(x,x) - 1|` over the grid; `None` for an aborted row.
    pub diag_error: Option<f64>,
    /// Rescaled kernel at the origin.
    pub center_value: Option<f64>,
    pub quad_order: usize,
    pub wall_ms: u128,
    /// Why the row was aborted, if it was.
    pub failure: Option<String>,
    #[serde(skip)]
    pub kernel: Option<KernelGrid>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub grid_spec: GridSpec,
    pub config_id: String,
    pub scaling: Scaling,
}

impl ConvergenceTable {
    /// Sup errors of completed rows, in `R` order.
    pub fn sup_errors(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.sup_error).collect()
    }

    /// True when every row completed and the sup error strictly decreases.
    pub fn strictly_decreasing(&self) -> bool {
        let errs: Vec<Option<f64>> = self
            .rows
            .iter()
            .map(|r| {
                if self.grid_spec.is_degenerate() {
                    r.diag_error
                } else {
                    r.sup_error
                }
            })
            .collect();
        errs.iter().all(Option::is_some) && errs.windows(2).all(|w| w[1].unwrap() < w[0].unwrap())
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }
}

/// Sweeps `R` over `radii`; rows run in parallel and a failing row is kept
/// with its reason instead of aborting the sweep.
pub fn run_universality(
    config: Arc<PointConfiguration>,
    radii: &[f64],
    grid_spec: GridSpec,
    scaling: Scaling,
    quad_order_rule: impl Fn(usize) -> usize + Sync,
) -> Result<ConvergenceTable> {
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::param("radii must be positive"));
    }
    let grid = grid_spec.points();
    let rows = radii
        .par_iter()
        .map(|&r| -> Result<ConvergenceRow> {
            let start = Instant::now();
            let n = scaling.size(&config, r)?;
            let eps_r = config.epsilon_r(r, n.max(1))?;
            let quad_order = quad_order_rule(n);
            let mut row = ConvergenceRow {
                r,
                n,
                eps_r,
                sup_error: None,
                diag_error: None,
                center_value: None,
                quad_order,
                wall_ms: 0,
                failure: None,
                kernel: None,
            };
            let built = RescaledKernel::build(config.clone(), r, scaling, Some(quad_order))
                .and_then(|k| Ok((k.grid(&grid)?, k.eval(0.0, 0.0)?)));
            fill_row(&mut row, built, grid_spec.is_degenerate())?;
            row.wall_ms = start.elapsed().as_millis();
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable {
        rows,
        grid_spec,
        config_id: config_id(&config),
        scaling,
    })
}

// Records a built kernel grid in `row`; a numerical failure marks the row as
// aborted, anything else is returned.
fn fill_row(
    row: &mut ConvergenceRow,
    built: Result<(KernelGrid, f64)>,
    degenerate: bool,
) -> Result<()> {
    match built {
        Ok((kg, center)) => {
            let diag = (0..kg.x_grid.len())
                .map(|i| (kg.values[i][i] - 1.0).abs())
                .fold(0.0, f64::max);
            row.diag_error = Some(diag);
            row.center_value = Some(center);
            if !degenerate {
                row.sup_error = kg.sup_error;
            }
            row.kernel = Some(kg);
            Ok(())
        }
        Err(e @ Error::Numerical(_)) => {
            row.failure = Some(e.to_string());
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Short description of a configuration for report headers.
pub fn config_id(config: &PointConfiguration) -> String {
    let tail = match config.tail() {
        crate::pointconf::TailModel::Lattice { shift } => format!("lattice({shift})"),
        crate::pointconf::TailModel::None => "none".to_string(),
    };
    format!(
        "window={} points={} tail={tail}",
        config.window_radius(),
        config.points().len()
    )
}

/// `w_R` and the two comparison weights at one `R`, sharing `N = N(R)` and
/// `ε = ε_R`. Kernels are the unweighted `K̂_N`, evaluated at microscopic
/// arguments `x/N`.
#[derive(Clone, Debug)]
pub struct ComparisonSet {
    pub r: f64,
    pub n: usize,
    pub alpha: f64,
    pub eps_r: f64,
    pub rho: RecurrenceCoeffs,
    pub plus: RecurrenceCoeffs,
    pub minus: RecurrenceCoeffs,
}

impl ComparisonSet {
    pub fn build(config: Arc<PointConfiguration>, r: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::param(format!("α must be > 1, got {alpha}")));
        }
        let rho = RescaledKernel::build(config.clone(), r, Scaling::CountPoints, None)?.coeffs;
        let n = rho.len();
        let eps_r = config.epsilon_r(r, n)?;
        let order = default_quad_order(n);
        let plus = checked_build(
            WeightSpec::ComparisonPlus {
                alpha,
                eps: eps_r,
                n,
            },
            n,
            order,
            "w⁺",
        )?;
        let minus = checked_build(
            WeightSpec::ComparisonMinus {
                alpha,
                eps: eps_r,
                n,
            },
            n,
            order,
            "w⁻",
        )?;
        Ok(Self {
            r,
            n,
            alpha,
            eps_r,
            rho,
            plus,
            minus,
        })
    }

    fn micro(&self, coeffs: &RecurrenceCoeffs, x: f64, y: f64) -> Result<f64> {
        let nf = self.n as f64;
        Ok(coeffs.cd_kernel(self.n, x / nf, y / nf, false)? / nf)
    }

    /// `(1/N) K̂_N(x/N, x/N; ·)` for `w⁺`, `w_R`, `w⁻`.
    pub fn diagonal(&self, x: f64) -> Result<SandwichSample> {
        Ok(SandwichSample {
            x,
            plus: self.micro(&self.plus, x, x)?,
            rho: self.micro(&self.rho, x, x)?,
            minus: self.micro(&self.minus, x, x)?,
        })
    }

    pub fn sandwich(&self, x_grid: &[f64]) -> Result<SandwichReport> {
        let samples = x_grid
            .iter()
            .map(|&x| self.diagonal(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(SandwichReport {
            r: self.r,
            n: self.n,
            alpha: self.alpha,
            eps_r: self.eps_r,
            c_plus: c_alpha(Sign::Plus, self.alpha)?,
            c_minus: c_alpha(Sign::Minus, self.alpha)?,
            samples,
        })
    }

    /// Lubinsky's inequality between `w_R` and `w⁺` at microscopic `(x, y)`.
    pub fn lubinsky(&self, x: f64, y: f64) -> Result<LubinskyReport> {
        lubinsky_terms(
            &self.rho,
            &self.plus,
            self.n,
            x / self.n as f64,
            y / self.n as f64,
        )
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichSample {
    pub x: f64,
    pub plus: f64,
    pub rho: f64,
    pub minus: f64,
}

impl SandwichSample {
    pub fn ordered(&self) -> bool {
        self.plus <= self.rho && self.rho <= self.minus
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub r: f64,
    pub n: usize,
    pub alpha: f64,
    pub eps_r: f64,
    /// Limits of the comparison diagonals.
    pub c_plus: f64,
    pub c_minus: f64,
    pub samples: Vec<SandwichSample>,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.samples.iter().all(SandwichSample::ordered)
    }

    /// Largest `|diag - c±|` over the samples, for `w⁺` and `w⁻`.
    pub fn limit_deviation(&self) -> (f64, f64) {
        self.samples.iter().fold((0.0f64, 0.0f64), |(p, m), s| {
            (
                p.max((s.plus - self.c_plus).abs()),
                m.max((s.minus - self.c_minus).abs()),
            )
        })
    }

    /// Largest `minus - plus` over the samples.
    pub fn gap(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.minus - s.plus)
            .fold(0.0, f64::max)
    }
}

/// Ordering of the diagonal kernels of `w⁺`, `w_R`, `w⁻` at microscopic points.
pub fn sandwich_check(
    config: Arc<PointConfiguration>,
    r: f64,
    alpha: f64,
    x_grid: &[f64],
) -> Result<SandwichReport> {
    ComparisonSet::build(config, r, alpha)?.sandwich(x_grid)
}

/// Slack allowed on the right-hand side of Lubinsky's inequality.
pub const LUBINSKY_SLACK: f64 = 1e-9;
const RADICAND_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LubinskyReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `1 - K̂(x,x; upper) / K̂(x,x; lower)`; negative means the diagonal
    /// ordering itself failed.
    pub radicand: f64,
}

impl LubinskyReport {
    pub fn sandwich_violated(&self) -> bool {
        self.radicand < -RADICAND_SLACK
    }

    pub fn holds(&self) -> bool {
        !self.sandwich_violated() && self.lhs <= self.rhs + LUBINSKY_SLACK
    }
}

/// Lubinsky's bound for weights `lower ≤ upper`, at macroscopic `(x, y)`:
/// `|K̂(x,y;upper) - K̂(x,y;lower)| / K̂(x,x;lower)` against
/// `√(K̂(y,y;lower)/K̂(x,x;lower)) · √(1 - K̂(x,x;upper)/K̂(x,x;lower))`.
pub fn lubinsky_terms(
    lower: &RecurrenceCoeffs,
    upper: &RecurrenceCoeffs,
    n: usize,
    x: f64,
    y: f64,
) -> Result<LubinskyReport> {
    let kxx = lower.cd_kernel(n, x, x, false)?;
    let kyy = lower.cd_kernel(n, y, y, false)?;
    let kxy = lower.cd_kernel(n, x, y, false)?;
    let uxx = upper.cd_kernel(n, x, x, false)?;
    let uxy = upper.cd_kernel(n, x, y, false)?;
    let radicand = 1.0 - uxx / kxx;
    Ok(LubinskyReport {
        lhs: (uxy - kxy).abs() / kxx,
        rhs: (kyy / kxx).sqrt() * radicand.max(0.0).sqrt(),
        radicand,
    })
}

/// Lubinsky's inequality between `w_R` and `w⁺_{R,α}` at microscopic `(x, y)`.
pub fn lubinsky_gap(
    config: Arc<PointConfiguration>,
    r: f64,
    alpha: f64,
    x: f64,
    y: f64,
) -> Result<LubinskyReport> {
    ComparisonSet::build(config, r, alpha)?.lubinsky(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointconf::make_lattice_config;
    use std::f64::consts::PI;

    fn lattice() -> Arc<PointConfiguration> {
        Arc::new(make_lattice_config(200.0, 0.5).unwrap())
    }

    #[test]
    fn sine_kernel_values() {
        assert_eq!(sine_kernel(0.3, 0.3), 1.0);
        assert!(sine_kernel(1.0, 0.0).abs() < 1e-16);
        assert!((sine_kernel(0.5, 0.0) - 2.0 / PI).abs() < 1e-15);
        assert!((sine_kernel(1e-7, 0.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn symmetric_and_even_for_symmetric_config() {
        let k = RescaledKernel::build(lattice(), 16.0, Scaling::CountPoints, None).unwrap();
        for (x, y) in [(0.3, -1.2), (1.7, 0.4), (-0.9, -0.1)] {
            let a = k.eval(x, y).unwrap();
            assert!((a - k.eval(y, x).unwrap()).abs() < 1e-12);
            assert!((a - k.eval(-x, -y).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_near_one_at_r32() {
        let v = rescaled_kernel(lattice(), 32.0, 0.0, 0.0, None).unwrap();
        assert!((v - 1.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn double_radius_variant_ignores_the_count() {
        let c = lattice();
        let k = RescaledKernel::build(c, 16.5, Scaling::DoubleRadius, None).unwrap();
        assert_eq!(k.n, 33);
        let direct = k
            .coeffs
            .cd_kernel(33, 0.2 / 33.0, -0.4 / 33.0, true)
            .unwrap()
            * 2.0
            / 33.0;
        assert!((k.eval(0.1, -0.2).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn degenerate_grid_reports_diagonal_only() {
        let spec = GridSpec {
            half_width: 0.0,
            grid_n: 41,
        };
        let t = run_universality(
            lattice(),
            &[16.0, 8.0],
            spec,
            Scaling::CountPoints,
            default_quad_order,
        )
        .unwrap();
        assert_eq!(t.rows[0].r, 8.0);
        assert!(t
            .rows
            .iter()
            .all(|r| r.sup_error.is_none() && r.diag_error.is_some()));
        assert!(t.strictly_decreasing());
    }

    #[test]
    fn numerical_failure_aborts_only_its_row() {
        let spec = GridSpec {
            half_width: 1.0,
            grid_n: 5,
        };
        let mut t = run_universality(
            lattice(),
            &[4.0, 8.0],
            spec,
            Scaling::CountPoints,
            default_quad_order,
        )
        .unwrap();
        assert!(!t.any_failed() && t.strictly_decreasing());
        let row = &mut t.rows[1];
        *row = ConvergenceRow {
            sup_error: None,
            diag_error: None,
            center_value: None,
            kernel: None,
            ..row.clone()
        };
        fill_row(row, Err(Error::numerical("unstable")), false).unwrap();
        assert!(row.failure.as_deref().unwrap().contains("unstable"));
        assert!(t.any_failed() && !t.strictly_decreasing());
        let mut spare = t.rows[0].clone();
        assert!(fill_row(&mut spare, Err(Error::param("bad")), false).is_err());
        // an order below 4N is a caller error for the whole sweep
        assert!(run_universality(lattice(), &[8.0], spec, Scaling::CountPoints, |_| 10).is_err());
    }

    #[test]
    fn lubinsky_against_itself_is_trivial() {
        let k = RescaledKernel::build(lattice(), 8.0, Scaling::CountPoints, None).unwrap();
        let rep = lubinsky_terms(&k.coeffs, &k.coeffs, k.n, 0.05, -0.1).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.holds());
    }
}
