//! Weight functions on intervals: the conditional weight `ρ_R`, its rescaling
//! `w_R(t) = ρ_R(Rt)`, the logarithmic field `V`, the comparison weights
//! `w±_{R,α}` and the Jacobi-type exponential field weights. Also the two
//! sandwich checks relating `w_R` to exponential weights.
//!
//! Every evaluation is done on logarithms; the `eval_*` functions exponentiate
//! only at the end.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::numerics::log_paired_tail_product;
use crate::orthopoly::{Endpoint, Weight};
use crate::pointconf::PointConfiguration;
use crate::{Error, Result};

const V_SERIES_CUTOFF: f64 = 0.1;

/// `V(t) = (1+t) log(1+t) + (1-t) log(1-t)` on `[-1, 1]`.
pub fn eval_v(t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return Err(Error::domain(format!("V(t) needs |t| ≤ 1, got {t}")));
    }
    Ok(v_unchecked(t))
}

pub(crate) fn v_unchecked(t: f64) -> f64 {
    let a = t.abs();
    if a < V_SERIES_CUTOFF {
        // Σ_{k≥1} t^{2k} / (k(2k-1)), 12 terms reach 1e-24 at |t| = 0.1
        let t2 = t * t;
        let mut pow = t2;
        let mut sum = 0.0;
        for k in 1..=12 {
            let k = k as f64;
            sum += pow / (k * (2.0 * k - 1.0));
            pow *= t2;
        }
        return sum;
    }
    let left = if a == 1.0 {
        0.0
    } else {
        (1.0 - a) * (-a).ln_1p()
    };
    (1.0 + a) * a.ln_1p() + left
}

/// `V'(t) = log((1+t)/(1-t))`.
pub fn v_prime(t: f64) -> f64 {
    t.ln_1p() - (-t).ln_1p()
}

/// `log ρ_R(t)` for `|t| ≤ R`.
pub fn log_rho_r(config: &PointConfiguration, r: f64, t: f64) -> Result<f64> {
    config.log_rho(r, t)
}

/// `log w_R(t) = log ρ_R(Rt)` for `|t| ≤ 1`.
pub fn log_w_r(config: &PointConfiguration, r: f64, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return Err(Error::domain(format!("w_R needs |t| ≤ 1, got {t}")));
    }
    config.log_rho(r, (r * t).clamp(-r, r))
}

/// `w_R(t)`.
pub fn eval_w_r(config: &PointConfiguration, r: f64, t: f64) -> Result<f64> {
    Ok(log_w_r(config, r, t)?.exp())
}

/// Which comparison weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// `log w±_{R,α}(t)` with field parameter `eps` and size `n`.
///
/// `w⁺` is `+∞` at `t = ±1`; `w⁻` is `-∞` (zero weight) outside `(-β, β)`.
pub fn log_comparison(sign: Sign, alpha: f64, eps: f64, n: usize, t: f64) -> Result<f64> {
    check_alpha(alpha, true)?;
    let nf = n as f64;
    match sign {
        Sign::Plus => {
            if !(t.abs() <= 1.0) {
                return Err(Error::domain(format!("w⁺ is supported on [-1,1], got {t}")));
            }
            if t.abs() == 1.0 {
                return Ok(f64::INFINITY);
            }
            let pre = -0.5 * ((1.0 - t) * (1.0 + t)).ln();
            Ok(pre - nf * (v_unchecked(t / alpha) + eps * t))
        }
        Sign::Minus => {
            let beta = 1.0 / (alpha * alpha);
            if !(t.abs() < beta) {
                return Ok(f64::NEG_INFINITY);
            }
            let s = t / beta;
            let pre = 0.5 * ((1.0 - s) * (1.0 + s)).ln();
            Ok(pre - nf * (v_unchecked(alpha * t) + eps * t))
        }
    }
}

/// `w±_{R,α}(t)`.
pub fn eval_comparison(sign: Sign, alpha: f64, eps: f64, n: usize, t: f64) -> Result<f64> {
    Ok(log_comparison(sign, alpha, eps, n, t)?.exp())
}

/// `V_{α,ε}(x) = V(x/α) + εx`.
pub fn eval_v_field(alpha: f64, eps: f64, x: f64) -> Result<f64> {
    check_alpha(alpha, false)?;
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(format!("V_(α,ε) needs |x| ≤ 1, got {x}")));
    }
    Ok(v_unchecked(x / alpha) + eps * x)
}

fn check_alpha(alpha: f64, strict: bool) -> Result<()> {
    let ok = if strict { alpha > 1.0 } else { alpha >= 1.0 };
    if !(ok && alpha.is_finite()) {
        return Err(Error::param(format!(
            "α must be {} 1, got {alpha}",
            if strict { ">" } else { "≥" }
        )));
    }
    Ok(())
}

/// Exponent `γ` of the factor `(1 - t²)^γ` in an exponential field weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JacobiExponent {
    MinusHalf,
    PlusHalf,
}

impl JacobiExponent {
    fn endpoint(self) -> Endpoint {
        match self {
            JacobiExponent::MinusHalf => Endpoint::ChebyshevFirst,
            JacobiExponent::PlusHalf => Endpoint::ChebyshevSecond,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            JacobiExponent::MinusHalf => -0.5,
            JacobiExponent::PlusHalf => 0.5,
        }
    }
}

/// A concrete weight on an interval.
#[derive(Clone, Debug)]
pub enum WeightSpec {
    /// `ρ_R` on `[-R, R]`.
    RhoR {
        config: Arc<PointConfiguration>,
        r: f64,
    },
    /// `w_R` on `[-1, 1]`.
    WR {
        config: Arc<PointConfiguration>,
        r: f64,
    },
    /// `w⁺_{R,α}` on `[-1, 1]`.
    ComparisonPlus { alpha: f64, eps: f64, n: usize },
    /// `w⁻_{R,α}` on `[-α⁻², α⁻²]`.
    ComparisonMinus { alpha: f64, eps: f64, n: usize },
    /// `(1 - t²)^γ e^{-N V_{α,ε}(t)}` on `[-1, 1]`.
    ExpField {
        alpha: f64,
        eps: f64,
        n: usize,
        exponent: JacobiExponent,
    },
}

impl WeightSpec {
    /// Validates parameters and returns the weight.
    pub fn validated(self) -> Result<Self> {
        match &self {
            WeightSpec::RhoR { config, r } | WeightSpec::WR { config, r } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(Error::param(format!("R must be positive, got {r}")));
                }
                if !config.has_tail() {
                    return Err(Error::param(
                        "ρ_R needs a configuration with a lattice tail",
                    ));
                }
            }
            WeightSpec::ComparisonPlus { alpha, .. }
            | WeightSpec::ComparisonMinus { alpha, .. } => check_alpha(*alpha, true)?,
            WeightSpec::ExpField { alpha, .. } => check_alpha(*alpha, false)?,
        }
        match &self {
            WeightSpec::ComparisonPlus { eps, .. }
            | WeightSpec::ComparisonMinus { eps, .. }
            | WeightSpec::ExpField { eps, .. }
                if !eps.is_finite() =>
            {
                Err(Error::param("ε must be finite"))
            }
            _ => Ok(self),
        }
    }

    /// Shared-pointer form for the polynomial routines.
    pub fn into_weight(self) -> Arc<dyn Weight> {
        Arc::new(self)
    }

    /// `w(t)`, with `0` outside the support.
    pub fn eval(&self, t: f64) -> f64 {
        self.log_weight(t).exp()
    }
}

impl Weight for WeightSpec {
    fn support(&self) -> (f64, f64) {
        match self {
            WeightSpec::RhoR { r, .. } => (-r, *r),
            WeightSpec::ComparisonMinus { alpha, .. } => {
                let beta = 1.0 / (alpha * alpha);
                (-beta, beta)
            }
            _ => (-1.0, 1.0),
        }
    }

    fn endpoint(&self) -> Endpoint {
        match self {
            WeightSpec::RhoR { .. } | WeightSpec::WR { .. } => Endpoint::Legendre,
            WeightSpec::ComparisonPlus { .. } => Endpoint::ChebyshevFirst,
            WeightSpec::ComparisonMinus { .. } => Endpoint::ChebyshevSecond,
            WeightSpec::ExpField { exponent, .. } => exponent.endpoint(),
        }
    }

    fn log_smooth(&self, t: f64) -> f64 {
        match self {
            WeightSpec::RhoR { config, r } => config.log_rho(*r, t).unwrap_or(f64::NEG_INFINITY),
            WeightSpec::WR { config, r } => log_w_r(config, *r, t).unwrap_or(f64::NEG_INFINITY),
            WeightSpec::ComparisonPlus { alpha, eps, n } => {
                -(*n as f64) * (v_unchecked(t / alpha) + eps * t)
            }
            WeightSpec::ComparisonMinus { alpha, eps, n } => {
                -(*n as f64) * (v_unchecked(alpha * t) + eps * t)
            }
            WeightSpec::ExpField { alpha, eps, n, .. } => {
                -(*n as f64) * (v_unchecked(t / alpha) + eps * t)
            }
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::RhoR { r, .. } => write!(f, "rho_R(R={r})"),
            WeightSpec::WR { r, .. } => write!(f, "w_R(R={r})"),
            WeightSpec::ComparisonPlus { alpha, eps, n } => {
                write!(f, "comp+(alpha={alpha},eps={eps},N={n})")
            }
            WeightSpec::ComparisonMinus { alpha, eps, n } => {
                write!(f, "comp-(alpha={alpha},eps={eps},N={n})")
            }
            WeightSpec::ExpField {
                alpha,
                eps,
                n,
                exponent,
            } => write!(
                f,
                "expfield(alpha={alpha},eps={eps},N={n},gamma={})",
                exponent.value()
            ),
        }
    }
}

/// One grid point of an inequality check: the two margins, `≥ 0` when the
/// corresponding inequality holds (`+∞` where one side vanishes).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MarginSample {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Result of the product sandwich
/// `∏_{n≥R}(1 - R²t²/n²)² ≤ e^{-2RV(t)} ≤ ∏_{n≥R+1}(1 - R²t²/n²)²`, in logs.
#[derive(Clone, Debug, Serialize)]
pub struct ProductMarginReport {
    pub r: u64,
    pub samples: Vec<MarginSample>,
    pub min_lower: f64,
    pub min_upper: f64,
    /// Grid points where an inequality fails, with `"lower"` or `"upper"`.
    pub violations: Vec<(f64, &'static str)>,
}

impl ProductMarginReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

// Rounding allowance on log-margins.
const MARGIN_SLACK: f64 = 1e-12;

/// Checks the product sandwich for `e^{-2RV(t)}` on `t_grid ⊂ [-1, 1]`.
pub fn check_lemma21(r: u64, t_grid: &[f64]) -> Result<ProductMarginReport> {
    if r == 0 {
        return Err(Error::param("R must be a positive integer"));
    }
    let rf = r as f64;
    let samples: Vec<MarginSample> = t_grid
        .par_iter()
        .map(|&t| {
            let mid = -2.0 * rf * eval_v(t)?;
            let x = rf * t.abs();
            let low = 2.0 * log_paired_tail_product(rf, rf, x);
            let high = 2.0 * log_paired_tail_product(rf + 1.0, rf + 1.0, x);
            Ok(MarginSample {
                t,
                lower: mid - low,
                upper: high - mid,
            })
        })
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    for s in &samples {
        if s.lower < -MARGIN_SLACK || s.lower.is_nan() {
            violations.push((s.t, "lower"));
        }
        if s.upper < -MARGIN_SLACK || s.upper.is_nan() {
            violations.push((s.t, "upper"));
        }
    }
    Ok(ProductMarginReport {
        r,
        min_lower: samples
            .iter()
            .map(|s| s.lower)
            .fold(f64::INFINITY, f64::min),
        min_upper: samples
            .iter()
            .map(|s| s.upper)
            .fold(f64::INFINITY, f64::min),
        samples,
        violations,
    })
}

/// Result of comparing `w_R` against `e^{-N(V(t/α) + ε_R t)}` from above on
/// `[-1, 1]` and against `e^{-N(V(αt) + ε_R t)}` from below on `[-β, β]`.
#[derive(Clone, Debug, Serialize)]
pub struct Prop1Report {
    pub r: f64,
    pub n: usize,
    pub eps_r: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `log w_R(0)` and the log of both bounds at `0`.
    pub at_zero: [f64; 3],
    /// `lower` is the margin of the lower bound (only on `[-β, β]`, else `+∞`),
    /// `upper` of the upper bound.
    pub samples: Vec<MarginSample>,
    pub min_upper: f64,
    pub min_lower: f64,
}

impl Prop1Report {
    pub fn upper_holds(&self) -> bool {
        self.min_upper >= -MARGIN_SLACK
    }

    pub fn lower_holds(&self) -> bool {
        self.min_lower >= -MARGIN_SLACK
    }

    pub fn holds(&self) -> bool {
        self.upper_holds() && self.lower_holds()
    }
}

/// Both exponential bounds on `w_R` over `t_grid`, with `N` and `ε_R` taken
/// from the configuration unless `n` is given.
pub fn check_prop1(
    config: &PointConfiguration,
    r: f64,
    n: Option<usize>,
    alpha: f64,
    beta: f64,
    t_grid: &[f64],
) -> Result<Prop1Report> {
    check_alpha(alpha, true)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param(format!("β must lie in (0,1), got {beta}")));
    }
    if beta * alpha > 1.0 {
        return Err(Error::param(format!(
            "lower bound needs αβ ≤ 1 (α = {alpha}, β = {beta})"
        )));
    }
    let n = match n {
        Some(n) => n,
        None => config.count_points(r)?,
    };
    let eps_r = config.epsilon_r(r, n)?;
    let nf = n as f64;
    let samples: Vec<MarginSample> = t_grid
        .par_iter()
        .map(|&t| {
            let lw = log_w_r(config, r, t)?;
            let upper = -nf * (v_unchecked(t / alpha) + eps_r * t) - lw;
            let lower = if t.abs() <= beta {
                lw + nf * (v_unchecked(alpha * t) + eps_r * t)
            } else {
                f64::INFINITY
            };
            Ok(MarginSample { t, lower, upper })
        })
        .collect::<Result<_>>()?;
    Ok(Prop1Report {
        r,
        n,
        eps_r,
        alpha,
        beta,
        at_zero: [log_w_r(config, r, 0.0)?, 0.0, 0.0],
        min_upper: samples
            .iter()
            .map(|s| s.upper)
            .fold(f64::INFINITY, f64::min),
        min_lower: samples
            .iter()
            .map(|s| s.lower)
            .fold(f64::INFINITY, f64::min),
        samples,
    })
}

/// `check_prop1` over increasing radii; `threshold` is the smallest radius
/// from which on every report in the sweep holds.
#[derive(Clone, Debug, Serialize)]
pub struct Prop1Sweep {
    pub reports: Vec<Prop1Report>,
    pub threshold: Option<f64>,
}

pub fn prop1_sweep(
    config: &PointConfiguration,
    radii: &[f64],
    alpha: f64,
    beta: f64,
    t_grid: &[f64],
) -> Result<Prop1Sweep> {
    let reports = radii
        .iter()
        .map(|&r| check_prop1(config, r, None, alpha, beta, t_grid))
        .collect::<Result<Vec<_>>>()?;
    let mut threshold = None;
    for rep in reports.iter().rev() {
        if rep.holds() {
            threshold = Some(rep.r);
        } else {
            break;
        }
    }
    Ok(Prop1Sweep { reports, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;
    use crate::pointconf::make_lattice_config;

    #[test]
    fn v_values() {
        assert_eq!(eval_v(0.0).unwrap(), 0.0);
        assert!((eval_v(1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((eval_v(-1.0).unwrap() - 1.386_294_4).abs() < 1e-7);
        assert!(eval_v(1.0001).is_err());
        // series oracle at t = 0.5
        let mut s = 0.0;
        for k in 1..200 {
            let k = k as f64;
            s += 0.25f64.powf(k) / (k * (2.0 * k - 1.0));
        }
        assert!((eval_v(0.5).unwrap() - s).abs() < 1e-14);
        // both branches meet at the cutoff
        let series: f64 = (1..40)
            .map(|k| {
                let k = k as f64;
                0.01f64.powf(k) / (k * (2.0 * k - 1.0))
            })
            .sum();
        assert!((v_unchecked(0.1) - series).abs() < 1e-16);
    }

    #[test]
    fn w_r_basics() {
        let c = make_lattice_config(20.0, 0.5).unwrap();
        assert_eq!(eval_w_r(&c, 10.0, 0.0).unwrap(), 1.0);
        for t in linspace(-0.99, 0.99, 21) {
            let w = eval_w_r(&c, 10.0, t).unwrap();
            assert!(w > 0.0 && w <= 1.0);
            assert!((log_w_r(&c, 10.0, t).unwrap() - log_w_r(&c, 10.0, -t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_r_tail_against_brute_force_product() {
        let c = make_lattice_config(20.0, 0.5).unwrap();
        let t: f64 = 5.0;
        // 2 Σ_{k≥0} [log(1 - t/(10.5+k)) + log(1 + t/(10.5+k))]
        let mut acc = crate::numerics::CompensatedSum::new();
        let kmax = 1_000_000;
        for k in 0..kmax {
            let p = 10.5 + k as f64;
            acc.add(2.0 * (-(t / p) * (t / p)).ln_1p());
        }
        // remaining tail ≈ -2 t² / (10.5 + kmax)
        let brute = acc.value() - 2.0 * t * t / (10.5 + kmax as f64);
        assert!((log_rho_r(&c, 10.0, t).unwrap() - brute).abs() < 1e-10);
    }

    #[test]
    fn comparison_weights() {
        for s in [Sign::Plus, Sign::Minus] {
            assert_eq!(eval_comparison(s, 1.3, 0.2, 30, 0.0).unwrap(), 1.0);
            let a = eval_comparison(s, 1.3, 0.0, 30, 0.4).unwrap();
            let b = eval_comparison(s, 1.3, 0.0, 30, -0.4).unwrap();
            assert!((a - b).abs() < 1e-15 * a.max(1e-300));
        }
        assert_eq!(
            eval_comparison(Sign::Plus, 1.2, 0.0, 4, 1.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(eval_comparison(Sign::Minus, 1.2, 0.0, 4, 0.9).unwrap(), 0.0);
        assert!(eval_comparison(Sign::Plus, 1.0, 0.0, 4, 0.0).is_err());
        let beta = 1.0 / (1.2f64 * 1.2);
        for t in linspace(-beta, beta, 101) {
            let lo = eval_comparison(Sign::Minus, 1.2, 0.0, 20, t).unwrap();
            let hi = eval_comparison(Sign::Plus, 1.2, 0.0, 20, t).unwrap();
            assert!(lo <= hi);
        }
    }

    #[test]
    fn spec_weights_match_direct_formulas() {
        let plus = WeightSpec::ComparisonPlus {
            alpha: 1.2,
            eps: 0.1,
            n: 12,
        };
        let t = 0.37;
        assert!(
            (plus.log_weight(t) - log_comparison(Sign::Plus, 1.2, 0.1, 12, t).unwrap()).abs()
                < 1e-13
        );
        let minus = WeightSpec::ComparisonMinus {
            alpha: 1.2,
            eps: 0.1,
            n: 12,
        };
        assert!(
            (minus.log_weight(t) - log_comparison(Sign::Minus, 1.2, 0.1, 12, t).unwrap()).abs()
                < 1e-13
        );
        assert_eq!(minus.eval(0.8), 0.0);
        let ef = WeightSpec::ExpField {
            alpha: 1.0,
            eps: 0.0,
            n: 3,
            exponent: JacobiExponent::PlusHalf,
        };
        let direct = 0.5 * (1.0 - t * t).ln() - 3.0 * v_unchecked(t);
        assert!((ef.log_weight(t) - direct).abs() < 1e-13);
    }

    #[test]
    fn lemma_sandwich_holds_with_positive_margin() {
        let grid = linspace(-1.0, 1.0, 41);
        for r in [1, 5, 20] {
            let rep = check_lemma21(r, &grid).unwrap();
            assert!(rep.holds(), "R={r}: {:?}", rep.violations);
        }
        let rep = check_lemma21(5, &[0.0, 0.5]).unwrap();
        assert_eq!(rep.samples[0].lower, 0.0);
        assert_eq!(rep.samples[0].upper, 0.0);
        assert!(rep.samples[1].lower > 0.0 && rep.samples[1].upper > 0.0);
    }

    #[test]
    fn lemma_margins_are_quadratic_near_zero() {
        let rep = check_lemma21(5, &[1e-2, 2e-2]).unwrap();
        for m in [
            (rep.samples[0].lower, rep.samples[1].lower),
            (rep.samples[0].upper, rep.samples[1].upper),
        ] {
            let slope = (m.1 / m.0).log2();
            assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
        }
    }

    #[test]
    fn prop1_equality_at_zero_and_sweep() {
        let c = make_lattice_config(200.0, 0.5).unwrap();
        let grid = linspace(-1.0, 1.0, 201);
        let rep = check_prop1(&c, 20.0, None, 1.1, 0.8, &grid).unwrap();
        assert_eq!(rep.n, 40);
        assert!(rep.eps_r.abs() < 1e-14);
        let zero = rep.samples.iter().find(|s| s.t == 0.0).unwrap();
        assert_eq!(zero.upper, 0.0);
        assert_eq!(zero.lower, 0.0);
        let radii: Vec<f64> = (1..=16).map(|k| 10.0 * k as f64).collect();
        let sweep = prop1_sweep(&c, &radii, 1.1, 0.8, &grid).unwrap();
        assert!(sweep.threshold.is_some());
        assert!(check_prop1(&c, 20.0, None, 1.5, 0.8, &grid).is_err());
    }
}
