//! Point configurations `… < p₋₁ < 0 ≤ p₀ < p₁ < …` on the real line.
//!
//! A configuration is stored as a finite window of explicit points with
//! `|pₙ| ≤ S`, continued beyond the window by an exact lattice tail
//! `pₙ = n + shift`. Every infinite sum or product over the points then splits
//! into a finite window part and a tail part with a closed form (digamma for
//! `Σ 1/pₙ`, log-gamma for `∏ (1 - t/pₙ)`).
//!
//! Principal-value sums pair the k-th positive point beyond a radius with the
//! k-th negative one before accumulating; unpaired remainders are added last.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{digamma_diff, log_paired_tail_product, CompensatedSum};
use crate::{Error, Result};

/// How the configuration continues outside the stored window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailModel {
    /// Beyond the window every point is `n + shift` for an integer `n`.
    Lattice { shift: f64 },
    /// The configuration is exactly the window. Only diagnostics are defined.
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointConfiguration {
    points: Vec<f64>,
    window_radius: f64,
    index_offset: i64,
    tail: TailModel,
}

/// Points strictly beyond a radius `R`, split into window parts and the first
/// lattice points of the tail on each side.
#[derive(Clone, Debug)]
pub(crate) struct Exterior {
    /// `R < p ≤ S`, ascending.
    pub positive: Vec<f64>,
    /// `|p|` for `-S ≤ p < -R`, ascending in absolute value.
    pub negative: Vec<f64>,
    /// First tail point on the right and `|·|` of the first one on the left.
    pub tail: Option<(f64, f64)>,
}

impl PointConfiguration {
    /// Builds a configuration from window points (any order) after checking
    /// the invariants. A point exactly at `0` gets index `0`.
    pub fn new(mut points: Vec<f64>, window_radius: f64, tail: TailModel) -> Result<Self> {
        if !(window_radius.is_finite() && window_radius > 0.0) {
            return Err(Error::param(format!(
                "window radius must be positive, got {window_radius}"
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::param("configuration contains a non-finite point"));
        }
        points.sort_by(|a, b| a.total_cmp(b));
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::param(format!(
                "points must be strictly increasing, found repeated value {}",
                w[0]
            )));
        }
        if let Some(p) = points.iter().find(|p| p.abs() > window_radius) {
            return Err(Error::param(format!(
                "point {p} lies outside the window radius {window_radius}"
            )));
        }
        if let TailModel::Lattice { shift } = tail {
            if !shift.is_finite() {
                return Err(Error::param("lattice shift must be finite"));
            }
            let (a, b) = lattice_tail_starts(window_radius, shift);
            if let Some(&last) = points.last() {
                if last >= a {
                    return Err(Error::param(format!(
                        "last window point {last} is not below the first tail point {a}"
                    )));
                }
            }
            if let Some(&first) = points.first() {
                if first <= -b {
                    return Err(Error::param(format!(
                        "first window point {first} is not above the last negative tail point {}",
                        -b
                    )));
                }
            }
        }
        let negatives = points.iter().take_while(|&&p| p < 0.0).count();
        Ok(Self {
            points,
            window_radius,
            index_offset: -(negatives as i64),
            tail,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    /// Index of the first stored point, so that `points()[i]` is `p_{index_offset + i}`.
    pub fn index_offset(&self) -> i64 {
        self.index_offset
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn has_tail(&self) -> bool {
        matches!(self.tail, TailModel::Lattice { .. })
    }

    /// True when `pₙ = -p₋₁₋ₙ` for every stored point and the tail is the
    /// half-integer lattice.
    pub fn is_symmetric(&self) -> bool {
        let tail_ok = match self.tail {
            TailModel::Lattice { shift } => ((shift - 0.5).rem_euclid(1.0)).abs() < 1e-15,
            TailModel::None => true,
        };
        let n = self.points.len();
        tail_ok && (0..n).all(|i| self.points[i] == -self.points[n - 1 - i])
    }

    /// `pₙ` for any index, reading the lattice tail outside the window.
    pub fn point(&self, index: i64) -> Option<f64> {
        let len = self.points.len() as i64;
        let local = index - self.index_offset;
        if (0..len).contains(&local) {
            return Some(self.points[local as usize]);
        }
        let TailModel::Lattice { shift } = self.tail else {
            return None;
        };
        let (a, b) = lattice_tail_starts(self.window_radius, shift);
        if local >= len {
            Some(a + (local - len) as f64)
        } else {
            Some(-(b + (-1 - local) as f64))
        }
    }

    /// First tail point on each side as `(a, b)`: the tail is `{a + k}` and
    /// `{-(b + k)}` for `k ≥ 0`.
    pub fn tail_starts(&self) -> Option<(f64, f64)> {
        match self.tail {
            TailModel::Lattice { shift } => Some(lattice_tail_starts(self.window_radius, shift)),
            TailModel::None => None,
        }
    }

    pub(crate) fn exterior(&self, r: f64) -> Exterior {
        let positive: Vec<f64> = self.points.iter().copied().filter(|&p| p > r).collect();
        let mut negative: Vec<f64> = self
            .points
            .iter()
            .copied()
            .filter(|&p| p < -r)
            .map(f64::abs)
            .collect();
        negative.reverse();
        let tail = self
            .tail_starts()
            .map(|(a, b)| (first_lattice_after(a, r), first_lattice_after(b, r)));
        Exterior {
            positive,
            negative,
            tail,
        }
    }

    /// `N(R) = #{pₙ : |pₙ| ≤ R}`; boundary points count as inside.
    pub fn count_points(&self, r: f64) -> Result<usize> {
        if !(r >= 0.0) {
            return Err(Error::param(format!("radius must be nonnegative, got {r}")));
        }
        let window = self.points.iter().filter(|p| p.abs() <= r).count();
        if r <= self.window_radius {
            return Ok(window);
        }
        match self.tail_starts() {
            None => Err(Error::param(format!(
                "radius {r} exceeds the window radius {} of a configuration without tail",
                self.window_radius
            ))),
            Some((a, b)) => {
                let side = |start: f64| {
                    if r >= start {
                        (r - start).floor() as usize + 1
                    } else {
                        0
                    }
                };
                Ok(window + side(a) + side(b))
            }
        }
    }

    /// Principal value of `Σ_{|pₙ|>R} 1/pₙ`.
    pub fn exterior_reciprocal_sum(&self, r: f64) -> Result<f64> {
        let ext = self.exterior(r);
        let Some((a, b)) = ext.tail else {
            return Err(Error::param(
                "sum over exterior points is undefined for a configuration without tail",
            ));
        };
        let mut acc = paired_accumulate(&ext.positive, &ext.negative, |p| 1.0 / p, |q| -1.0 / q);
        // Σ_k 1/(a+k) - 1/(b+k)
        acc.add(digamma_diff(b, a));
        Ok(acc.value())
    }

    /// `ε_R = (2R/N) Σ_{|pₙ|>R} 1/pₙ`.
    pub fn epsilon_r(&self, r: f64, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::param("N must be at least 1"));
        }
        if r > self.window_radius && !self.has_tail() {
            return Err(Error::param("radius exceeds the window"));
        }
        Ok(2.0 * r / n as f64 * self.exterior_reciprocal_sum(r)?)
    }

    /// `log ρ_R(t) = 2 Σ_{|pₙ|>R} log(1 - t/pₙ)` for `|t| ≤ R`.
    pub fn log_rho(&self, r: f64, t: f64) -> Result<f64> {
        if t.abs() > r {
            return Err(Error::domain(format!("|t| = {} exceeds R = {r}", t.abs())));
        }
        let ext = self.exterior(r);
        let Some((a, b)) = ext.tail else {
            return Err(Error::param(
                "ρ_R is undefined for a configuration without tail",
            ));
        };
        if t == 0.0 {
            return Ok(0.0);
        }
        let mut acc = paired_accumulate(
            &ext.positive,
            &ext.negative,
            |p| (-t / p).ln_1p(),
            |q| (t / q).ln_1p(),
        );
        acc.add(log_paired_tail_product(a, b, t));
        Ok(2.0 * acc.value())
    }

    /// Serializes to the plain-text configuration format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "window_radius={}", self.window_radius);
        match self.tail {
            TailModel::Lattice { shift } => {
                let _ = writeln!(out, "tail=lattice:{shift}");
            }
            TailModel::None => out.push_str("tail=none\n"),
        }
        for p in &self.points {
            let _ = writeln!(out, "{p}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let radius_line = lines
            .next()
            .ok_or_else(|| Error::Parse("empty configuration file".into()))?;
        let window_radius: f64 = radius_line
            .strip_prefix("window_radius=")
            .ok_or_else(|| Error::Parse(format!("expected `window_radius=`, got `{radius_line}`")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad window radius in `{radius_line}`")))?;
        let tail_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `tail=` line".into()))?;
        let tail = match tail_line.strip_prefix("tail=") {
            Some("none") => TailModel::None,
            Some(rest) => {
                let shift = rest
                    .strip_prefix("lattice:")
                    .ok_or_else(|| Error::Parse(format!("unknown tail model `{rest}`")))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad lattice shift in `{tail_line}`")))?;
                TailModel::Lattice { shift }
            }
            None => return Err(Error::Parse(format!("expected `tail=`, got `{tail_line}`"))),
        };
        let points = lines
            .map(|l| {
                l.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad point `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, window_radius, tail)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn lattice_tail_starts(radius: f64, shift: f64) -> (f64, f64) {
    let mut a = (radius - shift).floor() + 1.0 + shift;
    while a <= radius {
        a += 1.0;
    }
    // negative side: largest n + shift < -radius, reported as |·|
    let mut b = -((-radius - shift).ceil() - 1.0 + shift);
    while b <= radius {
        b += 1.0;
    }
    (a, b)
}

fn first_lattice_after(start: f64, r: f64) -> f64 {
    if start > r {
        start
    } else {
        let mut q = start + (r - start).floor() + 1.0;
        while q <= r {
            q += 1.0;
        }
        q
    }
}

/// Accumulates `f(pₖ) + g(qₖ)` pairwise, then the unpaired remainder.
fn paired_accumulate(
    positive: &[f64],
    negative: &[f64],
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
) -> CompensatedSum {
    let mut acc = CompensatedSum::new();
    let paired = positive.len().min(negative.len());
    for k in 0..paired {
        acc.add(f(positive[k]) + g(negative[k]));
    }
    for &p in &positive[paired..] {
        acc.add(f(p));
    }
    for &q in &negative[paired..] {
        acc.add(g(q));
    }
    acc
}

/// The lattice `{n + shift : |n + shift| ≤ S}` with a matching tail.
pub fn make_lattice_config(window_radius: f64, shift: f64) -> Result<PointConfiguration> {
    if !(window_radius > 1.0) {
        return Err(Error::param(format!(
            "window radius must exceed 1, got {window_radius}"
        )));
    }
    if !(shift.abs() < 1.0) {
        return Err(Error::param(format!(
            "|shift| must be below 1, got {shift}"
        )));
    }
    if shift == 0.0 {
        return Err(Error::param(
            "shift 0 puts a lattice point at the origin; choose a nonzero shift",
        ));
    }
    let n_lo = (-window_radius - shift).ceil() as i64;
    let n_hi = (window_radius - shift).floor() as i64;
    let points = (n_lo..=n_hi)
        .map(|n| n as f64 + shift)
        .filter(|p| p.abs() <= window_radius)
        .collect();
    PointConfiguration::new(points, window_radius, TailModel::Lattice { shift })
}

const JITTER_CAP: f64 = 0.49;

/// Half-integer lattice with independent jitter
/// `|δₙ| ≤ min(amplitude (1+|n|)^exponent, 0.49)`, deterministic in `seed`.
pub fn make_jittered_config(
    window_radius: f64,
    amplitude: f64,
    exponent: f64,
    seed: u64,
) -> Result<PointConfiguration> {
    if !(0.0..1.0).contains(&exponent) {
        return Err(Error::param(format!(
            "exponent must lie in [0, 1), got {exponent}"
        )));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::param(format!(
            "amplitude must be nonnegative, got {amplitude}"
        )));
    }
    let base = make_lattice_config(window_radius, 0.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = base
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let n = base.index_offset() + i as i64;
            let cap = (amplitude * (1.0 + n.unsigned_abs() as f64).powf(exponent)).min(JITTER_CAP);
            if cap == 0.0 {
                p
            } else {
                let delta = rng.random_range(-cap..=cap);
                (p + delta).clamp(-window_radius, window_radius)
            }
        })
        .collect();
    PointConfiguration::new(points, window_radius, TailModel::Lattice { shift: 0.5 })
}

/// Diagnostics for the standing assumptions on a configuration: strict
/// monotonicity, principal-value convergence of `Σ 1/pₙ`, and `pₙ/n → 1`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AssumptionReport {
    pub monotone: bool,
    /// `(S, Σ_{0<|pₙ|<S} 1/pₙ)` over the requested radii.
    pub pv_partial_sums: Vec<(f64, f64)>,
    /// `(n, pₙ/n)` for window indices and a few far tail indices.
    pub ratio_samples: Vec<(i64, f64)>,
    /// Full principal value (window plus closed-form tail).
    pub pv_estimate: f64,
    /// `max |pₙ/n - 1|` over samples with `|n| ≥ 10`.
    pub max_ratio_deviation: f64,
    pub notes: Vec<String>,
}

/// Ratio deviations are judged from this index on.
pub const RATIO_MIN_INDEX: i64 = 10;
const RATIO_TOLERANCE: f64 = 0.2;

impl AssumptionReport {
    /// Distance between the last partial sum and the full principal value.
    pub fn pv_remainder(&self) -> f64 {
        self.pv_partial_sums
            .last()
            .map_or(f64::INFINITY, |&(_, s)| (self.pv_estimate - s).abs())
    }

    pub fn pv_converges(&self) -> bool {
        match self.pv_partial_sums.last() {
            Some(&(s, _)) => self.pv_estimate.is_finite() && self.pv_remainder() <= 2.0 / s,
            None => false,
        }
    }

    pub fn ratio_ok(&self) -> bool {
        self.max_ratio_deviation <= RATIO_TOLERANCE
    }

    pub fn passes(&self) -> bool {
        self.monotone && self.pv_converges() && self.ratio_ok()
    }
}

/// Radii `1, 2, 4, …` up to and including the window radius.
pub fn default_s_grid(config: &PointConfiguration) -> Vec<f64> {
    let s = config.window_radius();
    let mut grid = Vec::new();
    let mut r = 1.0;
    while r < s {
        grid.push(r);
        r *= 2.0;
    }
    grid.push(s);
    grid
}

pub fn check_assumptions(config: &PointConfiguration, s_grid: &[f64]) -> Result<AssumptionReport> {
    if s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("S grid must be strictly increasing"));
    }
    if let Some(&last) = s_grid.last() {
        if last > config.window_radius() {
            return Err(Error::param(format!(
                "S grid reaches {last}, beyond the window radius {}",
                config.window_radius()
            )));
        }
    }
    let pts = config.points();
    let monotone = pts.windows(2).all(|w| w[0] < w[1]);
    let pv_partial_sums = s_grid
        .iter()
        .map(|&s| {
            let positive: Vec<f64> = pts.iter().copied().filter(|&p| p > 0.0 && p < s).collect();
            let negative: Vec<f64> = pts
                .iter()
                .rev()
                .copied()
                .filter(|&p| p < 0.0 && p > -s)
                .map(f64::abs)
                .collect();
            let v = paired_accumulate(&positive, &negative, |p| 1.0 / p, |q| -1.0 / q).value();
            (s, v)
        })
        .collect::<Vec<_>>();

    let mut notes = Vec::new();
    let window_total = {
        let positive: Vec<f64> = pts.iter().copied().filter(|&p| p > 0.0).collect();
        let negative: Vec<f64> = pts
            .iter()
            .rev()
            .copied()
            .filter(|&p| p < 0.0)
            .map(f64::abs)
            .collect();
        paired_accumulate(&positive, &negative, |p| 1.0 / p, |q| -1.0 / q).value()
    };
    let pv_estimate = match config.tail_starts() {
        Some((a, b)) => window_total + digamma_diff(b, a),
        None => {
            notes.push("principal value defined only on window".to_string());
            window_total
        }
    };

    let mut ratio_samples = Vec::new();
    let first = config.index_offset();
    let last = first + pts.len() as i64 - 1;
    for n in first..=last {
        if n != 0 {
            ratio_samples.push((n, config.point(n).unwrap() / n as f64));
        }
    }
    if config.has_tail() {
        let far = (last.max(-first).max(1)) * 10;
        for n in [far, 2 * far, 4 * far] {
            for idx in [n, -n] {
                ratio_samples.push((idx, config.point(idx).unwrap() / idx as f64));
            }
        }
    }
    ratio_samples.sort_by_key(|&(n, _)| n);
    let max_ratio_deviation = ratio_samples
        .iter()
        .filter(|(n, _)| n.abs() >= RATIO_MIN_INDEX)
        .map(|(_, r)| (r - 1.0).abs())
        .fold(0.0, f64::max);

    Ok(AssumptionReport {
        monotone,
        pv_partial_sums,
        ratio_samples,
        pv_estimate,
        max_ratio_deviation,
        notes,
    })
}
