//! Small numerical kernels shared by the other modules: compensated
//! accumulation, log-gamma and digamma differences, grids.

use crate::{Error, Result};

/// Neumaier (improved Kahan) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn csum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

const STIRLING_MIN: f64 = 15.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Σ B_{2k} / (2k(2k-1) x^{2k-1}), k = 1..7
fn stirling_series(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 * (1.0 / 156.0)))))))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x <= 0.0 {
        return if x == 0.0 { f64::INFINITY } else { f64::NAN };
    }
    let mut shift = CompensatedSum::new();
    let mut y = x;
    while y < STIRLING_MIN {
        shift.add(-y.ln());
        y += 1.0;
    }
    (y - 0.5) * y.ln() - y + HALF_LN_2PI + stirling_series(y) + shift.value()
}

/// `ln Γ(a) - ln Γ(b)` for positive arguments, without the cancellation of
/// subtracting two large log-gammas.
///
/// Returns `-∞` when `b == 0` and `+∞` when `a == 0`.
pub fn ln_gamma_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b == 0.0 {
        return f64::NEG_INFINITY;
    }
    if a == 0.0 {
        return f64::INFINITY;
    }
    if a < 0.0 || b < 0.0 {
        return f64::NAN;
    }
    let d = a - b;
    let mut acc = CompensatedSum::new();
    let mut aa = a;
    let mut bb = b;
    while aa.min(bb) < STIRLING_MIN {
        // ln(aa) - ln(bb)
        acc.add(-(d / bb).ln_1p());
        aa += 1.0;
        bb += 1.0;
    }
    acc.add((aa - 0.5) * (d / bb).ln_1p());
    acc.add(d * (bb.ln() - 1.0));
    acc.add(stirling_series(aa) - stirling_series(bb));
    acc.value()
}

/// `log ∏_{k≥0} (1 - t/(a+k)) (1 + t/(b+k))` for `a, b > 0`, `-b < t ≤ a`.
///
/// This is `ln Γ(a) - ln Γ(a-t) + ln Γ(b) - ln Γ(b+t)`; the product converges
/// because the `1/k` terms of the two factors cancel.
pub fn log_paired_tail_product(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    ln_gamma_diff(a, a - t) + ln_gamma_diff(b, b + t)
}

fn digamma_asymptotic_tail(x: f64) -> f64 {
    // -1/(2x) - Σ B_{2k}/(2k x^{2k})
    let r = 1.0 / x;
    let r2 = r * r;
    -0.5 * r
        - r2 * (1.0 / 12.0
            + r2 * (-1.0 / 120.0
                + r2 * (1.0 / 252.0
                    + r2 * (-1.0 / 240.0 + r2 * (1.0 / 132.0 + r2 * (-691.0 / 32_760.0))))))
}

/// Digamma `ψ(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    let mut acc = CompensatedSum::new();
    let mut y = x;
    while y < STIRLING_MIN {
        acc.add(-1.0 / y);
        y += 1.0;
    }
    acc.add(y.ln());
    acc.add(digamma_asymptotic_tail(y));
    acc.value()
}

/// `ψ(b) - ψ(a) = Σ_{k≥0} (1/(a+k) - 1/(b+k))` for positive arguments.
pub fn digamma_diff(b: f64, a: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let d = b - a;
    let mut acc = CompensatedSum::new();
    let mut aa = a;
    let mut bb = b;
    while aa.min(bb) < STIRLING_MIN {
        acc.add(1.0 / aa - 1.0 / bb);
        aa += 1.0;
        bb += 1.0;
    }
    acc.add((d / aa).ln_1p());
    acc.add(digamma_asymptotic_tail(bb) - digamma_asymptotic_tail(aa));
    acc.value()
}

/// `n` equally spaced points from `a` to `b` inclusive (`n == 1` gives `a`).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

/// Parses a grid given as `a:b:n`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "grid `{spec}` is not of the form a:b:n"
        )));
    }
    let a: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid start `{}`", parts[0])))?;
    let b: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid end `{}`", parts[1])))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count `{}`", parts[2])))?;
    if n == 0 || !a.is_finite() || !b.is_finite() || b < a {
        return Err(Error::param(format!("grid `{spec}` is empty or reversed")));
    }
    Ok(linspace(a, b, n))
}

/// `sin(πd)/(πd)`, with a series near `d = 0`.
pub fn sinc_pi(d: f64) -> f64 {
    if d.abs() < 1e-6 {
        let z = std::f64::consts::PI * d;
        1.0 - z * z / 6.0
    } else {
        let z = std::f64::consts::PI * d;
        z.sin() / z
    }
}
