//! Bulk scaling of `(1-t²)^{±1/2} e^{-N V_{α,ε}}` kernels towards the sine
//! kernel, at the center and off center.

use rkl::equilibrium::{eps_alpha, EquilibriumParams};
use rkl::expfield::expfield_sweep;
use rkl::weights::JacobiExponent;

fn main() -> rkl::Result<()> {
    let alpha = 1.3;
    let pairs = [(0.0, 0.0), (0.5, -0.5), (1.0, 0.25)];
    for exponent in [JacobiExponent::MinusHalf, JacobiExponent::PlusHalf] {
        for (x0, frac) in [(0.0, 0.0), (0.0, 0.5), (0.5, -0.5)] {
            let params = EquilibriumParams::new(alpha, frac * eps_alpha(alpha))?;
            println!("{exponent:?}, x0={x0}, ε={:.4}", params.eps);
            for s in expfield_sweep(params, exponent, x0, &[20, 40, 80, 160], &pairs)? {
                println!(
                    "  N={:<4} ({:+.2},{:+.2})  K={:.6}  sine={:.6}  N·err={:.3}",
                    s.n,
                    s.x,
                    s.y,
                    s.kernel,
                    s.sine,
                    s.n as f64 * s.abs_err
                );
            }
        }
    }
    Ok(())
}
