//! Recurrence coefficients, orthonormality checks and the Christoffel–Darboux
//! kernel, first for Legendre and then for `w_R`.

use std::sync::Arc;

use rkl::orthopoly::{stieltjes_checked, UnitWeight, Weight};
use rkl::pointconf::make_lattice_config;
use rkl::universality::default_quad_order;
use rkl::weights::WeightSpec;

fn main() -> rkl::Result<()> {
    let legendre: Arc<dyn Weight> = Arc::new(UnitWeight {
        interval: (-1.0, 1.0),
    });
    let c = stieltjes_checked(legendre, 8, 64)?;
    for (k, b) in c.b.iter().enumerate() {
        let m = (k + 1) as f64;
        println!(
            "b_{k} = {b:.15}  (exact {:.15})",
            m / (4.0 * m * m - 1.0).sqrt()
        );
    }

    let config = Arc::new(make_lattice_config(100.0, 0.5)?);
    let r = 20.0;
    let n = config.count_points(r)?;
    let order = default_quad_order(n);
    let w = stieltjes_checked(WeightSpec::WR { config, r }.into_weight(), n, order)?;
    println!(
        "w_R, R={r}, N={n}: doubling check moved coefficients by {:.1e}",
        w.stability.unwrap()
    );
    println!("  Gram deviation {:.1e}", w.gram_deviation(n, order)?);
    println!("  trace of K_N   {:.12}", w.trace(n, order)?);
    for x in [0.0, 0.25, 0.5, 0.9] {
        println!(
            "  x={x:<4}  K_N(x,x)/N = {:.6}  Christoffel λ_N(x) = {:.6}",
            w.cd_kernel(n, x, x, true)? / n as f64,
            w.christoffel_function(n, x)?
        );
    }
    Ok(())
}
