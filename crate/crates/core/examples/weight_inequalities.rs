//! The product bounds on `e^{-2RV}` and the exponential bounds on `w_R`
//! that drive the comparison argument.

use rkl::numerics::linspace;
use rkl::pointconf::make_lattice_config;
use rkl::weights::{check_lemma21, prop1_sweep};

fn main() -> rkl::Result<()> {
    let grid = linspace(-1.0, 1.0, 201);
    for r in [2, 5, 10, 50] {
        let rep = check_lemma21(r, &grid)?;
        println!(
            "R={r:<3} product bounds hold={} (min margins {:.2e}, {:.2e})",
            rep.holds(),
            rep.min_lower,
            rep.min_upper
        );
    }

    let config = make_lattice_config(200.0, 0.5)?;
    let radii: Vec<f64> = (1..=16).map(|k| 10.0 * k as f64).collect();
    let sweep = prop1_sweep(&config, &radii, 1.1, 0.8, &grid)?;
    for rep in &sweep.reports {
        println!(
            "R={:<5} N={:<4} upper margin {:.3e}  lower margin {:.3e}",
            rep.r, rep.n, rep.min_upper, rep.min_lower
        );
    }
    println!("both bounds hold from R = {:?} on", sweep.threshold);
    Ok(())
}
