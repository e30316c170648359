//! Diagonal kernels of `w⁺ ≤ w_R ≤ w⁻` at `R = 64` and Lubinsky's inequality
//! between `w_R` and `w⁺`.

use std::sync::Arc;

use rkl::pointconf::make_lattice_config;
use rkl::universality::ComparisonSet;

fn main() -> rkl::Result<()> {
    let config = Arc::new(make_lattice_config(200.0, 0.5)?);
    for alpha in [1.3, 1.1, 1.02] {
        let set = ComparisonSet::build(config.clone(), 64.0, alpha)?;
        let rep = set.sandwich(&[-2.0, -1.0, 0.0, 1.0, 2.0])?;
        println!(
            "α={alpha}: limits c+={:.5} c-={:.5}",
            rep.c_plus, rep.c_minus
        );
        for s in &rep.samples {
            println!(
                "  x={:+.1}  {:.5} ≤ {:.5} ≤ {:.5}",
                s.x, s.plus, s.rho, s.minus
            );
        }
        let lub = set.lubinsky(0.5, -0.5)?;
        println!(
            "  Lubinsky at (0.5,-0.5): {:.3e} ≤ {:.3e}",
            lub.lhs, lub.rhs
        );
    }
    Ok(())
}
