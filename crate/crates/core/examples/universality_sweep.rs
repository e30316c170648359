//! Convergence of the rescaled `w_R` kernel to the sine kernel along a sweep
//! of radii, for the lattice and a jittered configuration.

use std::sync::Arc;

use rkl::pointconf::{make_jittered_config, make_lattice_config};
use rkl::universality::{default_quad_order, run_universality, GridSpec, Scaling};

fn main() -> rkl::Result<()> {
    let spec = GridSpec {
        half_width: 2.0,
        grid_n: 41,
    };
    let configs = [
        ("half-integer lattice", make_lattice_config(200.0, 0.5)?),
        (
            "jittered lattice",
            make_jittered_config(200.0, 0.3, 0.4, 3)?,
        ),
    ];
    for (name, config) in configs {
        let table = run_universality(
            Arc::new(config),
            &[8.0, 16.0, 32.0, 64.0],
            spec,
            Scaling::CountPoints,
            default_quad_order,
        )?;
        println!("{name}");
        println!(
            "  {:>4} {:>4} {:>11} {:>11} {:>9}",
            "R", "N", "eps_R", "sup error", "K(0,0)"
        );
        for row in &table.rows {
            println!(
                "  {:>4} {:>4} {:>+11.3e} {:>11.3e} {:>9.6}",
                row.r,
                row.n,
                row.eps_r,
                row.sup_error.unwrap_or(f64::NAN),
                row.center_value.unwrap_or(f64::NAN)
            );
        }
        println!("  strictly decreasing: {}", table.strictly_decreasing());
    }
    Ok(())
}
