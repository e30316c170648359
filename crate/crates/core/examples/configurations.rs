//! Lattice and jittered configurations: point counts, `ε_R`, the assumption
//! diagnostics, and the `ρ_R` weight they induce.

use rkl::pointconf::{
    check_assumptions, default_s_grid, make_jittered_config, make_lattice_config,
};
use rkl::weights::eval_w_r;

fn main() -> rkl::Result<()> {
    let lattice = make_lattice_config(100.0, 0.5)?;
    let jitter = make_jittered_config(100.0, 0.3, 0.4, 1)?;

    for (name, config) in [("lattice", &lattice), ("jitter", &jitter)] {
        println!("{name}: {} window points", config.points().len());
        for r in [8.0, 16.0, 32.0] {
            let n = config.count_points(r)?;
            println!(
                "  R={r:<4} N(R)={n:<3} eps_R={:+.3e}",
                config.epsilon_r(r, n)?
            );
        }
        let report = check_assumptions(config, &default_s_grid(config))?;
        println!(
            "  monotone={} pv≈{:.4} max|p_n/n-1|={:.3}",
            report.monotone, report.pv_estimate, report.max_ratio_deviation
        );
    }

    println!("w_R on [-1, 1] for the jittered configuration, R = 16:");
    for t in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        println!("  t={t:+.1}  w_R={:.6}", eval_w_r(&jitter, 16.0, t)?);
    }
    Ok(())
}
