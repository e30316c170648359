//! Equilibrium densities in the field `V_{α,ε}`: closed form, variational
//! conditions, a discretized minimizer and the `Re ξ` contour bound.

use rkl::equilibrium::{
    discrete_equilibrium, eps_alpha, min_re_xi_on_ellipse, verify_variational, EquilibriumParams,
};
use rkl::numerics::linspace;

fn main() -> rkl::Result<()> {
    let grid = linspace(-0.99, 0.99, 199);
    let cases = [
        (1.0, 0.0),
        (1.1, 0.0),
        (1.1, 0.5),
        (1.3, 0.0),
        (1.3, 0.5),
        (2.0, -0.9),
    ];
    for (alpha, frac) in cases {
        let p = EquilibriumParams::new(alpha, frac * eps_alpha(alpha))?;
        let rep = verify_variational(&p, &grid)?;
        println!(
            "α={alpha:<3} ε={:<6.4} mass={:.12} ℓ={:.6} max|2U+V-ℓ|={:.1e} ψ(0)={:.5}",
            p.eps,
            rep.normalization,
            rep.ell_estimate,
            rep.max_variational_deviation,
            p.density(0.0)
        );
    }

    let p = EquilibriumParams::new(1.3, 0.2)?;
    let discrete = discrete_equilibrium(&p, 200)?;
    println!(
        "discretized minimizer, 200 cells: TV distance {:.2e}",
        discrete.tv_distance
    );

    let xi = min_re_xi_on_ellipse(&p, 1.05)?;
    println!(
        "min Re ξ on Γ_1.05 = {:.5} (bound {:.5}, sampled M = {:.3})",
        xi.min_re_xi, xi.lower_bound, xi.m_bound
    );
    Ok(())
}
