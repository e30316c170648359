use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use rkl::equilibrium::{eps_alpha, normalization, EquilibriumParams};
use rkl::orthopoly::{stieltjes_checked, ScaledWeight, Weight};
use rkl::pointconf::{make_jittered_config, make_lattice_config, PointConfiguration};
use rkl::sampler::{sample_sine_dpp, to_configuration};
use rkl::universality::{default_quad_order, run_universality, GridSpec, RescaledKernel, Scaling};
use rkl::weights::{log_comparison, log_w_r, Sign, WeightSpec};

fn assert_indexing(c: &PointConfiguration) -> Result<(), TestCaseError> {
    let pts = c.points();
    prop_assert!(pts.windows(2).all(|w| w[0] < w[1]));
    if let (Some(below), Some(above)) = (c.point(-1), c.point(0)) {
        prop_assert!(below < 0.0 && 0.0 <= above, "p₋₁ = {below}, p₀ = {above}");
    }
    Ok(())
}

fn wr_kernel(r: f64) -> RescaledKernel {
    let config = Arc::new(make_lattice_config(100.0, 0.5).unwrap());
    RescaledKernel::build(config, r, Scaling::CountPoints, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jittered_configs_are_ordered(
        window in 5.0f64..60.0,
        amplitude in 0.0f64..0.6,
        exponent in 0.0f64..0.95,
        seed in any::<u64>(),
    ) {
        let c = make_jittered_config(window, amplitude, exponent, seed).unwrap();
        assert_indexing(&c)?;
        let mut last = 0;
        for k in 1..=40 {
            let n = c.count_points(window * k as f64 / 20.0).unwrap();
            prop_assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn configuration_text_survives_a_reparse(seed in any::<u64>(), shift in -0.9f64..0.9) {
        prop_assume!(shift != 0.0);
        for c in [
            make_jittered_config(12.0, 0.4, 0.3, seed).unwrap(),
            make_lattice_config(7.5, shift).unwrap(),
        ] {
            let back = PointConfiguration::from_text(&c.to_text()).unwrap();
            prop_assert_eq!(back.points(), c.points());
            prop_assert_eq!(back.window_radius(), c.window_radius());
            prop_assert_eq!(back.tail(), c.tail());
        }
    }

    #[test]
    fn grafted_samples_are_valid_configurations(half_width in 0.05f64..6.0, seed in any::<u64>()) {
        let order = (8.0 * half_width).ceil().max(16.0) as usize;
        let sample = sample_sine_dpp(half_width, order, seed).unwrap();
        let c = to_configuration(&sample).unwrap();
        assert_indexing(&c)?;
        prop_assert!(c.window_radius() >= half_width);
        for p in &sample.points {
            prop_assert!(c.points().contains(p));
        }
    }

    #[test]
    fn symmetric_lattice_weights_are_even(r in 2.0f64..40.0, t in 0.0f64..1.0) {
        let c = make_lattice_config(50.0, 0.5).unwrap();
        let n = c.count_points(r).unwrap();
        prop_assert!(c.epsilon_r(r, n).unwrap().abs() < 1e-14);
        let (a, b) = (log_w_r(&c, r, t).unwrap(), log_w_r(&c, r, -t).unwrap());
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
    }

    #[test]
    fn comparison_weights_stay_finite_in_log_form(
        alpha in 1.01f64..3.0,
        frac in -0.9f64..0.9,
        n in 1usize..=400,
        t in -1.0f64..1.0,
    ) {
        let eps = frac * eps_alpha(alpha);
        let plus = log_comparison(Sign::Plus, alpha, eps, n, t).unwrap();
        prop_assert!(plus.is_finite());
        let minus = log_comparison(Sign::Minus, alpha, eps, n, t).unwrap();
        prop_assert!(minus.is_finite() || minus == f64::NEG_INFINITY);
    }

    #[test]
    fn equilibrium_density_has_unit_mass(alpha in 1.0f64..4.0, frac in -1.0f64..1.0) {
        let p = EquilibriumParams::new(alpha, frac * eps_alpha(alpha)).unwrap();
        prop_assert!((normalization(&p) - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rescaled_kernel_is_symmetric(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let k = wr_kernel(12.0);
        let (a, b) = (k.eval(x, y).unwrap(), k.eval(y, x).unwrap());
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn kernel_matrices_are_positive_semidefinite(xs in prop::array::uniform5(-0.95f64..0.95)) {
        let k = wr_kernel(12.0);
        let gram = DMatrix::from_fn(5, 5, |i, j| {
            k.coeffs.cd_kernel(k.n, xs[i], xs[j], false).unwrap()
        });
        let sym = (&gram + gram.transpose()) * 0.5;
        let min = SymmetricEigen::new(sym).eigenvalues.min();
        prop_assert!(min >= -1e-8, "min eigenvalue {min}");
    }

    #[test]
    fn constant_factor_leaves_the_kernel_unchanged(
        log_scale in -30.0f64..30.0,
        x in -0.9f64..0.9,
        y in -0.9f64..0.9,
    ) {
        let config = Arc::new(make_lattice_config(100.0, 0.5).unwrap());
        let n = config.count_points(10.0).unwrap();
        let spec = WeightSpec::WR { config, r: 10.0 };
        let order = default_quad_order(n);
        let plain = stieltjes_checked(spec.clone().into_weight(), n, order).unwrap();
        let scaled: Arc<dyn Weight> = Arc::new(ScaledWeight { inner: spec, log_scale });
        let scaled = stieltjes_checked(scaled, n, order).unwrap();
        let (a, b) = (
            plain.cd_kernel(n, x, y, true).unwrap(),
            scaled.cd_kernel(n, x, y, true).unwrap(),
        );
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn both_scalings_share_the_limit() {
    // at R = k + 0.7 the half-integer lattice has N(R) = ⌊2R⌋ + 1
    let config = Arc::new(make_lattice_config(100.0, 0.5).unwrap());
    let radii = [8.7, 16.7, 32.7, 64.7];
    let spec = GridSpec {
        half_width: 2.0,
        grid_n: 21,
    };
    let count = run_universality(
        config.clone(),
        &radii,
        spec,
        Scaling::CountPoints,
        default_quad_order,
    )
    .unwrap();
    let double = run_universality(
        config,
        &radii,
        spec,
        Scaling::DoubleRadius,
        default_quad_order,
    )
    .unwrap();
    for (a, b) in count.rows.iter().zip(&double.rows) {
        assert_eq!(a.n, b.n + 1);
    }
    let diff: Vec<f64> = count
        .sup_errors()
        .iter()
        .zip(&double.sup_errors())
        .map(|(a, b)| (a - b).abs())
        .collect();
    assert!(diff.windows(2).all(|w| w[1] < w[0]), "{diff:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn christoffel_function_decreases_in_n(x in -0.95f64..0.95) {
        let k = wr_kernel(40.0);
        let mut last = f64::INFINITY;
        for n in 1..=k.n {
            let lambda = k.coeffs.christoffel_function(n, x).unwrap();
            prop_assert!(lambda <= last * (1.0 + 1e-12), "n={n}: {lambda} > {last}");
            last = lambda;
        }
    }

    #[test]
    fn truncating_the_jitter_moves_epsilon_within_the_tail_bound(
        window in 20u32..60,
        seed in any::<u64>(),
        frac in 0.2f64..0.9,
    ) {
        let s = window as f64;
        let wide = make_jittered_config(2.0 * s, 0.3, 0.4, seed).unwrap();
        let inner: Vec<f64> = wide.points().iter().copied().filter(|p| p.abs() <= s).collect();
        let narrow = PointConfiguration::new(inner, s, wide.tail()).unwrap();
        let r = frac * s;
        let n = wide.count_points(r).unwrap();
        prop_assert_eq!(n, narrow.count_points(r).unwrap());
        let diff = (wide.epsilon_r(r, n).unwrap() - narrow.epsilon_r(r, n).unwrap()).abs();
        // |1/p - 1/q| ≤ 0.49 / ((|n|-1)(|n|-0.5)) summed over S < |p| ≤ 2S
        let bound = 2.0 * r / n as f64 * 2.0 * 0.49 / (s - 2.0);
        prop_assert!(diff <= bound, "{diff} > {bound}");
    }
}

#[test]
fn comparison_weights_tend_to_one_at_fixed_microscopic_points() {
    for sign in [Sign::Plus, Sign::Minus] {
        for x in [-2.0, -0.7, 0.5, 2.0] {
            let dev: Vec<f64> = [20.0, 40.0, 80.0, 160.0]
                .iter()
                .map(|&r: &f64| {
                    let n = (2.0 * r) as usize;
                    log_comparison(sign, 1.1, 0.0, n, x / r)
                        .unwrap()
                        .exp_m1()
                        .abs()
                })
                .collect();
            assert!(
                dev.windows(2).all(|w| w[1] < w[0]),
                "{sign:?} x={x}: {dev:?}"
            );
        }
    }
}

#[test]
fn gram_identity_for_w_r_up_to_120() {
    for r in [10.0, 30.0, 60.0] {
        let k = wr_kernel(r);
        assert!(k.n <= 120);
        let dev = k
            .coeffs
            .gram_deviation(k.n, default_quad_order(k.n))
            .unwrap();
        assert!(dev < 1e-8, "R={r}: {dev}");
    }
}
