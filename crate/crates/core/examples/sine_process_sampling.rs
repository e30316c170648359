//! Draws finite-window samples of the sine process and grafts one onto a
//! lattice tail so it can drive the kernel experiments.

use rkl::pointconf::{check_assumptions, default_s_grid};
use rkl::sampler::{default_order, to_configuration, SineDppSampler};

fn main() -> rkl::Result<()> {
    let half_width = 10.0;
    let sampler = SineDppSampler::new(half_width, default_order(half_width))?;
    println!(
        "expected count on [-{half_width}, {half_width}]: {:.4}",
        sampler.expected_count()
    );

    let counts: Vec<usize> = (0..100)
        .map(|seed| sampler.sample(seed).points.len())
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (counts.len() - 1) as f64;
    // the sine process is rigid: the variance grows only logarithmically
    println!("100 samples: mean {mean:.2}, variance {var:.3}");

    let sample = sampler.sample(42);
    let shown: Vec<String> = sample.points.iter().map(|p| format!("{p:.3}")).collect();
    println!("seed 42: [{}]", shown.join(", "));

    let config = to_configuration(&sample)?;
    let report = check_assumptions(&config, &default_s_grid(&config))?;
    println!(
        "grafted onto a lattice tail beyond {}: assumptions pass = {}",
        config.window_radius(),
        report.passes()
    );
    Ok(())
}
