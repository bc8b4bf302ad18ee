//! Exact piecewise-linear simulation of the switched converter, with the
//! Runge-Kutta cross-check.

use cmc_fsi::config::presets;
use cmc_fsi::sim::{rk4_crosscheck, simulate};

fn main() -> cmc_fsi::Result<()> {
    for (name, cfg) in [
        ("example 1, v_s=1.96", presets::example1(true)),
        ("example 1, v_s=2.1", presets::example1(false)),
    ] {
        let trace = simulate(&cfg, 300, None)?;
        let n = trace.duty_sequence.len();
        let tail: Vec<String> = trace.duty_sequence[n - 4..].iter().map(|d| format!("{d:.5}")).collect();
        println!("{name}: {} last duties [{}]", trace.classification, tail.join(", "));
    }

    let cfg = presets::example1(true);
    let exact = simulate(&cfg, 20, None)?;
    let rk4 = rk4_crosscheck(&cfg, 20, 10_000)?;
    let worst = exact
        .clock_samples
        .iter()
        .zip(&rk4.clock_samples)
        .flat_map(|(a, b)| {
            a.x.iter()
                .zip(&b.x)
                .zip(&exact.scales)
                .map(|((u, v), s)| ((u - v) / s).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    println!("\nexact vs RK4 (10^4 steps/period), 20 periods: max scaled difference {worst:.2e}");

    let head: Vec<String> = exact.to_csv().lines().take(4).map(String::from).collect();
    println!("\ntrace CSV head:\n{}", head.join("\n"));
    Ok(())
}
