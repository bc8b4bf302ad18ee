//! Closed-form harmonic-balance stability limits for the three
//! current-mode schemes.

use cmc_fsi::config::presets;
use cmc_fsi::stability::{
    acmc_type2_verdict, conservative_checks, hba_verdict, kmax, ktilde_max, sb99_reference_bounds,
};
use cmc_fsi::Topology;

fn main() -> cmc_fsi::Result<()> {
    println!("K_max(D, p):");
    for d in [0.2, 0.4, 0.6, 0.86] {
        let row: Vec<String> = [0.1, 0.5, 0.75, 2.0]
            .iter()
            .map(|&p| kmax(d, p).map(|l| l.to_string()))
            .collect::<cmc_fsi::Result<_>>()?;
        println!("  D={d}: {}", row.join("  "));
    }
    println!("K~_max(0.6, 0.018) = {}", ktilde_max(0.6, 0.018)?);
    println!("K~_max(1, 0.018)   = {}", ktilde_max(1.0, 0.018)?);
    println!("reference bound (boost, D=0.86) = {:.6}", sb99_reference_bounds(0.86, Topology::Boost)?);

    for (name, cfg) in [
        ("example 1", presets::example1(true)),
        ("example 2, p=0.18", presets::example2(0.18)),
        ("example 3", presets::example3(true)),
    ] {
        let v = hba_verdict(&cfg)?;
        let c = conservative_checks(&cfg)?;
        println!(
            "\n{name}: stable={} index={:.6} S={:.1} V/s margin={:.6}",
            v.stable, v.index, v.required_ramp_slope, v.margin
        );
        println!("  conservative: {c:?}");
    }
    let simple = acmc_type2_verdict(&presets::example1(true), false)?;
    println!("\nexample 1 with the wz << ws simplification: index={:.6}", simple.index);
    Ok(())
}
