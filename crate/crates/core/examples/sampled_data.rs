//! Periodic orbit of the clock-to-clock map and its eigenvalues.

use cmc_fsi::config::presets;
use cmc_fsi::sda::{find_periodic_orbit, jacobian_eigenvalues, verdict_of};

fn main() -> cmc_fsi::Result<()> {
    for (name, cfg) in [
        ("example 1, v_s=1.96", presets::example1(true)),
        ("example 2, p=0.18", presets::example2(0.18)),
        ("example 2, p=0.52", presets::example2(0.52)),
        ("example 3, v_s=5.6", presets::example3(true)),
    ] {
        let (model, orbit) = find_periodic_orbit(&cfg)?;
        let r = jacobian_eigenvalues(&model, &orbit.fixed_point)?;
        let v = verdict_of(&r);
        let ev: Vec<String> = r.eigenvalues.iter().map(|z| format!("{:.4}", z.re)).collect();
        println!(
            "{name}: newton steps={} duty={:.4} eigenvalues=[{}] stable={}",
            orbit.iterations,
            r.duty_at_fixed_point,
            ev.join(", "),
            v.stable
        );
    }
    Ok(())
}
