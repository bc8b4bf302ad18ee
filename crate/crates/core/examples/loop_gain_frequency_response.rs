//! Loop-gain frequency response, crossover and phase margin of the
//! average model.

use cmc_fsi::config::presets;
use cmc_fsi::loopgain::{build_loop_gain, crossover_type2_closed, phase_margin, LoopGain};

fn main() -> cmc_fsi::Result<()> {
    let cfg = presets::example1(true);
    let ws = cfg.omega_s();
    let t = build_loop_gain(&cfg)?;

    println!("{:>12} {:>14} {:>12}", "w/ws", "|T| dB", "phase deg");
    for k in -12..=6 {
        let w = ws * 10f64.powf(k as f64 / 4.0);
        let pt = t.evaluate_at(w);
        println!("{:>12.5} {:>14.4} {:>12.3}", w / ws, 20.0 * pt.magnitude.log10(), pt.phase_deg);
    }

    let r = phase_margin(&t, ws)?;
    let k = cfg.k_gain().unwrap_or(f64::NAN);
    let p = cfg.p().unwrap_or(f64::NAN);
    println!("\ncrossover wc/ws = {:.6} (closed form {:.6})", r.omega_c / ws, crossover_type2_closed(k, p));
    println!("phase margin    = {:.3} deg", r.phase_margin_deg);
    Ok(())
}
