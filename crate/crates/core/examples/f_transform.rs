//! Partial fractions of a loop gain and the F-transform that turns them
//! into a stability index.

use std::f64::consts::PI;

use cmc_fsi::alpha::{alpha0, alpha_closed};
use cmc_fsi::ftransform::{f_transform, merge_terms, PartialFractionTerm};
use cmc_fsi::loopgain::{LoopGain, RationalLoopGain};

fn main() -> cmc_fsi::Result<()> {
    let f_s = 50e3;
    let ws = 2.0 * PI * f_s;
    let d = 0.6;

    let terms = [
        PartialFractionTerm::origin1(2.0e4),
        PartialFractionTerm::origin2(3.0e9),
        PartialFractionTerm::real_pole(-1.5e4, 0.75 * ws),
        PartialFractionTerm::origin1(5.0e3),
    ];
    let merged = merge_terms(&terms);
    println!("merged terms:");
    for t in &merged {
        println!("  {t:?}");
    }
    println!("F[T] = {:.9}", f_transform(&merged, d, ws)?);

    let k = 0.4;
    let p = 0.75;
    let wz = 0.02 * ws;
    let wp = p * ws;
    let t = RationalLoopGain::new(k * ws * wz, vec![wz], vec![wp], 2);
    let pf = t.partial_fractions()?;
    println!("\ntype-II gain K={k}, p={p}: {} partial fraction terms", pf.len());
    for term in &pf {
        println!("  {term:?}");
    }
    let index = t.index(d, ws)?;
    let simplified = k * (alpha0(d)? - alpha_closed(d, p)?);
    println!("index (general)    = {index:.9}");
    println!("index (wz << ws)   = {simplified:.9}");
    Ok(())
}
