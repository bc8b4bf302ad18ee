//! The α(D, p) function: closed form, leading terms and power series.

use cmc_fsi::alpha::{alpha_closed, alpha_coefficient, alpha_series, alpha_terms, SERIES_RADIUS};

fn main() -> cmc_fsi::Result<()> {
    let d = 0.86;
    println!("D = {d}");
    println!("{:>6} {:>14} {:>14} {:>14}", "p", "alpha", "alpha0", "alpha1");
    for p in [0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 2.0, 5.0] {
        let t = alpha_terms(d, p)?;
        println!("{p:>6} {:>14.9} {:>14.9} {:>14.9}", t.closed, t.alpha0, t.alpha1);
    }

    println!("\nseries coefficients alpha_k(D):");
    for k in 0..6 {
        println!("  k={k}: {:.12}", alpha_coefficient(k, d)?);
    }

    println!("\nseries vs closed form (radius of convergence {SERIES_RADIUS}):");
    for p in [0.05, 0.2, 0.45] {
        let closed = alpha_closed(d, p)?;
        let series = alpha_series(d, p, 50)?;
        println!("  p={p}: closed={closed:.12} series={series:.12} diff={:.2e}", (closed - series).abs());
    }
    Ok(())
}
