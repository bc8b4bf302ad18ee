//! Stability region over a (D, p) grid and the unstable p window at fixed D.

use cmc_fsi::sweep::{sweep_stability, unstable_window, Range, SweepScheme};

fn main() -> cmc_fsi::Result<()> {
    let k = 1.3;
    let d_range = Range::new(0.36, 0.37, 2)?;
    let p_range = Range::new(0.05, 1.0, 1901)?;
    let grid = sweep_stability(SweepScheme::Type2, k, d_range, p_range)?;
    match unstable_window(&grid, 0) {
        Some((lo, hi)) => println!("K={k}, D=0.36: unstable for p in [{lo:.4}, {hi:.4}]"),
        None => println!("K={k}, D=0.36: no unstable window"),
    }

    let grid = sweep_stability(
        SweepScheme::Type2,
        0.4,
        Range::new(0.05, 0.95, 19)?,
        Range::new(0.1, 2.0, 39)?,
    )?;
    println!("\nK=0.4 region (# = unstable), rows D, columns p 0.1..2.0:");
    for (i, d) in grid.d_axis.iter().enumerate() {
        let row: String = (0..grid.x_axis.len())
            .map(|j| if grid.cell(i, j).stable { '.' } else { '#' })
            .collect();
        println!("  D={d:.2} {row}");
    }
    Ok(())
}
