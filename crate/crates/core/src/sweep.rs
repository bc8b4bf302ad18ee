//! Stability-region sweeps over (D, p) for type-II and (D, z) for PI
//! current loops, plus the CSV artifacts derived from them.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::alpha::{alpha0, alpha1, alpha_closed};
use crate::config::Topology;
use crate::error::{Error, Result};
use crate::loopgain::{crossover_pi_closed, crossover_type2_closed};
use crate::output::{fmt9, write_atomic};
use crate::stability::{sb99_reference_bounds, KLimit};

/// Which consolidated gain the sweep is over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScheme {
    /// `K` against `K_max(D, p)`.
    Type2,
    /// `K̃` against `K̃_max(D, z)`.
    Pi,
}

impl SweepScheme {
    /// Name of the second axis in CSV headers.
    pub fn axis_name(&self) -> &'static str {
        match self {
            SweepScheme::Type2 => "p",
            SweepScheme::Pi => "z",
        }
    }

    /// Denominator of the limit; the limit is `1/den` when positive.
    pub fn denominator(&self, d: f64, x: f64) -> Result<f64> {
        match self {
            SweepScheme::Type2 => Ok(alpha0(d)? - alpha_closed(d, x)?),
            SweepScheme::Pi => Ok(alpha0(d)? / x + alpha1(d)?),
        }
    }

    pub fn limit(&self, d: f64, x: f64) -> Result<KLimit> {
        Ok(KLimit::from_denominator(self.denominator(d, x)?))
    }

    /// Average-model phase margin (degrees) and `ω_c/ω_s` at gain `k`.
    pub fn phase_margin(&self, k: f64, x: f64) -> (f64, f64) {
        match self {
            SweepScheme::Type2 => {
                let wc = crossover_type2_closed(k, x);
                (90.0 - (wc / x).atan().to_degrees(), wc)
            }
            SweepScheme::Pi => {
                let wc = crossover_pi_closed(k, x);
                ((wc / x).atan().to_degrees(), wc)
            }
        }
    }
}

impl FromStr for SweepScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "type2" | "acmc_type2" => Ok(SweepScheme::Type2),
            "pi" | "acmc_pi" => Ok(SweepScheme::Pi),
            other => Err(Error::config("scheme", format!("unknown sweep scheme `{other}` (type2, pi)"))),
        }
    }
}

impl fmt::Display for SweepScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepScheme::Type2 => "type2",
            SweepScheme::Pi => "pi",
        })
    }
}

/// Inclusive linear range `start:end:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl Range {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        let r = Self { start, end, n };
        r.check("range")?;
        Ok(r)
    }

    fn check(&self, field: &str) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(field, "needs at least 2 points"));
        }
        if !self.start.is_finite() || !self.end.is_finite() || self.start >= self.end {
            return Err(Error::config(field, "needs finite start < end"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.end - self.start) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.n - 1) as f64
    }
}

impl FromStr for Range {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::config("range", format!("`{s}` is not of the form a:b:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Range::new(start, end, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub d: f64,
    /// `p` or `z`.
    pub x: f64,
    pub limit: KLimit,
    pub stable: bool,
    /// The limit denominator changes sign between this cell and a neighbour.
    pub straddles_sign_change: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub scheme: SweepScheme,
    pub k: f64,
    pub d_axis: Vec<f64>,
    pub x_axis: Vec<f64>,
    /// Row-major over D then x: `cells[i * x_axis.len() + j]`.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.x_axis.len() + j]
    }

    /// Region CSV: `D,<p|z>,stable,kmax`.
    pub fn region_csv(&self) -> String {
        let mut out = format!("D,{},stable,kmax\n", self.scheme.axis_name());
        for c in &self.cells {
            out.push_str(&format!("{},{},{},{}\n", fmt9(c.d), fmt9(c.x), c.stable, c.limit));
        }
        out
    }
}

/// Evaluates every cell of the (D, x) grid in parallel.
pub fn sweep_stability(scheme: SweepScheme, k: f64, d_range: Range, x_range: Range) -> Result<SweepGrid> {
    d_range.check("d-range")?;
    x_range.check("p-range")?;
    if !(d_range.start > 0.0 && d_range.end < 1.0) {
        return Err(Error::config("d-range", "D must stay inside (0, 1)"));
    }
    if !(x_range.start > 0.0) {
        return Err(Error::config("p-range", "normalized pole/zero must be positive"));
    }
    let d_axis = d_range.values();
    let x_axis = x_range.values();
    let nx = x_axis.len();
    let dens: Vec<f64> = (0..d_axis.len() * nx)
        .into_par_iter()
        .map(|idx| scheme.denominator(d_axis[idx / nx], x_axis[idx % nx]))
        .collect::<Result<_>>()?;
    let positive = |i: usize, j: usize| dens[i * nx + j] > 0.0;
    let cells = (0..dens.len())
        .map(|idx| {
            let (i, j) = (idx / nx, idx % nx);
            let me = positive(i, j);
            let mut straddles = false;
            if i > 0 && positive(i - 1, j) != me {
                straddles = true;
            }
            if i + 1 < d_axis.len() && positive(i + 1, j) != me {
                straddles = true;
            }
            if j > 0 && positive(i, j - 1) != me {
                straddles = true;
            }
            if j + 1 < nx && positive(i, j + 1) != me {
                straddles = true;
            }
            let limit = KLimit::from_denominator(dens[idx]);
            SweepCell {
                d: d_axis[i],
                x: x_axis[j],
                limit,
                stable: limit.admits(k),
                straddles_sign_change: straddles,
            }
        })
        .collect();
    Ok(SweepGrid {
        scheme,
        k,
        d_axis,
        x_axis,
        cells,
    })
}

/// Wide CSV of limit curves: `D,<axis>=v1,<axis>=v2,...`, with each
/// column `K_max(D, v)` (scaled by D when `times_d`).
pub fn curves_csv(scheme: SweepScheme, d_range: Range, values: &[f64], times_d: bool) -> Result<String> {
    let name = scheme.axis_name();
    let label = if times_d { "DKmax" } else { "kmax" };
    let mut out = String::from("D");
    for v in values {
        out.push_str(&format!(",{label}_{name}={}", fmt9(*v)));
    }
    out.push('\n');
    for d in d_range.values() {
        out.push_str(&fmt9(d));
        for &v in values {
            let field = match scheme.limit(d, v)? {
                KLimit::Finite(k) => fmt9(if times_d { d * k } else { k }),
                KLimit::AlwaysStable => "ALWAYS_STABLE".into(),
            };
            out.push(',');
            out.push_str(&field);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reference-bound overlay `D,bound`.
pub fn overlay_csv(d_range: Range, topology: Topology) -> Result<String> {
    let mut out = String::from("D,bound\n");
    for d in d_range.values() {
        out.push_str(&format!("{},{}\n", fmt9(d), fmt9(sb99_reference_bounds(d, topology)?)));
    }
    Ok(out)
}

/// Average-model PM over the grid at the fixed gain:
/// `D,<p|z>,pm_deg,wc_over_ws,hba_stable`.
pub fn pm_region_csv(grid: &SweepGrid) -> String {
    let mut out = format!("D,{},pm_deg,wc_over_ws,hba_stable\n", grid.scheme.axis_name());
    for c in &grid.cells {
        let (pm, wc) = grid.scheme.phase_margin(grid.k, c.x);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt9(c.d),
            fmt9(c.x),
            fmt9(pm),
            fmt9(wc),
            c.stable
        ));
    }
    out
}

/// Options for [`write_sweep`].
#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub scheme: SweepScheme,
    pub k: f64,
    pub d_range: Range,
    pub x_range: Range,
    /// Values of p or z for the curve files; defaults to five evenly
    /// spaced values of the x range.
    pub curve_values: Option<Vec<f64>>,
    /// Topology of the reference-bound overlay (type-II only).
    pub overlay_topology: Topology,
}

/// Runs a sweep and writes `region.csv`, `curves.csv`, `pm_region.csv`
/// and, for type-II, `dkmax_curves.csv` and `overlay.csv` into `dir`.
pub fn write_sweep(req: &SweepRequest, dir: &Path) -> Result<Vec<PathBuf>> {
    let grid = sweep_stability(req.scheme, req.k, req.d_range, req.x_range)?;
    std::fs::create_dir_all(dir)?;
    let values = req.curve_values.clone().unwrap_or_else(|| {
        Range {
            start: req.x_range.start,
            end: req.x_range.end,
            n: 5,
        }
        .values()
    });
    let mut files = vec![
        ("region.csv", grid.region_csv()),
        ("curves.csv", curves_csv(req.scheme, req.d_range, &values, false)?),
        ("pm_region.csv", pm_region_csv(&grid)),
    ];
    if req.scheme == SweepScheme::Type2 {
        files.push(("dkmax_curves.csv", curves_csv(req.scheme, req.d_range, &values, true)?));
        files.push(("overlay.csv", overlay_csv(req.d_range, req.overlay_topology)?));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        write_atomic(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}

/// First grid point where the verdict along a row (fixed D) flips from
/// stable to unstable, and the last point of the unstable run.
pub fn unstable_window(grid: &SweepGrid, i: usize) -> Option<(f64, f64)> {
    let row: Vec<&SweepCell> = (0..grid.x_axis.len()).map(|j| grid.cell(i, j)).collect();
    let first = row.iter().position(|c| !c.stable)?;
    let last = row.iter().rposition(|c| !c.stable)?;
    Some((row[first].x, row[last].x))
}
