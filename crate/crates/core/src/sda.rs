//! Sampled-data analysis: the periodic orbit as a fixed point of the
//! clock-to-clock map and the eigenvalues of the map's Jacobian there.
//! An eigenvalue leaving the unit circle through −1 is the period-doubling
//! (subharmonic) onset.

use nalgebra::{Complex, DMatrix, DVector};

use crate::config::ConverterConfig;
use crate::error::{Error, Result};
use crate::sim::{build_model, dcm_in_period, operating_estimate, SwitchedModel};

/// Eigenvalue magnitude tolerance around the unit circle.
pub const TOL_EIG: f64 = 1e-3;
/// Newton iteration limit for the orbit search.
pub const MAX_NEWTON: usize = 50;
/// Orbit residual tolerance relative to each state's scale.
pub const ORBIT_TOL: f64 = 1e-10;
/// Finite-difference step relative to each state's scale.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    pub fixed_point: Vec<f64>,
    pub duty: f64,
    /// Newton steps taken.
    pub iterations: usize,
    /// Scaled residual before each step and after the last.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareResult {
    pub fixed_point: Vec<f64>,
    pub duty_at_fixed_point: f64,
    pub eigenvalues: Vec<Complex<f64>>,
    pub unstable: bool,
    pub dominant: Complex<f64>,
    /// Largest eigenvalue change when the difference step is halved.
    pub step_halving_change: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdaVerdict {
    /// All eigenvalues inside `|λ| < 1 − tol`.
    pub stable: bool,
    /// Some eigenvalue within `tol` of the unit circle and none outside.
    pub marginal: bool,
    pub dominant: Complex<f64>,
}

/// One period of the switched flow from `x`; returns the next clock state
/// and the duty ratio. Undefined (error) if the inductor current reaches zero.
pub fn stroboscopic_map(model: &SwitchedModel, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let z = model.augment(x);
    let out = model.period_step(&z);
    if let Some(t) = dcm_in_period(model, &z, &out) {
        return Err(Error::Dcm { t });
    }
    Ok((model.strip(&out.end), out.on_time / model.period))
}

fn scaled_norm(model: &SwitchedModel, v: &[f64]) -> f64 {
    v.iter()
        .zip(&model.scales)
        .map(|(a, s)| (a / s).abs())
        .fold(0.0, f64::max)
}

fn residual(model: &SwitchedModel, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (px, duty) = stroboscopic_map(model, x)?;
    Ok((px.iter().zip(x).map(|(a, b)| a - b).collect(), duty))
}

/// Central-difference Jacobian of the map. The second value reports whether
/// every perturbed evaluation kept the nominal switching pattern (a proper
/// crossing, or the same saturation).
pub fn map_jacobian(model: &SwitchedModel, x: &[f64], rel_step: f64) -> Result<(DMatrix<f64>, bool)> {
    let n = model.n;
    let (_, d0) = stroboscopic_map(model, x)?;
    let pattern = |d: f64| (d > 0.0, d < 1.0);
    let mut same = true;
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = rel_step * model.scales[j];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, dp) = stroboscopic_map(model, &xp)?;
        let (fm, dm) = stroboscopic_map(model, &xm)?;
        same &= pattern(dp) == pattern(d0) && pattern(dm) == pattern(d0);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok((jac, same))
}

/// Newton iteration on `P(x) − x` from `x0`; works for unstable orbits.
pub fn find_periodic_orbit_from(model: &SwitchedModel, x0: &[f64]) -> Result<PeriodicOrbit> {
    let n = model.n;
    let mut x = x0.to_vec();
    let (mut g, mut duty) = residual(model, &x)?;
    let mut res = scaled_norm(model, &g);
    let mut residuals = vec![res];
    let mut iterations = 0;
    while res >= ORBIT_TOL {
        if iterations == MAX_NEWTON {
            return Err(Error::OrbitNotConverged {
                iterations,
                residuals,
            });
        }
        iterations += 1;
        let (jac, _) = map_jacobian(model, &x, FD_STEP)?;
        let a = jac - DMatrix::identity(n, n);
        let rhs = -DVector::from_column_slice(&g);
        let dx = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Newton matrix in orbit search".into()))?;
        // Backtrack while the step leaves CCM or increases the residual.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..20 {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + lambda * b).collect();
            if let Ok((gt, dt)) = residual(model, &trial) {
                let rt = scaled_norm(model, &gt);
                if rt.is_finite() && (rt < res || lambda < 1e-3) {
                    accepted = Some((trial, gt, dt, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((xt, gt, dt, rt)) = accepted else {
            return Err(Error::OrbitNotConverged {
                iterations,
                residuals,
            });
        };
        x = xt;
        g = gt;
        duty = dt;
        res = rt;
        residuals.push(res);
    }
    Ok(PeriodicOrbit {
        fixed_point: x,
        duty,
        iterations,
        residuals,
    })
}

/// Periodic orbit seeded from the operating-point estimate.
pub fn find_periodic_orbit(cfg: &ConverterConfig) -> Result<(SwitchedModel, PeriodicOrbit)> {
    let model = build_model(cfg)?;
    let x0 = operating_estimate(cfg, &model);
    let orbit = find_periodic_orbit_from(&model, &x0)?;
    Ok((model, orbit))
}

fn eigenvalues_of(jac: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = jac.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

fn max_pairwise_change(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Jacobian eigenvalues at the fixed point `x_star`.
pub fn jacobian_eigenvalues(model: &SwitchedModel, x_star: &[f64]) -> Result<PoincareResult> {
    let (_, duty) = stroboscopic_map(model, x_star)?;
    let (jac, same) = map_jacobian(model, x_star, FD_STEP)?;
    let (jac_half, _) = map_jacobian(model, x_star, FD_STEP / 2.0)?;
    let eigenvalues = eigenvalues_of(&jac);
    let halved = eigenvalues_of(&jac_half);
    let change = max_pairwise_change(&eigenvalues, &halved);
    let mut warnings = Vec::new();
    if !same {
        warnings.push("switching pattern changed under the difference step".to_string());
    }
    if change > TOL_EIG {
        warnings.push(format!(
            "ill-conditioned Jacobian: eigenvalues moved by {change:.3e} when the step was halved"
        ));
    }
    let dominant = eigenvalues
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or_else(|| Error::Numerical("empty eigenvalue list".into()))?;
    Ok(PoincareResult {
        fixed_point: x_star.to_vec(),
        duty_at_fixed_point: duty,
        unstable: dominant.norm() > 1.0 + TOL_EIG,
        dominant,
        eigenvalues,
        step_halving_change: change,
        warnings,
    })
}

/// Orbit search followed by eigenvalue analysis.
pub fn analyze(cfg: &ConverterConfig) -> Result<PoincareResult> {
    let (model, orbit) = find_periodic_orbit(cfg)?;
    jacobian_eigenvalues(&model, &orbit.fixed_point)
}

pub fn verdict_of(result: &PoincareResult) -> SdaVerdict {
    let r = result.dominant.norm();
    SdaVerdict {
        stable: r < 1.0 - TOL_EIG,
        marginal: (r - 1.0).abs() <= TOL_EIG,
        dominant: result.dominant,
    }
}

pub fn sda_verdict(cfg: &ConverterConfig) -> Result<SdaVerdict> {
    Ok(verdict_of(&analyze(cfg)?))
}

/// Control voltage whose periodic orbit has the config's nominal duty
/// cycle, found by a secant iteration from the closed-form estimate.
pub fn solve_control_voltage(cfg: &ConverterConfig) -> Result<f64> {
    let target = cfg.duty();
    let duty_at = |v_c: f64| -> Result<f64> {
        let model = SwitchedModel::new(cfg, v_c, None)?;
        let x0 = operating_estimate(cfg, &model);
        Ok(find_periodic_orbit_from(&model, &x0)?.duty)
    };
    let mut a = crate::sim::nominal_control_voltage(cfg);
    let mut fa = duty_at(a)? - target;
    let mut b = a * 1.01;
    for _ in 0..30 {
        let fb = duty_at(b)? - target;
        if fb.abs() < 1e-10 {
            return Ok(b);
        }
        let slope = (fb - fa) / (b - a);
        if !slope.is_finite() || slope == 0.0 {
            break;
        }
        let next = b - fb / slope;
        a = b;
        fa = fb;
        b = next;
    }
    Err(Error::Numerical(format!(
        "control voltage for D = {target} not found"
    )))
}
