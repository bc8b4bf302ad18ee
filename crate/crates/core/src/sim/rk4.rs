//! Fixed-step classical Runge-Kutta integration with the same switching
//! rule, as an independent check of the exact-exponential path.

use nalgebra::{DMatrix, DVector};

use super::{
    build_model, classify_trace, default_initial_state, Classification, ConverterState, SimTrace,
    SwitchedModel, SETTLE_PERIODS, WINDOW_PERIODS,
};
use crate::config::ConverterConfig;
use crate::error::{Error, Result};

fn rk4_step(m: &DMatrix<f64>, z: &DVector<f64>, h: f64) -> DVector<f64> {
    let k1 = m * z;
    let k2 = m * (z + &k1 * (h / 2.0));
    let k3 = m * (z + &k2 * (h / 2.0));
    let k4 = m * (z + &k3 * h);
    z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// One period by RK4 with `steps` equal steps; the switching instant is
/// located by bisecting the step in which the comparator fires.
pub(crate) fn rk4_period(model: &SwitchedModel, z0: &DVector<f64>, steps: usize) -> (DVector<f64>, f64) {
    let t_per = model.period;
    let h = t_per / steps as f64;
    let tol = 1e-12 * t_per;
    let margin = |z: &DVector<f64>, tau: f64| model.on.y.dot(z) - model.ramp(tau);
    let mut z = z0.clone();
    let mut on = margin(&z, 0.0) > 0.0;
    let mut on_time = if on { t_per } else { 0.0 };
    for k in 0..steps {
        let t = k as f64 * h;
        if !on {
            z = rk4_step(&model.off.m, &z, h);
            continue;
        }
        let next = rk4_step(&model.on.m, &z, h);
        if margin(&next, t + h) > 0.0 {
            z = next;
            continue;
        }
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if margin(&rk4_step(&model.on.m, &z, mid), t + mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = hi;
        let at = rk4_step(&model.on.m, &z, s);
        z = rk4_step(&model.off.m, &at, h - s);
        on = false;
        on_time = t + s;
    }
    (z, on_time)
}

/// Fixed-step RK4 simulation from the same default initial state as
/// [`super::simulate`]. Needs at least 1000 steps per period.
pub fn rk4_crosscheck(cfg: &ConverterConfig, n_periods: usize, steps_per_period: usize) -> Result<SimTrace> {
    if steps_per_period < 1000 {
        return Err(Error::config("steps_per_period", "needs at least 1000"));
    }
    if n_periods == 0 {
        return Err(Error::config("periods", "must be at least 1"));
    }
    let model = build_model(cfg)?;
    let x0 = default_initial_state(cfg, &model);
    let mut z = model.augment(&x0);
    let mut trace = SimTrace {
        names: model.names.clone(),
        scales: model.scales.clone(),
        v_c: model.v_c,
        samples: Vec::new(),
        clock_samples: Vec::with_capacity(n_periods),
        duty_sequence: Vec::with_capacity(n_periods),
        classification: Classification::Unclassified,
        dcm_at: None,
    };
    for k in 0..n_periods {
        let (end, on_time) = rk4_period(&model, &z, steps_per_period);
        let t_end = (k + 1) as f64 * model.period;
        if end[0] < 0.0 {
            trace.dcm_at = Some(t_end);
            trace.classification = Classification::Dcm;
            return Ok(trace);
        }
        trace.duty_sequence.push(on_time / model.period);
        trace.clock_samples.push(ConverterState {
            t: t_end,
            x: model.strip(&end),
        });
        z = end;
    }
    trace.classification = classify_trace(&trace, SETTLE_PERIODS, WINDOW_PERIODS);
    Ok(trace)
}
