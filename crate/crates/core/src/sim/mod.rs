//! Time-domain switched simulation with exact affine segments, trailing-edge
//! latched modulation and period-1 / subharmonic / DCM classification.

pub mod model;
mod rk4;

use std::fmt;

use nalgebra::DVector;

use crate::config::{ConverterConfig, Scheme, Topology, VoltageLoop};
use crate::error::{Error, Result};
use crate::output::fmt9;

pub use model::{PeriodOutcome, Phase, SwitchedModel};
pub use rk4::rk4_crosscheck;

/// Default periods discarded before classification.
pub const SETTLE_PERIODS: usize = 100;
/// Default periods inspected by the classifier.
pub const WINDOW_PERIODS: usize = 50;
/// Relative perturbation applied to the estimated operating point.
pub const INITIAL_PERTURBATION: f64 = 1e-3;

const EPS_ABS: f64 = 1e-6;
const EPS_REL: f64 = 1e-4;
const DECAY_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Period1,
    Subharmonic,
    Dcm,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Period1 => "PERIOD1",
            Classification::Subharmonic => "SUBHARMONIC",
            Classification::Dcm => "DCM",
            Classification::Unclassified => "UNCLASSIFIED",
        })
    }
}

/// Converter state at time `t`: `[i_L, v_C, compensator states...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConverterState {
    pub t: f64,
    pub x: Vec<f64>,
}

impl ConverterState {
    pub fn i_l(&self) -> f64 {
        self.x[0]
    }

    pub fn v_cap(&self) -> f64 {
        self.x[1]
    }
}

/// One row of the output trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub state: ConverterState,
    pub v_o: f64,
    pub y: f64,
    pub h: f64,
    pub switch_on: bool,
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub names: Vec<&'static str>,
    pub scales: Vec<f64>,
    /// Control voltage used (constant when the voltage loop is open).
    pub v_c: f64,
    /// Samples at the configured output rate.
    pub samples: Vec<TraceSample>,
    /// State at the end of each simulated period, `t = nT`, `n = 1..=N`.
    pub clock_samples: Vec<ConverterState>,
    /// On-time fraction of each period.
    pub duty_sequence: Vec<f64>,
    pub classification: Classification,
    /// Time at which the inductor current reached zero, if it did.
    pub dcm_at: Option<f64>,
}

impl SimTrace {
    /// Trace CSV `t,i_L,v_C,v_o,y,h,switch`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,i_L,v_C,v_o,y,h,switch\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt9(s.state.t),
                fmt9(s.state.i_l()),
                fmt9(s.state.v_cap()),
                fmt9(s.v_o),
                fmt9(s.y),
                fmt9(s.h),
                u8::from(s.switch_on)
            ));
        }
        out
    }

    pub fn mean_duty(&self, last: usize) -> f64 {
        let n = self.duty_sequence.len();
        let tail = &self.duty_sequence[n.saturating_sub(last)..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    pub n_periods: usize,
    /// Trace rows per period; 0 keeps only clock samples.
    pub samples_per_period: usize,
    pub x0: Option<Vec<f64>>,
    pub settle_periods: usize,
    pub window_periods: usize,
}

impl SimOptions {
    pub fn periods(n_periods: usize) -> Self {
        Self {
            n_periods,
            samples_per_period: 20,
            x0: None,
            settle_periods: SETTLE_PERIODS,
            window_periods: WINDOW_PERIODS,
        }
    }
}

/// Average inductor current and output voltage implied by an ACMC control
/// voltage (`Ī_L = v_c/R_s`) under lossless power balance.
fn acmc_operating_point(cfg: &ConverterConfig, v_c: f64) -> (f64, f64) {
    let i_l = v_c / cfg.r_s;
    let (v_s, r) = (cfg.v_s, cfg.r);
    let v_o = match cfg.topology {
        Topology::Buck => i_l * r,
        Topology::Boost => (v_s * i_l * r).max(0.0).sqrt(),
        Topology::BuckBoost => 0.5 * (-v_s + (v_s * v_s + 4.0 * v_s * i_l * r).max(0.0).sqrt()),
    };
    (i_l, v_o)
}

fn duty_from_vo(topology: Topology, v_s: f64, v_o: f64) -> f64 {
    let d = match topology {
        Topology::Buck => v_o / v_s,
        Topology::Boost => 1.0 - v_s / v_o,
        Topology::BuckBoost => v_o / (v_o + v_s),
    };
    d.clamp(0.01, 0.99)
}

/// Closed-form estimate of the control voltage that produces the nominal
/// duty cycle.
pub fn nominal_control_voltage(cfg: &ConverterConfig) -> f64 {
    let op = cfg.duty_and_va();
    let i_l = cfg.nominal_inductor_current();
    match cfg.scheme {
        Scheme::Pcmc => {
            cfg.r_s * (i_l + op.m1 * op.d * cfg.period() / 2.0) + cfg.v_l + cfg.v_m * op.d
        }
        Scheme::AcmcType2 | Scheme::AcmcPi => cfg.r_s * i_l,
    }
}

/// Reference voltage used when the config does not give one.
pub fn derived_reference(cfg: &ConverterConfig) -> Result<Option<f64>> {
    if let Some(v) = cfg.v_r {
        return Ok(Some(v));
    }
    Ok(match cfg.voltage_loop {
        VoltageLoop::Open => None,
        VoltageLoop::Proportional { k_p } => {
            if k_p <= 0.0 {
                return Err(Error::config("v_r", "proportional loop with k_p = 0 needs v_r"));
            }
            Some(cfg.v_o() + nominal_control_voltage(cfg) / k_p)
        }
        VoltageLoop::Type2 { .. } | VoltageLoop::Pi { .. } => Some(cfg.v_o()),
    })
}

/// Operating-point estimate used to seed simulation and orbit search.
pub fn operating_estimate(cfg: &ConverterConfig, model: &SwitchedModel) -> Vec<f64> {
    let acmc = cfg.scheme != Scheme::Pcmc;
    let (i_l, v_o) = if acmc && cfg.voltage_loop.is_open() {
        acmc_operating_point(cfg, model.v_c)
    } else {
        (cfg.nominal_inductor_current(), cfg.v_o())
    };
    let d = duty_from_vo(cfg.topology, cfg.v_s, v_o);
    let mut x = vec![i_l, v_o];
    if let Some(c) = cfg.compensator {
        x.push((cfg.v_l + cfg.v_m * d - model.v_c) / c.k_c);
        if c.omega_p.is_some() {
            x.push(0.0);
        }
    }
    let v_r = model.v_r.unwrap_or(0.0);
    match cfg.voltage_loop {
        VoltageLoop::Pi { k_c, .. } => x.push((model.v_c - v_r) / k_c),
        VoltageLoop::Type2 { k_c, .. } => {
            x.push((model.v_c - v_r) / k_c);
            x.push(0.0);
        }
        _ => {}
    }
    x
}

/// Builds the switched model, deriving `v_c` from the periodic steady
/// state when the config does not override it.
pub fn build_model(cfg: &ConverterConfig) -> Result<SwitchedModel> {
    cfg.validate()?;
    let v_r = derived_reference(cfg)?;
    match (cfg.voltage_loop.is_open(), cfg.v_c) {
        (true, Some(v_c)) => SwitchedModel::new(cfg, v_c, None),
        (true, None) => {
            let v_c = crate::sda::solve_control_voltage(cfg)?;
            SwitchedModel::new(cfg, v_c, None)
        }
        (false, _) => SwitchedModel::new(cfg, nominal_control_voltage(cfg), v_r),
    }
}

/// Default initial state: the operating-point estimate with `i_L` raised by 0.1%.
pub fn default_initial_state(cfg: &ConverterConfig, model: &SwitchedModel) -> Vec<f64> {
    let mut x = operating_estimate(cfg, model);
    x[0] *= 1.0 + INITIAL_PERTURBATION;
    x
}

/// Simulates `n_periods` switching periods from `x0` (or the default
/// perturbed operating point) and classifies the result.
pub fn simulate(cfg: &ConverterConfig, n_periods: usize, x0: Option<&[f64]>) -> Result<SimTrace> {
    let mut opts = SimOptions::periods(n_periods);
    opts.x0 = x0.map(<[f64]>::to_vec);
    simulate_with(cfg, &opts)
}

pub fn simulate_with(cfg: &ConverterConfig, opts: &SimOptions) -> Result<SimTrace> {
    let model = build_model(cfg)?;
    let x0 = match &opts.x0 {
        Some(x) => x.clone(),
        None => default_initial_state(cfg, &model),
    };
    simulate_model(&model, &x0, opts)
}

/// Simulation on a prebuilt model.
pub fn simulate_model(model: &SwitchedModel, x0: &[f64], opts: &SimOptions) -> Result<SimTrace> {
    if opts.n_periods == 0 {
        return Err(Error::config("periods", "must be at least 1"));
    }
    if x0.len() != model.n {
        return Err(Error::config(
            "x0",
            format!("expected {} states, got {}", model.n, x0.len()),
        ));
    }
    let t_per = model.period;
    let mut z = model.augment(x0);
    let mut trace = SimTrace {
        names: model.names.clone(),
        scales: model.scales.clone(),
        v_c: model.v_c,
        samples: Vec::new(),
        clock_samples: Vec::with_capacity(opts.n_periods),
        duty_sequence: Vec::with_capacity(opts.n_periods),
        classification: Classification::Unclassified,
        dcm_at: None,
    };
    for k in 0..opts.n_periods {
        let t0 = k as f64 * t_per;
        let out = model.period_step(&z);
        if opts.samples_per_period > 0 {
            push_samples(model, &mut trace, &z, &out, t0, opts.samples_per_period);
        }
        if let Some(t) = dcm_in_period(model, &z, &out) {
            trace.dcm_at = Some(t0 + t);
            trace.classification = Classification::Dcm;
            return Ok(trace);
        }
        if !out.end.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state at t = {}", t0 + t_per)));
        }
        trace.duty_sequence.push(out.on_time / t_per);
        trace.clock_samples.push(ConverterState {
            t: t0 + t_per,
            x: model.strip(&out.end),
        });
        z = out.end;
    }
    trace.classification = classify_trace(&trace, opts.settle_periods, opts.window_periods);
    Ok(trace)
}

/// Time into the period at which `i_L` first drops below zero, if ever.
/// The inductor current is checked at the switching instant and the clock.
pub(crate) fn dcm_in_period(model: &SwitchedModel, z0: &DVector<f64>, out: &PeriodOutcome) -> Option<f64> {
    if out.at_switch[0] < 0.0 {
        return Some(model.dcm_instant(true, z0, out.on_time));
    }
    if out.end[0] < 0.0 {
        return Some(out.on_time + model.dcm_instant(false, &out.at_switch, model.period - out.on_time));
    }
    None
}

fn push_samples(
    model: &SwitchedModel,
    trace: &mut SimTrace,
    z0: &DVector<f64>,
    out: &PeriodOutcome,
    t0: f64,
    per_period: usize,
) {
    let dt = model.period / per_period as f64;
    for j in 0..per_period {
        let tau = j as f64 * dt;
        let on = tau < out.on_time;
        let z = if on {
            model.flow(true, z0, tau)
        } else {
            model.flow(false, &out.at_switch, tau - out.on_time)
        };
        let phase = model.phase(on);
        trace.samples.push(TraceSample {
            state: ConverterState {
                t: t0 + tau,
                x: model.strip(&z),
            },
            v_o: phase.v_o.dot(&z),
            y: phase.y.dot(&z),
            h: model.ramp(tau),
            switch_on: on,
        });
    }
}

fn scaled_diff(a: &[f64], b: &[f64], scales: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(scales)
        .map(|((x, y), s)| ((x - y) / s).abs())
        .fold(0.0, f64::max)
}

/// Classifies the clock samples of the last `window_periods` periods.
///
/// PERIOD1 when successive samples agree to `ε_abs + ε_rel‖x‖` (per-state
/// scaled) or when the period-to-period difference is still decaying
/// geometrically; SUBHARMONIC when two-step differences are under a tenth
/// of one-step differences and not decaying; otherwise UNCLASSIFIED.
pub fn classify_trace(trace: &SimTrace, settle_periods: usize, window_periods: usize) -> Classification {
    if trace.dcm_at.is_some() {
        return Classification::Dcm;
    }
    let n = trace.clock_samples.len();
    if window_periods < 3 || n <= settle_periods + window_periods {
        return Classification::Unclassified;
    }
    let scales: Vec<f64> = if trace.scales.len() == trace.clock_samples[0].x.len() {
        trace.scales.clone()
    } else {
        vec![1.0; trace.clock_samples[0].x.len()]
    };
    let w = &trace.clock_samples[n - window_periods..];
    let norm = w
        .iter()
        .map(|s| s.x.iter().zip(&scales).map(|(v, c)| (v / c).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let d1: Vec<f64> = w.windows(2).map(|p| scaled_diff(&p[1].x, &p[0].x, &scales)).collect();
    let d2 = w
        .windows(3)
        .map(|p| scaled_diff(&p[2].x, &p[0].x, &scales))
        .fold(0.0, f64::max);
    let d1_max = d1.iter().copied().fold(0.0, f64::max);
    if d1_max < EPS_ABS + EPS_REL * norm {
        return Classification::Period1;
    }
    if decay_rate(&d1) < 1.0 - DECAY_MARGIN {
        return Classification::Period1;
    }
    if d2 < 0.1 * d1_max {
        return Classification::Subharmonic;
    }
    Classification::Unclassified
}

/// Per-period growth factor of a positive sequence from a least-squares
/// fit of its logarithm.
fn decay_rate(a: &[f64]) -> f64 {
    let m = a.len() as f64;
    let logs: Vec<f64> = a.iter().map(|v| v.max(1e-300).ln()).collect();
    let mean_x = (m - 1.0) / 2.0;
    let mean_y = logs.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in logs.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    (sxy / sxx).exp()
}
