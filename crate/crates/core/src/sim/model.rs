//! Piecewise-affine CCM model of the switched converter and its exact
//! one-period flow.
//!
//! The state is `[i_L, v_C, current-compensator states, voltage-compensator
//! states]`. Each phase is an affine system `ẋ = A x + b`, stored as the
//! augmented matrix `[[A, b], [0, 0]]` acting on `[x; 1]` so a segment of
//! length `t` is exactly `expm(M t)`.

use nalgebra::{DMatrix, DVector};

use crate::config::{ConverterConfig, Scheme, Topology, VoltageLoop};
use crate::error::{Error, Result};

/// Substeps used to bracket the comparator crossing within a period.
pub const BRACKET_STEPS: usize = 64;

/// Relative (to T) tolerance of the switching-instant location.
pub const EVENT_TOL: f64 = 1e-12;

/// One switch position.
#[derive(Debug, Clone)]
pub struct Phase {
    /// Augmented `(n+1)×(n+1)` matrix `[[A, b], [0, 0]]`.
    pub m: DMatrix<f64>,
    /// Feedback signal `y` as a linear form on `[x; 1]`.
    pub y: DVector<f64>,
    /// Output voltage `v_o` as a linear form on `[x; 1]`.
    pub v_o: DVector<f64>,
    /// Control voltage `v_c` as a linear form on `[x; 1]`.
    pub v_c: DVector<f64>,
}

/// Result of integrating one switching period.
#[derive(Debug, Clone)]
pub struct PeriodOutcome {
    /// Augmented state at the end of the period.
    pub end: DVector<f64>,
    /// Augmented state at the switching instant.
    pub at_switch: DVector<f64>,
    /// On-time τ in seconds (0 or T when the comparator never fires).
    pub on_time: f64,
}

#[derive(Debug, Clone)]
pub struct SwitchedModel {
    pub topology: Topology,
    pub scheme: Scheme,
    /// Number of states (without the augmenting constant).
    pub n: usize,
    pub period: f64,
    pub v_m: f64,
    pub v_l: f64,
    pub on: Phase,
    pub off: Phase,
    pub names: Vec<&'static str>,
    /// Natural magnitudes used to scale steps and tolerances per state.
    pub scales: Vec<f64>,
    /// Constant control voltage (open voltage loop) or its nominal value.
    pub v_c: f64,
    pub v_r: Option<f64>,
    step_on: DMatrix<f64>,
}

struct Layout {
    n: usize,
    comp: usize,
    volt: usize,
}

fn unit(len: usize, i: usize, value: f64) -> DVector<f64> {
    let mut v = DVector::zeros(len);
    v[i] = value;
    v
}

impl SwitchedModel {
    /// Builds the model with an explicit control voltage (used when the
    /// voltage loop is open) and reference (used when it is closed).
    pub fn new(cfg: &ConverterConfig, v_c: f64, v_r: Option<f64>) -> Result<Self> {
        let comp_states = match cfg.scheme {
            Scheme::Pcmc => 0,
            Scheme::AcmcPi => 1,
            Scheme::AcmcType2 => 2,
        };
        let volt_states = match cfg.voltage_loop {
            VoltageLoop::Open | VoltageLoop::Proportional { .. } => 0,
            VoltageLoop::Pi { .. } => 1,
            VoltageLoop::Type2 { .. } => 2,
        };
        if !cfg.voltage_loop.is_open() && v_r.is_none() {
            return Err(Error::config("v_r", "closed voltage loop needs a reference"));
        }
        let layout = Layout {
            n: 2 + comp_states + volt_states,
            comp: 2,
            volt: 2 + comp_states,
        };
        let on = build_phase(cfg, &layout, true, v_c, v_r.unwrap_or(0.0));
        let off = build_phase(cfg, &layout, false, v_c, v_r.unwrap_or(0.0));
        let period = cfg.period();
        let step_on = (&on.m * (period / BRACKET_STEPS as f64)).exp();

        let mut names = vec!["i_L", "v_C"];
        names.extend(["x_c1", "x_c2"].iter().take(comp_states));
        names.extend(["x_v1", "x_v2"].iter().take(volt_states));
        let i_nom = cfg.nominal_inductor_current().abs();
        let mut scales = vec![i_nom.max(cfg.v_m / cfg.r_s), cfg.v_o()];
        if let Some(c) = cfg.compensator {
            scales.push(cfg.v_m / c.k_c);
            if let Some(wp) = c.omega_p {
                scales.push(cfg.v_m / (c.k_c * (1.0 / c.omega_z - 1.0 / wp)));
            }
        }
        let vc_scale = v_c.abs().max(cfg.v_m);
        match cfg.voltage_loop {
            VoltageLoop::Pi { k_c, .. } => scales.push(vc_scale / k_c),
            VoltageLoop::Type2 {
                k_c,
                omega_z,
                omega_p,
            } => {
                scales.push(vc_scale / k_c);
                scales.push(vc_scale / (k_c * (1.0 / omega_z - 1.0 / omega_p)));
            }
            _ => {}
        }
        Ok(Self {
            topology: cfg.topology,
            scheme: cfg.scheme,
            n: layout.n,
            period,
            v_m: cfg.v_m,
            v_l: cfg.v_l,
            on,
            off,
            names,
            scales,
            v_c,
            v_r,
            step_on,
        })
    }

    /// Ramp `h(τ) = V_l + V_m τ/T` at time `τ` into the period.
    pub fn ramp(&self, tau: f64) -> f64 {
        self.v_l + self.v_m * tau / self.period
    }

    /// `[x; 1]`.
    pub fn augment(&self, x: &[f64]) -> DVector<f64> {
        let mut z = DVector::zeros(self.n + 1);
        z.rows_mut(0, self.n).copy_from_slice(x);
        z[self.n] = 1.0;
        z
    }

    pub fn strip(&self, z: &DVector<f64>) -> Vec<f64> {
        z.rows(0, self.n).iter().copied().collect()
    }

    pub fn phase(&self, on: bool) -> &Phase {
        if on {
            &self.on
        } else {
            &self.off
        }
    }

    /// Exact flow of one phase over `t` seconds.
    pub fn flow(&self, on: bool, z: &DVector<f64>, t: f64) -> DVector<f64> {
        if t == 0.0 {
            return z.clone();
        }
        (&self.phase(on).m * t).exp() * z
    }

    /// Comparator margin `y − h` during the on-phase.
    fn margin(&self, z: &DVector<f64>, tau: f64) -> f64 {
        self.on.y.dot(z) - self.ramp(tau)
    }

    /// Integrates one trailing-edge period from augmented state `z0`:
    /// the switch is on from the clock until the first `y ≤ h`, then off.
    pub fn period_step(&self, z0: &DVector<f64>) -> PeriodOutcome {
        let t = self.period;
        let dt = t / BRACKET_STEPS as f64;
        if self.margin(z0, 0.0) <= 0.0 {
            return PeriodOutcome {
                end: self.flow(false, z0, t),
                at_switch: z0.clone(),
                on_time: 0.0,
            };
        }
        let mut za = z0.clone();
        for k in 1..=BRACKET_STEPS {
            let zb = &self.step_on * &za;
            let tb = if k == BRACKET_STEPS { t } else { k as f64 * dt };
            if self.margin(&zb, tb) <= 0.0 {
                let ta = (k - 1) as f64 * dt;
                let tau = self.locate_crossing(&za, ta, tb);
                let at_switch = self.flow(true, &za, tau - ta);
                return PeriodOutcome {
                    end: self.flow(false, &at_switch, t - tau),
                    at_switch,
                    on_time: tau,
                };
            }
            za = zb;
        }
        PeriodOutcome {
            end: za.clone(),
            at_switch: za,
            on_time: t,
        }
    }

    /// Safeguarded Newton/bisection for `y(τ) = h(τ)` on `[ta, tb]`, where
    /// the margin is positive at `ta` and non-positive at `tb`.
    fn locate_crossing(&self, za: &DVector<f64>, ta: f64, tb: f64) -> f64 {
        let slope_h = self.v_m / self.period;
        let tol = EVENT_TOL * self.period;
        let (mut lo, mut hi) = (ta, tb);
        let mut tau = 0.5 * (lo + hi);
        for _ in 0..200 {
            let z = self.flow(true, za, tau - ta);
            let g = self.margin(&z, tau);
            if g > 0.0 {
                lo = tau;
            } else {
                hi = tau;
            }
            let dg = self.on.y.dot(&(&self.on.m * &z)) - slope_h;
            let newton = tau - g / dg;
            if newton.is_finite() && newton > lo && newton < hi {
                if (newton - tau).abs() <= tol {
                    return newton;
                }
                tau = newton;
            } else {
                tau = 0.5 * (lo + hi);
                if hi - lo <= tol {
                    return tau;
                }
            }
        }
        tau
    }

    /// First time in the off-segment `[0, len]` where `i_L` reaches zero.
    pub fn dcm_instant(&self, on: bool, z: &DVector<f64>, len: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, len);
        while hi - lo > 1e-9 * self.period {
            let mid = 0.5 * (lo + hi);
            if self.flow(on, z, mid)[0] < 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

fn build_phase(cfg: &ConverterConfig, layout: &Layout, on: bool, v_c: f64, v_r: f64) -> Phase {
    let n = layout.n;
    let len = n + 1;
    let one = n;
    let rho = cfg.rho();
    let feeds = !matches!((cfg.topology, on), (Topology::Boost, true) | (Topology::BuckBoost, true));

    let mut v_o = unit(len, 1, rho);
    if feeds {
        v_o[0] = rho * cfg.r_c;
    }
    let v_s = unit(len, one, cfg.v_s);
    let v_l = match (cfg.topology, on) {
        (Topology::Boost, true) | (Topology::BuckBoost, true) => v_s,
        (Topology::Boost, false) | (Topology::Buck, true) => v_s - &v_o,
        (Topology::Buck, false) | (Topology::BuckBoost, false) => -&v_o,
    };
    let mut cap = unit(len, 1, -1.0 / (cfg.r + cfg.r_c));
    if feeds {
        cap[0] = rho;
    }

    let e_v = unit(len, one, v_r) - &v_o;
    let vs = layout.volt;
    let v_c_form = match cfg.voltage_loop {
        VoltageLoop::Open => unit(len, one, v_c),
        VoltageLoop::Proportional { k_p } => &e_v * k_p,
        VoltageLoop::Type2 {
            k_c,
            omega_z,
            omega_p,
        } => {
            let mut f = unit(len, one, v_r);
            f[vs] = k_c;
            f[vs + 1] = k_c * (1.0 / omega_z - 1.0 / omega_p);
            f
        }
        VoltageLoop::Pi { k_c, omega_z } => {
            let mut f = unit(len, one, v_r) + &e_v * (k_c / omega_z);
            f[vs] += k_c;
            f
        }
    };
    let e = &v_c_form - unit(len, 0, cfg.r_s);

    let mut m = DMatrix::zeros(len, len);
    m.set_row(0, &(v_l / cfg.l).transpose());
    m.set_row(1, &(cap / cfg.c).transpose());

    let cs = layout.comp;
    let y = match (cfg.scheme, cfg.compensator) {
        (Scheme::AcmcType2, Some(c)) => {
            let wp = c.omega_p.expect("validated type-II config");
            m.set_row(cs, &e.transpose());
            let mut r = &e * wp;
            r[cs + 1] -= wp;
            m.set_row(cs + 1, &r.transpose());
            let mut y = v_c_form.clone();
            y[cs] += c.k_c;
            y[cs + 1] += c.k_c * (1.0 / c.omega_z - 1.0 / wp);
            y
        }
        (Scheme::AcmcPi, Some(c)) => {
            m.set_row(cs, &e.transpose());
            let mut y = &v_c_form + &e * (c.k_c / c.omega_z);
            y[cs] += c.k_c;
            y
        }
        _ => e.clone(),
    };

    match cfg.voltage_loop {
        VoltageLoop::Type2 { omega_p, .. } => {
            m.set_row(vs, &e_v.transpose());
            let mut r = &e_v * omega_p;
            r[vs + 1] -= omega_p;
            m.set_row(vs + 1, &r.transpose());
        }
        VoltageLoop::Pi { .. } => m.set_row(vs, &e_v.transpose()),
        _ => {}
    }

    Phase {
        m,
        y,
        v_o,
        v_c: v_c_form,
    }
}
