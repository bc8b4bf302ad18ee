//! Closed-form harmonic-balance stability conditions.
//!
//! Every condition has three equivalent readings: a dimensionless index
//! (stable ⇔ index < 1), a required ramp slope `S` compared against
//! `m_a = V_m/T` (S = index·m_a), and a gain limit (`K < K_max`).

use std::f64::consts::PI;
use std::fmt;

use crate::alpha::{alpha0, alpha1, alpha_closed};
use crate::config::{ConverterConfig, Scheme, Topology, VoltageLoop};
use crate::error::{Error, Result};
use crate::loopgain::{build_loop_gain, build_pcmc_voltage_loop_gain, LoopGain};

/// A gain limit, or the statement that no gain destabilizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KLimit {
    Finite(f64),
    AlwaysStable,
}

impl KLimit {
    /// `1/den` when `den > 0`, otherwise always stable.
    pub fn from_denominator(den: f64) -> Self {
        if den > 0.0 {
            KLimit::Finite(1.0 / den)
        } else {
            KLimit::AlwaysStable
        }
    }

    /// Whether gain `k` lies inside the stable region.
    pub fn admits(&self, k: f64) -> bool {
        match *self {
            KLimit::Finite(max) => k < max,
            KLimit::AlwaysStable => true,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            KLimit::Finite(v) => Some(v),
            KLimit::AlwaysStable => None,
        }
    }
}

impl fmt::Display for KLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KLimit::Finite(v) => f.write_str(&crate::output::fmt9(*v)),
            KLimit::AlwaysStable => f.write_str("ALWAYS_STABLE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    HbaClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub index: f64,
    /// Required ramp slope `S`, V/s.
    pub required_ramp_slope: f64,
    /// `1 − index`.
    pub margin: f64,
    pub method: Method,
}

impl StabilityVerdict {
    fn from_index(index: f64, m_a: f64) -> Self {
        Self {
            stable: index < 1.0,
            index,
            required_ramp_slope: index * m_a,
            margin: 1.0 - index,
            method: Method::HbaClosedForm,
        }
    }
}

fn require_scheme(cfg: &ConverterConfig, scheme: Scheme) -> Result<()> {
    if cfg.scheme != scheme {
        return Err(Error::Unsupported(format!(
            "this condition applies to {scheme}, config is {}",
            cfg.scheme
        )));
    }
    Ok(())
}

fn require_unit_interval(d: f64) -> Result<()> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Domain(format!("duty cycle {d} outside (0, 1)")));
    }
    Ok(())
}

/// PCMC with constant `v_c`: `S = v_a R_s (D − ½)/L < m_a`.
pub fn pcmc_min_ramp(cfg: &ConverterConfig) -> Result<StabilityVerdict> {
    require_scheme(cfg, Scheme::Pcmc)?;
    let op = cfg.duty_and_va();
    let index = op.v_a * cfg.r_s * alpha0(op.d)? / (cfg.v_m * cfg.l * cfg.omega_s());
    Ok(StabilityVerdict::from_index(index, cfg.ramp_slope()))
}

/// `K_max(D, p) = 1/(α₀ − α)`.
pub fn kmax(d: f64, p: f64) -> Result<KLimit> {
    require_unit_interval(d)?;
    Ok(KLimit::from_denominator(alpha0(d)? - alpha_closed(d, p)?))
}

/// `K̃_max(D, z) = 1/(α₀/z + α₁)`.
pub fn ktilde_max(d: f64, z: f64) -> Result<KLimit> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::Domain(format!("duty cycle {d} outside (0, 1]")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("normalized zero z = {z} must be positive")));
    }
    Ok(KLimit::from_denominator(alpha0(d)? / z + alpha1(d)?))
}

/// Type-II ACMC. The simplified form (`ω_z ≪ ω_s`) is `K(α₀ − α) < 1`;
/// the general form applies the F-transform to the full gain
/// `(1 + s/ω_z)/(s²(1 + s/ω_p))`.
pub fn acmc_type2_verdict(cfg: &ConverterConfig, use_general: bool) -> Result<StabilityVerdict> {
    require_scheme(cfg, Scheme::AcmcType2)?;
    let d = cfg.duty();
    let index = if use_general {
        build_loop_gain(cfg)?.index(d, cfg.omega_s())?
    } else {
        let k = cfg.k_gain().expect("validated type-II config");
        let p = cfg.p().expect("validated type-II config");
        k * (alpha0(d)? - alpha_closed(d, p)?)
    };
    Ok(StabilityVerdict::from_index(index, cfg.ramp_slope()))
}

/// PI ACMC: `S = (v_a R_s K_c/L)((2D−1)/(2ω_z) + (1−2D+2D²)T/4) < m_a`.
pub fn acmc_pi_verdict(cfg: &ConverterConfig) -> Result<StabilityVerdict> {
    require_scheme(cfg, Scheme::AcmcPi)?;
    let index = build_loop_gain(cfg)?.index(cfg.duty(), cfg.omega_s())?;
    Ok(StabilityVerdict::from_index(index, cfg.ramp_slope()))
}

/// The `Tω_z ≪ 1` simplification of the PI ramp requirement,
/// `S ≈ (v_a R_s K_c/(L ω_z))(D − ½)`.
pub fn acmc_pi_simplified_ramp(cfg: &ConverterConfig) -> Result<f64> {
    require_scheme(cfg, Scheme::AcmcPi)?;
    let comp = cfg.compensator.expect("validated PI config");
    let op = cfg.duty_and_va();
    Ok(op.v_a * cfg.r_s * comp.k_c / (cfg.l * comp.omega_z) * (op.d - 0.5))
}

/// Sufficient (conservative) stability conditions. `None` where a check
/// does not apply to the configured scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativeChecks {
    /// Type-II: `K < 1/π`.
    pub k_lt_1_over_pi: Option<bool>,
    /// PI: `K̃ < K̃_max(1, z) = z/(π(1 + πz))`, the bound valid for every D.
    pub ktilde_lt_z_over_pi: Option<bool>,
    /// `ω_c < ω_s/π` on the average-model current-loop gain (a rule of
    /// thumb equivalent to the gain checks only approximately).
    pub wc_lt_ws_over_pi: Option<bool>,
}

pub fn conservative_checks(cfg: &ConverterConfig) -> Result<ConservativeChecks> {
    let ws = cfg.omega_s();
    let wc = crate::loopgain::crossover_frequency(&build_loop_gain(cfg)?, ws).ok();
    let wc_check = wc.map(|w| w < ws / PI);
    Ok(match cfg.scheme {
        Scheme::Pcmc => ConservativeChecks {
            k_lt_1_over_pi: None,
            ktilde_lt_z_over_pi: None,
            wc_lt_ws_over_pi: wc_check,
        },
        Scheme::AcmcType2 => ConservativeChecks {
            k_lt_1_over_pi: cfg.k_gain().map(|k| k < 1.0 / PI),
            ktilde_lt_z_over_pi: None,
            wc_lt_ws_over_pi: wc_check,
        },
        Scheme::AcmcPi => {
            let z = cfg.z().expect("validated PI config");
            let kt = cfg.ktilde_gain().expect("validated PI config");
            ConservativeChecks {
                k_lt_1_over_pi: None,
                ktilde_lt_z_over_pi: Some(ktilde_max(1.0, z)?.admits(kt)),
                wc_lt_ws_over_pi: wc_check,
            }
        }
    })
}

/// Earlier conservative gain bounds for type-II ACMC, used as overlay
/// curves: boost `min[1/(π(1−D)), 1/(2π)]`, buck `min[D/(π(1−D)), 1/(2π)]`.
pub fn sb99_reference_bounds(d: f64, topology: Topology) -> Result<f64> {
    require_unit_interval(d)?;
    let cap = 1.0 / (2.0 * PI);
    match topology {
        Topology::Boost => Ok((1.0 / (PI * (1.0 - d))).min(cap)),
        Topology::Buck => Ok((d / (PI * (1.0 - d))).min(cap)),
        Topology::BuckBoost => Err(Error::Unsupported(
            "reference bounds exist for buck and boost only".into(),
        )),
    }
}

fn require_pcmc_buck(cfg: &ConverterConfig) -> Result<()> {
    if cfg.topology != Topology::Buck || cfg.scheme != Scheme::Pcmc {
        return Err(Error::Unsupported(
            "voltage-loop conditions are derived for the PCMC buck converter only".into(),
        ));
    }
    Ok(())
}

/// Voltage-loop ripple contribution `m_v` (V/s) for the PCMC buck; the
/// condition becomes `v_s R_s (D − ½)/L < m_a − m_v`.
pub fn voltage_loop_mv(cfg: &ConverterConfig) -> Result<f64> {
    require_pcmc_buck(cfg)?;
    let d = cfg.duty();
    let (a0, a1) = (alpha0(d)?, alpha1(d)?);
    let ws = cfg.omega_s();
    let t = cfg.period();
    let base = cfg.rho() * cfg.v_s / (t * cfg.l * cfg.c * ws * ws);
    let inv_r = cfg.inv_r();
    Ok(match cfg.voltage_loop {
        VoltageLoop::Open => 0.0,
        VoltageLoop::Proportional { k_p } => base * k_p * (a0 * inv_r + a1),
        VoltageLoop::Pi { k_c, omega_z } => base * k_c / omega_z * (a0 * inv_r + a1),
        VoltageLoop::Type2 {
            k_c,
            omega_z,
            omega_p,
        } => {
            let p = omega_p / ws;
            let a = alpha_closed(d, p)?;
            base * k_c / omega_z * (a1 + (1.0 / p - inv_r) * (a - a0))
        }
    })
}

/// PCMC buck verdict including the voltage loop: index = (S + m_v)/m_a.
pub fn pcmc_voltage_verdict(cfg: &ConverterConfig) -> Result<StabilityVerdict> {
    require_pcmc_buck(cfg)?;
    let m_a = cfg.ramp_slope();
    let open = pcmc_min_ramp(cfg)?;
    let index = (open.required_ramp_slope + voltage_loop_mv(cfg)?) / m_a;
    Ok(StabilityVerdict::from_index(index, m_a))
}

/// Largest proportional voltage-loop gain before FSI,
/// `k_p < (ω_s C/ρ)(V_m L ω_s/v_s − R_s α₀)/(α₀/r + α₁)`.
pub fn kp_limit(cfg: &ConverterConfig) -> Result<KLimit> {
    require_pcmc_buck(cfg)?;
    let d = cfg.duty();
    let a0 = alpha0(d)?;
    let den = a0 * cfg.inv_r() + alpha1(d)?;
    if !(den > 0.0) {
        return Ok(KLimit::AlwaysStable);
    }
    let ws = cfg.omega_s();
    let num = (ws * cfg.c / cfg.rho()) * (cfg.v_m * cfg.l * ws / cfg.v_s - cfg.r_s * a0);
    Ok(KLimit::Finite(num / den))
}

/// The harmonic-balance verdict appropriate for the configuration.
pub fn hba_verdict(cfg: &ConverterConfig) -> Result<StabilityVerdict> {
    match cfg.scheme {
        Scheme::Pcmc if cfg.voltage_loop.is_open() => pcmc_min_ramp(cfg),
        Scheme::Pcmc => pcmc_voltage_verdict(cfg),
        Scheme::AcmcType2 => acmc_type2_verdict(cfg, true),
        Scheme::AcmcPi => acmc_pi_verdict(cfg),
    }
}

/// The scheme's gain limit paired with the configured gain: `K_max` and `K`
/// (type-II), `K̃_max` and `K̃` (PI), or the `k_p` limit and `k_p` (PCMC with
/// proportional voltage loop). `None` where no gain limit applies.
pub fn gain_limit(cfg: &ConverterConfig) -> Result<Option<(KLimit, f64)>> {
    let d = cfg.duty();
    Ok(match (cfg.scheme, &cfg.voltage_loop) {
        (Scheme::AcmcType2, _) => match (cfg.p(), cfg.k_gain()) {
            (Some(p), Some(k)) => Some((kmax(d, p)?, k)),
            _ => None,
        },
        (Scheme::AcmcPi, _) => match (cfg.z(), cfg.ktilde_gain()) {
            (Some(z), Some(k)) => Some((ktilde_max(d, z)?, k)),
            _ => None,
        },
        (Scheme::Pcmc, VoltageLoop::Proportional { k_p }) => Some((kp_limit(cfg)?, *k_p)),
        _ => None,
    })
}

/// Index of the full high-frequency loop gain of a PCMC buck with voltage
/// loop, evaluated through the F-transform.
pub fn pcmc_voltage_index_from_gain(cfg: &ConverterConfig) -> Result<f64> {
    build_pcmc_voltage_loop_gain(cfg)?.index(cfg.duty(), cfg.omega_s())
}
