//! Converter configuration: the single input record for every analysis.
//!
//! Configs are stored as flat TOML key/value files. All angular frequencies
//! are rad/s; `_hz` suffixed keys are accepted as alternates and converted.
//! The compensator pole and zero may also be given normalized to ω_s (`p`,
//! `z`). Example:
//!
//! ```toml
//! topology = "boost"
//! scheme = "acmc_type2"
//! v_s = 1.96
//! v_o = 14.0
//! v_c = 1.64
//! f_s = 50000.0
//! l = 46.1e-6
//! c = 380e-6
//! r = 1.0
//! r_c = 0.02
//! r_s = 0.0164
//! v_m = 1.0
//! k_c = 141670.0
//! w_z = 5652.9
//! p = 0.75
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Buck,
    Boost,
    #[serde(rename = "buckboost")]
    BuckBoost,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Buck => "buck",
            Topology::Boost => "boost",
            Topology::BuckBoost => "buckboost",
        })
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "buck" => Ok(Topology::Buck),
            "boost" => Ok(Topology::Boost),
            "buckboost" | "buck_boost" => Ok(Topology::BuckBoost),
            other => Err(Error::config("topology", format!("unknown topology `{other}`"))),
        }
    }
}

/// Current-mode control scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Peak current mode: `y = v_c − R_s i_L`.
    Pcmc,
    /// Average current mode with `G_c = K_c(1+s/ω_z)/(s(1+s/ω_p))`.
    AcmcType2,
    /// Average current mode with `G_c = K_c(1+s/ω_z)/s`.
    AcmcPi,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Pcmc => "pcmc",
            Scheme::AcmcType2 => "acmc_type2",
            Scheme::AcmcPi => "acmc_pi",
        })
    }
}

/// How the steady-state operating point is pinned down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatingPoint {
    OutputVoltage(f64),
    Duty(f64),
}

/// Current-loop compensator parameters (ACMC only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentCompensator {
    /// Integrator gain, 1/s.
    pub k_c: f64,
    pub omega_z: f64,
    /// Absent for the PI compensator.
    pub omega_p: Option<f64>,
}

/// Voltage-loop compensator `G_v` driven by `v_r − v_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VoltageLoop {
    /// `v_c` held constant.
    Open,
    /// `v_c = k_p (v_r − v_o)`.
    Proportional { k_p: f64 },
    /// `v_c = G_v (v_r − v_o) + v_r` with a type-II `G_v`.
    Type2 { k_c: f64, omega_z: f64, omega_p: f64 },
    /// `v_c = G_v (v_r − v_o) + v_r` with a PI `G_v`.
    Pi { k_c: f64, omega_z: f64 },
}

impl VoltageLoop {
    pub fn is_open(&self) -> bool {
        matches!(self, VoltageLoop::Open)
    }

    fn name(&self) -> &'static str {
        match self {
            VoltageLoop::Open => "open",
            VoltageLoop::Proportional { .. } => "proportional",
            VoltageLoop::Type2 { .. } => "type2",
            VoltageLoop::Pi { .. } => "pi",
        }
    }
}

/// Duty cycle, square-wave amplitude and inductor-current slopes at the
/// nominal (lossless) operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyAndVa {
    pub d: f64,
    /// `v_a = v_h − v_l = L(m1 + m2)`.
    pub v_a: f64,
    /// Inductor-current slope while the switch is on, A/s.
    pub m1: f64,
    /// Magnitude of the slope while the switch is off, A/s.
    pub m2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverterConfig {
    pub topology: Topology,
    pub v_s: f64,
    pub operating_point: OperatingPoint,
    /// Control voltage override; derived from the periodic steady state when absent.
    pub v_c: Option<f64>,
    /// Voltage-loop reference; derived when absent.
    pub v_r: Option<f64>,
    pub f_s: f64,
    pub l: f64,
    pub c: f64,
    pub r: f64,
    pub r_c: f64,
    pub r_s: f64,
    /// Ramp amplitude `V_h − V_l`.
    pub v_m: f64,
    /// Ramp low value.
    pub v_l: f64,
    pub scheme: Scheme,
    pub compensator: Option<CurrentCompensator>,
    pub voltage_loop: VoltageLoop,
}

impl ConverterConfig {
    pub fn omega_s(&self) -> f64 {
        2.0 * PI * self.f_s
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f_s
    }

    /// Ramp slope `m_a = V_m / T`.
    pub fn ramp_slope(&self) -> f64 {
        self.v_m * self.f_s
    }

    /// `ρ = R / (R + R_c)`.
    pub fn rho(&self) -> f64 {
        self.r / (self.r + self.r_c)
    }

    /// ESR zero `1/(R_c C)`; `None` when `R_c = 0` (zero at infinity).
    pub fn omega_esr(&self) -> Option<f64> {
        (self.r_c > 0.0).then(|| 1.0 / (self.r_c * self.c))
    }

    /// `1/r = R_c C ω_s`, zero when there is no ESR.
    pub fn inv_r(&self) -> f64 {
        self.r_c * self.c * self.omega_s()
    }

    pub fn duty(&self) -> f64 {
        self.duty_and_va().d
    }

    pub fn v_o(&self) -> f64 {
        match self.operating_point {
            OperatingPoint::OutputVoltage(v) => v,
            OperatingPoint::Duty(d) => match self.topology {
                Topology::Buck => d * self.v_s,
                Topology::Boost => self.v_s / (1.0 - d),
                Topology::BuckBoost => self.v_s * d / (1.0 - d),
            },
        }
    }

    /// Duty cycle, `v_a` and slopes for the configured topology.
    pub fn duty_and_va(&self) -> DutyAndVa {
        let v_s = self.v_s;
        let (d, v_a) = match (self.topology, self.operating_point) {
            (Topology::Buck, OperatingPoint::OutputVoltage(v_o)) => (v_o / v_s, v_s),
            (Topology::Buck, OperatingPoint::Duty(d)) => (d, v_s),
            (Topology::Boost, OperatingPoint::OutputVoltage(v_o)) => (1.0 - v_s / v_o, v_o),
            (Topology::Boost, OperatingPoint::Duty(d)) => (d, v_s / (1.0 - d)),
            (Topology::BuckBoost, OperatingPoint::OutputVoltage(v_o)) => {
                (v_o / (v_o + v_s), v_s + v_o)
            }
            (Topology::BuckBoost, OperatingPoint::Duty(d)) => (d, v_s / (1.0 - d)),
        };
        let v_o = self.v_o();
        let (v_h, v_low) = match self.topology {
            Topology::Buck => (v_s - v_o, -v_o),
            Topology::Boost => (v_s, v_s - v_o),
            Topology::BuckBoost => (v_s, -v_o),
        };
        DutyAndVa {
            d,
            v_a,
            m1: v_h / self.l,
            m2: -v_low / self.l,
        }
    }

    /// Normalized compensator pole `p = ω_p/ω_s`.
    pub fn p(&self) -> Option<f64> {
        self.compensator
            .and_then(|c| c.omega_p)
            .map(|w| w / self.omega_s())
    }

    /// Normalized compensator zero `z = ω_z/ω_s`.
    pub fn z(&self) -> Option<f64> {
        self.compensator.map(|c| c.omega_z / self.omega_s())
    }

    /// Normalized ESR zero `r = ω_esr/ω_s`.
    pub fn r_norm(&self) -> Option<f64> {
        self.omega_esr().map(|w| w / self.omega_s())
    }

    /// Type-II consolidated gain `K = v_a R_s K_c / (V_m ω_z L ω_s)`.
    pub fn k_gain(&self) -> Option<f64> {
        let comp = self.compensator?;
        let v_a = self.duty_and_va().v_a;
        Some(v_a * self.r_s * comp.k_c / (self.v_m * comp.omega_z * self.l * self.omega_s()))
    }

    /// PI consolidated gain `K̃ = v_a R_s K_c / (V_m L ω_s²)`.
    pub fn ktilde_gain(&self) -> Option<f64> {
        let comp = self.compensator?;
        let v_a = self.duty_and_va().v_a;
        let ws = self.omega_s();
        Some(v_a * self.r_s * comp.k_c / (self.v_m * self.l * ws * ws))
    }

    /// Load current at the nominal operating point.
    pub fn load_current(&self) -> f64 {
        self.v_o() / self.r
    }

    /// Average inductor current from lossless power balance.
    pub fn nominal_inductor_current(&self) -> f64 {
        let d = self.duty();
        match self.topology {
            Topology::Buck => self.load_current(),
            Topology::Boost | Topology::BuckBoost => self.load_current() / (1.0 - d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(name, format!("must be positive and finite, got {v}")));
            }
            Ok(())
        };
        positive("v_s", self.v_s)?;
        positive("f_s", self.f_s)?;
        positive("l", self.l)?;
        positive("c", self.c)?;
        positive("r", self.r)?;
        positive("r_s", self.r_s)?;
        positive("v_m", self.v_m)?;
        if !(self.r_c >= 0.0) || !self.r_c.is_finite() {
            return Err(Error::config("r_c", format!("must be non-negative, got {}", self.r_c)));
        }
        if !self.v_l.is_finite() {
            return Err(Error::config("v_l", "must be finite"));
        }
        match self.operating_point {
            OperatingPoint::OutputVoltage(v) => positive("v_o", v)?,
            OperatingPoint::Duty(d) => {
                if !(d > 0.0 && d < 1.0) {
                    return Err(Error::config("d", format!("duty cycle {d} outside (0, 1)")));
                }
            }
        }
        let d = self.duty();
        if !(d > 0.0 && d < 1.0) {
            let field = match self.operating_point {
                OperatingPoint::OutputVoltage(_) => "v_o",
                OperatingPoint::Duty(_) => "d",
            };
            return Err(Error::config(
                field,
                format!("operating point gives D = {d}, outside (0, 1)"),
            ));
        }
        if let Some(v) = self.v_c {
            if !v.is_finite() {
                return Err(Error::config("v_c", "must be finite"));
            }
        }
        match (self.scheme, self.compensator) {
            (Scheme::Pcmc, None) => {}
            (Scheme::Pcmc, Some(_)) => {
                return Err(Error::config("k_c", "PCMC takes no current-loop compensator"));
            }
            (_, None) => {
                return Err(Error::config("k_c", "ACMC needs k_c and w_z"));
            }
            (scheme, Some(comp)) => {
                positive("k_c", comp.k_c)?;
                positive("w_z", comp.omega_z)?;
                match (scheme, comp.omega_p) {
                    (Scheme::AcmcType2, Some(wp)) => {
                        positive("w_p", wp)?;
                        if comp.omega_z >= wp {
                            return Err(Error::config(
                                "w_p",
                                format!("type-II needs w_z < w_p (w_z = {}, w_p = {wp})", comp.omega_z),
                            ));
                        }
                    }
                    (Scheme::AcmcType2, None) => {
                        return Err(Error::config("w_p", "type-II compensator needs a pole"));
                    }
                    (Scheme::AcmcPi, Some(_)) => {
                        return Err(Error::config("w_p", "PI compensator has no pole"));
                    }
                    _ => {}
                }
            }
        }
        match self.voltage_loop {
            VoltageLoop::Open => {}
            VoltageLoop::Proportional { k_p } => {
                if !(k_p >= 0.0) || !k_p.is_finite() {
                    return Err(Error::config("k_p", format!("must be non-negative, got {k_p}")));
                }
            }
            VoltageLoop::Type2 {
                k_c,
                omega_z,
                omega_p,
            } => {
                positive("vl_k_c", k_c)?;
                positive("vl_w_z", omega_z)?;
                positive("vl_w_p", omega_p)?;
                if omega_z >= omega_p {
                    return Err(Error::config("vl_w_p", "type-II needs vl_w_z < vl_w_p"));
                }
            }
            VoltageLoop::Pi { k_c, omega_z } => {
                positive("vl_k_c", k_c)?;
                positive("vl_w_z", omega_z)?;
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::config("file", e.message().to_string()))?;
        file.into_config()
    }

    pub fn to_toml_string(&self) -> String {
        let file = ConfigFile::from_config(self);
        toml::to_string(&file).expect("flat config always serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("file", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Human-readable echo of the derived dimensionless parameters.
    pub fn summary(&self) -> String {
        let op = self.duty_and_va();
        let mut s = format!(
            "topology={} scheme={} D={:.6} v_a={:.6} m1={:.6e} m2={:.6e} rho={:.6}",
            self.topology,
            self.scheme,
            op.d,
            op.v_a,
            op.m1,
            op.m2,
            self.rho()
        );
        match self.r_norm() {
            Some(r) => s.push_str(&format!(" r={r:.6}")),
            None => s.push_str(" r=ABSENT"),
        }
        if let Some(p) = self.p() {
            s.push_str(&format!(" p={p:.6}"));
        }
        if let Some(z) = self.z() {
            s.push_str(&format!(" z={z:.6}"));
        }
        match self.scheme {
            Scheme::AcmcType2 => s.push_str(&format!(" K={:.6}", self.k_gain().unwrap_or(f64::NAN))),
            Scheme::AcmcPi => {
                s.push_str(&format!(" Ktilde={:.6}", self.ktilde_gain().unwrap_or(f64::NAN)))
            }
            Scheme::Pcmc => {}
        }
        s
    }
}

/// On-disk representation. Every key is optional at this level; required
/// keys are enforced in [`ConfigFile::into_config`] with field-level errors.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    topology: Option<Topology>,
    scheme: Option<Scheme>,
    v_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_o: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_r: Option<f64>,
    f_s: Option<f64>,
    l: Option<f64>,
    c: Option<f64>,
    r: Option<f64>,
    r_c: Option<f64>,
    r_s: Option<f64>,
    v_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_z_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_p_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    voltage_loop: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vl_k_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vl_w_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vl_w_z_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vl_w_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vl_w_p_hz: Option<f64>,
}

fn required(v: Option<f64>, field: &str) -> Result<f64> {
    v.ok_or_else(|| Error::config(field, "missing"))
}

/// Resolves one angular frequency given as rad/s, Hz, or normalized to ω_s.
fn angular(
    rad: Option<f64>,
    hz: Option<f64>,
    normalized: Option<f64>,
    omega_s: f64,
    field: &str,
) -> Result<Option<f64>> {
    let given = [rad.is_some(), hz.is_some(), normalized.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given > 1 {
        return Err(Error::config(
            field,
            "give exactly one of the rad/s, _hz or normalized forms",
        ));
    }
    Ok(rad
        .or(hz.map(|f| 2.0 * PI * f))
        .or(normalized.map(|n| n * omega_s)))
}

impl ConfigFile {
    fn into_config(self) -> Result<ConverterConfig> {
        let topology = self
            .topology
            .ok_or_else(|| Error::config("topology", "missing"))?;
        let scheme = self.scheme.ok_or_else(|| Error::config("scheme", "missing"))?;
        let f_s = required(self.f_s, "f_s")?;
        if !(f_s > 0.0) {
            return Err(Error::config("f_s", format!("must be positive, got {f_s}")));
        }
        let omega_s = 2.0 * PI * f_s;
        let operating_point = match (self.v_o, self.d) {
            (Some(v), None) => OperatingPoint::OutputVoltage(v),
            (None, Some(d)) => OperatingPoint::Duty(d),
            (Some(_), Some(_)) => {
                return Err(Error::config("v_o", "give either v_o or d, not both"));
            }
            (None, None) => return Err(Error::config("v_o", "missing (or give d)")),
        };
        let omega_z = angular(self.w_z, self.w_z_hz, self.z, omega_s, "w_z")?;
        let omega_p = angular(self.w_p, self.w_p_hz, self.p, omega_s, "w_p")?;
        let compensator = match scheme {
            Scheme::Pcmc => {
                if self.k_c.is_some() || omega_z.is_some() || omega_p.is_some() {
                    return Err(Error::config("k_c", "PCMC takes no current-loop compensator"));
                }
                None
            }
            Scheme::AcmcType2 | Scheme::AcmcPi => Some(CurrentCompensator {
                k_c: required(self.k_c, "k_c")?,
                omega_z: omega_z.ok_or_else(|| Error::config("w_z", "missing"))?,
                omega_p,
            }),
        };
        let vl_wz = angular(self.vl_w_z, self.vl_w_z_hz, None, omega_s, "vl_w_z")?;
        let vl_wp = angular(self.vl_w_p, self.vl_w_p_hz, None, omega_s, "vl_w_p")?;
        let voltage_loop = match self.voltage_loop.as_deref().unwrap_or("open") {
            "open" => VoltageLoop::Open,
            "proportional" => VoltageLoop::Proportional {
                k_p: required(self.k_p, "k_p")?,
            },
            "type2" => VoltageLoop::Type2 {
                k_c: required(self.vl_k_c, "vl_k_c")?,
                omega_z: required(vl_wz, "vl_w_z")?,
                omega_p: required(vl_wp, "vl_w_p")?,
            },
            "pi" => VoltageLoop::Pi {
                k_c: required(self.vl_k_c, "vl_k_c")?,
                omega_z: required(vl_wz, "vl_w_z")?,
            },
            other => {
                return Err(Error::config(
                    "voltage_loop",
                    format!("unknown `{other}` (open, proportional, type2, pi)"),
                ));
            }
        };
        let cfg = ConverterConfig {
            topology,
            v_s: required(self.v_s, "v_s")?,
            operating_point,
            v_c: self.v_c,
            v_r: self.v_r,
            f_s,
            l: required(self.l, "l")?,
            c: required(self.c, "c")?,
            r: required(self.r, "r")?,
            r_c: required(self.r_c, "r_c")?,
            r_s: required(self.r_s, "r_s")?,
            v_m: required(self.v_m, "v_m")?,
            v_l: self.v_l.unwrap_or(0.0),
            scheme,
            compensator,
            voltage_loop,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(cfg: &ConverterConfig) -> Self {
        let (v_o, d) = match cfg.operating_point {
            OperatingPoint::OutputVoltage(v) => (Some(v), None),
            OperatingPoint::Duty(d) => (None, Some(d)),
        };
        let mut file = ConfigFile {
            topology: Some(cfg.topology),
            scheme: Some(cfg.scheme),
            v_s: Some(cfg.v_s),
            v_o,
            d,
            v_c: cfg.v_c,
            v_r: cfg.v_r,
            f_s: Some(cfg.f_s),
            l: Some(cfg.l),
            c: Some(cfg.c),
            r: Some(cfg.r),
            r_c: Some(cfg.r_c),
            r_s: Some(cfg.r_s),
            v_m: Some(cfg.v_m),
            v_l: Some(cfg.v_l),
            ..Default::default()
        };
        if let Some(comp) = cfg.compensator {
            file.k_c = Some(comp.k_c);
            file.w_z = Some(comp.omega_z);
            file.w_p = comp.omega_p;
        }
        file.voltage_loop = Some(cfg.voltage_loop.name().to_string());
        match cfg.voltage_loop {
            VoltageLoop::Open => {}
            VoltageLoop::Proportional { k_p } => file.k_p = Some(k_p),
            VoltageLoop::Type2 {
                k_c,
                omega_z,
                omega_p,
            } => {
                file.vl_k_c = Some(k_c);
                file.vl_w_z = Some(omega_z);
                file.vl_w_p = Some(omega_p);
            }
            VoltageLoop::Pi { k_c, omega_z } => {
                file.vl_k_c = Some(k_c);
                file.vl_w_z = Some(omega_z);
            }
        }
        file
    }
}

/// Canonical configurations of the three worked boost examples.
pub mod presets {
    use super::*;

    fn boost_base(v_s: f64, v_c: f64, k_c: f64, omega_p: Option<f64>, scheme: Scheme) -> ConverterConfig {
        ConverterConfig {
            topology: Topology::Boost,
            v_s,
            operating_point: OperatingPoint::OutputVoltage(14.0),
            v_c: Some(v_c),
            v_r: None,
            f_s: 50e3,
            l: 46.1e-6,
            c: 380e-6,
            r: 1.0,
            r_c: 0.02,
            r_s: 0.0164,
            v_m: 1.0,
            v_l: 0.0,
            scheme,
            compensator: Some(CurrentCompensator {
                k_c,
                omega_z: 5652.9,
                omega_p,
            }),
            voltage_loop: VoltageLoop::Open,
        }
    }

    /// Type-II ACMC boost, `K ≈ 0.4`, `p = 0.75`. `unstable` selects
    /// `v_s = 1.96 V` (D = 0.86), otherwise `v_s = 2.1 V` (D = 0.85).
    pub fn example1(unstable: bool) -> ConverterConfig {
        let wp = 0.75 * 2.0 * PI * 50e3;
        if unstable {
            boost_base(1.96, 1.64, 141_670.0, Some(wp), Scheme::AcmcType2)
        } else {
            boost_base(2.1, 1.53, 141_670.0, Some(wp), Scheme::AcmcType2)
        }
    }

    /// Type-II ACMC boost, `K ≈ 1.3`, D ≈ 0.36, normalized pole `p`.
    pub fn example2(p: f64) -> ConverterConfig {
        boost_base(9.0, 0.357, 460_420.0, Some(p * 2.0 * PI * 50e3), Scheme::AcmcType2)
    }

    /// PI ACMC boost, `K̃ ≈ 0.0232`, `z ≈ 0.018`. `unstable` selects
    /// `v_s = 5.6 V` (D = 0.6), otherwise `v_s = 5.88 V` (D = 0.58).
    pub fn example3(unstable: bool) -> ConverterConfig {
        if unstable {
            boost_base(5.6, 0.574, 460_420.0, None, Scheme::AcmcPi)
        } else {
            boost_base(5.88, 0.547, 460_420.0, None, Scheme::AcmcPi)
        }
    }

    /// Example 3 realized literally as a type-II compensator with a very
    /// far pole (`ω_p = 3.14e9 rad/s`).
    pub fn example3_far_pole(unstable: bool) -> ConverterConfig {
        let mut cfg = example3(unstable);
        cfg.scheme = Scheme::AcmcType2;
        if let Some(c) = cfg.compensator.as_mut() {
            c.omega_p = Some(3.14e9);
        }
        cfg
    }
}
