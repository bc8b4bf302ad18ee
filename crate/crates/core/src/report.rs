//! Side-by-side comparison of the four analyses on one converter.

use std::fmt::Write as _;

use nalgebra::Complex;

use crate::config::ConverterConfig;
use crate::error::Result;
use crate::loopgain::{ssaa, SsaaResult};
use crate::output::fmt9;
use crate::sda::{analyze, verdict_of, PoincareResult, SdaVerdict};
use crate::sim::{simulate, Classification};
use crate::stability::{
    conservative_checks, gain_limit, hba_verdict, ConservativeChecks, KLimit, StabilityVerdict,
};

/// Periods simulated for the report's simulation leg.
pub const REPORT_PERIODS: usize = 300;

/// A leg's outcome, or the message of the error that stopped it.
pub type Leg<T> = std::result::Result<T, String>;

#[derive(Debug, Clone)]
pub struct HbaSection {
    pub verdict: StabilityVerdict,
    /// Gain limit for the scheme (`K_max`, `K̃_max` or `k_p` limit) with the
    /// configured gain, when one applies.
    pub gain_limit: Option<(KLimit, f64)>,
    pub conservative: Option<ConservativeChecks>,
}

#[derive(Debug, Clone)]
pub struct SdaSection {
    pub result: PoincareResult,
    pub verdict: SdaVerdict,
}

#[derive(Debug, Clone)]
pub struct SimSection {
    pub classification: Classification,
    pub periods: usize,
    pub mean_duty: f64,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub summary: String,
    pub hba: Leg<HbaSection>,
    pub sda: Leg<SdaSection>,
    pub sim: Leg<SimSection>,
    pub ssaa: Leg<SsaaResult>,
}

fn leg<T>(r: Result<T>) -> Leg<T> {
    r.map_err(|e| e.to_string())
}

fn hba_section(cfg: &ConverterConfig) -> Result<HbaSection> {
    let verdict = hba_verdict(cfg)?;
    let gain_limit = gain_limit(cfg)?;
    let conservative = if cfg.voltage_loop.is_open() {
        Some(conservative_checks(cfg)?)
    } else {
        None
    };
    Ok(HbaSection {
        verdict,
        gain_limit,
        conservative,
    })
}

fn sim_section(cfg: &ConverterConfig) -> Result<SimSection> {
    let trace = simulate(cfg, REPORT_PERIODS, None)?;
    Ok(SimSection {
        classification: trace.classification,
        periods: trace.duty_sequence.len(),
        mean_duty: trace.mean_duty(50),
    })
}

/// Runs every leg; a failing leg is recorded and the others still run.
pub fn run_report(cfg: &ConverterConfig) -> StabilityReport {
    StabilityReport {
        summary: cfg.summary(),
        hba: leg(hba_section(cfg)),
        sda: leg(analyze(cfg).map(|result| SdaSection {
            verdict: verdict_of(&result),
            result,
        })),
        sim: leg(sim_section(cfg)),
        ssaa: leg(ssaa(cfg)),
    }
}

fn fmt_complex(z: Complex<f64>) -> String {
    if z.im == 0.0 {
        fmt9(z.re)
    } else {
        format!("{}{}{}i", fmt9(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt9(z.im.abs()))
    }
}

fn fmt_flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn stable_word(stable: bool) -> &'static str {
    if stable {
        "stable"
    } else {
        "unstable"
    }
}

impl StabilityReport {
    pub fn hba_stable(&self) -> Option<bool> {
        self.hba.as_ref().ok().map(|h| h.verdict.stable)
    }

    /// SDA counts a marginal orbit as neither stable nor unstable.
    pub fn sda_stable(&self) -> Option<bool> {
        let s = self.sda.as_ref().ok()?;
        if s.verdict.stable {
            Some(true)
        } else if s.result.unstable {
            Some(false)
        } else {
            None
        }
    }

    pub fn sim_stable(&self) -> Option<bool> {
        match self.sim.as_ref().ok()?.classification {
            Classification::Period1 => Some(true),
            Classification::Subharmonic => Some(false),
            _ => None,
        }
    }

    /// True when the three nonlinear legs all produced the same verdict.
    pub fn nonlinear_agree(&self) -> bool {
        match (self.hba_stable(), self.sda_stable(), self.sim_stable()) {
            (Some(a), Some(b), Some(c)) => a == b && b == c,
            _ => false,
        }
    }

    pub fn agreement_line(&self) -> String {
        let word = |v: Option<bool>| v.map(stable_word).unwrap_or("undetermined");
        let head = if self.nonlinear_agree() { "AGREE" } else { "DISAGREE" };
        format!(
            "agreement: {head} hba={} sda={} sim={}",
            word(self.hba_stable()),
            word(self.sda_stable()),
            word(self.sim_stable())
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.summary);
        match &self.hba {
            Ok(h) => {
                let v = &h.verdict;
                let _ = writeln!(
                    s,
                    "HBA: {} index={} S={} margin={}",
                    stable_word(v.stable),
                    fmt9(v.index),
                    fmt9(v.required_ramp_slope),
                    fmt9(v.margin)
                );
                if let Some((lim, gain)) = &h.gain_limit {
                    let _ = writeln!(s, "HBA: gain={} limit={lim}", fmt9(*gain));
                }
                if let Some(c) = &h.conservative {
                    let _ = writeln!(
                        s,
                        "HBA: conservative K<1/pi={} Ktilde<Ktilde_max(1,z)={} wc<ws/pi={}",
                        fmt_flag(c.k_lt_1_over_pi),
                        fmt_flag(c.ktilde_lt_z_over_pi),
                        fmt_flag(c.wc_lt_ws_over_pi)
                    );
                }
            }
            Err(e) => {
                let _ = writeln!(s, "HBA: ERROR {e}");
            }
        }
        match &self.sda {
            Ok(d) => {
                let ev: Vec<String> = d.result.eigenvalues.iter().map(|z| fmt_complex(*z)).collect();
                let verdict = if d.verdict.marginal {
                    "marginal"
                } else {
                    stable_word(d.verdict.stable)
                };
                let _ = writeln!(
                    s,
                    "SDA: {verdict} duty={} eigenvalues=[{}]",
                    fmt9(d.result.duty_at_fixed_point),
                    ev.join(", ")
                );
                for w in &d.result.warnings {
                    let _ = writeln!(s, "SDA: warning {w}");
                }
            }
            Err(e) => {
                let _ = writeln!(s, "SDA: ERROR {e}");
            }
        }
        match &self.sim {
            Ok(m) => {
                let _ = writeln!(
                    s,
                    "SIM: {} periods={} mean_duty={}",
                    m.classification,
                    m.periods,
                    fmt9(m.mean_duty)
                );
            }
            Err(e) => {
                let _ = writeln!(s, "SIM: ERROR {e}");
            }
        }
        match &self.ssaa {
            Ok(a) => {
                let _ = writeln!(
                    s,
                    "SSAA: wc={} rad/s PM={} deg",
                    fmt9(a.omega_c),
                    fmt9(a.phase_margin_deg)
                );
            }
            Err(e) => {
                let _ = writeln!(s, "SSAA: ERROR {e}");
            }
        }
        let _ = writeln!(s, "{}", self.agreement_line());
        s
    }

    /// `section,key,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,key,value\n");
        let mut row = |sec: &str, key: &str, val: String| {
            let _ = writeln!(s, "{sec},{key},{val}");
        };
        match &self.hba {
            Ok(h) => {
                row("hba", "stable", h.verdict.stable.to_string());
                row("hba", "index", fmt9(h.verdict.index));
                row("hba", "required_ramp_slope", fmt9(h.verdict.required_ramp_slope));
                row("hba", "margin", fmt9(h.verdict.margin));
                if let Some((lim, gain)) = &h.gain_limit {
                    row("hba", "gain", fmt9(*gain));
                    row("hba", "gain_limit", lim.to_string());
                }
                if let Some(c) = &h.conservative {
                    row("hba", "k_lt_1_over_pi", fmt_flag(c.k_lt_1_over_pi).into());
                    row("hba", "ktilde_lt_ktilde_max_1_z", fmt_flag(c.ktilde_lt_z_over_pi).into());
                    row("hba", "wc_lt_ws_over_pi", fmt_flag(c.wc_lt_ws_over_pi).into());
                }
            }
            Err(e) => row("hba", "error", format!("\"{e}\"")),
        }
        match &self.sda {
            Ok(d) => {
                row("sda", "stable", d.verdict.stable.to_string());
                row("sda", "marginal", d.verdict.marginal.to_string());
                row("sda", "duty", fmt9(d.result.duty_at_fixed_point));
                for (i, z) in d.result.eigenvalues.iter().enumerate() {
                    row("sda", &format!("eig{i}_re"), fmt9(z.re));
                    row("sda", &format!("eig{i}_im"), fmt9(z.im));
                }
            }
            Err(e) => row("sda", "error", format!("\"{e}\"")),
        }
        match &self.sim {
            Ok(m) => {
                row("sim", "classification", m.classification.to_string());
                row("sim", "periods", m.periods.to_string());
                row("sim", "mean_duty", fmt9(m.mean_duty));
            }
            Err(e) => row("sim", "error", format!("\"{e}\"")),
        }
        match &self.ssaa {
            Ok(a) => {
                row("ssaa", "omega_c", fmt9(a.omega_c));
                row("ssaa", "phase_margin_deg", fmt9(a.phase_margin_deg));
            }
            Err(e) => row("ssaa", "error", format!("\"{e}\"")),
        }
        row("report", "agree", self.nonlinear_agree().to_string());
        s
    }
}
