//! Rational loop gains: construction per control scheme, partial fractions
//! for the F-transform, and average-model frequency response (crossover
//! frequency and phase margin).

use std::f64::consts::PI;

use nalgebra::Complex;

use crate::config::{ConverterConfig, Scheme, Topology, VoltageLoop};
use crate::error::{Error, Result};
use crate::ftransform::{f_transform, merge_terms, PartialFractionTerm};

type C64 = Complex<f64>;

/// Lower and upper crossover search limits as multiples of ω_s.
pub const CROSSOVER_BRACKET: (f64, f64) = (1e-3, 1e3);

/// `T(s) = g · Π(1 + s/ω_zi) / (s^m · Π(1 + s/ω_pj))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLoopGain {
    pub dc_gain_coeff: f64,
    pub zeros: Vec<f64>,
    pub poles: Vec<f64>,
    pub origin_order: u32,
}

/// `T(jω)` split into its polar parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    pub value: C64,
    pub magnitude: f64,
    /// Continuous (unwrapped) phase in degrees.
    pub phase_deg: f64,
}

/// Average-model crossover and phase margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsaaResult {
    pub omega_c: f64,
    pub phase_margin_deg: f64,
}

/// Anything that behaves as a loop gain for the analyses below.
pub trait LoopGain {
    /// `T(s)` at a complex frequency.
    fn eval(&self, s: C64) -> C64;

    /// Partial-fraction expansion compatible with [`f_transform`].
    fn partial_fractions(&self) -> Result<Vec<PartialFractionTerm>>;

    /// Continuous phase of `T(jω)` in degrees.
    fn phase_deg(&self, omega: f64) -> f64;

    fn evaluate_at(&self, omega: f64) -> FrequencyPoint {
        let value = self.eval(C64::new(0.0, omega));
        FrequencyPoint {
            value,
            magnitude: value.norm(),
            phase_deg: self.phase_deg(omega),
        }
    }

    /// Stability index `F(T)` at duty `d`.
    fn index(&self, d: f64, omega_s: f64) -> Result<f64> {
        f_transform(&self.partial_fractions()?, d, omega_s)
    }
}

impl RationalLoopGain {
    pub fn new(dc_gain_coeff: f64, zeros: Vec<f64>, poles: Vec<f64>, origin_order: u32) -> Self {
        Self {
            dc_gain_coeff,
            zeros,
            poles,
            origin_order,
        }
    }

    /// Pure integrator `g/s`.
    pub fn integrator(g: f64) -> Self {
        Self::new(g, vec![], vec![], 1)
    }

    pub fn relative_degree(&self) -> i64 {
        self.origin_order as i64 + self.poles.len() as i64 - self.zeros.len() as i64
    }

    fn check_structure(&self) -> Result<()> {
        if !self.dc_gain_coeff.is_finite() {
            return Err(Error::Domain("loop gain coefficient is not finite".into()));
        }
        if let Some(z) = self.zeros.iter().find(|&&z| !(z > 0.0) || !z.is_finite()) {
            return Err(Error::TableCoverage(format!("zero at {z} rad/s is not positive")));
        }
        if let Some(p) = self.poles.iter().find(|&&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::TableCoverage(format!("pole at {p} rad/s is not positive")));
        }
        for (i, a) in self.poles.iter().enumerate() {
            if self.poles[i + 1..].contains(a) {
                return Err(Error::TableCoverage(format!("repeated pole at {a} rad/s")));
            }
        }
        Ok(())
    }

    /// `Π(1 + s/ω_zi)`.
    fn numerator(&self, s: C64) -> C64 {
        self.zeros
            .iter()
            .fold(C64::new(1.0, 0.0), |acc, &z| acc * (1.0 + s / z))
    }

    /// Numerator polynomial coefficients in ascending powers of `s`.
    pub fn numerator_poly(&self) -> Vec<f64> {
        let mut poly = vec![self.dc_gain_coeff];
        for &z in &self.zeros {
            poly = poly_mul(&poly, &[1.0, 1.0 / z]);
        }
        poly
    }

    /// Denominator polynomial coefficients in ascending powers of `s`.
    pub fn denominator_poly(&self) -> Vec<f64> {
        let mut poly = vec![0.0; self.origin_order as usize];
        poly.push(1.0);
        for &p in &self.poles {
            poly = poly_mul(&poly, &[1.0, 1.0 / p]);
        }
        poly
    }
}

impl LoopGain for RationalLoopGain {
    fn eval(&self, s: C64) -> C64 {
        let den = self
            .poles
            .iter()
            .fold(s.powu(self.origin_order), |acc, &p| acc * (1.0 + s / p));
        self.dc_gain_coeff * self.numerator(s) / den
    }

    fn partial_fractions(&self) -> Result<Vec<PartialFractionTerm>> {
        self.check_structure()?;
        if self.relative_degree() < 1 {
            return Err(Error::TableCoverage("loop gain is not strictly proper".into()));
        }
        if self.origin_order > 2 {
            return Err(Error::TableCoverage(format!(
                "origin order {} exceeds 2",
                self.origin_order
            )));
        }
        let g = self.dc_gain_coeff;
        let mut terms = Vec::new();
        match self.origin_order {
            1 => terms.push(PartialFractionTerm::origin1(g)),
            2 => {
                let slope: f64 = self.zeros.iter().map(|z| 1.0 / z).sum::<f64>()
                    - self.poles.iter().map(|p| 1.0 / p).sum::<f64>();
                terms.push(PartialFractionTerm::origin2(g));
                terms.push(PartialFractionTerm::origin1(g * slope));
            }
            _ => {}
        }
        for (j, &pj) in self.poles.iter().enumerate() {
            let s = -pj;
            let n = self.numerator(C64::new(s, 0.0)).re;
            let others: f64 = self
                .poles
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &pk)| 1.0 - pj / pk)
                .product();
            let c = g * pj * n / (s.powi(self.origin_order as i32) * others);
            terms.push(PartialFractionTerm::real_pole(c, pj));
        }
        Ok(merge_terms(&terms))
    }

    fn phase_deg(&self, omega: f64) -> f64 {
        let mut phase = if self.dc_gain_coeff < 0.0 { 180.0 } else { 0.0 };
        phase -= 90.0 * self.origin_order as f64;
        for &z in &self.zeros {
            phase += (omega / z).atan().to_degrees();
        }
        for &p in &self.poles {
            phase -= (omega / p).atan().to_degrees();
        }
        phase
    }
}

/// A sum of rational loop gains. Used when the total numerator may have
/// complex zeros; each part is expanded separately and the terms merged.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopGainSum {
    pub parts: Vec<RationalLoopGain>,
}

impl LoopGain for LoopGainSum {
    fn eval(&self, s: C64) -> C64 {
        self.parts.iter().map(|p| p.eval(s)).sum()
    }

    fn partial_fractions(&self) -> Result<Vec<PartialFractionTerm>> {
        let mut terms = Vec::new();
        for part in &self.parts {
            terms.extend(part.partial_fractions()?);
        }
        Ok(merge_terms(&terms))
    }

    fn phase_deg(&self, omega: f64) -> f64 {
        // Start where the highest origin order dominates and unwrap upward.
        let top = self.parts.iter().map(|p| p.origin_order).max().unwrap_or(0);
        let mut w = omega * 1e-6;
        let mut phase = self.eval(C64::new(0.0, w)).arg().to_degrees();
        let expected = -90.0 * top as f64;
        phase += 360.0 * ((expected - phase) / 360.0).round();
        let steps = 1200;
        let ratio = (omega / w).powf(1.0 / steps as f64);
        for _ in 0..steps {
            w *= ratio;
            let next = self.eval(C64::new(0.0, w)).arg().to_degrees();
            let delta = next - phase;
            phase += delta - 360.0 * (delta / 360.0).round();
        }
        phase
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

/// Recombines partial-fraction terms over the common denominator
/// `s^m Π(1 + s/ω_pj)` and returns the numerator (ascending powers of `s`).
pub fn recombine(terms: &[PartialFractionTerm], origin_order: u32, poles: &[f64]) -> Vec<f64> {
    use crate::ftransform::TermKind;
    let mut num = vec![0.0];
    for t in terms {
        // Multiply the term by the full denominator and keep what survives.
        let mut piece = match t.kind {
            TermKind::Origin1 => {
                let mut v = vec![0.0; origin_order.saturating_sub(1) as usize];
                v.push(t.coefficient);
                v
            }
            TermKind::Origin2 => {
                let mut v = vec![0.0; origin_order.saturating_sub(2) as usize];
                v.push(t.coefficient);
                v
            }
            TermKind::RealPole => {
                let mut v = vec![0.0; origin_order as usize];
                v.push(t.coefficient / t.pole_rad_per_s);
                v
            }
        };
        for &p in poles {
            if t.kind == TermKind::RealPole && p == t.pole_rad_per_s {
                continue;
            }
            piece = poly_mul(&piece, &[1.0, 1.0 / p]);
        }
        num = poly_add(&num, &piece);
    }
    num
}

/// Gain crossover `|T(jω_c)| = 1`, located on `[1e−3, 1e3]·ω_s`.
///
/// The highest-frequency downward crossing is taken and refined by
/// bisection in log frequency to 1e−12 relative.
pub fn crossover_frequency<T: LoopGain + ?Sized>(t: &T, omega_s: f64) -> Result<f64> {
    let lo = CROSSOVER_BRACKET.0 * omega_s;
    let hi = CROSSOVER_BRACKET.1 * omega_s;
    let excess = |w: f64| t.eval(C64::new(0.0, w)).norm().ln();
    let n = 600;
    let step = (hi / lo).ln() / n as f64;
    let mut bracket = None;
    let mut prev = (lo, excess(lo));
    for i in 1..=n {
        let w = lo * (step * i as f64).exp();
        let e = excess(w);
        if prev.1 >= 0.0 && e < 0.0 {
            bracket = Some((prev.0, w));
        }
        prev = (w, e);
    }
    if prev.1 >= 0.0 {
        return Err(Error::CrossoverOutOfRange { lo, hi });
    }
    let (mut a, mut b) = bracket.ok_or(Error::CrossoverOutOfRange { lo, hi })?;
    while b / a - 1.0 > 1e-12 {
        let m = (a * b).sqrt();
        if excess(m) >= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a * b).sqrt())
}

/// Phase margin `180° + ∠T(jω_c)` with the crossover it was taken at.
pub fn phase_margin<T: LoopGain + ?Sized>(t: &T, omega_s: f64) -> Result<SsaaResult> {
    let omega_c = crossover_frequency(t, omega_s)?;
    Ok(SsaaResult {
        omega_c,
        phase_margin_deg: 180.0 + t.phase_deg(omega_c),
    })
}

/// `ω_c/ω_s` for `K ω_s/(s(1 + s/ω_p))`, the type-II gain with `ω_z ≪ ω_s`.
pub fn crossover_type2_closed(k: f64, p: f64) -> f64 {
    let p2 = p * p;
    ((p2 * p2 + 4.0 * k * k * p2).sqrt() - p2).sqrt() / 2f64.sqrt()
}

/// `ω_c/ω_s` for the PI gain `K̃ ω_s² (1 + s/ω_z)/s²`.
pub fn crossover_pi_closed(ktilde: f64, z: f64) -> f64 {
    let k2 = ktilde * ktilde;
    let z2 = z * z;
    2f64.sqrt() * ktilde * z / ((k2 * k2 + 4.0 * k2 * z2 * z2).sqrt() - k2).sqrt()
}

/// Phase margin of the simplified type-II gain, in degrees.
pub fn phase_margin_type2_closed(k: f64, p: f64) -> f64 {
    90.0 - (crossover_type2_closed(k, p) / p).atan().to_degrees()
}

/// Current-loop gain `T = v_a G_c G_i / V_m` with `G_i = R_s/(sL)`.
///
/// The voltage loop, if any, is ignored here.
pub fn build_loop_gain(cfg: &ConverterConfig) -> Result<RationalLoopGain> {
    let v_a = cfg.duty_and_va().v_a;
    let base = v_a * cfg.r_s / (cfg.v_m * cfg.l);
    match (cfg.scheme, cfg.compensator) {
        (Scheme::Pcmc, _) => Ok(RationalLoopGain::integrator(base)),
        (Scheme::AcmcType2, Some(c)) => {
            let wp = c
                .omega_p
                .ok_or_else(|| Error::config("w_p", "type-II compensator needs a pole"))?;
            Ok(RationalLoopGain::new(base * c.k_c, vec![c.omega_z], vec![wp], 2))
        }
        (Scheme::AcmcPi, Some(c)) => Ok(RationalLoopGain::new(base * c.k_c, vec![c.omega_z], vec![], 2)),
        (_, None) => Err(Error::config("k_c", "ACMC needs a current-loop compensator")),
    }
}

/// High-frequency PCMC buck loop gain including the voltage loop,
/// `v_s R_s/(V_m L s) + ρ v_s (1 + s/ω_esr) G_v /(V_m L C s²)`.
///
/// `G_v` enters through its high-frequency form: `k_p`, `K_c/(ω_z(1+s/ω_p))`
/// for type-II and `K_c/ω_z` for PI.
pub fn build_pcmc_voltage_loop_gain(cfg: &ConverterConfig) -> Result<LoopGainSum> {
    if cfg.topology != Topology::Buck || cfg.scheme != Scheme::Pcmc {
        return Err(Error::Unsupported(
            "voltage-loop gain is derived for the PCMC buck converter only".into(),
        ));
    }
    let current = RationalLoopGain::integrator(cfg.v_s * cfg.r_s / (cfg.v_m * cfg.l));
    let outer = cfg.rho() * cfg.v_s / (cfg.v_m * cfg.l * cfg.c);
    let esr: Vec<f64> = cfg.omega_esr().into_iter().collect();
    let voltage = match cfg.voltage_loop {
        VoltageLoop::Open => None,
        VoltageLoop::Proportional { k_p } => {
            Some(RationalLoopGain::new(outer * k_p, esr, vec![], 2))
        }
        VoltageLoop::Pi { k_c, omega_z } => {
            Some(RationalLoopGain::new(outer * k_c / omega_z, esr, vec![], 2))
        }
        VoltageLoop::Type2 {
            k_c,
            omega_z,
            omega_p,
        } => Some(RationalLoopGain::new(outer * k_c / omega_z, esr, vec![omega_p], 2)),
    };
    let mut parts = vec![current];
    parts.extend(voltage.filter(|v| v.dc_gain_coeff != 0.0));
    Ok(LoopGainSum { parts })
}

/// Average-model analysis of the current loop (or the full loop for a
/// PCMC buck with a closed voltage loop).
pub fn ssaa(cfg: &ConverterConfig) -> Result<SsaaResult> {
    let ws = cfg.omega_s();
    if cfg.topology == Topology::Buck && cfg.scheme == Scheme::Pcmc && !cfg.voltage_loop.is_open()
    {
        phase_margin(&build_pcmc_voltage_loop_gain(cfg)?, ws)
    } else {
        phase_margin(&build_loop_gain(cfg)?, ws)
    }
}

/// `ω_s/π`, the crossover above which the conservative checks fail.
pub fn conservative_crossover(omega_s: f64) -> f64 {
    omega_s / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::{alpha0, alpha1, alpha_closed};
    use crate::config::presets;

    const WS: f64 = 2.0 * PI * 50e3;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integrator_response() {
        let t = RationalLoopGain::integrator(1.0);
        let f = t.evaluate_at(1.0);
        assert!((f.magnitude - 1.0).abs() < 1e-15);
        assert!((f.phase_deg + 90.0).abs() < 1e-12);
    }

    #[test]
    fn case_i_partial_fractions_match_closed_form() {
        let (d, z, p) = (0.43, 0.07, 0.6);
        let t = RationalLoopGain::new(1.0, vec![z * WS], vec![p * WS], 2);
        let idx = t.index(d, WS).unwrap();
        let (a, a0, a1) = (
            alpha_closed(d, p).unwrap(),
            alpha0(d).unwrap(),
            alpha1(d).unwrap(),
        );
        let expect = (a1 + (1.0 / p - 1.0 / z) * (a - a0)) / (WS * WS);
        assert!(rel(idx, expect) < 1e-10);
    }

    #[test]
    fn recombination_reproduces_coefficients() {
        for cfg in [
            presets::example1(true),
            presets::example2(0.18),
            presets::example3(true),
        ] {
            let t = build_loop_gain(&cfg).unwrap();
            let terms = t.partial_fractions().unwrap();
            let num = recombine(&terms, t.origin_order, &t.poles);
            let want = t.numerator_poly();
            for (i, w) in want.iter().enumerate() {
                assert!(rel(num[i], *w) < 1e-10, "coeff {i}: {} vs {w}", num[i]);
            }
            for extra in &num[want.len()..] {
                assert!(extra.abs() < 1e-10 * want[0].abs());
            }
        }
    }

    #[test]
    fn three_pole_expansion_recombines() {
        let t = RationalLoopGain::new(3.0, vec![2.0], vec![1.0, 5.0, 7.0], 1);
        let terms = t.partial_fractions().unwrap();
        let num = recombine(&terms, 1, &t.poles);
        let want = t.numerator_poly();
        for (i, w) in want.iter().enumerate() {
            assert!((num[i] - w).abs() < 1e-12);
        }
        // pointwise check as well
        let s = C64::new(0.3, 1.7);
        let direct = t.eval(s);
        let mut sum = C64::new(0.0, 0.0);
        for term in &terms {
            sum += match term.kind {
                crate::ftransform::TermKind::Origin1 => term.coefficient / s,
                crate::ftransform::TermKind::Origin2 => term.coefficient / (s * s),
                crate::ftransform::TermKind::RealPole => {
                    term.coefficient / (s + term.pole_rad_per_s)
                }
            };
        }
        assert!((direct - sum).norm() < 1e-12);
    }

    #[test]
    fn rejects_improper_and_high_order() {
        let proper = RationalLoopGain::new(1.0, vec![1.0], vec![2.0], 0);
        assert!(matches!(proper.partial_fractions(), Err(Error::TableCoverage(_))));
        let cubic = RationalLoopGain::new(1.0, vec![], vec![], 3);
        assert!(matches!(cubic.partial_fractions(), Err(Error::TableCoverage(_))));
        let repeated = RationalLoopGain::new(1.0, vec![], vec![2.0, 2.0], 1);
        assert!(repeated.partial_fractions().is_err());
    }

    #[test]
    fn closed_form_crossover_reference_point() {
        let t = RationalLoopGain::new(0.4 * WS, vec![], vec![0.75 * WS], 1);
        let wc = crossover_frequency(&t, WS).unwrap() / WS;
        assert!((wc - 0.3605).abs() < 1e-3, "{wc}");
        assert!(rel(crossover_type2_closed(0.4, 0.75), wc) < 1e-9);
    }

    #[test]
    fn small_gain_crossover_limits() {
        assert!(rel(crossover_type2_closed(0.01, 1.0), 0.01) < 0.02);
        let (kt, z) = (0.0232, 0.018);
        assert!(rel(crossover_pi_closed(kt, z), kt / z) < 0.02);
        let t = RationalLoopGain::new(kt * WS * WS, vec![z * WS], vec![], 2);
        let wc = crossover_frequency(&t, WS).unwrap() / WS;
        assert!(rel(crossover_pi_closed(kt, z), wc) < 1e-9);
    }

    #[test]
    fn crossover_is_a_unit_magnitude_point() {
        let t = build_loop_gain(&presets::example1(true)).unwrap();
        let wc = crossover_frequency(&t, WS).unwrap();
        assert!((t.evaluate_at(wc).magnitude - 1.0).abs() < 1e-6);
    }

    #[test]
    fn crossover_out_of_range() {
        let t = RationalLoopGain::integrator(1e-9);
        assert!(matches!(
            crossover_frequency(&t, WS),
            Err(Error::CrossoverOutOfRange { .. })
        ));
    }

    #[test]
    fn magnitude_slopes_of_example2() {
        let t = build_loop_gain(&presets::example2(0.18)).unwrap();
        let (wz, wp) = (5652.9, 0.18 * WS);
        let slope = |w: f64| {
            let h = 1.001f64;
            20.0 * (t.evaluate_at(w * h).magnitude / t.evaluate_at(w / h).magnitude).log10()
                / (h * h).log10()
        };
        let asymptotic = |w: f64| {
            let u = |c: f64| (w / c).powi(2) / (1.0 + (w / c).powi(2));
            20.0 * (-2.0 + u(wz) - u(wp))
        };
        for &w in &[0.1 * wz, (wz * wp).sqrt(), 30.0 * wp] {
            assert!((slope(w) - asymptotic(w)).abs() < 1e-3, "{w}");
        }
        assert!((slope(0.01 * wz) + 40.0).abs() < 0.1);
        assert!(slope(3.0 * wz) > -26.0 && slope(3.0 * wz) < -20.0);
        assert!((slope(100.0 * wp) + 40.0).abs() < 0.1);
    }

    #[test]
    fn example_phase_margins() {
        // SSAA of the full current-loop gains
        let pm1 = ssaa(&presets::example1(true)).unwrap().phase_margin_deg;
        assert!((pm1 - 61.5).abs() < 0.5, "{pm1}");
        let pm2 = ssaa(&presets::example2(0.18)).unwrap().phase_margin_deg;
        assert!((pm2 - 18.9).abs() < 0.5, "{pm2}");
        let pm3 = ssaa(&presets::example3(true)).unwrap().phase_margin_deg;
        assert!((pm3 - 89.2).abs() < 0.3, "{pm3}");
    }

    #[test]
    fn simplified_pm_matches_numeric() {
        let (k, p) = (0.4, 0.75);
        let t = RationalLoopGain::new(k * WS, vec![], vec![p * WS], 1);
        let pm = phase_margin(&t, WS).unwrap().phase_margin_deg;
        assert!((pm - phase_margin_type2_closed(k, p)).abs() < 1e-8);
    }

    #[test]
    fn sum_phase_unwraps_continuously() {
        let a = RationalLoopGain::integrator(WS);
        let b = RationalLoopGain::new(WS * WS, vec![WS * 0.3], vec![WS * 2.0], 2);
        let sum = LoopGainSum {
            parts: vec![a.clone(), b.clone()],
        };
        for &w in &[0.01 * WS, 0.2 * WS, 5.0 * WS] {
            let ph = sum.phase_deg(w);
            assert!(ph < 0.0 && ph > -270.0, "{ph}");
            let expect = sum.eval(C64::new(0.0, w)).arg().to_degrees();
            let diff = (ph - expect) / 360.0;
            assert!((diff - diff.round()).abs() < 1e-9);
        }
    }
}
