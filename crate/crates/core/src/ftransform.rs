//! Partial-fraction terms and the F-transform that maps them to a scalar
//! stability index (no subharmonic oscillation ⇔ index < 1).

use std::fmt;

use crate::alpha::{alpha0, alpha1, alpha_closed};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// `c / s`
    Origin1,
    /// `c / s²`
    Origin2,
    /// `c / (s + ω_p)`
    RealPole,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermKind::Origin1 => write!(f, "ORIGIN_1"),
            TermKind::Origin2 => write!(f, "ORIGIN_2"),
            TermKind::RealPole => write!(f, "REAL_POLE"),
        }
    }
}

/// One term of a partial-fraction expansion of a loop gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialFractionTerm {
    pub kind: TermKind,
    pub coefficient: f64,
    /// Pole location in rad/s; zero for the origin kinds.
    pub pole_rad_per_s: f64,
}

impl PartialFractionTerm {
    pub fn origin1(coefficient: f64) -> Self {
        Self {
            kind: TermKind::Origin1,
            coefficient,
            pole_rad_per_s: 0.0,
        }
    }

    pub fn origin2(coefficient: f64) -> Self {
        Self {
            kind: TermKind::Origin2,
            coefficient,
            pole_rad_per_s: 0.0,
        }
    }

    pub fn real_pole(coefficient: f64, pole_rad_per_s: f64) -> Self {
        Self {
            kind: TermKind::RealPole,
            coefficient,
            pole_rad_per_s,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficient: self.coefficient * factor,
            ..*self
        }
    }
}

/// Checks the decomposition invariants: at most one term of each origin
/// kind, real poles strictly positive and pairwise distinct.
pub fn validate_terms(terms: &[PartialFractionTerm]) -> Result<()> {
    let origin1 = terms.iter().filter(|t| t.kind == TermKind::Origin1).count();
    let origin2 = terms.iter().filter(|t| t.kind == TermKind::Origin2).count();
    if origin1 > 1 || origin2 > 1 {
        return Err(Error::TableCoverage(
            "more than one origin term of the same order".into(),
        ));
    }
    let mut poles: Vec<f64> = terms
        .iter()
        .filter(|t| t.kind == TermKind::RealPole)
        .map(|t| t.pole_rad_per_s)
        .collect();
    if let Some(bad) = poles.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::TableCoverage(format!(
            "real pole at {bad} rad/s is not strictly positive"
        )));
    }
    poles.sort_by(f64::total_cmp);
    for pair in poles.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::TableCoverage(format!(
                "repeated pole at {} rad/s",
                pair[0]
            )));
        }
    }
    Ok(())
}

/// Sums terms of equal kind and equal pole so the result satisfies
/// [`validate_terms`]. Terms whose coefficients cancel exactly are dropped.
pub fn merge_terms(terms: &[PartialFractionTerm]) -> Vec<PartialFractionTerm> {
    let mut out: Vec<PartialFractionTerm> = Vec::new();
    for t in terms {
        match out
            .iter_mut()
            .find(|o| o.kind == t.kind && o.pole_rad_per_s == t.pole_rad_per_s)
        {
            Some(o) => o.coefficient += t.coefficient,
            None => out.push(*t),
        }
    }
    out.retain(|t| t.coefficient != 0.0);
    out
}

/// The F-transform of a partial-fraction expansion.
///
/// `ORIGIN_1 → c·α₀/ω_s`, `ORIGIN_2 → c·α₁/ω_s²`,
/// `REAL_POLE → c·α(D, ω_p/ω_s)/ω_s`. The result is linear in the
/// coefficients; the closed loop is free of subharmonic oscillation iff it is below one.
pub fn f_transform(terms: &[PartialFractionTerm], d: f64, omega_s: f64) -> Result<f64> {
    if !(omega_s > 0.0) {
        return Err(Error::Domain(format!("ω_s = {omega_s} must be positive")));
    }
    validate_terms(terms)?;
    let a0 = alpha0(d)?;
    let a1 = alpha1(d)?;
    let mut index = 0.0;
    for t in terms {
        index += match t.kind {
            TermKind::Origin1 => t.coefficient * a0 / omega_s,
            TermKind::Origin2 => t.coefficient * a1 / (omega_s * omega_s),
            TermKind::RealPole => {
                t.coefficient * alpha_closed(d, t.pole_rad_per_s / omega_s)? / omega_s
            }
        };
    }
    Ok(index)
}
