//! The α building block and its power series in the normalized pole `p`.
//!
//! ```text
//! α(D, p) = 2π csch(2πp) − π e^{πp(1−2D)} csch(πp)
//!         = Σ_k (−1)^k α_k(D) p^k
//!         = α₀ − α₁ p + c̃
//! ```
//!
//! with `α₀ = π(2D−1)` and `α₁ = π²(2D²−2D+1)`. Every closed-form
//! stability index is a linear combination of `α`, `α₀` and `α₁`.
//!
//! The series coefficients come from the Bernoulli-polynomial expansion
//! `e^{ax} csch(x) = Σ_n B_n((a+1)/2) 2ⁿ x^{n−1} / n!`, which gives
//!
//! ```text
//! coeff of p^k = [(4π)^{k+1} B_{k+1}(½) − (2π)^{k+1} B_{k+1}(1−D)] / (k+1)!
//! ```
//!
//! The series has radius of convergence ½ (csch(2πp) has poles at p = ±i/2).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this `p` the closed form is replaced by its limit `α₀`.
pub const SMALL_P: f64 = 1e-12;

/// Radius of convergence of the power series in `p`.
pub const SERIES_RADIUS: f64 = 0.5;

/// α evaluated together with its leading series terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaTerms {
    pub alpha0: f64,
    pub alpha1: f64,
    /// The `k ≥ 2` tail, `α − (α₀ − α₁ p)`.
    pub correction: f64,
    pub closed: f64,
}

fn check_duty(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain(format!("duty cycle {d} outside [0, 1]")));
    }
    Ok(())
}

/// `α₀(D) = π(2D − 1)`, the `p → 0` limit of α.
pub fn alpha0(d: f64) -> Result<f64> {
    check_duty(d)?;
    Ok(PI * (2.0 * d - 1.0))
}

/// `α₁(D) = π²(2D² − 2D + 1)`; symmetric about D = ½ where it takes its minimum π²/2.
pub fn alpha1(d: f64) -> Result<f64> {
    check_duty(d)?;
    Ok(PI * PI * (2.0 * d * d - 2.0 * d + 1.0))
}

/// Closed-form α(D, p).
///
/// csch is rewritten with decaying exponentials,
/// `2π csch(2πp) = 4π e^{−2πp} / (1 − e^{−4πp})` and
/// `π e^{πp(1−2D)} csch(πp) = 2π e^{−2πpD} / (1 − e^{−2πp})`,
/// so nothing overflows for large `p`.
pub fn alpha_closed(d: f64, p: f64) -> Result<f64> {
    check_duty(d)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("normalized pole p = {p} must be positive")));
    }
    if p < SMALL_P {
        return alpha0(d);
    }
    let x = 2.0 * PI * p;
    let first = 4.0 * PI * (-x).exp() / -(-2.0 * x).exp_m1();
    let second = 2.0 * PI * (-x * d).exp() / -(-x).exp_m1();
    Ok(first - second)
}

/// α together with α₀, α₁ and the higher-order correction c̃.
pub fn alpha_terms(d: f64, p: f64) -> Result<AlphaTerms> {
    let closed = alpha_closed(d, p)?;
    let alpha0 = alpha0(d)?;
    let alpha1 = alpha1(d)?;
    Ok(AlphaTerms {
        alpha0,
        alpha1,
        correction: closed - alpha0 + alpha1 * p,
        closed,
    })
}

// Bernoulli numbers B_0 ..= B_20 (B_1 = −1/2 convention).
const BERNOULLI: [f64; 21] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174611.0 / 330.0,
];

/// `(2π)ⁿ Bₙ(x) / n!` for `x ∈ [0, 1]`.
fn scaled_bernoulli(n: usize, x: f64) -> f64 {
    if n < 16 {
        // explicit polynomial; the binomial sum is well conditioned at this order
        let mut binom = 1.0;
        let mut poly = 0.0;
        for (j, b) in BERNOULLI.iter().enumerate().take(n + 1) {
            if j > 0 {
                binom = binom * (n + 1 - j) as f64 / j as f64;
            }
            poly += binom * b * x.powi((n - j) as i32);
        }
        let mut scale = 1.0;
        for i in 1..=n {
            scale *= 2.0 * PI / i as f64;
        }
        poly * scale
    } else {
        // Fourier series: Bₙ(x) = −2 n! Σ_m cos(2πmx − nπ/2) / (2πm)ⁿ
        let phase = n as f64 * PI / 2.0;
        let mut sum = 0.0;
        for m in 1..200 {
            let w = (m as f64).powi(-(n as i32));
            sum += (2.0 * PI * m as f64 * x - phase).cos() * w;
            if w < 1e-22 {
                break;
            }
        }
        -2.0 * sum
    }
}

/// Signed Taylor coefficient of `p^k` in α(D, p), i.e. `(−1)^k α_k(D)`.
fn taylor_coefficient(k: usize, d: f64) -> f64 {
    let n = k + 1;
    2f64.powi(n as i32) * scaled_bernoulli(n, 0.5) - scaled_bernoulli(n, 1.0 - d)
}

/// The series coefficient α_k(D) in `α = Σ (−1)^k α_k(D) p^k`.
pub fn alpha_coefficient(k: usize, d: f64) -> Result<f64> {
    check_duty(d)?;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * taylor_coefficient(k, d))
}

/// Truncated series `Σ_{k < n_terms} (−1)^k α_k(D) p^k`.
///
/// Converges to [`alpha_closed`] only for `p < 1/2`.
pub fn alpha_series(d: f64, p: f64, n_terms: usize) -> Result<f64> {
    check_duty(d)?;
    if n_terms == 0 {
        return Err(Error::Domain("alpha_series needs at least one term".into()));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("normalized pole p = {p} must be non-negative")));
    }
    // Horner from the highest order down
    let mut acc = 0.0;
    for k in (0..n_terms).rev() {
        acc = acc * p + taylor_coefficient(k, d);
    }
    Ok(acc)
}
