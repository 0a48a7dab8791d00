//! Beta function and the closed-form half-plane integrals used as quadrature oracles.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// `ln B(m, n)` for positive arguments.
pub fn ln_beta(m: f64, n: f64) -> Result<f64> {
    if !(m > 0.0 && n > 0.0) || !m.is_finite() || !n.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "beta arguments must be positive and finite, got ({m}, {n})"
        )));
    }
    Ok(ln_gamma(m) + ln_gamma(n) - ln_gamma(m + n))
}

/// Euler Beta function `B(m, n) = Γ(m)Γ(n)/Γ(m+n)`.
///
/// ```
/// let b = carleson::special::beta_value(0.5, 3.5).unwrap();
/// assert!((b - 5.0 * std::f64::consts::PI / 16.0).abs() < 1e-13);
/// ```
pub fn beta_value(m: f64, n: f64) -> Result<f64> {
    ln_beta(m, n).map(f64::exp)
}

/// `J_a(y) = ∫_ℝ |x + iy|^{-a} dx = B(1/2, (a-1)/2) y^{1-a}`, finite iff `a > 1`.
pub fn oracle_line_integral(a: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("height must be positive, got {y}")));
    }
    if !(a > 1.0) {
        return Err(Error::Divergent(format!(
            "line integral of |x+iy|^-{a} diverges unless the exponent exceeds 1"
        )));
    }
    Ok(beta_value(0.5, (a - 1.0) / 2.0)? * y.powf(1.0 - a))
}

/// `I(t) = ∫_0^∞ y^α/(t+y)^β dy = B(1+α, β-α-1) t^{α+1-β}`, finite iff `α > -1` and `β > α+1`.
pub fn oracle_vertical_integral(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("shift must be positive, got {t}")));
    }
    if !(alpha > -1.0 && beta > alpha + 1.0) {
        return Err(Error::Divergent(format!(
            "vertical integral diverges for alpha={alpha}, beta={beta}"
        )));
    }
    Ok(beta_value(1.0 + alpha, beta - alpha - 1.0)? * t.powf(alpha + 1.0 - beta))
}

/// `∫_{ℂ₊} |ω - z̄|^{-a} dV_α(ω)` for `z = x + iy`, obtained by composing the two oracles.
///
/// Integrating first along horizontal lines gives `B(1/2,(a-1)/2)(v+y)^{1-a}`, then the
/// vertical integral with exponent `a-1`.
pub fn oracle_kernel_integral(a: f64, alpha: f64, y: f64) -> Result<f64> {
    let line = oracle_line_integral(a, 1.0)?;
    Ok(line * oracle_vertical_integral(alpha, a - 1.0, y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn beta_examples() {
        assert!(rel(beta_value(0.5, 0.5).unwrap(), PI) < 1e-12);
        assert!(rel(beta_value(1.0, 2.0).unwrap(), 0.5) < 1e-12);
        assert!(rel(beta_value(0.5, 3.5).unwrap(), 5.0 * PI / 16.0) < 1e-12);
        assert!(matches!(beta_value(0.0, 1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn beta_integer_arguments() {
        // B(m,n) = (m-1)!(n-1)!/(m+n-1)!
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        for m in 1..8u32 {
            for n in 1..8u32 {
                let exact = fact(m - 1) * fact(n - 1) / fact(m + n - 1);
                assert!(rel(beta_value(m as f64, n as f64).unwrap(), exact) < 1e-12);
            }
        }
    }

    #[test]
    fn line_and_vertical_examples() {
        assert!(rel(oracle_line_integral(2.0, 1.0).unwrap(), PI) < 1e-12);
        assert!(rel(oracle_line_integral(4.0, 2.0).unwrap(), PI / 16.0) < 1e-12);
        assert!(matches!(oracle_line_integral(1.0, 1.0), Err(Error::Divergent(_))));
        assert!(rel(oracle_vertical_integral(0.0, 3.0, 1.0).unwrap(), 0.5) < 1e-12);
        let y = 1.7;
        assert!(rel(oracle_vertical_integral(0.0, 7.0, y).unwrap(), y.powi(-6) / 6.0) < 1e-12);
        assert!(matches!(oracle_vertical_integral(-0.5, 0.0, 1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn kernel_integral_at_i() {
        assert!(rel(oracle_kernel_integral(4.0, 0.0, 1.0).unwrap(), PI / 4.0) < 1e-12);
    }
}
