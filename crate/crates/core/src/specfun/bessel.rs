//! Modified Bessel functions of real argument.
//!
//! `I_ν` (real order) switches from the ascending series to the large-argument
//! expansion at `r = 15 + ν + ν²/8`. `K_λ` (complex order) is the trapezoid rule on
//! `∫₀^∞ e^{-r cosh t} cosh(λt) dt`, whose integrand decays double-exponentially.

use num_complex::Complex64;

use super::gamma::ln_gamma_real;
use crate::error::{Error, Result};

/// Largest `|Re λ|` accepted for the Macdonald function.
pub const MAX_MACDONALD_ORDER: f64 = 50.0;

/// Largest order accepted for `I_ν`.
pub const MAX_FIRST_KIND_ORDER: f64 = 60.0;

/// Order of a modified Bessel function together with its kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesselOrder {
    FirstKind(f64),
    Macdonald(Complex64),
}

impl BesselOrder {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BesselOrder::FirstKind(nu) => {
                if !(nu >= 0.0) || nu > MAX_FIRST_KIND_ORDER {
                    return Err(Error::Domain(format!("I order must lie in [0, {MAX_FIRST_KIND_ORDER}], got {nu}")));
                }
            }
            BesselOrder::Macdonald(l) => {
                if !l.re.is_finite() || !l.im.is_finite() || l.re.abs() > MAX_MACDONALD_ORDER {
                    return Err(Error::Domain(format!("K order {l} outside |Re λ| <= {MAX_MACDONALD_ORDER}")));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the function at `r > 0`.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        self.validate()?;
        match *self {
            BesselOrder::FirstKind(nu) => bessel_i(nu, r).map(|v| Complex64::new(v, 0.0)),
            BesselOrder::Macdonald(l) => bessel_k(l, r),
        }
    }
}

fn check_arg(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {r}")));
    }
    Ok(())
}

/// Series/asymptotic crossover for `I_ν`.
fn crossover(nu: f64) -> f64 {
    let nu = nu.max(0.0);
    15.0 + nu + 0.125 * nu * nu
}

/// `I_ν(r) e^{-r}` from the ascending series; valid for `ν > -1`.
fn i_scaled_series(nu: f64, r: f64) -> Result<f64> {
    let half = 0.5 * r;
    let q = half * half;
    let log_t0 = nu * half.ln() - ln_gamma_real(nu + 1.0)? - r;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if term < 1e-17 * sum && k > half {
            break;
        }
        if k > 10_000.0 {
            return Err(Error::Convergence(format!("I series at nu={nu}, r={r}")));
        }
    }
    Ok(log_t0.exp() * sum)
}

/// `I_ν(r) e^{-r}` from the large-argument expansion.
fn i_scaled_asymptotic(nu: f64, r: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    let limit = (2.0 * r + nu) as usize + 10;
    for j in 1..limit {
        let jf = j as f64;
        let odd = 2.0 * jf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * jf * r);
        let a = term.abs();
        if a == 0.0 {
            break;
        }
        // Past the factorial turning point the series only grows.
        if jf > nu && a > prev {
            break;
        }
        sum += term;
        if a < 1e-17 * sum.abs() {
            break;
        }
        prev = a;
    }
    sum / (2.0 * std::f64::consts::PI * r).sqrt()
}

/// `I_ν(r) e^{-r}` for `ν > -1`, `r > 0`.
pub(crate) fn bessel_i_scaled_any(nu: f64, r: f64) -> Result<f64> {
    check_arg(r)?;
    if !(nu > -1.0) {
        return Err(Error::Domain(format!("order {nu} <= -1")));
    }
    if r <= crossover(nu) {
        i_scaled_series(nu, r)
    } else {
        Ok(i_scaled_asymptotic(nu, r))
    }
}

/// Exponentially scaled `I_ν(r) e^{-r}`.
pub fn bessel_i_scaled(nu: f64, r: f64) -> Result<f64> {
    BesselOrder::FirstKind(nu).validate()?;
    bessel_i_scaled_any(nu, r)
}

/// Modified Bessel function of the first kind `I_ν(r)`, `ν >= 0`, `r > 0`.
pub fn bessel_i(nu: f64, r: f64) -> Result<f64> {
    let s = bessel_i_scaled(nu, r)?;
    Ok(s * r.exp())
}

/// The two regimes evaluated side by side at `r`, for overlap validation.
pub fn bessel_i_regimes(nu: f64, r: f64) -> Result<(f64, f64)> {
    BesselOrder::FirstKind(nu).validate()?;
    check_arg(r)?;
    Ok((i_scaled_series(nu, r)?, i_scaled_asymptotic(nu, r)))
}

/// Trapezoid sums of `∫₀^T e^{-r(cosh t - 1)} cosh(λt) dt` with steps `h` and `2h`.
fn k_trapezoid(lambda: Complex64, r: f64, h: f64, t_max: f64) -> (Complex64, Complex64) {
    let steps = (t_max / h).ceil() as usize;
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for j in 0..=steps {
        let t = j as f64 * h;
        let damp = -r * (t.cosh() - 1.0);
        let val = 0.5 * ((lambda * t + damp).exp() + (-lambda * t + damp).exp());
        let w = if j == 0 { 0.5 } else { 1.0 };
        fine += val * w;
        if j % 2 == 0 {
            coarse += val * w;
        }
    }
    (fine * h, coarse * (2.0 * h))
}

/// Upper limit where the integrand envelope has fallen `e^{-42}` below its peak.
fn k_truncation(s: f64, r: f64) -> f64 {
    let envelope = |t: f64| -r * (t.cosh() - 1.0) + s * t;
    let t_peak = (s / r).asinh();
    let target = envelope(t_peak) - 42.0;
    let mut lo = t_peak;
    let mut hi = t_peak + 1.0;
    while envelope(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Exponentially scaled Macdonald function `K_λ(r) e^{r}`.
pub fn bessel_k_scaled(lambda: Complex64, r: f64) -> Result<Complex64> {
    check_arg(r)?;
    BesselOrder::Macdonald(lambda).validate()?;
    let s = lambda.re.abs();
    let t_max = k_truncation(s, r);
    let mut h = 0.1_f64.min(0.5 / (r + 1.0).sqrt()).min(0.5 / (lambda.im.abs() + 1.0));
    for _ in 0..6 {
        let (fine, coarse) = k_trapezoid(lambda, r, h, t_max);
        let scale = fine.norm().max(1e-300);
        if (fine - coarse).norm() <= 1e-7 * scale {
            return Ok(fine);
        }
        h *= 0.5;
    }
    Err(Error::Convergence(format!("K quadrature for order {lambda} at r={r}")))
}

/// Macdonald function `K_λ(r)` of complex order.
pub fn bessel_k(lambda: Complex64, r: f64) -> Result<Complex64> {
    Ok(bessel_k_scaled(lambda, r)? * (-r).exp())
}

/// Real-order convenience wrapper.
pub fn bessel_k_real(nu: f64, r: f64) -> Result<f64> {
    bessel_k(Complex64::new(nu, 0.0), r).map(|v| v.re)
}

/// `r^λ K_λ(r) e^{r}`, finite as `r → 0` when `Re λ > 0`.
pub fn rk_scaled(lambda: Complex64, r: f64) -> Result<Complex64> {
    let k = bessel_k_scaled(lambda, r)?;
    Ok(Complex64::new(r, 0.0).powc(lambda) * k)
}

/// Outcome of the Segura ratio-chain check.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SeguraCheck {
    pub nu: f64,
    pub r: f64,
    /// `I_{ν+1/2}(r) / I_{ν-1/2}(r)`.
    pub i_ratio: f64,
    /// `r / (ν + sqrt(ν² + r²))`.
    pub middle: f64,
    /// `K_{ν-1/2}(r) / K_{ν+1/2}(r)`.
    pub k_ratio: f64,
    /// No violation of `i_ratio < middle <= k_ratio` beyond rounding.
    pub holds: bool,
    /// The strict inequality is visible in binary64 (not rounded to equality).
    pub strict_resolved: bool,
}

/// Evaluates both sides of the Segura chain
/// `I_{ν+1/2}/I_{ν-1/2} < r/(ν+√(ν²+r²)) <= K_{ν-1/2}/K_{ν+1/2}`.
pub fn segura_check(nu: f64, r: f64) -> Result<SeguraCheck> {
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("segura_check needs nu >= 0, got {nu}")));
    }
    check_arg(r)?;
    let i_ratio = bessel_i_scaled_any(nu + 0.5, r)? / bessel_i_scaled_any(nu - 0.5, r)?;
    let middle = r / (nu + (nu * nu + r * r).sqrt());
    let k_ratio =
        (bessel_k_scaled(Complex64::new(nu - 0.5, 0.0), r)? / bessel_k_scaled(Complex64::new(nu + 0.5, 0.0), r)?).re;
    let slack = 1e-12 * middle;
    let left_ok = i_ratio < middle + slack;
    let right_ok = middle <= k_ratio + slack;
    Ok(SeguraCheck { nu, r, i_ratio, middle, k_ratio, holds: left_ok && right_ok, strict_resolved: i_ratio < middle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma_real;
    use std::f64::consts::PI;

    #[test]
    fn half_integer_closed_forms() {
        let i = bessel_i(0.5, 1.0).unwrap();
        let exact = (2.0 / PI).sqrt() * 1f64.sinh();
        assert!((i - exact).abs() / exact < 1e-13);
        assert!((exact - 0.937_674_888_245_488_2).abs() < 1e-12);

        let k = bessel_k_real(0.5, 2.0).unwrap();
        let exact = (PI / 4.0).sqrt() * (-2f64).exp();
        assert!((k - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn small_argument_limits() {
        let r: f64 = 1e-6;
        let lead = (0.5 * r).powi(2) / gamma_real(3.0).unwrap();
        let ratio = bessel_i(2.0, r).unwrap() / lead;
        assert!((ratio - 1.0).abs() < 1e-10);

        // r^s K_s(r) at r = 1e-6 (30-digit reference values).
        let frozen = [
            (0.3, 1.841_085_322_526_358_6),
            (0.5, 1.253_312_884_001_989_6),
            (1.0, 0.999_999_999_992_784_3),
            (2.0, 1.999_999_999_999_5),
        ];
        for (s, want) in frozen {
            let v = r.powf(s) * bessel_k_real(s, r).unwrap();
            assert!((v - want).abs() / want < 1e-9, "s = {s}: {v}");
        }
    }

    #[test]
    fn frozen_reference_values() {
        let i3 = bessel_i(3.0, 10.0).unwrap();
        assert!((i3 / 1_758.380_716_610_853_2 - 1.0).abs() < 1e-13);
        let i30 = bessel_i_scaled(30.0, 45.0).unwrap();
        assert!((i30 / 3.425_826_905_229_048e-6 - 1.0).abs() < 1e-12);
        let i_large = bessel_i_scaled(0.25, 200.0).unwrap();
        assert!((i_large / 0.028_222_738_715_791_606 - 1.0).abs() < 1e-13);
        let k = bessel_k(Complex64::new(1.0, 0.5), 3.0).unwrap();
        let want = Complex64::new(0.038_356_691_918_239_06, 0.005_582_642_096_169_151);
        assert!((k - want).norm() / want.norm() < 1e-10);
        let k = bessel_k(Complex64::new(0.5, 8.0), 2.0).unwrap();
        let want = Complex64::new(-3.114_594_980_181_843e-6, 2.278_897_463_531_581_5e-6);
        assert!((k - want).norm() / want.norm() < 1e-5);
    }

    #[test]
    fn regimes_agree_at_crossover() {
        for &nu in &[0.0, 0.5, 1.0, 2.5, 7.0, 12.0, 20.0, 30.0] {
            let r = crossover(nu);
            let (a, b) = bessel_i_regimes(nu, r).unwrap();
            assert!((a - b).abs() / a < 1e-10, "nu = {nu}: {a} vs {b}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_i(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_i(-0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k_real(1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(Complex64::new(60.0, 0.0), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn k_is_even_in_order() {
        let l = Complex64::new(1.3, 0.4);
        let a = bessel_k(l, 0.7).unwrap();
        let b = bessel_k(-l, 0.7).unwrap();
        assert!((a - b).norm() / a.norm() < 1e-14);
    }

    #[test]
    fn segura_examples() {
        for &(nu, r) in &[(1.0, 1.0), (0.0, 5.0), (2.0, 0.01)] {
            let c = segura_check(nu, r).unwrap();
            assert!(c.holds, "{c:?}");
        }
        // Both outer members vanish like r/(2ν) at small r.
        let c = segura_check(2.0, 0.01).unwrap();
        assert!((c.middle / (0.01 / 4.0) - 1.0).abs() < 1e-4);
    }
}
