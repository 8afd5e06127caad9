//! Weighted Bergman norms on the tubes `T_a = {x + iy : |y| < a}`.
//!
//! The spatial weight is
//! `𝐰_a^α(y) = (2π)^{-n/2} Γ(α)^{-1} (1 - |y|²/a²)_+^{α-1}` and the
//! Fourier-side weight is
//! `w_λ^α(r) = r^{2s} |K_λ(r)|² I_β(2r) / (2r)^β`, `β = α + n/2 - 1`.
//! For the normalized transform the two are linked by
//!
//! ```text
//! ∫_{T_a} |φ_a|² 𝐰_a^α = c a^{2n-2s} ∫ |f̂(ξ)|² w_λ^α(a|ξ|) dξ,   c = 2^{α+1-2s} / |Γ(λ)|².
//! ```

mod verify;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::poisson::{c_if, radial_table, Multiplier, Normalization, Params};
use crate::quad::{gauss_legendre, GaussJacobi};
use crate::specfun::bessel::bessel_i_scaled_any;
use crate::specfun::{gamma, gamma_real, rk_scaled};

pub use verify::{
    admissibility, admissibility_threshold, admissibility_trend, banach_isometry, banach_norm, level_isometry,
    norm_limit, segura_grid, weight_law, AdmissibilityTrend, Verdict,
};

/// Radial Gauss–Jacobi nodes used by the tube quadrature.
pub const RADIAL_NODES: usize = 64;

/// Which member of the weight pair is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Spatial,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: f64,
    pub side: Side,
    pub params: Params,
}

impl WeightSpec {
    pub fn new(alpha: f64, side: Side, params: Params) -> Result<Self> {
        let w = WeightSpec { alpha, side, params };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Params(format!("α must be positive and finite, got {}", self.alpha)));
        }
        Ok(())
    }

    /// `β = α + n/2 - 1`.
    pub fn beta(&self) -> f64 {
        self.alpha + self.params.rho() - 1.0
    }

    /// `α > max{2s - (n+1)/2, 0}`, the range of the monotonicity statement.
    pub fn monotone_range(&self) -> bool {
        let n = self.params.n() as f64;
        self.alpha > (2.0 * self.params.s() - 0.5 * (n + 1.0)).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BergmanMethod {
    TubeQuadrature,
    FourierSide,
}

/// Squared Bergman norm of `φ_a` over `T_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BergmanEvaluation {
    pub a: f64,
    pub value: f64,
    pub method: BergmanMethod,
}

/// `(2π)^{-n/2} Γ(α)^{-1} (1 - |y|²/a²)_+^{α-1}`; zero off the open tube.
pub fn spatial_weight(y: &[f64], a: f64, w: &WeightSpec) -> Result<f64> {
    w.validate()?;
    if !(a > 0.0) {
        return Err(Error::Params(format!("level a must be positive, got {a}")));
    }
    let q = 1.0 - y.iter().map(|v| v * v).sum::<f64>() / (a * a);
    if q <= 0.0 {
        return Ok(0.0);
    }
    let n = w.params.n() as f64;
    Ok((2.0 * PI).powf(-0.5 * n) / gamma_real(w.alpha)? * q.powf(w.alpha - 1.0))
}

/// `w_λ^α(r)`, evaluated as `|r^λ K_λ(r) e^r|² · I_β(2r) e^{-2r} / (2r)^β`.
pub fn fourier_weight(r: f64, w: &WeightSpec) -> Result<f64> {
    w.validate()?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("|ξ| must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return fourier_weight_at_zero(w);
    }
    let beta = w.beta();
    let k = rk_scaled(w.params.lambda(), r)?.norm_sqr();
    let i = bessel_i_scaled_any(beta, 2.0 * r)?;
    Ok(k * i / (2.0 * r).powf(beta))
}

/// `w_λ^α(0) = 2^{2s-α-n/2-1} |Γ(λ)|² / Γ(α+n/2)`.
pub fn fourier_weight_at_zero(w: &WeightSpec) -> Result<f64> {
    let p = &w.params;
    let e = 2.0 * p.s() - w.alpha - p.rho() - 1.0;
    Ok(2f64.powf(e) * gamma(p.lambda())?.norm_sqr() / gamma_real(w.alpha + p.rho())?)
}

/// The value `2^{-α-n/2-2s-1} Γ(s)² / Γ(α+n/2)` as it is commonly quoted; it
/// differs from the limit by `2^{4s}`.
pub fn fourier_weight_at_zero_quoted(w: &WeightSpec) -> Result<f64> {
    let p = &w.params;
    let e = -w.alpha - p.rho() - 2.0 * p.s() - 1.0;
    Ok(2f64.powf(e) * gamma_real(p.s())?.powi(2) / gamma_real(w.alpha + p.rho())?)
}

/// `w(λ) = (∫_{|y|<1} 𝐰^α(y) dy)^{1/2} = (2^{-n/2} / Γ(α+n/2))^{1/2}`.
pub fn w_constant(w: &WeightSpec) -> Result<f64> {
    w.validate()?;
    let p = &w.params;
    Ok((2f64.powf(-p.rho()) / gamma_real(w.alpha + p.rho())?).sqrt())
}

fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Gauss–Jacobi map of `∫_0^1 (1-r²)^{α-1} r^{n-1} g(r) dr`, `r = (1+x)/2`:
/// nodes `r_i` and weights `2^{-α} w_i (1+r_i)^{α-1} r_i^{n-1}`.
fn radial_rule(alpha: f64, n: usize, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let gj = GaussJacobi::new(nodes, alpha - 1.0, 0.0)?;
    let scale = 2f64.powf(-alpha);
    let r: Vec<f64> = gj.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect();
    let wts = gj
        .weights
        .iter()
        .zip(&r)
        .map(|(wi, ri)| scale * wi * (1.0 + ri).powf(alpha - 1.0) * ri.powi(n as i32 - 1))
        .collect();
    Ok((r, wts))
}

/// `w(λ)` by the radial Gauss–Jacobi rule times `|S^{n-1}|`.
pub fn w_constant_quadrature(w: &WeightSpec) -> Result<f64> {
    w.validate()?;
    let n = w.params.n();
    let (_, wts) = radial_rule(w.alpha, n, RADIAL_NODES)?;
    let radial: f64 = wts.iter().sum();
    let c = (2.0 * PI).powf(-0.5 * n as f64) / gamma_real(w.alpha)?;
    Ok((c * sphere_area(n) * radial).sqrt())
}

/// Level-isometry constant `2^{α+1-2s} / |Γ(λ)|²` for the normalized transform.
pub fn isometry_constant(w: &WeightSpec) -> Result<f64> {
    w.validate()?;
    let s = w.params.s();
    Ok(2f64.powf(w.alpha + 1.0 - 2.0 * s) / gamma(w.params.lambda())?.norm_sqr())
}

/// The candidate `2^{α+2s+1} / Γ(s)²`; it differs from the constant by `2^{4s}`.
pub fn isometry_constant_candidate(w: &WeightSpec) -> Result<f64> {
    let s = w.params.s();
    Ok(2f64.powf(w.alpha + 2.0 * s + 1.0) / gamma_real(s)?.powi(2))
}

/// Directions and weights on `S^{n-1}`.
fn sphere_rule(n: usize) -> Result<Vec<([f64; 3], f64)>> {
    Ok(match n {
        1 => vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
        2 => {
            let m = 64;
            (0..m)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / m as f64;
                    ([t.cos(), t.sin(), 0.0], 2.0 * PI / m as f64)
                })
                .collect()
        }
        3 => {
            // Gauss–Legendre in cos θ times equispaced azimuths: exact for
            // spherical harmonics of degree < 32.
            let gl = gauss_legendre(16)?;
            let m = 32;
            let mut out = Vec::with_capacity(16 * m);
            for (ct, wt) in gl.nodes.iter().zip(&gl.weights) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for j in 0..m {
                    let ph = 2.0 * PI * j as f64 / m as f64;
                    out.push(([st * ph.cos(), st * ph.sin(), *ct], wt * 2.0 * PI / m as f64));
                }
            }
            out
        }
        _ => return Err(Error::Params(format!("unsupported dimension {n}"))),
    })
}

fn check_spectrum(fhat: &Field, w: &WeightSpec, a: f64) -> Result<()> {
    w.validate()?;
    if fhat.space() != Space::Frequency {
        return Err(Error::Params("Bergman norms consume the spectrum f̂".into()));
    }
    if fhat.grid().dim() != w.params.n() {
        return Err(Error::GridMismatch(format!(
            "spectrum has dimension {}, params n = {}",
            fhat.grid().dim(),
            w.params.n()
        )));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Params(format!("level a must be positive and finite, got {a}")));
    }
    Ok(())
}

/// `∫_{T_a} |φ_a|² 𝐰_a^α` from the spectrum of the input.
pub fn bergman_norm(
    fhat: &Field,
    a: f64,
    w: &WeightSpec,
    method: BergmanMethod,
    norm: Normalization,
) -> Result<BergmanEvaluation> {
    check_spectrum(fhat, w, a)?;
    let value = match method {
        BergmanMethod::TubeQuadrature => tube_quadrature(fhat, a, w, norm)?,
        BergmanMethod::FourierSide => isometry_constant(w)? * fourier_sum(fhat, a, w, norm)?,
    };
    if !value.is_finite() {
        return Err(Error::Quadrature(format!("non-finite Bergman norm at a = {a}")));
    }
    Ok(BergmanEvaluation { a, value, method })
}

/// `|c_if|² a^{2n-2s} Σ |f̂|² w_λ^α(a|ξ|) Δξⁿ`, the Fourier side without the
/// isometry constant.
pub(crate) fn fourier_sum(fhat: &Field, a: f64, w: &WeightSpec, norm: Normalization) -> Result<f64> {
    check_spectrum(fhat, w, a)?;
    let p = &w.params;
    let grid = *fhat.grid();
    let table = radial_table(&grid, |r| fourier_weight(a * r, w).map(|v| Complex64::new(v, 0.0)))?;
    let sum: f64 = fhat.values().iter().zip(&table).map(|(v, t)| v.norm_sqr() * t.re).sum();
    let n = p.n() as f64;
    Ok(c_if(norm, p)?.norm_sqr() * a.powf(2.0 * n - 2.0 * p.s()) * sum * grid.freq_cell())
}

struct Mode {
    base: f64,
    xi: [f64; 3],
    r: f64,
}

/// Parseval on each slice `x ↦ φ_a(x + iy)`, Gauss–Jacobi in `|y|/a`, sphere rule in `y/|y|`.
fn tube_quadrature(fhat: &Field, a: f64, w: &WeightSpec, norm: Normalization) -> Result<f64> {
    let p = &w.params;
    let n = p.n();
    let grid = *fhat.grid();
    let mult = Multiplier::new(p.lambda())?;
    let table = radial_table(&grid, |r| mult.scaled(a * r))?;
    let front = a.powf(n as f64 - 2.0 * p.s()) * c_if(norm, p)?.norm_sqr();
    let mut modes: Vec<Mode> = fhat
        .values()
        .iter()
        .zip(&table)
        .enumerate()
        .map(|(i, (v, m))| {
            let xi = grid.frequency(i);
            let r = xi[..n].iter().map(|t| t * t).sum::<f64>().sqrt();
            Mode { base: front * v.norm_sqr() * m.norm_sqr(), xi, r }
        })
        .collect();
    // Each mode contributes at most `base` on any slice.
    let top = modes.iter().map(|m| m.base).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    modes.retain(|m| m.base > 1e-30 * top);
    let (radii, wts) = radial_rule(w.alpha, n, RADIAL_NODES)?;
    let sphere = sphere_rule(n)?;
    let cell = grid.freq_cell();
    let slices: Vec<f64> = radii
        .par_iter()
        .map(|&rho| {
            let mut total = 0.0;
            for (dir, wd) in &sphere {
                let acc: f64 = modes
                    .iter()
                    .map(|m| {
                        let dot: f64 = (0..n).map(|j| dir[j] * m.xi[j]).sum();
                        m.base * (-2.0 * a * (m.r + rho * dot)).exp()
                    })
                    .sum();
                total += wd * acc;
            }
            total * cell
        })
        .collect();
    let radial: f64 = wts.iter().zip(&slices).map(|(wi, si)| wi * si).sum();
    let c = (2.0 * PI).powf(-0.5 * n as f64) / gamma_real(w.alpha)?;
    Ok(c * a.powi(n as i32) * radial)
}
