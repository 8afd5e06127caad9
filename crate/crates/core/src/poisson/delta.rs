//! The tube kernels `δ_{λ,y}(x) = (1 + (x+iy)²)^{-(λ+n/2)} / c(λ)` and their
//! `L¹` norms as `|y| → 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{c_function, poisson_kernel, Normalization, Params};
use crate::error::{Error, Result};
use crate::field::{Field, SpectralGrid};
use crate::quad::{adaptive, half_line_algebraic, Tolerance};
use crate::report::{Report, Trace};

fn tol() -> Tolerance {
    Tolerance { abs: 0.0, rel: 1e-11, max_segments: 20_000 }
}

fn check_y(y: &[f64], p: &Params) -> Result<f64> {
    if y.len() != p.n() {
        return Err(Error::Params(format!("y has {} components, expected {}", y.len(), p.n())));
    }
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(r < 1.0) {
        return Err(Error::TubeViolation(format!("|y| = {r} must be < 1")));
    }
    Ok(r)
}

/// Samples `δ_{λ,y}` on the position lattice.
pub fn delta_kernel(grid: SpectralGrid, y: &[f64], p: &Params) -> Result<Field> {
    check_y(y, p)?;
    if grid.dim() != p.n() {
        return Err(Error::GridMismatch("grid and params dimensions differ".into()));
    }
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let z: Vec<Complex64> = (0..p.n()).map(|j| Complex64::new(x[j], y[j])).collect();
            poisson_kernel(&z, 1.0, p, Normalization::Normalized)
        })
        .collect::<Result<_>>()?;
    Field::new(grid, values, crate::field::Space::Position)
}

/// Break points `0, ±w·4^k` up to `±r`.
fn ladder(w: f64, r: f64) -> Vec<f64> {
    let mut pos = vec![];
    let mut t = w;
    while t < r {
        pos.push(t);
        t *= 4.0;
    }
    pos.push(r);
    let mut out: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
    out.push(0.0);
    out.extend(pos);
    out
}

/// `∫_ℝ g` with geometric break points around the origin and algebraic tails.
fn whole_line<G: FnMut(f64) -> f64>(mut g: G, core: f64, reach: f64, decay: f64) -> Result<f64> {
    let brk = ladder(core, reach);
    let (mid, _) = adaptive(&mut g, &brk, tol())?;
    let (r, _) = half_line_algebraic(|x| Complex64::new(g(x), 0.0), reach, decay, tol())?;
    let (l, _) = half_line_algebraic(|x| Complex64::new(g(-x), 0.0), reach, decay, tol())?;
    Ok(mid + r.re + l.re)
}

/// `‖δ_{λ,y}‖₁` by adaptive quadrature over all of `ℝⁿ` (algebraic tails
/// mapped to a finite interval, so no box truncation enters).
pub fn delta_l1(y: &[f64], p: &Params) -> Result<f64> {
    let r = check_y(y, p)?;
    let mu = p.mu();
    let c = c_function(p)?.norm();
    let gamma2 = 1.0 - r * r;
    // |1 + (x+iy)²| ≈ sqrt(γ⁴ + 4x₁²r²) near the origin.
    let core = (0.25 * gamma2).min(0.25);
    let abs_pow = |w: Complex64| -> f64 { (-(mu * w.ln()).re).exp() };
    let n = p.n();
    if n == 1 {
        let g = |x: f64| abs_pow(Complex64::new(1.0 + x * x - r * r, 2.0 * x * r)) / c;
        return whole_line(g, core, 4.0, 2.0 * p.s() + 1.0);
    }
    // Rotate y onto e₁; integrate the transverse radius ρ in polar form.
    let sphere = if n == 2 { 2.0 } else { 2.0 * PI };
    let mut err: Option<Error> = None;
    let outer = |x1: f64| -> f64 {
        let a = Complex64::new(1.0 + x1 * x1 - r * r, 2.0 * x1 * r);
        let rho0 = a.norm().sqrt();
        let inner = |rho: f64| rho.powi(n as i32 - 2) * abs_pow(a + rho * rho);
        let head = adaptive(inner, &[0.0, 0.25 * rho0, rho0, 4.0 * rho0], tol());
        let tail = half_line_algebraic(|t| Complex64::new(inner(t), 0.0), 4.0 * rho0, 2.0 * p.s() + 2.0, tol());
        match (head, tail) {
            (Ok((h, _)), Ok((t, _))) => sphere * (h + t.re) / c,
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let v = whole_line(outer, core, 4.0, 2.0 * p.s() + 1.0)?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `I₁(1/2, γ) = ∫_ℝ (1 + x² + 2γ⁻¹|x| y₁)^{-1} dx`, `y₁ = sqrt(1 - γ²)`, by quadrature.
pub fn i1_half_quadrature(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("γ must lie in (0, 1), got {gamma}")));
    }
    let y1 = (1.0 - gamma * gamma).sqrt();
    let g = |x: f64| 1.0 / (1.0 + x * x + 2.0 * x.abs() * y1 / gamma);
    whole_line(g, 0.25 * gamma, 4.0, 2.0)
}

/// Closed form of `γ⁻¹ I₁(1/2, γ) = -(y₁² - γ²)^{-1/2} log((y₁ - √(y₁²-γ²)) / (y₁ + √(y₁²-γ²)))`,
/// valid for `γ < 1/√2`.
pub fn i1_half_explicit(gamma: f64) -> Result<f64> {
    let y1sq = 1.0 - gamma * gamma;
    let d = y1sq - gamma * gamma;
    if !(gamma > 0.0) || !(d > 0.0) {
        return Err(Error::Domain(format!("explicit form needs 0 < γ < 1/√2, got {gamma}")));
    }
    let y1 = y1sq.sqrt();
    let q = d.sqrt();
    // y₁ - q = γ² / (y₁ + q) avoids cancellation for small γ.
    let ratio = gamma * gamma / ((y1 + q) * (y1 + q));
    Ok(-ratio.ln() / q)
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icpt, rms)
}

/// Growth regime of `‖δ_{λ,y}‖₁` as `γ = sqrt(1 - |y|²) → 0`.
pub fn delta_asymptotics(p: &Params, gammas: &[f64]) -> Result<Report> {
    if gammas.len() < 5 || gammas.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
        return Err(Error::Params("need at least 5 values of γ in (0, 1)".into()));
    }
    let mut gs = gammas.to_vec();
    gs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut report = Report::new("delta_asymptotics", serde_json::json!({ "params": p, "gammas": gs }));
    let n = p.n();
    let l1: Vec<f64> = gs
        .par_iter()
        .map(|&g| {
            let mut y = vec![0.0; n];
            y[0] = (1.0 - g * g).sqrt();
            delta_l1(&y, p)
        })
        .collect::<Result<_>>()?;
    let lx: Vec<f64> = gs.iter().map(|g| (g * g).ln()).collect();
    let ly: Vec<f64> = l1.iter().map(|v| v.ln()).collect();
    let mut trace = Trace::new("delta_l1", &["gamma", "one_minus_y2", "l1"]);
    for (g, v) in gs.iter().zip(&l1) {
        trace.push(vec![*g, g * g, *v]);
    }
    report.value("l1", &l1);
    let s = p.s();
    let last5 = gs.len() - 5;
    if (s - 0.5).abs() < 1e-12 {
        let ratios: Vec<f64> = l1.iter().zip(&lx).map(|(v, l)| v / l.abs()).collect();
        let tail = &ratios[last5..];
        let (mx, mn) = tail.iter().fold((f64::MIN, f64::MAX), |(a, b), &v| (a.max(v), b.min(v)));
        report.value("regime", "logarithmic").value("log_ratios", &ratios);
        report.check_below("log_ratio_spread", (mx - mn) / mn, 0.1);
        let mut worst: f64 = 0.0;
        let mut explicit = Trace::new("i1_half", &["gamma", "quadrature", "explicit"]);
        for &g in gs.iter().filter(|&&g| g < std::f64::consts::FRAC_1_SQRT_2) {
            let q = i1_half_quadrature(g)? / g;
            let e = i1_half_explicit(g)?;
            worst = worst.max((q - e).abs() / e);
            explicit.push(vec![g, q, e]);
        }
        report.check_below("explicit_i1_rel_err", worst, 1e-8);
        report.trace(explicit);
    } else if s < 0.5 {
        let (mx, mn) = l1.iter().fold((f64::MIN, f64::MAX), |(a, b), &v| (a.max(v), b.min(v)));
        report.value("regime", "bounded");
        report.check_below("max_over_min", mx / mn, 3.0);
    } else {
        let window: Vec<usize> = {
            let small: Vec<usize> = (0..gs.len()).filter(|&i| gs[i] <= 0.05).collect();
            if small.len() >= 3 {
                small
            } else {
                (last5..gs.len()).collect()
            }
        };
        let wx: Vec<f64> = window.iter().map(|&i| lx[i]).collect();
        let wy: Vec<f64> = window.iter().map(|&i| ly[i]).collect();
        let (slope, _, rms) = least_squares(&wx, &wy);
        if !(rms < 0.05) {
            return Err(Error::Fit(format!("log-log fit residual {rms:.3e} exceeds 0.05")));
        }
        report.value("regime", "power").value("fit_rms", rms).value("fit_points", window.len());
        report.reference("slope", -(s - 0.5));
        report.check_abs("slope", slope, -(s - 0.5), 0.05);
    }
    report.trace(trace);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_lower_bound() {
        for &s in &[0.25, 0.75, 1.5] {
            let p = Params::real(1, s).unwrap();
            let v = delta_l1(&[0.0], &p).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "s = {s}: {v}");
            assert!(delta_l1(&[0.6], &p).unwrap() >= 1.0);
        }
        let p = Params::real(2, 0.8).unwrap();
        assert!((delta_l1(&[0.0, 0.0], &p).unwrap() - 1.0).abs() < 1e-8);
        assert!(matches!(delta_l1(&[1.0], &Params::real(1, 1.0).unwrap()), Err(Error::TubeViolation(_))));
    }

    #[test]
    fn rotation_invariance_in_two_dimensions() {
        let p = Params::new(2, Complex64::new(0.9, 0.4)).unwrap();
        let a = delta_l1(&[0.5, 0.0], &p).unwrap();
        let b = delta_l1(&[0.3, 0.4], &p).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn explicit_half_formula() {
        for &g in &[0.5, 0.1, 1e-2, 1e-3] {
            let q = i1_half_quadrature(g).unwrap() / g;
            let e = i1_half_explicit(g).unwrap();
            assert!((q - e).abs() < 1e-9 * e, "γ = {g}: {q} vs {e}");
        }
        assert!(i1_half_explicit(0.8).is_err());
    }

    #[test]
    fn delta_at_origin() {
        let p = Params::new(1, Complex64::new(0.6, 0.2)).unwrap();
        let grid = SpectralGrid::new(1, 8.0, 64).unwrap();
        let d = delta_kernel(grid, &[0.0], &p).unwrap();
        let want = 1.0 / c_function(&p).unwrap();
        assert!((d.values()[32] - want).norm() < 1e-14 * want.norm());
    }
}
