//! The degenerate extension problem in half-space coordinates `(x, t)`.
//!
//! `ψ(·, t) = t^{λ-n/2} φ_t` with `φ_t` the normalized Poisson transform, so
//! `ψ̂(ξ, t) = f̂(ξ) m_λ(t|ξ|)` and `ψ(·, t) → f` as `t → 0`. Since
//! `u(r) = r^λ K_λ(r)` solves `u'' + (1-2λ)/r u' - u = 0`, `ψ` satisfies
//! `(∂_t² + (1-2λ)/t ∂_t + Δ_x) ψ = 0`; the coefficient `(1-λ/2)/t` is also
//! evaluated so both can be compared.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{write_csv, Field, NormKind, Space};
use crate::poisson::{
    check_dim, min_resolvable_level, poisson_transform, radial_table, Method, Multiplier, Normalization, Params,
};
use crate::report::{Report, Trace};

/// Relative tolerance on equal `t`-spacing for centered stencils.
pub const STENCIL_TOLERANCE: f64 = 1e-9;

/// First-order coefficient of the extension operator, over `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coefficient {
    /// `1 - λ/2`.
    Printed,
    /// `1 - 2λ`.
    Classical,
}

impl Coefficient {
    pub fn value(self, p: &Params) -> Complex64 {
        match self {
            Coefficient::Printed => 1.0 - 0.5 * p.lambda(),
            Coefficient::Classical => 1.0 - 2.0 * p.lambda(),
        }
    }
}

/// Slices `ψ(·, t)` on a strictly decreasing list of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionField {
    pub t_levels: Vec<f64>,
    pub slices: Vec<Field>,
    pub params: Params,
}

#[derive(Serialize)]
struct Manifest<'a> {
    params: &'a Params,
    grid: crate::field::SpectralGrid,
    levels: &'a [f64],
    l2_norms: Vec<f64>,
    files: Vec<String>,
}

impl ExtensionField {
    /// One `level_<i>.csv` per level and `manifest.json`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.slices.len());
        for (i, s) in self.slices.iter().enumerate() {
            let name = format!("level_{i:03}.csv");
            write_csv(s, &dir.join(&name))?;
            files.push(name);
        }
        let manifest = Manifest {
            params: &self.params,
            grid: *self.slices[0].grid(),
            levels: &self.t_levels,
            l2_norms: self.slices.iter().map(|s| s.norm(NormKind::L2)).collect(),
            files,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }
}

fn check_levels(t_levels: &[f64], f: &Field) -> Result<()> {
    if t_levels.is_empty() || t_levels.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Params("levels must be positive and finite".into()));
    }
    if t_levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Params("levels must be strictly decreasing".into()));
    }
    let tmin = *t_levels.last().unwrap();
    let lim = min_resolvable_level(f.grid());
    if tmin < lim {
        return Err(Error::Resolution(format!("t = {tmin} is below 4h = {lim}")));
    }
    Ok(())
}

/// `ψ̂(ξ, t) = f̂(ξ) m_λ(t|ξ|)` on every level.
pub fn extend(f: &Field, t_levels: &[f64], p: &Params) -> Result<ExtensionField> {
    check_dim(f, p)?;
    check_levels(t_levels, f)?;
    let fhat = f.fourier()?;
    let grid = *f.grid();
    let mult = Multiplier::new(p.lambda())?;
    let slices = t_levels
        .par_iter()
        .map(|&t| {
            let table = radial_table(&grid, |r| mult.eval(t * r))?;
            let v = fhat.values().iter().zip(&table).map(|(a, b)| a * b).collect();
            Field::new(grid, v, Space::Frequency)?.inverse()
        })
        .collect::<Result<_>>()?;
    Ok(ExtensionField { t_levels: t_levels.to_vec(), slices, params: *p })
}

/// Agreement of `ψ(·, t)` with `t^{λ-n/2}` times the normalized Poisson transform.
pub fn consistency(f: &Field, psi: &ExtensionField, tol: f64) -> Result<Report> {
    let p = &psi.params;
    let mut report = Report::new("extension_consistency", serde_json::json!({ "params": p, "levels": psi.t_levels }));
    let errs: Vec<f64> = psi
        .t_levels
        .par_iter()
        .zip(&psi.slices)
        .map(|(&t, s)| {
            let phi = poisson_transform(f, t, p, Method::Fft, Normalization::Normalized)?;
            let other = phi.scale(Complex64::new(t, 0.0).powc(p.lambda() - p.rho()));
            s.rel_l2(&other)
        })
        .collect::<Result<_>>()?;
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    report.value("errors", &errs);
    report.check_below("max_rel_l2", worst, tol);
    Ok(report.finish())
}

/// `‖ψ(·, t) - f‖₂ / ‖f‖₂` along the levels.
pub fn boundary_recovery(f: &Field, psi: &ExtensionField, tol: f64, tail: usize) -> Result<Report> {
    let mut report = Report::new(
        "extension_recovery",
        serde_json::json!({ "params": psi.params, "levels": psi.t_levels, "tail": tail }),
    );
    let errs: Vec<f64> = psi.slices.iter().map(|s| s.rel_l2(f)).collect::<Result<_>>()?;
    let mut trace = Trace::new("recovery", &["t", "rel_l2_error"]);
    for (t, e) in psi.t_levels.iter().zip(&errs) {
        trace.push(vec![*t, *e]);
    }
    report.value("errors", &errs);
    report.check_below("final_error", *errs.last().unwrap(), tol);
    let floor = errs[errs.len().saturating_sub(tail)..].iter().all(|&e| e <= crate::poisson::ROUNDOFF_FLOOR);
    report.check_flag("strictly_decreasing_tail", floor || crate::poisson::tail_decreasing(&errs, tail));
    if floor {
        report.note("all errors at the round-off floor");
    }
    report.trace(trace);
    Ok(report.finish())
}

/// Uniform spacing of the levels, if any.
fn spacing(t_levels: &[f64]) -> Result<f64> {
    if t_levels.len() < 3 {
        return Err(Error::Stencil("centered stencils need at least 3 levels".into()));
    }
    let dt = t_levels[0] - t_levels[1];
    for w in t_levels.windows(2) {
        if ((w[0] - w[1]) - dt).abs() > STENCIL_TOLERANCE * dt.max(w[0]) {
            return Err(Error::Stencil(format!("non-uniform level spacing {} vs {dt}", w[0] - w[1])));
        }
    }
    Ok(dt)
}

/// Max-norm residual of `∂_t² + (k/t)∂_t + Δ_x` on each interior level,
/// centered differences in `t`, spectral Laplacian in `x`.
pub fn residuals(psi: &ExtensionField, coef: Coefficient) -> Result<Vec<f64>> {
    let dt = spacing(&psi.t_levels)?;
    let k = coef.value(&psi.params);
    let grid = *psi.slices[0].grid();
    (1..psi.t_levels.len() - 1)
        .into_par_iter()
        .map(|i| {
            let t = psi.t_levels[i];
            let (up, mid, dn) = (&psi.slices[i - 1], &psi.slices[i], &psi.slices[i + 1]);
            let lap = mid.fourier()?.into_values();
            let lap: Vec<Complex64> = lap
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let xi = grid.frequency(j);
                    -xi.iter().map(|q| q * q).sum::<f64>() * v
                })
                .collect();
            let lap = Field::new(grid, lap, Space::Frequency)?.inverse()?;
            let worst = (0..grid.len())
                .map(|j| {
                    let (a, b, c) = (up.values()[j], mid.values()[j], dn.values()[j]);
                    let dtt = (a - 2.0 * b + c) / (dt * dt);
                    let d1 = (a - c) / (2.0 * dt);
                    (dtt + k / t * d1 + lap.values()[j]).norm()
                })
                .fold(0.0, f64::max);
            Ok(worst)
        })
        .collect()
}

/// Residuals of both coefficients on the levels of `psi`.
pub fn ode_residual(psi: &ExtensionField) -> Result<Report> {
    let p = &psi.params;
    let mut report = Report::new("ode_residual", serde_json::json!({ "params": p, "levels": psi.t_levels }));
    let printed = residuals(psi, Coefficient::Printed)?;
    let classical = residuals(psi, Coefficient::Classical)?;
    let mut trace = Trace::new("ode_residual", &["t", "printed", "classical"]);
    for (i, (a, b)) in printed.iter().zip(&classical).enumerate() {
        trace.push(vec![psi.t_levels[i + 1], *a, *b]);
    }
    report.value("printed", &printed).value("classical", &classical);
    report.trace(trace);
    Ok(report.finish())
}

/// Centre-level residual on five-level stencils `t0 + 2dt, …, t0 - 2dt` for
/// each `dt`, with observed orders `log₂` of successive ratios.
pub fn ode_convergence(f: &Field, p: &Params, t0: f64, dts: &[f64]) -> Result<Report> {
    if dts.len() < 2 || dts.windows(2).any(|w| (w[0] / w[1] - 2.0).abs() > 1e-12) {
        return Err(Error::Params("dts must halve successively".into()));
    }
    let mut report = Report::new("ode_convergence", serde_json::json!({ "params": p, "t0": t0, "dts": dts }));
    let mut trace = Trace::new("ode_convergence", &["dt", "printed", "classical"]);
    let (mut printed, mut classical) = (Vec::new(), Vec::new());
    for &dt in dts {
        let levels: Vec<f64> = (0..5).map(|i| t0 + (2.0 - i as f64) * dt).collect();
        let psi = extend(f, &levels, p)?;
        let a = residuals(&psi, Coefficient::Printed)?[1];
        let b = residuals(&psi, Coefficient::Classical)?[1];
        trace.push(vec![dt, a, b]);
        printed.push(a);
        classical.push(b);
    }
    let order = |v: &[f64]| -> Vec<f64> { v.windows(2).map(|w| (w[0] / w[1]).log2()).collect() };
    let (op, oc) = (order(&printed), order(&classical));
    report.value("printed", &printed).value("classical", &classical);
    report.value("printed_orders", &op).value("classical_orders", &oc);
    let vanishing = if classical.last() < printed.last() { Coefficient::Classical } else { Coefficient::Printed };
    report.value("vanishing_coefficient", vanishing);
    let floor = classical.iter().all(|&r| r <= 1e-12);
    if floor {
        report.check_flag("classical_residual_at_roundoff", true);
    } else {
        report.check_abs("classical_order", *oc.last().unwrap(), 2.0, 0.25);
    }
    report.trace(trace);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralGrid;
    use crate::testfns::TestFunction;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(1, 16.0, 1024).unwrap()
    }

    #[test]
    fn constant_is_preserved() {
        let f = TestFunction::Constant.sample(grid()).unwrap();
        let p = Params::new(1, Complex64::new(0.8, 0.3)).unwrap();
        let psi = extend(&f, &[2.0, 1.0, 0.5], &p).unwrap();
        for s in &psi.slices {
            assert!(s.rel_l2(&f).unwrap() < 1e-14);
        }
        let r = ode_residual(&extend(&f, &[1.2, 1.1, 1.0, 0.9, 0.8], &p).unwrap()).unwrap();
        for v in r.values["printed"].as_array().unwrap() {
            assert!(v.as_f64().unwrap() < 1e-12);
        }
    }

    #[test]
    fn matches_scaled_poisson_transform() {
        let f = TestFunction::Gaussian { width: 1.0, center: 0.3 }.sample(grid()).unwrap();
        let p = Params::new(1, Complex64::new(0.75, -0.2)).unwrap();
        let psi = extend(&f, &[4.0, 1.0, 0.25, 0.15], &p).unwrap();
        assert!(consistency(&f, &psi, 1e-8).unwrap().pass);
    }

    #[test]
    fn classical_coefficient_converges_at_second_order() {
        let f = TestFunction::Gaussian { width: 1.0, center: 0.0 }.sample(grid()).unwrap();
        let p = Params::real(1, 0.75).unwrap();
        let r = ode_convergence(&f, &p, 1.0, &[0.1, 0.05, 0.025, 0.0125]).unwrap();
        assert!(r.pass, "{:?}", r.values);
        assert_eq!(r.values["vanishing_coefficient"], "classical");
    }

    #[test]
    fn rejects_bad_levels() {
        let f = TestFunction::Constant.sample(grid()).unwrap();
        let p = Params::real(1, 1.0).unwrap();
        assert!(matches!(extend(&f, &[1.0, 2.0], &p), Err(Error::Params(_))));
        assert!(matches!(extend(&f, &[1.0, 0.01], &p), Err(Error::Resolution(_))));
        let psi = extend(&f, &[1.0, 0.9, 0.5], &p).unwrap();
        assert!(matches!(ode_residual(&psi), Err(Error::Stencil(_))));
    }

    #[test]
    fn export_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let f =
            TestFunction::Gaussian { width: 1.0, center: 0.0 }.sample(SpectralGrid::new(1, 8.0, 64).unwrap()).unwrap();
        let psi = extend(&f, &[2.0, 1.0], &Params::real(1, 1.0).unwrap()).unwrap();
        psi.export(dir.path()).unwrap();
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["files"].as_array().unwrap().len(), 2);
        assert!(dir.path().join("level_001.csv").exists());
    }
}
