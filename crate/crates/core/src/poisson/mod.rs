//! Hyperbolic Poisson transform in the upper half-space model `(x, a)`,
//! `x ∈ ℝⁿ`, `a > 0`.
//!
//! The normalized kernel is
//! `p_λ(x, a) = a^{λ+n/2} (a² + |x|²)^{-(λ+n/2)} / c(λ)` with
//! `c(λ) = π^{n/2} Γ(λ) / Γ(λ+n/2)`, so that `∫ p_λ(x, a) dx = a^{n/2-λ}` and
//! `p̂_λ(ξ, a) = (2π)^{-n/2} a^{n/2-λ} m_λ(a|ξ|)` with
//! `m_λ(r) = 2^{1-λ} r^λ K_λ(r) / Γ(λ)`, `m_λ(0) = 1`.

mod delta;
mod periodic;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, NormKind, SpectralGrid};
use crate::report::{Report, Trace};
use crate::specfun::{gamma, rk_scaled};
use crate::testfns::TestFunction;

pub use delta::{delta_asymptotics, delta_kernel, delta_l1, i1_half_explicit, i1_half_quadrature};

/// Default tube margin: slices require `|y| <= 0.95 a`.
pub const TUBE_MARGIN: f64 = 0.95;

/// Spectral parameters: dimension `n` and complex `λ` with `Re λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    n: usize,
    lambda: Complex64,
}

#[derive(Serialize)]
struct ParamsRepr {
    n: usize,
    lambda: [f64; 2],
    rho: f64,
    s: f64,
}

impl Serialize for Params {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ParamsRepr { n: self.n, lambda: [self.lambda.re, self.lambda.im], rho: self.rho(), s: self.s() }.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LambdaIn {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsIn {
    n: usize,
    lambda: LambdaIn,
    #[serde(default)]
    #[allow(dead_code)]
    rho: Option<f64>,
    #[serde(default)]
    #[allow(dead_code)]
    s: Option<f64>,
}

/// Accepts `{"n": 1, "lambda": 0.75}` or `{"n": 1, "lambda": [0.75, 0.3]}`;
/// `rho` and `s` are derived and ignored on input.
impl<'de> Deserialize<'de> for Params {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ParamsIn::deserialize(d)?;
        let lambda = match raw.lambda {
            LambdaIn::Real(s) => Complex64::new(s, 0.0),
            LambdaIn::Pair([re, im]) => Complex64::new(re, im),
        };
        Params::new(raw.n, lambda).map_err(serde::de::Error::custom)
    }
}

impl Params {
    pub fn new(n: usize, lambda: Complex64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Params(format!("dimension must be 1, 2 or 3, got {n}")));
        }
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::Params(format!("λ must be finite, got {lambda}")));
        }
        if !(lambda.re > 0.0) {
            return Err(Error::Params(format!("Re λ must be > 0, got {lambda}")));
        }
        Ok(Params { n, lambda })
    }

    pub fn real(n: usize, s: f64) -> Result<Self> {
        Self::new(n, Complex64::new(s, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.n as f64 / 2.0
    }

    pub fn s(&self) -> f64 {
        self.lambda.re
    }

    /// `λ + n/2`.
    pub fn mu(&self) -> Complex64 {
        self.lambda + self.rho()
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0
    }

    /// The same dimension with `λ` replaced by `Re λ`.
    pub fn real_part(&self) -> Params {
        Params { n: self.n, lambda: Complex64::new(self.lambda.re, 0.0) }
    }
}

/// Which kernel convention a transform uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Kernel `a^{λ+n/2}(a²+|x|²)^{-(λ+n/2)}`.
    Unnormalized,
    /// The same kernel divided by `c(λ)`.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fft,
    Quadrature,
}

/// `c(λ) = π^{n/2} Γ(λ) / Γ(λ+n/2)`, the mass of `(1+|x|²)^{-(λ+n/2)}`.
pub fn c_function(p: &Params) -> Result<Complex64> {
    let num = gamma(p.lambda)?;
    let den = gamma(p.mu())?;
    Ok(num / den * PI.powf(p.rho()))
}

/// `π^{n/2} Γ(2λ) / Γ(λ+n/2)`, the form in which the constant is often quoted.
/// It does not normalize the kernel unless `Γ(2λ) = Γ(λ)`; kept for comparison.
pub fn c_function_quoted(p: &Params) -> Result<Complex64> {
    let num = gamma(2.0 * p.lambda)?;
    let den = gamma(p.mu())?;
    Ok(num / den * PI.powf(p.rho()))
}

fn norm_factor(p: &Params, norm: Normalization) -> Result<Complex64> {
    Ok(match norm {
        Normalization::Unnormalized => Complex64::new(1.0, 0.0),
        Normalization::Normalized => 1.0 / c_function(p)?,
    })
}

/// Poisson kernel at the (possibly complexified) point `z`, level `a`.
pub fn poisson_kernel(z: &[Complex64], a: f64, p: &Params, norm: Normalization) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("level a must be positive, got {a}")));
    }
    if z.len() != p.n {
        return Err(Error::Params(format!("point has {} components, expected {}", z.len(), p.n)));
    }
    let w = Complex64::new(1.0, 0.0) + z.iter().map(|zi| (zi / a) * (zi / a)).sum::<Complex64>();
    if w.re <= 0.0 {
        return Err(Error::Branch(format!("1 + (z/a)² = {w} leaves the right half-plane")));
    }
    Ok(w.powc(-p.mu()) * a.powf(-p.rho()) * Complex64::new(a, 0.0).powc(-p.lambda) * norm_factor(p, norm)?)
}

/// Real-point convenience wrapper.
pub fn poisson_kernel_real(x: &[f64], a: f64, p: &Params, norm: Normalization) -> Result<Complex64> {
    let z: Vec<Complex64> = x.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    poisson_kernel(&z, a, p, norm)
}

/// `∫ p_λ(x, a) dx` in the given convention.
pub fn kernel_mass(a: f64, p: &Params, norm: Normalization) -> Result<Complex64> {
    let base = Complex64::new(a, 0.0).powc(p.rho() - p.lambda);
    Ok(match norm {
        Normalization::Normalized => base,
        Normalization::Unnormalized => base * c_function(p)?,
    })
}

/// Spectral profile `m_λ(r) = 2^{1-λ} r^λ K_λ(r) / Γ(λ)`.
#[derive(Debug, Clone, Copy)]
pub struct Multiplier {
    lambda: Complex64,
    prefactor: Complex64,
}

impl Multiplier {
    pub fn new(lambda: Complex64) -> Result<Self> {
        let prefactor = Complex64::new(2.0, 0.0).powc(1.0 - lambda) / gamma(lambda)?;
        Ok(Multiplier { lambda, prefactor })
    }

    /// `m_λ(r) e^{r}`.
    pub fn scaled(&self, r: f64) -> Result<Complex64> {
        if r == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.prefactor * rk_scaled(self.lambda, r)?)
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        Ok(self.scaled(r)? * (-r).exp())
    }
}

/// Evaluates `g(|ξ|)` once per distinct `|k|²` and spreads it over the lattice.
pub(crate) fn radial_table<G>(grid: &SpectralGrid, g: G) -> Result<Vec<Complex64>>
where
    G: Fn(f64) -> Result<Complex64> + Sync,
{
    let mut keys: Vec<i64> = (0..grid.len()).map(|i| grid.wavenumber_sq(i)).collect();
    keys.sort_unstable();
    keys.dedup();
    let dxi = grid.freq_spacing();
    let vals: Vec<Complex64> = keys.par_iter().map(|&k2| g((k2 as f64).sqrt() * dxi)).collect::<Result<_>>()?;
    let lookup: BTreeMap<i64, Complex64> = keys.into_iter().zip(vals).collect();
    Ok((0..grid.len()).map(|i| lookup[&grid.wavenumber_sq(i)]).collect())
}

/// Tube point `x + iy` at level `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub a: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TubePoint {
    pub fn new(a: f64, x: Vec<f64>, y: Vec<f64>, margin: f64) -> Result<Self> {
        let t = TubePoint { a, x, y };
        t.validate(margin)?;
        Ok(t)
    }

    pub fn y_norm(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn validate(&self, margin: f64) -> Result<()> {
        if !(self.a > 0.0) || self.x.len() != self.y.len() {
            return Err(Error::Params(format!("malformed tube point {self:?}")));
        }
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::Params(format!("tube margin must lie in (0, 1), got {margin}")));
        }
        let r = self.y_norm();
        if !(r <= margin * self.a) {
            return Err(Error::TubeViolation(format!("|y| = {r} exceeds {margin}·a = {}", margin * self.a)));
        }
        Ok(())
    }
}

fn check_level(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Params(format!("level a must be positive and finite, got {a}")));
    }
    Ok(())
}

pub(crate) fn check_dim(f: &Field, p: &Params) -> Result<()> {
    if f.grid().dim() != p.n {
        return Err(Error::GridMismatch(format!("field has dimension {}, params n = {}", f.grid().dim(), p.n)));
    }
    Ok(())
}

/// Spectrum of the slice `x ↦ φ_a(x + iy)` from the spectrum `fhat` of the input.
pub fn slice_spectrum(fhat: &Field, a: f64, y: &[f64], p: &Params, norm: Normalization) -> Result<Field> {
    check_level(a)?;
    let grid = *fhat.grid();
    let mult = Multiplier::new(p.lambda)?;
    let table = radial_table(&grid, |r| mult.scaled(a * r))?;
    let front = Complex64::new(a, 0.0).powc(p.rho() - p.lambda) * c_if(norm, p)?;
    let n = grid.dim();
    let values: Vec<Complex64> = fhat
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let xi = grid.frequency(i);
            let r: f64 = xi[..n].iter().map(|t| t * t).sum::<f64>().sqrt();
            let yx: f64 = (0..n).map(|j| y[j] * xi[j]).sum();
            let e = -a * r - yx;
            if e < -745.0 || *v == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                v * table[i] * front * e.exp()
            }
        })
        .collect();
    Field::new(grid, values, crate::field::Space::Frequency)
}

/// The spectral factor `a^{n/2-λ} m_λ(a|ξ|)` already carries the normalized
/// convention; the unnormalized one multiplies by `c(λ)`.
pub(crate) fn c_if(norm: Normalization, p: &Params) -> Result<Complex64> {
    Ok(match norm {
        Normalization::Normalized => Complex64::new(1.0, 0.0),
        Normalization::Unnormalized => c_function(p)?,
    })
}

/// `φ_a = f * p_λ(·, a)`.
pub fn poisson_transform(f: &Field, a: f64, p: &Params, method: Method, norm: Normalization) -> Result<Field> {
    tube_slice_with_margin(f, a, &vec![0.0; p.n], p, method, norm, TUBE_MARGIN)
}

/// `x ↦ φ_a(x + iy)`, `|y| <= 0.95 a`.
pub fn tube_slice(f: &Field, a: f64, y: &[f64], p: &Params, method: Method, norm: Normalization) -> Result<Field> {
    tube_slice_with_margin(f, a, y, p, method, norm, TUBE_MARGIN)
}

pub fn tube_slice_with_margin(
    f: &Field,
    a: f64,
    y: &[f64],
    p: &Params,
    method: Method,
    norm: Normalization,
    margin: f64,
) -> Result<Field> {
    check_level(a)?;
    check_dim(f, p)?;
    if y.len() != p.n {
        return Err(Error::Params(format!("y has {} components, expected {}", y.len(), p.n)));
    }
    TubePoint { a, x: vec![0.0; p.n], y: y.to_vec() }.validate(margin)?;
    match method {
        Method::Fft => slice_spectrum(&f.fourier()?, a, y, p, norm)?.inverse(),
        Method::Quadrature => {
            let total = kernel_mass(a, p, norm)?;
            let y = y.to_vec();
            let kernel = move |x: &[f64]| {
                let z: Vec<Complex64> = x.iter().zip(&y).map(|(&u, &v)| Complex64::new(u, v)).collect();
                poisson_kernel(&z, a, p, norm)
            };
            let decay = 2.0 * p.s() + p.n as f64;
            periodic::convolve_periodized(f, kernel, periodic::Tail { decay, total, width: a })
        }
    }
}

/// `‖φ_{a,y}‖₂` and the bound `|c(λ)| a^{n/2-s} ‖δ_{λ,y/a}‖₁ ‖f‖₂` for the
/// unnormalized transform.
pub fn slice_bound(f: &Field, a: f64, y: &[f64], p: &Params) -> Result<(f64, f64)> {
    let phi = tube_slice(f, a, y, p, Method::Fft, Normalization::Unnormalized)?;
    let ya: Vec<f64> = y.iter().map(|v| v / a).collect();
    let bound = c_function(p)?.norm() * a.powf(p.rho() - p.s()) * delta_l1(&ya, p)? * f.norm(NormKind::L2);
    Ok((phi.norm(NormKind::L2), bound))
}

/// FFT and quadrature paths of `x ↦ φ_a(x + iy)` compared in relative L²,
/// with the FFT round trip of the input and, off the real slice, the
/// a priori bound on `‖φ_{a,y}‖₂`.
pub fn dual_path(f: &Field, a: f64, y: &[f64], p: &Params, tol: f64) -> Result<Report> {
    check_dim(f, p)?;
    let op = if y.iter().all(|&v| v == 0.0) { "transform" } else { "slice" };
    let mut report = Report::new(op, serde_json::json!({ "params": p, "a": a, "y": y, "grid": f.grid() }));
    let fft = tube_slice(f, a, y, p, Method::Fft, Normalization::Normalized)?;
    let quad = tube_slice(f, a, y, p, Method::Quadrature, Normalization::Normalized)?;
    let round_trip = f.fourier()?.inverse()?.rel_l2(f)?;
    report.value("l2_fft", fft.norm(NormKind::L2)).value("l2_quadrature", quad.norm(NormKind::L2));
    report.check_below("dual_path", fft.rel_l2(&quad)?, tol);
    report.check_below("fft_round_trip", round_trip, 1e-12);
    if op == "slice" {
        let (norm, bound) = slice_bound(f, a, y, p)?;
        report.check("slice_bound", norm, bound, 0.0, norm <= bound * (1.0 + 1e-12));
    }
    let mut trace = Trace::new("profile", &["index", "re_fft", "im_fft", "re_quadrature", "im_quadrature"]);
    for (i, (u, v)) in fft.values().iter().zip(quad.values()).enumerate() {
        trace.push(vec![i as f64, u.re, u.im, v.re, v.im]);
    }
    report.trace(trace);
    Ok(report.finish())
}

/// Errors below this count as exact reproduction.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Smallest level the kernel width can be resolved at: `4h`.
pub fn min_resolvable_level(grid: &SpectralGrid) -> f64 {
    4.0 * grid.spacing()
}

pub(crate) fn check_ray(a_ray: &[f64], grid: &SpectralGrid) -> Result<()> {
    if a_ray.is_empty() {
        return Err(Error::Params("empty level ray".into()));
    }
    if a_ray.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::Params("levels must be positive".into()));
    }
    if a_ray.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Params("level ray must be strictly decreasing".into()));
    }
    let amin = *a_ray.last().unwrap();
    let lim = min_resolvable_level(grid);
    if amin < lim {
        return Err(Error::Resolution(format!("a = {amin} is below 4h = {lim}")));
    }
    Ok(())
}

/// Whether `v` strictly decreases over its last `k` entries.
pub(crate) fn tail_decreasing(v: &[f64], k: usize) -> bool {
    let start = v.len().saturating_sub(k);
    v[start..].windows(2).all(|w| w[1] < w[0])
}

/// Boundary recovery `ψ_a = a^{λ-n/2} φ_a → f` along a decreasing ray.
pub fn boundary_value(f: &Field, p: &Params, a_ray: &[f64], tol: f64) -> Result<Report> {
    check_dim(f, p)?;
    check_ray(a_ray, f.grid())?;
    let mut report =
        Report::new("boundary_value", serde_json::json!({ "params": p, "a_ray": a_ray, "convention": "normalized" }));
    let fhat = f.fourier()?;
    let errors: Vec<f64> = a_ray
        .par_iter()
        .map(|&a| {
            let phi = slice_spectrum(&fhat, a, &vec![0.0; p.n], p, Normalization::Normalized)?.inverse()?;
            let psi = phi.scale(Complex64::new(a, 0.0).powc(p.lambda - p.rho()));
            psi.rel_l2(f)
        })
        .collect::<Result<_>>()?;
    let mut trace = Trace::new("boundary", &["a", "rel_l2_error"]);
    for (a, e) in a_ray.iter().zip(&errors) {
        trace.push(vec![*a, *e]);
    }
    let last = *errors.last().unwrap();
    report.value("errors", &errors);
    report.check_below("final_error", last, tol);
    // An exactly reproduced input leaves only round-off, which has no trend.
    let floor = errors[errors.len().saturating_sub(5)..].iter().all(|&e| e <= ROUNDOFF_FLOOR);
    report.check_flag("decreasing_final_5", floor || tail_decreasing(&errors, 5));
    if floor {
        report.note("all errors at the round-off floor");
    }
    report.trace(trace);
    Ok(report.finish())
}

/// Periodic second-order finite-difference Laplacian.
fn fd_laplacian(f: &Field) -> Vec<Complex64> {
    let grid = f.grid();
    let m = grid.points_per_axis();
    let n = grid.dim();
    let h2 = grid.spacing().powi(2);
    let v = f.values();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for ax in 0..n {
        let stride = m.pow((n - 1 - ax) as u32);
        for (i, o) in out.iter_mut().enumerate() {
            let pos = (i / stride) % m;
            let up = if pos + 1 == m { i + stride - m * stride } else { i + stride };
            let dn = if pos == 0 { i + m * stride - stride } else { i - stride };
            *o += (v[up] - 2.0 * v[i] + v[dn]) / h2;
        }
    }
    out
}

/// Residual of `a²(Δ_x φ + ∂_a² φ) − (n−1) a ∂_a φ − (λ² − n²/4) φ` with
/// second-order differences (`da = h`) on grids `M ∈ points`, fixed extent.
pub fn eigen_residual(input: &TestFunction, p: &Params, extent: f64, points: &[usize], a: f64) -> Result<Report> {
    check_level(a)?;
    let mut report =
        Report::new("eigen_residual", serde_json::json!({ "params": p, "a": a, "extent": extent, "points": points }));
    let eig = p.lambda * p.lambda - p.rho() * p.rho();
    let nn = p.n as f64;
    let mut trace = Trace::new("eigen_residual", &["h", "residual"]);
    let mut res = Vec::new();
    for &m in points {
        let grid = SpectralGrid::new(p.n, extent, m)?;
        let f = input.sample(grid)?;
        let h = grid.spacing();
        if a - h < min_resolvable_level(&grid) {
            return Err(Error::Resolution(format!("a - h = {} below 4h", a - h)));
        }
        let fhat = f.fourier()?;
        let zero = vec![0.0; p.n];
        let lv =
            |lev: f64| -> Result<Field> { slice_spectrum(&fhat, lev, &zero, p, Normalization::Normalized)?.inverse() };
        let (lo, mid, hi) = (lv(a - h)?, lv(a)?, lv(a + h)?);
        let lap = fd_laplacian(&mid);
        let scale = mid.norm(NormKind::Linf);
        let mut worst: f64 = 0.0;
        for i in 0..grid.len() {
            let (u0, u1, u2) = (lo.values()[i], mid.values()[i], hi.values()[i]);
            let daa = (u2 - 2.0 * u1 + u0) / (h * h);
            let da = (u2 - u0) / (2.0 * h);
            let r = a * a * (lap[i] + daa) - (nn - 1.0) * a * da - eig * u1;
            worst = worst.max(r.norm());
        }
        let rel = worst / scale;
        trace.push(vec![h, rel]);
        res.push(rel);
    }
    let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    report.value("residuals", &res).value("orders", &orders);
    if let Some(&o) = orders.last() {
        report.check_abs("order", o, 2.0, 0.25);
    }
    report.trace(trace);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive, half_line_algebraic, Tolerance};

    #[test]
    fn c_function_values() {
        let p = Params::real(1, 0.5).unwrap();
        assert!((c_function(&p).unwrap().re - PI).abs() < 1e-13);
        let p = Params::real(1, 1.0).unwrap();
        assert!((c_function(&p).unwrap().re - 2.0).abs() < 1e-13);
        let p = Params::new(2, Complex64::new(0.7, 0.0)).unwrap();
        let c = c_function(&p).unwrap();
        assert!(c.re > 0.0 && c.im == 0.0);
    }

    #[test]
    fn c_function_is_the_kernel_mass() {
        // Independent oracle: ∫ (1+x²)^{-(s+1/2)} dx by adaptive quadrature.
        for &s in &[0.25, 0.5, 0.75, 1.0, 2.5] {
            let mu = s + 0.5;
            let g = |x: f64| (1.0 + x * x).powf(-mu);
            let (head, _) = adaptive(g, &[0.0, 1.0], Tolerance::default()).unwrap();
            let (tail, _) =
                half_line_algebraic(|x| Complex64::new(g(x), 0.0), 1.0, 2.0 * mu, Tolerance::default()).unwrap();
            let mass = 2.0 * (head + tail.re);
            let c = c_function(&Params::real(1, s).unwrap()).unwrap().re;
            assert!((mass - c).abs() < 1e-10 * c, "s = {s}: {mass} vs {c}");
        }
        // The quoted Γ(2λ) form agrees only where Γ(2s) = Γ(s), i.e. s = 1.
        let q = c_function_quoted(&Params::real(1, 1.0).unwrap()).unwrap().re;
        assert!((q - 2.0).abs() < 1e-12);
        let q = c_function_quoted(&Params::real(1, 0.5).unwrap()).unwrap().re;
        assert!((q - PI.sqrt()).abs() < 1e-12);
        assert!((q - PI).abs() > 1.0);
    }

    #[test]
    fn kernel_basics() {
        let p = Params::new(1, Complex64::new(0.8, 0.3)).unwrap();
        let a = 0.7;
        let k0 = poisson_kernel_real(&[0.0], a, &p, Normalization::Normalized).unwrap();
        let want = Complex64::new(a, 0.0).powc(-p.mu()) / c_function(&p).unwrap();
        assert!((k0 - want).norm() < 1e-14 * want.norm());
        let kp = poisson_kernel_real(&[0.4], a, &p, Normalization::Normalized).unwrap();
        let km = poisson_kernel_real(&[-0.4], a, &p, Normalization::Normalized).unwrap();
        assert_eq!(kp, km);
        let bad = poisson_kernel(&[Complex64::new(0.0, 1.2)], 1.0, &p, Normalization::Normalized);
        assert!(matches!(bad, Err(Error::Branch(_))));
    }

    #[test]
    fn multiplier_limits() {
        for l in [Complex64::new(0.75, 0.0), Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0)] {
            let m = Multiplier::new(l).unwrap();
            assert!((m.eval(1e-6).unwrap() - 1.0).norm() < 1e-4);
            assert!(m.eval(60.0).unwrap().norm() < 1e-20);
        }
        // m_{1/2}(r) = e^{-r}
        let m = Multiplier::new(Complex64::new(0.5, 0.0)).unwrap();
        for r in [0.1, 1.0, 7.0] {
            assert!((m.eval(r).unwrap().re - (-r).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn tube_violation() {
        let grid = SpectralGrid::new(1, 8.0, 64).unwrap();
        let f = TestFunction::Gaussian { width: 1.0, center: 0.0 }.sample(grid).unwrap();
        let p = Params::real(1, 1.0).unwrap();
        let r = tube_slice(&f, 1.0, &[0.96], &p, Method::Fft, Normalization::Normalized);
        assert!(matches!(r, Err(Error::TubeViolation(_))));
    }

    #[test]
    fn params_validation() {
        assert!(Params::real(1, 0.0).is_err());
        assert!(Params::real(4, 1.0).is_err());
        assert!(Params::new(2, Complex64::new(0.1, -3.0)).is_ok());
    }

    #[test]
    fn transform_of_constant_is_kernel_mass() {
        let grid = SpectralGrid::new(2, 8.0, 32).unwrap();
        let f = TestFunction::Constant.sample(grid).unwrap();
        let p = Params::new(2, Complex64::new(0.9, 0.2)).unwrap();
        let phi = poisson_transform(&f, 0.6, &p, Method::Fft, Normalization::Normalized).unwrap();
        let want = kernel_mass(0.6, &p, Normalization::Normalized).unwrap();
        for v in phi.values() {
            assert!((v - want).norm() < 1e-12);
        }
    }
}
