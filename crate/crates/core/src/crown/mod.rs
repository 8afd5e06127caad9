//! Numeric probe of the unipotent crown model for `GL(n, ℝ)`.
//!
//! `f_k(g) = det(⟨g v_i, g v_j⟩)_{i,j <= n-k}` with `v_i = e_{n-i+1}` and the
//! bilinear pairing `⟨z, w⟩ = zᵀw`. These are left `K_ℂ`- and right
//! `N̄_ℂ`-invariant; a zero of some `f_k` on `exp(iY) N` excludes `Y` from the
//! tube of zero-freeness. Only exclusion certificates are issued.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Report, Trace};

pub type CMatrix = DMatrix<Complex64>;

/// Largest condition number accepted by [`f_k`].
pub const MAX_CONDITION: f64 = 1e12;

/// Probe defaults.
pub const DEFAULT_RADIUS: f64 = 5.0;
pub const DEFAULT_SAMPLES: usize = 512;

/// `|f_k|` below this counts as a zero.
const ZERO_TOL: f64 = 1e-8;

/// Real strictly upper-triangular `Y ∈ 𝔫`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperNilpotent {
    n: usize,
    entries: Vec<f64>,
}

impl UpperNilpotent {
    /// From a row-major `n × n` array.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if !(2..=4).contains(&n) {
            return Err(Error::Params(format!("probe supports 2 <= n <= 4, got {n}")));
        }
        if entries.len() != n * n {
            return Err(Error::Params(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        for i in 0..n {
            for j in 0..=i {
                if entries[i * n + j] != 0.0 {
                    return Err(Error::Params(format!("Y[{i}][{j}] must vanish")));
                }
            }
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Params("Y must be finite".into()));
        }
        Ok(UpperNilpotent { n, entries })
    }

    /// `scale · E_{ij}` (zero-based).
    pub fn elementary(n: usize, i: usize, j: usize, scale: f64) -> Result<Self> {
        let mut e = vec![0.0; n * n];
        if i >= j || j >= n {
            return Err(Error::Params(format!("E_{{{i}{j}}} is not strictly upper")));
        }
        e[i * n + j] = scale;
        Self::new(n, e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Real `k × (n-k)` block `Y` of the abelian subalgebra `𝔲_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub k: usize,
    pub z: DMatrix<f64>,
}

impl BlockMatrix {
    pub fn new(k: usize, z: DMatrix<f64>) -> Result<Self> {
        if k == 0 || z.nrows() != k || z.ncols() == 0 {
            return Err(Error::Params(format!(
                "block must be k × (n-k) with k = {k}, got {}×{}",
                z.nrows(),
                z.ncols()
            )));
        }
        Ok(BlockMatrix { k, z })
    }
}

/// `exp(X)` for strictly upper-triangular `X`: the finite series `Σ_{j<n} X^j/j!`.
pub fn exp_nilpotent(x: &CMatrix) -> Result<CMatrix> {
    let n = x.nrows();
    for i in 0..n {
        for j in 0..=i {
            if x[(i, j)] != Complex64::new(0.0, 0.0) {
                return Err(Error::Params("matrix is not strictly upper-triangular".into()));
            }
        }
    }
    let mut out = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for j in 1..n {
        term = &term * x / Complex64::new(j as f64, 0.0);
        out += &term;
    }
    Ok(out)
}

fn condition(g: &CMatrix) -> f64 {
    let sv = g.clone().svd(false, false).singular_values;
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Gram determinant of the last `n-k` columns under `zᵀw`.
pub fn f_k(g: &CMatrix, k: usize) -> Result<Complex64> {
    let n = g.nrows();
    if g.ncols() != n || k == 0 || k >= n {
        return Err(Error::Params(format!("need square g and 1 <= k < n, got {}×{} and k = {k}", n, g.ncols())));
    }
    let c = condition(g);
    if !(c <= MAX_CONDITION) {
        return Err(Error::Conditioning(format!("condition number {c:.3e} exceeds {MAX_CONDITION:.0e}")));
    }
    let cols = g.columns(k, n - k);
    Ok((cols.transpose() * cols).determinant())
}

/// `1 - YᵀY ≻ 0`.
pub fn upsilon_membership(y: &BlockMatrix) -> bool {
    let m = y.z.ncols();
    let a = DMatrix::<f64>::identity(m, m) - y.z.transpose() * &y.z;
    SymmetricEigen::new(a).eigenvalues.iter().all(|&e| e > 0.0)
}

/// Upper-unipotent `u` from its strictly-upper entries, row by row.
fn unipotent(n: usize, theta: &[f64]) -> CMatrix {
    let mut u = CMatrix::identity(n, n);
    let mut it = theta.iter();
    for i in 0..n {
        for j in i + 1..n {
            u[(i, j)] = Complex64::new(*it.next().unwrap(), 0.0);
        }
    }
    u
}

/// `exp(iτY)`.
fn complex_shift(y: &UpperNilpotent, tau: f64) -> Result<CMatrix> {
    let x = y.matrix().map(|v| Complex64::new(0.0, tau * v));
    exp_nilpotent(&x)
}

/// `f_k(exp(iτY) u(θ))`, with ill-conditioned points mapped to `None`.
fn probe_value(shift: &CMatrix, theta: &[f64], k: usize) -> Option<Complex64> {
    let g = shift * unipotent(shift.nrows(), theta);
    f_k(&g, k).ok()
}

/// Levenberg–Marquardt on `|f_k(exp(iτY) u(θ))|²` over real `θ`.
fn minimize(shift: &CMatrix, k: usize, start: &[f64]) -> (Vec<f64>, f64) {
    let m = start.len();
    let mut theta = start.to_vec();
    let Some(mut f) = probe_value(shift, &theta, k) else {
        return (theta, f64::INFINITY);
    };
    if m == 0 {
        return (theta, f.norm());
    }
    let mut mu = 1e-3;
    for _ in 0..60 {
        if f.norm() < 1e-15 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(2, m);
        for p in 0..m {
            let h = 1e-6 * (1.0 + theta[p].abs());
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[p] += h;
            tm[p] -= h;
            let (Some(a), Some(b)) = (probe_value(shift, &tp, k), probe_value(shift, &tm, k)) else {
                return (theta, f.norm());
            };
            let d = (a - b) / (2.0 * h);
            jac[(0, p)] = d.re;
            jac[(1, p)] = d.im;
        }
        let r = nalgebra::DVector::from_vec(vec![f.re, f.im]);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for p in 0..m {
                a[(p, p)] += mu * (1.0 + jtj[(p, p)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                mu *= 4.0;
                continue;
            };
            let cand: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            if let Some(fc) = probe_value(shift, &cand, k) {
                if fc.norm() < f.norm() {
                    theta = cand;
                    f = fc;
                    mu = (mu / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (theta, f.norm())
}

/// Random upper-unipotent parameters in `[-R, R]`, identity first.
fn samples(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let m = n * (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![0.0; m]];
    for _ in 0..count {
        out.push((0..m).map(|_| rng.random_range(-radius..radius)).collect());
    }
    out
}

/// `min_u |f_k(exp(iτY) u)|`: best samples refined by Levenberg–Marquardt.
fn min_abs(y: &UpperNilpotent, tau: f64, k: usize, pool: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let shift = complex_shift(y, tau)?;
    let mut scored: Vec<(f64, usize)> = pool
        .iter()
        .enumerate()
        .map(|(i, th)| (probe_value(&shift, th, k).map_or(f64::INFINITY, |v| v.norm()), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (f64::INFINITY, pool[0].clone());
    for &(_, i) in scored.iter().take(4) {
        let (th, v) = minimize(&shift, k, &pool[i]);
        if v < best.0 {
            best = (v, th);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Conditioning(format!("no well-conditioned sample at τ = {tau}")));
    }
    Ok(best)
}

/// First `τ ∈ (0, tau_max]` with `min_u |f_k| = 0`: a scan, then bisection on
/// the zero predicate or golden-section refinement of an isolated minimum.
fn first_zero(y: &UpperNilpotent, k: usize, pool: &[Vec<f64>], tau_max: f64, steps: usize) -> Result<Option<f64>> {
    let taus: Vec<f64> = (0..=steps).map(|i| tau_max * i as f64 / steps as f64).collect();
    let h: Vec<f64> = taus.par_iter().map(|&t| Ok(min_abs(y, t, k, pool)?.0)).collect::<Result<_>>()?;
    let eval = |t: f64| -> Result<f64> { Ok(min_abs(y, t, k, pool)?.0) };
    for j in 1..taus.len() {
        if h[j] < ZERO_TOL {
            let (mut a, mut b) = (taus[j - 1], taus[j]);
            while b - a > 1e-9 {
                let m = 0.5 * (a + b);
                if eval(m)? < ZERO_TOL {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(Some(b));
        }
        let local_min = j + 1 < taus.len() && h[j] <= h[j - 1] && h[j] <= h[j + 1];
        if local_min {
            let (t, v) = golden(&eval, taus[j - 1], taus[j + 1])?;
            if v < ZERO_TOL {
                return Ok(Some(t));
            }
        }
    }
    Ok(None)
}

fn golden<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-11 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Probe configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub sample_count: usize,
    pub radius: f64,
    pub seed: u64,
    /// Segment `τ ∈ [0, tau_max]` scanned for the first zero.
    pub tau_max: f64,
    pub steps: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings { sample_count: DEFAULT_SAMPLES, radius: DEFAULT_RADIUS, seed: 0, tau_max: 2.0, steps: 200 }
    }
}

/// `min |f_k(exp(iY) u)|` over sampled `u ∈ N` and the first zero along `τ ↦ τY`.
pub fn tube_probe(y: &UpperNilpotent, settings: &ProbeSettings) -> Result<Report> {
    let n = y.n();
    let mut report = Report::new(
        "tube_probe",
        serde_json::json!({ "n": n, "Y": y.entries(), "settings": settings, "seed": settings.seed }),
    );
    let pool = samples(n, settings.sample_count, settings.radius, settings.seed);
    let shift = complex_shift(y, 1.0)?;
    let mut minima = Vec::with_capacity(n - 1);
    let mut crossings = Vec::with_capacity(n - 1);
    for k in 1..n {
        let m = pool.iter().filter_map(|th| probe_value(&shift, th, k)).map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        minima.push(m);
        crossings.push(first_zero(y, k, &pool, settings.tau_max, settings.steps)?);
    }
    let tau_star = crossings.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    report.value("min_abs_f_k", &minima).value("crossing_per_k", &crossings);
    report.value("tau_star", if tau_star.is_finite() { Some(tau_star) } else { None });
    report.value("excluded", tau_star <= 1.0);
    if tau_star.is_finite() {
        report.value("tau_star_times_norm", tau_star * y.norm());
    }
    // Rank one: f_1(exp(iτY)) = 1 - τ²|y|², so the tube is the unit ball.
    if n == 2 && y.norm() * settings.tau_max >= 1.0 {
        report.check_abs("rank_one_crossing", tau_star * y.norm(), 1.0, 1e-6);
    }
    Ok(report.finish())
}

/// Random complex orthogonal `q = exp(A)`, `Aᵀ = -A`.
fn complex_orthogonal(n: usize, rng: &mut ChaCha8Rng, scale: f64) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale));
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    a.exp()
}

fn random_complex(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 2.0 } else { 0.0 };
        Complex64::new(d + rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
    })
}

/// Left `K_ℂ`, right `N̄_ℂ` invariance and the Iwasawa-diagonal identity.
pub fn invariance_checks(n: usize, trials: usize, seed: u64, tol: f64) -> Result<Report> {
    if !(2..=4).contains(&n) {
        return Err(Error::Params(format!("probe supports 2 <= n <= 4, got {n}")));
    }
    let mut report = Report::new("crown_invariance", serde_json::json!({ "n": n, "trials": trials, "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut left, mut right, mut iwasawa, mut ortho): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..trials {
        let g = random_complex(n, &mut rng);
        let q = complex_orthogonal(n, &mut rng, 0.5);
        ortho = ortho.max((q.transpose() * &q - CMatrix::identity(n, n)).norm());
        let mut nbar = CMatrix::identity(n, n);
        for i in 0..n {
            for j in 0..i {
                nbar[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        let kappa = real_orthogonal(n, &mut rng);
        let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let a =
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, diag.iter().map(|&v| Complex64::new(v, 0.0))));
        for k in 1..n {
            let base = f_k(&g, k)?;
            left = left.max((f_k(&(&q * &g), k)? - base).norm() / base.norm());
            right = right.max((f_k(&(&g * &nbar), k)? - base).norm() / base.norm());
            let lhs = f_k(&(&kappa * &a * &nbar), k)?;
            let rhs: f64 = diag[k..].iter().map(|v| v * v).product();
            iwasawa = iwasawa.max((lhs - rhs).norm() / rhs);
        }
    }
    report.value("max_orthogonality_defect", ortho);
    report.check_below("left_k_invariance", left, tol);
    report.check_below("right_nbar_invariance", right, tol);
    report.check_below("iwasawa_diagonal", iwasawa, 1e-10);
    report.note("f_k(κ a n̄) = (a_{k+1} ⋯ a_n)²");
    Ok(report.finish())
}

/// Real orthogonal matrix from the QR factor of a random matrix.
fn real_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q().map(|v| Complex64::new(v, 0.0))
}

/// First crossing `τ*` of `τ ↦ τ s Ŷ` for random unit directions `Ŷ` at each
/// scale `s`; `τ* s` settling to a constant supports boundedness.
pub fn exit_trend(n: usize, directions: usize, scales: &[f64], settings: &ProbeSettings) -> Result<Report> {
    let mut report = Report::new(
        "crown_exit_trend",
        serde_json::json!({ "n": n, "directions": directions, "scales": scales, "settings": settings }),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut trace = Trace::new("exit", &["direction", "scale", "tau_star"]);
    let mut all_found = true;
    for d in 0..directions {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                e[i * n + j] = rng.random_range(-1.0..1.0);
            }
        }
        let nrm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pool = samples(n, settings.sample_count, settings.radius, settings.seed.wrapping_add(d as u64 + 1));
        for &s in scales {
            let y = UpperNilpotent::new(n, e.iter().map(|v| s * v / nrm).collect())?;
            let mut best: Option<f64> = None;
            for k in 1..n {
                if let Some(t) = first_zero(&y, k, &pool, settings.tau_max, settings.steps)? {
                    best = Some(best.map_or(t, |b: f64| b.min(t)));
                }
            }
            trace.push(vec![d as f64, s, best.unwrap_or(f64::NAN)]);
            if s == *scales.last().unwrap_or(&s) {
                all_found &= best.is_some();
            }
        }
    }
    report.check_flag("crossing_found_at_largest_scale", all_found);
    report.trace(trace);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_two_by_two() {
        for n in 2..=4 {
            for k in 1..n {
                assert!((f_k(&CMatrix::identity(n, n), k).unwrap() - 1.0).norm() < 1e-15);
            }
        }
        for y in [0.3, 0.9, 1.7] {
            let mut x = CMatrix::zeros(2, 2);
            x[(0, 1)] = c(0.0, y);
            let g = exp_nilpotent(&x).unwrap();
            assert!((f_k(&g, 1).unwrap() - (1.0 - y * y)).norm() < 1e-14);
        }
    }

    #[test]
    fn abelian_block_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, k) in [(3, 2), (4, 2)] {
            let m = n - k;
            let z = CMatrix::from_fn(k, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let mut x = CMatrix::zeros(n, n);
            x.view_mut((0, k), (k, m)).copy_from(&z);
            let g = exp_nilpotent(&x).unwrap();
            let direct = f_k(&g, k).unwrap();
            let formula = (CMatrix::identity(m, m) + z.transpose() * &z).determinant();
            assert!((direct - formula).norm() < 1e-10 * formula.norm());
        }
    }

    #[test]
    fn exact_series_matches_pade() {
        let y = UpperNilpotent::new(3, vec![0.0, 1.0, -2.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let x = y.matrix().map(|v| c(0.0, v));
        let a = exp_nilpotent(&x).unwrap();
        assert!((a - x.exp()).norm() < 1e-12);
    }

    #[test]
    fn upsilon_examples() {
        assert!(upsilon_membership(&BlockMatrix::new(1, DMatrix::zeros(1, 1)).unwrap()));
        assert!(upsilon_membership(&BlockMatrix::new(1, DMatrix::from_element(1, 1, 0.99)).unwrap()));
        assert!(!upsilon_membership(&BlockMatrix::new(1, DMatrix::from_element(1, 1, -1.01)).unwrap()));
        let rot = |t: f64| DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        for (s2, inside) in [(0.99, true), (1.01, false)] {
            let z = rot(0.3) * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, s2])) * rot(1.1);
            assert_eq!(upsilon_membership(&BlockMatrix::new(2, z).unwrap()), inside);
        }
    }

    #[test]
    fn conditioning_guard() {
        let mut g = CMatrix::identity(2, 2);
        g[(1, 1)] = c(1e-14, 0.0);
        assert!(matches!(f_k(&g, 1), Err(Error::Conditioning(_))));
    }

    #[test]
    fn nilpotent_validation() {
        assert!(UpperNilpotent::new(2, vec![0.0, 1.0, 1.0, 0.0]).is_err());
        assert!(UpperNilpotent::elementary(3, 1, 0, 1.0).is_err());
    }

    #[test]
    fn probe_zero_direction() {
        let y = UpperNilpotent::new(2, vec![0.0; 4]).unwrap();
        let s = ProbeSettings { sample_count: 32, steps: 20, ..Default::default() };
        let r = tube_probe(&y, &s).unwrap();
        assert_eq!(r.values["min_abs_f_k"][0].as_f64().unwrap(), 1.0);
        assert!(r.values["tau_star"].is_null());
    }
}
