//! Quadrature rules: Gauss–Jacobi (Golub–Welsch), adaptive Gauss–Kronrod and
//! algebraically decaying half-line integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_real;

/// Gauss rule for `∫_{-1}^{1} (1-x)^a (1+x)^b f(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobi {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("Gauss–Jacobi rule needs at least one node".into()));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::Domain(format!("Jacobi exponents must exceed -1, got ({a}, {b})")));
        }
        let ab = a + b;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for (k, d) in diag.iter_mut().enumerate() {
            let kf = k as f64;
            *d = if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let t = 2.0 * kf + ab;
                (b * b - a * a) / (t * (t + 2.0))
            };
        }
        for (i, o) in off.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let t = 2.0 * k + ab;
            let beta = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0))
            };
            *o = beta.sqrt();
        }
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jm[(i, i)] = diag[i];
            if i + 1 < n {
                jm[(i, i + 1)] = off[i];
                jm[(i + 1, i)] = off[i];
            }
        }
        let eig = SymmetricEigen::new(jm);
        let log_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma_real(a + 1.0)? + ln_gamma_real(b + 1.0)?
            - ln_gamma_real(ab + 2.0)?;
        let mu0 = log_mu0.exp();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
        Ok(GaussJacobi {
            a,
            b,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// Applies the rule to `f` on `[-1, 1]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<GaussJacobi> {
    GaussJacobi::new(n, 0.0, 0.0)
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let val = kron * h;
    let err = ((kron - gauss) * h).norm();
    (val, err)
}

struct Segment {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 0.0, rel: 1e-12, max_segments: 4000 }
    }
}

/// Globally adaptive Gauss–Kronrod integration over the partition given by
/// `breaks` (sorted, at least two points). Returns the value and error estimate.
pub fn adaptive_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(Complex64, f64)> {
    if breaks.len() < 2 {
        return Err(Error::Domain("adaptive quadrature needs an interval".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&mut f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Segment { a: w[0], b: w[1], val: v, err: e });
    }
    let mut count = heap.len();
    while err > tol.abs.max(tol.rel * total.norm()) {
        let Some(seg) = heap.pop() else { break };
        if count >= tol.max_segments {
            heap.push(seg);
            return Err(Error::Convergence(format!("adaptive quadrature: error {err:.3e} after {count} segments")));
        }
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            // Interval collapsed to machine resolution; accept what we have.
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&mut f, seg.a, m);
        let (v2, e2) = gk15(&mut f, m, seg.b);
        total += v1 + v2 - seg.val;
        err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: m, val: v1, err: e1 });
        heap.push(Segment { a: m, b: seg.b, val: v2, err: e2 });
        count += 1;
    }
    // Re-sum to shed accumulated update rounding.
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let total: Complex64 = segs.iter().map(|s| s.val).sum();
    let err: f64 = segs.iter().map(|s| s.err).sum();
    Ok((total, err))
}

/// Real-valued wrapper of [`adaptive_complex`].
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<(f64, f64)> {
    let (v, e) = adaptive_complex(|x| Complex64::new(f(x), 0.0), breaks, tol)?;
    Ok((v.re, e))
}

/// `∫_{x0}^∞ f(x) dx` for `f(x) = O(x^{-p})`, `p > 1`, via `x = x0 v^{-q}` with
/// `q = 1/(p-1)`, which makes the transformed integrand finite at `v = 0`.
pub fn half_line_algebraic<F: FnMut(f64) -> Complex64>(
    mut f: F,
    x0: f64,
    decay: f64,
    tol: Tolerance,
) -> Result<(Complex64, f64)> {
    if !(decay > 1.0) || !(x0 > 0.0) {
        return Err(Error::Domain(format!("half-line integral needs x0 > 0 and decay > 1 (got {x0}, {decay})")));
    }
    let q = 1.0 / (decay - 1.0);
    adaptive_complex(
        |v| {
            if v <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let x = x0 * v.powf(-q);
            if !x.is_finite() {
                return Complex64::new(0.0, 0.0);
            }
            f(x) * (q * x / v)
        },
        &[0.0, 0.25, 1.0],
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_real;

    fn beta(a: f64, b: f64) -> f64 {
        gamma_real(a).unwrap() * gamma_real(b).unwrap() / gamma_real(a + b).unwrap()
    }

    #[test]
    fn jacobi_moments_are_exact() {
        // ∫ (1-x)^a (1+x)^b (1+x)^k dx = 2^{a+b+k+1} B(a+1, b+k+1)
        for &(a, b) in &[(-0.5, 0.0), (0.5, 0.0), (-0.75, -0.25), (2.0, 1.5), (0.0, 0.0)] {
            let rule = GaussJacobi::new(12, a, b).unwrap();
            for k in 0..20 {
                let got = rule.integrate(|x| (1.0 + x).powi(k));
                let exact = 2f64.powf(a + b + k as f64 + 1.0) * beta(a + 1.0, b + k as f64 + 1.0);
                assert!((got - exact).abs() <= 1e-12 * exact, "a={a} b={b} k={k}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobi_rejects_bad_exponents() {
        assert!(GaussJacobi::new(4, -1.0, 0.0).is_err());
        assert!(GaussJacobi::new(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn adaptive_handles_narrow_peak() {
        let eps = 1e-6;
        let (v, _) = adaptive(|x| eps / (x * x + eps * eps), &[-1.0, 0.0, 1.0], Tolerance::default()).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn half_line_power_tail() {
        // ∫_1^∞ x^{-1.5} dx = 2
        let (v, _) =
            half_line_algebraic(|x| Complex64::new(x.powf(-1.5), 0.0), 1.0, 1.5, Tolerance::default()).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12);
        // ∫_0^∞ (1+x²)^{-1} = π/2 split at 1.
        let (head, _) = adaptive(|x| 1.0 / (1.0 + x * x), &[0.0, 1.0], Tolerance::default()).unwrap();
        let (tail, _) =
            half_line_algebraic(|x| Complex64::new(1.0 / (1.0 + x * x), 0.0), 1.0, 2.0, Tolerance::default()).unwrap();
        assert!((head + tail.re - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }
}
