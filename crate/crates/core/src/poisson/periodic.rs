//! Direct-quadrature path: Riemann sums against the spatially sampled,
//! box-periodized kernel. Only spatial kernel values enter.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::quad::{adaptive_complex, half_line_algebraic, Tolerance};

/// Far-field description of a kernel for the image-sum remainder.
pub(super) struct Tail {
    /// Power-law decay exponent of the kernel along rays.
    pub decay: f64,
    /// `∫_{ℝⁿ} k`.
    pub total: Complex64,
    /// Length scale of the kernel core.
    pub width: f64,
}

const IMAGES_1D: i64 = 32;
const IMAGES_2D: i64 = 6;

fn tol() -> Tolerance {
    Tolerance { abs: 0.0, rel: 1e-11, max_segments: 8000 }
}

/// Symmetric break points `0, ±w·4^k` up to `±r`.
fn ladder(width: f64, r: f64) -> Vec<f64> {
    let mut pos = vec![];
    let mut t = width / 4.0;
    while t < r {
        pos.push(t);
        t *= 4.0;
    }
    let mut out: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
    out.push(0.0);
    out.extend(pos);
    out.insert(0, -r);
    out.push(r);
    out
}

/// `∫_{[-r, r]²} k`.
fn square_integral<K>(k: &K, r: f64, width: f64) -> Result<Complex64>
where
    K: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    let brk = ladder(width, r);
    let mut err: Option<crate::Error> = None;
    let (v, _) = adaptive_complex(
        |u| match adaptive_complex(
            |w| match k(&[u, w]) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            },
            &brk,
            tol(),
        ) {
            Ok((v, _)) => v,
            Err(e) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        &brk,
        tol(),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `h^n Σ_l f_l P(x_j - x_l)` with `P(d) = Σ_q k(d + 2Lq)`.
pub(super) fn convolve_periodized<K>(f: &Field, k: K, tail: Tail) -> Result<Field>
where
    K: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    let grid = *f.grid();
    let n = grid.dim();
    let two_l = 2.0 * grid.extent();
    let samples: Vec<Complex64> = match n {
        1 => {
            let r_cut = (2 * IMAGES_1D + 1) as f64 * grid.extent();
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let d = grid.position(i)[0];
                    let mut s = Complex64::new(0.0, 0.0);
                    for q in -IMAGES_1D..=IMAGES_1D {
                        s += k(&[d + two_l * q as f64])?;
                    }
                    // Σ_{q>Q} g(q), g(q) = k(d + 2Lq), by Euler–Maclaurin about the
                    // midpoint Q + 1/2: ∫_{Q+1/2}^∞ g + g'(Q + 1/2)/24, both sides.
                    let (right, _) = half_line_algebraic(
                        |u| k(&[u]).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                        d + r_cut,
                        tail.decay,
                        tol(),
                    )?;
                    let (left, _) = half_line_algebraic(
                        |u| k(&[-u]).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                        r_cut - d,
                        tail.decay,
                        tol(),
                    )?;
                    let du = 1e-3 * r_cut;
                    let slope_r = (k(&[d + r_cut + du])? - k(&[d + r_cut - du])?) / (2.0 * du);
                    let slope_l = (k(&[d - r_cut - du])? - k(&[d - r_cut + du])?) / (2.0 * du);
                    s += (slope_r + slope_l) * (two_l / 24.0);
                    let v = s + (right + left) / two_l;
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::Convergence("periodized kernel tail".into()));
                    }
                    Ok(v)
                })
                .collect::<Result<_>>()?
        }
        2 => {
            let r_cut = (2 * IMAGES_2D + 1) as f64 * grid.extent();
            let far = (tail.total - square_integral(&k, r_cut, tail.width)?) / (two_l * two_l);
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let x = grid.position(i);
                    let mut s = far;
                    for q0 in -IMAGES_2D..=IMAGES_2D {
                        for q1 in -IMAGES_2D..=IMAGES_2D {
                            s += k(&[x[0] + two_l * q0 as f64, x[1] + two_l * q1 as f64])?;
                        }
                    }
                    Ok(s)
                })
                .collect::<Result<_>>()?
        }
        _ => {
            return Err(Error::Params("the quadrature path is implemented for n <= 2".into()));
        }
    };
    let kernel = Field::new(grid, samples, crate::field::Space::Position)?;
    // The discrete circular sum is evaluated exactly by FFT.
    f.convolve(&kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralGrid;

    #[test]
    fn circular_sum_matches_direct_sum() {
        let grid = SpectralGrid::new(1, 4.0, 16).unwrap();
        let f = Field::from_real_fn(grid, |x| (-x[0] * x[0]).exp() * (1.0 + x[0]));
        let g = Field::from_real_fn(grid, |x| 1.0 / (1.0 + x[0] * x[0]));
        let c = f.convolve(&g).unwrap();
        let h = grid.spacing();
        let m = grid.len();
        for j in 0..m {
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..m {
                // x_j - x_l = -L + ((j - l + M/2) mod M) h
                let idx = (j + m + m / 2 - l) % m;
                s += f.values()[l] * g.values()[idx] * h;
            }
            assert!((s - c.values()[j]).norm() < 1e-14);
        }
    }
}
