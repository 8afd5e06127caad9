//! Built-in input fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, SpectralGrid};

/// Named test function with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `exp(-|x - center|² / (2 width²))`.
    Gaussian {
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `exp(1 - 1/(1 - |x|²/radius²))` inside the ball, zero outside.
    Bump { radius: f64 },
    /// Smooth plateau: 1 on `|x|_∞ <= half_width`, tapering to 0 over `taper`.
    Plateau { half_width: f64, taper: f64 },
    /// Sum of modulated Gaussians with frequencies below `cutoff`.
    RandomBandlimited { cutoff: f64, seed: u64 },
    /// The constant 1 (exactly periodic on the box).
    Constant,
}

/// `C^∞` step from 0 at `t <= 0` to 1 at `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            TestFunction::Gaussian { width, center } => width > 0.0 && center.is_finite(),
            TestFunction::Bump { radius } => radius > 0.0,
            TestFunction::Plateau { half_width, taper } => half_width > 0.0 && taper > 0.0,
            TestFunction::RandomBandlimited { cutoff, .. } => cutoff > 0.0,
            TestFunction::Constant => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Params(format!("invalid test function parameters: {self:?}")))
        }
    }

    pub fn sample(&self, grid: SpectralGrid) -> Result<Field> {
        self.validate()?;
        let f = match *self {
            TestFunction::Gaussian { width, center } => Field::from_real_fn(grid, |x| {
                let r2: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let c = if i == 0 { center } else { 0.0 };
                        (t - c).powi(2)
                    })
                    .sum();
                (-0.5 * r2 / (width * width)).exp()
            }),
            TestFunction::Bump { radius } => Field::from_real_fn(grid, |x| {
                let q = x.iter().map(|t| t * t).sum::<f64>() / (radius * radius);
                if q < 1.0 {
                    (1.0 - 1.0 / (1.0 - q)).exp()
                } else {
                    0.0
                }
            }),
            TestFunction::Plateau { half_width, taper } => Field::from_real_fn(grid, |x| {
                x.iter().map(|t| smooth_step((half_width + taper - t.abs()) / taper)).product()
            }),
            TestFunction::RandomBandlimited { cutoff, seed } => {
                let n = grid.dim();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let terms: Vec<(Complex64, [f64; 3], [f64; 3], f64)> = (0..6)
                    .map(|_| {
                        let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                        let mut c = [0.0; 3];
                        let mut w = [0.0; 3];
                        for ax in 0..n {
                            c[ax] = rng.random_range(-2.0..2.0);
                            w[ax] = rng.random_range(-cutoff..cutoff);
                        }
                        let sigma = rng.random_range(1.0..1.5);
                        (amp, c, w, sigma)
                    })
                    .collect();
                Field::from_fn(grid, |x| {
                    terms
                        .iter()
                        .map(|(amp, c, w, sigma)| {
                            let mut r2 = 0.0;
                            let mut phase = 0.0;
                            for ax in 0..n {
                                r2 += (x[ax] - c[ax]).powi(2);
                                phase += w[ax] * x[ax];
                            }
                            amp * Complex64::from_polar((-0.5 * r2 / (sigma * sigma)).exp(), phase)
                        })
                        .sum()
                })
            }
            TestFunction::Constant => Field::from_real_fn(grid, |_| 1.0),
        };
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NormKind;
    use crate::quad::{adaptive, Tolerance};

    #[test]
    fn bump_l1_matches_quadrature() {
        let grid = SpectralGrid::new(1, 8.0, 1024).unwrap();
        let f = TestFunction::Bump { radius: 2.0 }.sample(grid).unwrap();
        let (exact, _) = adaptive(
            |x: f64| {
                let q = x * x / 4.0;
                if q < 1.0 {
                    (1.0 - 1.0 / (1.0 - q)).exp()
                } else {
                    0.0
                }
            },
            &[-2.0, 0.0, 2.0],
            Tolerance::default(),
        )
        .unwrap();
        assert!((f.norm(NormKind::L1) - exact).abs() < 1e-8);
    }

    #[test]
    fn random_fields_are_reproducible() {
        let grid = SpectralGrid::new(1, 16.0, 256).unwrap();
        let a = TestFunction::RandomBandlimited { cutoff: 2.0, seed: 7 }.sample(grid).unwrap();
        let b = TestFunction::RandomBandlimited { cutoff: 2.0, seed: 7 }.sample(grid).unwrap();
        let c = TestFunction::RandomBandlimited { cutoff: 2.0, seed: 8 }.sample(grid).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn plateau_shape() {
        let grid = SpectralGrid::new(1, 16.0, 256).unwrap();
        let f = TestFunction::Plateau { half_width: 6.0, taper: 2.0 }.sample(grid).unwrap();
        let v = f.values();
        assert_eq!(v[128].re, 1.0);
        assert_eq!(v[0].re, 0.0);
    }
}
