//! Sampled complex fields on uniform grids and the unitary Fourier transform
//!
//! `f̂(ξ) = (2π)^{-n/2} ∫ f(x) e^{-i x·ξ} dx` is approximated on the dual
//! lattice; with this convention `(f*g)^ = (2π)^{n/2} f̂ ĝ`.

mod grid;
mod io;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::SpectralGrid;
pub use io::{read_dump, write_csv, write_dump};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Position,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    values: Vec<Complex64>,
    space: Space,
}

impl Field {
    pub fn new(grid: SpectralGrid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for a grid of {} points", values.len(), grid.len())));
        }
        Ok(Field { grid, values, space })
    }

    pub fn zeros(grid: SpectralGrid, space: Space) -> Self {
        Field { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], space }
    }

    /// Samples `f` at the position lattice.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: SpectralGrid, f: F) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.position(i)[..n])).collect();
        Field { grid, values, space: Space::Position }
    }

    pub fn from_real_fn<F: Fn(&[f64]) -> f64>(grid: SpectralGrid, f: F) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    fn expect(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::Params(format!("expected a {space:?}-space field, got {:?}", self.space)));
        }
        Ok(())
    }

    /// Unitary continuous Fourier transform on the dual lattice.
    pub fn fourier(&self) -> Result<Field> {
        self.expect(Space::Position)?;
        let scale = self.grid.spacing() / (2.0 * PI).sqrt();
        let mut v = self.values.clone();
        transform_axes(&self.grid, &mut v, FftDirection::Forward, scale);
        Ok(Field { grid: self.grid, values: v, space: Space::Frequency })
    }

    /// Inverse of [`Field::fourier`].
    pub fn inverse(&self) -> Result<Field> {
        self.expect(Space::Frequency)?;
        let scale = self.grid.freq_spacing() / (2.0 * PI).sqrt();
        let mut v = self.values.clone();
        transform_axes(&self.grid, &mut v, FftDirection::Inverse, scale);
        Ok(Field { grid: self.grid, values: v, space: Space::Position })
    }

    /// Riemann-sum norm with the cell volume of the field's lattice.
    pub fn norm(&self, kind: NormKind) -> f64 {
        let cell = match self.space {
            Space::Position => self.grid.cell(),
            Space::Frequency => self.grid.freq_cell(),
        };
        match kind {
            NormKind::L1 => cell * self.values.iter().map(|z| z.norm()).sum::<f64>(),
            NormKind::L2 => (cell * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt(),
            NormKind::Linf => self.values.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Continuum convolution via FFT (periodic on the box).
    pub fn convolve(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        self.expect(Space::Position)?;
        other.expect(Space::Position)?;
        let fa = self.fourier()?;
        let fb = other.fourier()?;
        let c = (2.0 * PI).powf(self.grid.dim() as f64 / 2.0);
        let values = fa.values.iter().zip(&fb.values).map(|(a, b)| a * b * c).collect();
        Field { grid: self.grid, values, space: Space::Frequency }.inverse()
    }

    /// Multiplies a frequency-space field pointwise by `m(ξ)`.
    pub fn apply_multiplier<M: Fn(&[f64]) -> Complex64 + Sync>(&self, m: M) -> Result<Field> {
        self.expect(Space::Frequency)?;
        let n = self.grid.dim();
        let values = self.values.iter().enumerate().map(|(i, v)| v * m(&self.grid.frequency(i)[..n])).collect();
        Ok(Field { grid: self.grid, values, space: Space::Frequency })
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), space: self.space }
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    /// `self - other` on identical grids.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        if self.space != other.space {
            return Err(Error::Params("subtracting fields from different spaces".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Field { grid: self.grid, values, space: self.space })
    }

    /// Relative L² distance `‖self − reference‖ / ‖reference‖`.
    pub fn rel_l2(&self, reference: &Field) -> Result<f64> {
        let d = self.sub(reference)?.norm(NormKind::L2);
        Ok(d / reference.norm(NormKind::L2))
    }
}

/// Applies the centred continuous transform along every axis.
fn transform_axes(grid: &SpectralGrid, v: &mut [Complex64], dir: FftDirection, scale: f64) {
    let m = grid.points_per_axis();
    let n = grid.dim();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(m, dir);
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let half = m / 2;
    for ax in 0..n {
        let stride = m.pow((n - 1 - ax) as u32);
        let outer = grid.len() / (m * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * m * stride + inner;
                match dir {
                    FftDirection::Forward => {
                        for j in 0..m {
                            line[j] = v[base + j * stride];
                        }
                        fft.process_with_scratch(&mut line, &mut scratch);
                        // centred index i ↔ DFT bin (i - M/2) mod M, phase (-1)^{i}
                        for i in 0..m {
                            let bin = (i + half) % m;
                            let sign = if i % 2 == 0 { scale } else { -scale };
                            v[base + i * stride] = line[bin] * sign;
                        }
                    }
                    FftDirection::Inverse => {
                        for i in 0..m {
                            let bin = (i + half) % m;
                            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                            line[bin] = v[base + i * stride] * sign;
                        }
                        fft.process_with_scratch(&mut line, &mut scratch);
                        for j in 0..m {
                            v[base + j * stride] = line[j] * scale;
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(grid: SpectralGrid) -> Field {
        Field::from_real_fn(grid, |x| (-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp())
    }

    #[test]
    fn gaussian_is_self_dual() {
        for (n, m) in [(1, 512), (2, 128), (3, 64)] {
            let grid = SpectralGrid::new(n, 12.0, m).unwrap();
            let f = gauss(grid).fourier().unwrap();
            let err = (0..grid.len())
                .map(|i| {
                    let xi = grid.frequency(i);
                    let want = (-0.5 * xi[..n].iter().map(|t| t * t).sum::<f64>()).exp();
                    (f.values()[i] - want).norm()
                })
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "n = {n}: {err}");
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let grid = SpectralGrid::new(2, 8.0, 64).unwrap();
        let f = Field::from_fn(grid, |x| {
            Complex64::new(
                (-(x[0] - 1.0).powi(2) - x[1] * x[1]).exp(),
                0.3 * (-x[1].powi(2) - x[0].powi(2) / 2.0).exp(),
            )
        });
        let g = f.fourier().unwrap();
        assert!((g.norm(NormKind::L2) / f.norm(NormKind::L2) - 1.0).abs() < 1e-12);
        let back = g.inverse().unwrap();
        assert!(back.rel_l2(&f).unwrap() < 1e-12);
    }

    #[test]
    fn gaussian_l2_norm() {
        for n in 1..=2 {
            let grid = SpectralGrid::new(n, 12.0, 128).unwrap();
            let got = gauss(grid).norm(NormKind::L2);
            assert!((got - PI.powf(n as f64 / 4.0)).abs() < 1e-12);
        }
        let grid = SpectralGrid::new(1, 12.0, 128).unwrap();
        assert_eq!(Field::zeros(grid, Space::Position).norm(NormKind::L1), 0.0);
    }

    #[test]
    fn convolution_of_gaussians() {
        let grid = SpectralGrid::new(1, 16.0, 1024).unwrap();
        let g = |v: f64| Field::from_real_fn(grid, move |x| (-x[0] * x[0] / (2.0 * v)).exp() / (2.0 * PI * v).sqrt());
        let c = g(0.5).convolve(&g(1.5)).unwrap();
        let want = g(2.0);
        assert!(c.sub(&want).unwrap().norm(NormKind::Linf) < 1e-13);
        let d = g(1.5).convolve(&g(0.5)).unwrap();
        assert!(c.sub(&d).unwrap().norm(NormKind::Linf) < 1e-15);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SpectralGrid::new(1, 8.0, 64).unwrap();
        let b = SpectralGrid::new(1, 8.0, 128).unwrap();
        let r = gauss(a).convolve(&gauss(b));
        assert!(matches!(r, Err(Error::GridMismatch(_))));
    }
}
