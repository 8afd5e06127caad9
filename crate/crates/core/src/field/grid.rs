use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform lattice on `[-L, L)^n` with its FFT-dual frequency lattice.
///
/// Position samples sit at `x_j = -L + j h`, `h = 2L/M`. Frequency samples are
/// stored centred: index `i` on an axis carries `k = i - M/2` and `ξ = π k / L`.
/// Flat indices run with axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    n: usize,
    extent: f64,
    points: usize,
}

impl SpectralGrid {
    pub fn new(n: usize, extent: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::Params(format!("grid dimension must be 1, 2 or 3, got {n}")));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::Params(format!("grid extent must be positive, got {extent}")));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::Params(format!("points per axis must be a power of two >= 4, got {points}")));
        }
        Ok(SpectralGrid { n, extent, points })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    /// Frequency spacing `π / L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.extent
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `h^n`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Frequency cell volume `(π/L)^n`.
    pub fn freq_cell(&self) -> f64 {
        self.freq_spacing().powi(self.n as i32)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    /// Signed integer frequency index of axis position `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        i as i64 - (self.points / 2) as i64
    }

    pub fn freq(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.freq_spacing()
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let m = self.points;
        let mut out = [0usize; 3];
        let mut rest = flat;
        for ax in (0..self.n).rev() {
            out[ax] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for ax in 0..self.n {
            x[ax] = self.coord(idx[ax]);
        }
        x
    }

    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut xi = [0.0; 3];
        for ax in 0..self.n {
            xi[ax] = self.freq(idx[ax]);
        }
        xi
    }

    /// Squared integer wavenumber `|k|²` of a flat frequency index.
    pub fn wavenumber_sq(&self, flat: usize) -> i64 {
        let idx = self.unflatten(flat);
        (0..self.n).map(|ax| self.wavenumber(idx[ax]).pow(2)).sum()
    }

    pub fn check_same(&self, other: &SpectralGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}
