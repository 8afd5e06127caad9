//! Numerical toolkit for the horospherical Poisson transform on real
//! hyperbolic space `H_n(ℝ)` in the upper half-space model.
//!
//! The crate covers special functions ([`specfun`]), sampled fields and the
//! unitary FFT ([`field`]), Poisson kernels and tube slices ([`poisson`]),
//! weighted Bergman norms ([`bergman`]), the extension problem
//! ([`extension`]) and a numeric probe of the unipotent crown model for
//! `GL(n, ℝ)` ([`crown`]). [`cli`] holds the run configurations of the
//! `horotube` binary.

// NaN-rejecting guards are written as negated comparisons throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bergman;
pub mod cli;
pub mod crown;
pub mod error;
pub mod extension;
pub mod field;
pub mod poisson;
pub mod quad;
pub mod report;
pub mod specfun;
pub mod testfns;

pub use error::{Error, Result};
