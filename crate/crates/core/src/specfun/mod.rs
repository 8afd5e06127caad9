//! Special functions: complex gamma, modified Bessel `I_ν`, Macdonald `K_λ`.

pub mod bessel;
pub mod gamma;
pub mod selftest;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_real, bessel_k_scaled, rk_scaled, segura_check, BesselOrder,
    SeguraCheck,
};
pub use gamma::{gamma, gamma_real, ln_gamma_real};
pub use selftest::selftest;
