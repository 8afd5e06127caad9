//! Invariant suite for the special functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gamma::sin_pi;
use super::{bessel_i, bessel_k, bessel_k_real, gamma, gamma_real, segura_check};
use crate::error::Result;
use crate::report::{Report, Trace};

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Random points of `|Re z|, |Im z| <= 20` at least `gap` from the poles.
fn strip(rng: &mut ChaCha8Rng, count: usize, gap: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = Complex64::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        if z.im.abs() > gap || (z.re - z.re.round()).abs() > gap {
            out.push(z);
        }
    }
    out
}

/// Closed forms, recurrence, reflection, limits, monotonicity and the Segura
/// chain on a 20×20 grid.
pub fn selftest(seed: u64) -> Result<Report> {
    let mut report = Report::new("specfun_selftest", serde_json::json!({ "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Complex64::new(1.0, 0.0);

    report.check_rel("gamma_one", gamma(one)?.re, 1.0, 1e-14);
    report.check_rel("gamma_half", gamma_real(0.5)?, PI.sqrt(), 1e-14);

    let mut worst: f64 = 0.0;
    for z in strip(&mut rng, 1000, 1e-3) {
        if (z + 1.0).re > 20.0 {
            continue;
        }
        worst = worst.max(rel(gamma(z + 1.0)?, z * gamma(z)?));
    }
    report.check_below("gamma_recurrence", worst, 1e-11);

    let mut worst: f64 = 0.0;
    for z in strip(&mut rng, 1000, 0.05) {
        let v = gamma(z)? * gamma(one - z)? * sin_pi(z) / PI;
        worst = worst.max((v - one).norm());
    }
    report.check_below("gamma_reflection", worst, 1e-10);

    let want = (2.0 / PI).sqrt() * 1f64.sinh();
    report.check_rel("bessel_i_half", bessel_i(0.5, 1.0)?, want, 1e-10);
    let r = 1e-6;
    report.check_rel("bessel_i_small_r", bessel_i(2.0, r)? / ((r / 2.0).powi(2) / 2.0), 1.0, 1e-10);
    let want = (PI / 4.0).sqrt() * (-2.0f64).exp();
    report.check_rel("bessel_k_half", bessel_k_real(0.5, 2.0)?, want, 1e-10);
    for s in [0.3, 0.5, 1.0, 2.0] {
        // The first correction is O(r^{2s}); at r = 1e-6 it exceeds 1e-4 for s < 1/3.
        let r = r.min(1e-6f64.powf(0.5 / s));
        let lim = r.powf(s) * bessel_k_real(s, r)?;
        report.check_rel(&format!("rk_limit_{s}"), lim, 2f64.powf(s - 1.0) * gamma_real(s)?, 1e-4);
    }

    let grid: Vec<f64> = (0..200).map(|i| 10f64.powf(-3.0 + 5.0 * i as f64 / 199.0)).collect();
    let mut monotone = true;
    for nu in [0.0, 0.5, 1.0, 2.5, 7.0] {
        let k: Vec<f64> =
            grid.iter().map(|&r| bessel_k(Complex64::new(nu, 0.0), r).map(|v| v.re)).collect::<Result<_>>()?;
        let i: Vec<f64> = grid.iter().map(|&r| bessel_i(nu, r)).collect::<Result<_>>()?;
        // Past underflow/overflow the sequences saturate; compare only finite, nonzero pairs.
        monotone &= k.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0);
        monotone &= i.windows(2).all(|w| w[1] > w[0] || w[1].is_infinite());
    }
    report.check_flag("k_decreasing_i_increasing", monotone);

    let mut trace = Trace::new("segura", &["nu", "r", "i_ratio", "middle", "k_ratio", "holds"]);
    let mut failures = 0;
    for a in 0..20 {
        let nu = 10.0 * a as f64 / 19.0;
        for b in 0..20 {
            let r = 10f64.powf(-2.0 + 4.0 * b as f64 / 19.0);
            let c = segura_check(nu, r)?;
            failures += !c.holds as usize;
            trace.push(vec![nu, r, c.i_ratio, c.middle, c.k_ratio, c.holds as u8 as f64]);
        }
    }
    report.check("segura_grid_failures", failures as f64, 0.0, 0.0, failures == 0);
    report.trace(trace);
    Ok(report.finish())
}
