//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use horotube::bergman::{self, Side, WeightSpec};
use horotube::crown::{self, ProbeSettings, UpperNilpotent};
use horotube::extension;
use horotube::field::{Field, SpectralGrid};
use horotube::poisson::{self, min_resolvable_level, Normalization, Params};
use horotube::report::Report;
use horotube::testfns::TestFunction;
use horotube::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn geometric(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64)).collect()
}

fn gaussian(width: f64) -> TestFunction {
    TestFunction::Gaussian { width, center: 0.0 }
}

fn weight(n: usize, s: f64, alpha: f64) -> Result<WeightSpec> {
    WeightSpec::new(alpha, Side::Fourier, Params::real(n, s)?)
}

fn check(r: &Report, name: &str) -> f64 {
    r.get_check(name).map_or(f64::NAN, |c| c.value)
}

fn failed(r: &Report) -> Vec<String> {
    r.checks.iter().filter(|c| !c.pass).map(|c| format!("{} = {:.3e}", c.name, c.value)).collect()
}

fn summarize(reports: &[(&str, Report)], detail: String) -> Outcome {
    let mut bad = Vec::new();
    for (label, r) in reports {
        for f in failed(r) {
            bad.push(format!("{label}: {f}"));
        }
    }
    let pass = bad.is_empty();
    let detail = if pass { detail } else { format!("{detail}; failing {}", bad.join(", ")) };
    Outcome { pass, detail }
}

fn level_isometry() -> Result<Outcome> {
    let levels = [0.25, 0.5, 1.0, 2.0, 4.0];
    let g1 = SpectralGrid::new(1, 16.0, 1024)?;
    let r1 = bergman::level_isometry(
        &[gaussian(1.0).sample(g1)?],
        &levels,
        &weight(1, 0.75, 1.0)?,
        Normalization::Normalized,
        1e-5,
    )?;
    let g2 = SpectralGrid::new(2, 8.0, 128)?;
    let r2 = bergman::level_isometry(
        &[gaussian(1.0).sample(g2)?],
        &levels,
        &weight(2, 1.0, 1.5)?,
        Normalization::Normalized,
        1e-4,
    )?;
    let detail = format!(
        "n=1 spread {:.2e} (tol 1e-5), n=2 spread {:.2e} (tol 1e-4)",
        check(&r1, "ratio_spread"),
        check(&r2, "ratio_spread")
    );
    Ok(summarize(&[("n=1", r1), ("n=2", r2)], detail))
}

fn delta_asymptotics() -> Result<Outcome> {
    let gammas = geometric(0.5, 1e-3, 16);
    let one = poisson::delta_asymptotics(&Params::real(1, 1.0)?, &gammas)?;
    let quarter = poisson::delta_asymptotics(&Params::real(1, 0.25)?, &gammas)?;
    let half = poisson::delta_asymptotics(&Params::real(1, 0.5)?, &gammas)?;
    let detail = format!(
        "s=1 slope {:.4} (-0.5 +/- 0.05), s=0.25 max/min {:.3} (< 3), s=0.5 log-ratio spread {:.3} (< 0.1), explicit I1 err {:.1e} (< 1e-8)",
        check(&one, "slope"),
        check(&quarter, "max_over_min"),
        check(&half, "log_ratio_spread"),
        check(&half, "explicit_i1_rel_err")
    );
    Ok(summarize(&[("s=1", one), ("s=0.25", quarter), ("s=0.5", half)], detail))
}

fn weight_law() -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for (s, alpha, n) in [(0.5, 1.0, 1), (1.0, 1.5, 1), (1.0, 2.0, 2)] {
        let r = bergman::weight_law(&weight(n, s, alpha)?)?;
        parts.push(format!("({s},{alpha},{n}) slope {:.3}", check(&r, "tail_slope")));
        reports.push(("weight", r));
    }
    let seg = bergman::segura_grid(20)?;
    parts.push(format!("Segura failures {}", check(&seg, "failures")));
    reports.push(("segura", seg));
    Ok(summarize(&reports, parts.join(", ")))
}

fn norm_limit() -> Result<Outcome> {
    let grid = SpectralGrid::new(1, 16.0, 4096)?;
    let ray = geometric(1.0, min_resolvable_level(&grid), 10);
    let w = weight(1, 0.75, 1.0)?;
    let g = bergman::norm_limit(&gaussian(1.0).sample(grid)?, &w, &ray, 0.02)?;
    let b = bergman::norm_limit(&TestFunction::Bump { radius: 3.0 }.sample(grid)?, &w, &ray, 0.02)?;
    let detail = format!(
        "final deviation gaussian {:.2e}, bump {:.2e} (< 2e-2) at a = {:.4}",
        check(&g, "final_deviation"),
        check(&b, "final_deviation"),
        ray[ray.len() - 1]
    );
    Ok(summarize(&[("gaussian", g), ("bump", b)], detail))
}

fn banach_isometry() -> Result<Outcome> {
    let grid = SpectralGrid::new(1, 16.0, 2048)?;
    let mut inputs: Vec<Field> = Vec::new();
    for width in [0.5, 0.75, 1.0, 1.5, 2.0] {
        inputs.push(gaussian(width).sample(grid)?);
    }
    for seed in 1..=5 {
        inputs.push(TestFunction::RandomBandlimited { cutoff: 3.0, seed }.sample(grid)?);
    }
    let a_grid = geometric(10.0, 1e-4, 21);
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for s in [0.75, 1.25] {
        let alpha = (2.0 * s - 1.0f64).max(0.5) + 0.25;
        let r = bergman::banach_isometry(&inputs, &weight(1, s, alpha)?, &a_grid, Normalization::Normalized, 1e-3)?;
        parts.push(format!("s={s} alpha={alpha} CV {:.2e}", check(&r, "coefficient_of_variation")));
        reports.push(("banach", r));
    }
    Ok(summarize(&reports, format!("{} (< 1e-3)", parts.join(", "))))
}

fn admissibility_threshold() -> Result<Outcome> {
    let a = bergman::admissibility_threshold(&Params::real(1, 0.75)?, 0.05, 1.5, 0.05)?;
    let b = bergman::admissibility_threshold(&Params::real(1, 1.0)?, 0.25, 2.0, 0.05)?;
    let detail = format!(
        "s=0.75 threshold {:.4} (0.5 +/- 0.1), s=1 threshold {:.4} (1 +/- 0.1)",
        check(&a, "threshold"),
        check(&b, "threshold")
    );
    Ok(summarize(&[("s=0.75", a), ("s=1", b)], detail))
}

fn boundary_inversion() -> Result<Outcome> {
    let grid = SpectralGrid::new(1, 16.0, 4096)?;
    let ray = geometric(1.0, min_resolvable_level(&grid), 10);
    let p = Params::real(1, 1.0)?;
    let f = gaussian(1.0).sample(grid)?;
    let bv = poisson::boundary_value(&f, &p, &ray, 5e-2)?;
    let one = TestFunction::Constant.sample(grid)?;
    let constant = poisson::boundary_value(&one, &p, &ray, 1e-12)?;
    let psi = extension::extend(&f, &ray, &p)?;
    let rec = extension::boundary_recovery(&f, &psi, 5e-2, 4)?;
    let ode = extension::ode_convergence(&f, &p, 1.0, &[0.1, 0.05, 0.025, 0.0125])?;
    let finding = ode.values.get("vanishing_coefficient").cloned().unwrap_or_default();
    let detail = format!(
        "recovery error {:.2e} (< 5e-2) at a = {:.4}, constant error {:.1e}, classical ODE order {:.3}, vanishing coefficient {finding}",
        check(&rec, "final_error"),
        ray[ray.len() - 1],
        check(&constant, "final_error"),
        check(&ode, "classical_order")
    );
    Ok(summarize(&[("boundary", bv), ("constant", constant), ("extension", rec), ("ode", ode)], detail))
}

fn crown_probe() -> Result<Outcome> {
    let settings = ProbeSettings { seed: 1, ..Default::default() };
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for y in [1.0, 0.6, 1.7] {
        let r = crown::tube_probe(&UpperNilpotent::elementary(2, 0, 1, y)?, &settings)?;
        parts.push(format!("|y|={y}: tau*|y| = {:.8}", check(&r, "rank_one_crossing")));
        reports.push(("gl2", r));
    }
    for n in 2..=4 {
        reports.push(("invariance", crown::invariance_checks(n, 20, n as u64, 1e-8)?));
    }
    let r = crown::tube_probe(&UpperNilpotent::elementary(3, 0, 1, 10.0)?, &settings)?;
    let excluded = r.values["excluded"].as_bool() == Some(true);
    let mut ex = Report::new("gl3_exclusion", serde_json::json!({}));
    ex.check_flag("excluded", excluded);
    parts.push(format!("GL(3) Y12=10 excluded: {excluded}"));
    reports.push(("gl3", ex));
    Ok(summarize(&reports, parts.join(", ")))
}

fn infrastructure() -> Result<Outcome> {
    let g1 = SpectralGrid::new(1, 16.0, 512)?;
    let d1 = poisson::dual_path(&gaussian(1.0).sample(g1)?, 1.0, &[0.0], &Params::real(1, 1.0)?, 1e-6)?;
    let g2 = SpectralGrid::new(2, 8.0, 128)?;
    let d2 = poisson::dual_path(&gaussian(1.0).sample(g2)?, 1.0, &[0.0, 0.0], &Params::real(2, 1.0)?, 1e-6)?;
    let eig = poisson::eigen_residual(&gaussian(1.0), &Params::real(1, 1.0)?, 16.0, &[256, 512, 1024], 1.0)?;
    let detail = format!(
        "dual path n=1 {:.1e}, n=2 {:.1e} (< 1e-6), FFT round trip {:.1e} (< 1e-12), eigen residual order {:.3}",
        check(&d1, "dual_path"),
        check(&d2, "dual_path"),
        check(&d1, "fft_round_trip").max(check(&d2, "fft_round_trip")),
        check(&eig, "order")
    );
    Ok(summarize(&[("n=1", d1), ("n=2", d2), ("eigen", eig)], detail))
}

type Criterion = (usize, &'static str, f64, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "level isometry", 60.0, level_isometry),
        (2, "delta asymptotics", 120.0, delta_asymptotics),
        (3, "weight law", 30.0, weight_law),
        (4, "norm limit", 120.0, norm_limit),
        (5, "isometry up to scalar", 300.0, banach_isometry),
        (6, "admissibility threshold", 300.0, admissibility_threshold),
        (7, "boundary inversion and extension", 120.0, boundary_inversion),
        (8, "crown probe", 60.0, crown_probe),
        (9, "infrastructure", 60.0, infrastructure),
    ];
    let mut all = true;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= budget;
        let pass = outcome.pass && in_time;
        all &= pass;
        println!(
            "{} criterion {id} ({name}): {}; {secs:.1} s (budget {budget:.0} s)",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
