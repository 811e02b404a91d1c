//! Acceptance criteria, one printed PASS/FAIL line each.
//!
//! Run with `cargo test --release -p kinetic --test acceptance -- --nocapture`
//! to see the report.

use std::time::{Duration, Instant};

use kinetic::cubic_oracle::{
    cubic_critical_ratio, cubic_entropy_dissipation, cubic_kinetic, cubic_parabola_v, cubic_profile, CubicEntropy,
};
use kinetic::diffusion_limit::{integrate_diffusive_wave, oleinik_strict};
use kinetic::kinetics::{critical_ratio, kinetic_function, shock_set, threshold_ratio, threshold_slope_at_zero};
use kinetic::model::{big_g, entropy_dissipation, equilibria, lambda_natural, lambda_zero, phi_natural, phi_zero};
use kinetic::numerics::Quadrature;
use kinetic::phaseplane::{
    connection_gap, dispersive_trajectory, eigenvalues, profile_from_curve, saddle_connection, DispersionSign,
};
use kinetic::poly::Polynomial;
use kinetic::FluxModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SQRT2: f64 = std::f64::consts::SQRT_2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(id: u32, name: &str, budget: Option<Duration>, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = result.pass && in_time;
    let limit = budget.map_or(String::new(), |b| format!(" (limit {:.0} s)", b.as_secs_f64()));
    println!(
        "criterion {id} [{}] {name}: {}; {:.2} s{limit}",
        if pass { "PASS" } else { "FAIL" },
        result.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn critical_ratio_grid() -> Outcome {
    let m = FluxModel::cubic();
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let u0 = 0.2 + 1.8 * i as f64 / 9.0;
        for j in 1..=10 {
            let u2 = -u0 + 0.5 * u0 * j as f64 / 11.0;
            let exact = cubic_critical_ratio(u0, u2).unwrap();
            let got = match critical_ratio(&m, u0, u2) {
                Ok(a) => a,
                Err(e) => return outcome(false, format!("A({u0}, {u2}) failed: {e}")),
            };
            worst = worst.max(((got - exact) / exact).abs());
        }
    }
    outcome(worst <= 1e-5, format!("max relative error {worst:.3e} (tol 1e-5)"))
}

fn thresholds() -> Outcome {
    let unit = threshold_ratio(&FluxModel::cubic(), 1.0);
    let scaled = threshold_ratio(&FluxModel::scaled_cubic(2.0, 2.0).unwrap(), 1.0);
    match (unit, scaled) {
        (Ok(a), Ok(b)) => {
            let (ea, eb) = (((a - 1.060_660_2) / 1.060_660_2).abs(), ((b - 2.121_320_3) / 2.121_320_3).abs());
            outcome(
                ea <= 1e-4 && eb <= 1e-4,
                format!("unit {a:.8} (rel err {ea:.2e}), K=C=2 {b:.8} (rel err {eb:.2e}), tol 1e-4"),
            )
        }
        (a, b) => outcome(false, format!("threshold failed: {a:?} / {b:?}")),
    }
}

fn kinetic_grid() -> Outcome {
    let m = FluxModel::cubic();
    let mut worst: f64 = 0.0;
    let mut plateau = 0;
    for &u0 in &[0.1, 0.3, 0.6, 1.0, 2.0] {
        for &alpha in &[0.1, 0.6, 1.2, 2.0] {
            let got = match kinetic_function(&m, u0, alpha) {
                Ok(s) => s.phi_flat,
                Err(e) => return outcome(false, format!("φ♭({u0}, {alpha}) failed: {e}")),
            };
            let exact = cubic_kinetic(u0, alpha);
            if exact == -u0 / 2.0 {
                plateau += 1;
            }
            worst = worst.max((got - exact).abs());
        }
    }
    outcome(
        worst <= 1e-5 && plateau > 0,
        format!("max abs error {worst:.3e} over 20 points, {plateau} on the plateau (tol 1e-5)"),
    )
}

fn trajectory_shape() -> Outcome {
    let m = FluxModel::cubic();
    let alpha = 0.6;
    let u2 = match kinetic_function(&m, 1.0, alpha) {
        Ok(s) => s.phi_flat,
        Err(e) => return outcome(false, format!("kinetic function failed: {e}")),
    };
    let curve = match saddle_connection(&m, 1.0, u2, alpha) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("connection failed: {e}")),
    };
    let dv = curve
        .samples
        .iter()
        .map(|&(u, v)| (v - cubic_parabola_v(u, 1.0, u2)).abs())
        .fold(0.0, f64::max);
    let profile = match profile_from_curve(&m, &curve) {
        Ok(p) => p,
        Err(e) => return outcome(false, format!("profile failed: {e}")),
    };
    let du = profile
        .samples
        .iter()
        .map(|&(y, u)| (u - cubic_profile(y, 1.0, alpha).unwrap()).abs())
        .fold(0.0, f64::max);
    outcome(
        dv <= 1e-6 && du <= 1e-5,
        format!("parabola deviation {dv:.3e} (tol 1e-6), profile deviation {du:.3e} (tol 1e-5)"),
    )
}

fn entropy_values() -> Outcome {
    let m = FluxModel::cubic();
    let alpha = 0.6;
    let quad = cubic_entropy_dissipation(1.0, alpha, CubicEntropy::Quadratic).unwrap();
    // by hand from the jump formula with U = u²/2, F = 3u⁴/4
    let p = -1.0 + SQRT2 * alpha / 3.0;
    let by_hand = -(p * p + p + 1.0) * (0.5 * p * p - 0.5) + 0.75 * (p.powi(4) - 1.0);
    let kruzkov = cubic_entropy_dissipation(1.0, alpha, CubicEntropy::Kruzkov { k: -0.5 }).unwrap();

    // general model at the shooting value, and the integral form along the computed wave
    let phi = match kinetic_function(&m, 1.0, alpha) {
        Ok(s) => s.phi_flat,
        Err(e) => return outcome(false, format!("kinetic function failed: {e}")),
    };
    let general = entropy_dissipation(&m, 1.0, phi).unwrap();
    let curve = match saddle_connection(&m, 1.0, phi, alpha) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("connection failed: {e}")),
    };
    // −α ∫ u_y² dy = −α ∫ |v| du with c2 = 1
    let area = Quadrature::default()
        .integrate(|u| curve.eval(u).unwrap_or(0.0).abs(), phi, 1.0)
        .unwrap();
    let integral = -alpha * area;

    let ok = (quad + 0.358_02).abs() <= 1e-4
        && (by_hand - quad).abs() <= 1e-12
        && (general - quad).abs() <= 1e-4
        && (kruzkov - 0.141_471_5).abs() <= 1e-6
        && (integral - quad).abs() <= 1e-6;
    outcome(
        ok,
        format!(
            "quadratic {quad:.7} (general model {general:.7}), Kruzkov {kruzkov:.7}, integral form {integral:.7} (diff {:.2e})",
            (integral - quad).abs()
        ),
    )
}

fn asymptotic_slopes() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, m) in [("u^3", FluxModel::cubic()), ("u^3+u", FluxModel::cubic_plus_linear())] {
        match threshold_slope_at_zero(&m) {
            Ok(s) => {
                ok &= s.agrees(0.02) && (s.analytic - 1.060_660_2).abs() < 1e-7;
                let est: Vec<String> = s.estimates.iter().map(|(u, r)| format!("{u:e}: {r:.6}")).collect();
                lines.push(format!("{name} κ {:.7} vs {}", s.analytic, est.join(", ")));
            }
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    outcome(ok, format!("{} (tol 2%)", lines.join("; ")))
}

fn property_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut check = |name: &str, ok: bool| {
        checks += 1;
        if !ok {
            failures.push(name.to_string());
        }
    };
    let cubic = FluxModel::cubic();
    let varied = FluxModel::polynomial(
        Polynomial::new(vec![0.0, 0.3, 0.0, 1.0, 0.05]),
        Polynomial::new(vec![1.0, 0.0, 0.25]),
        Polynomial::new(vec![1.0, 0.1, 0.05]),
        Polynomial::new(vec![2.0, -0.2, 0.1]),
        (-6.0, 6.0),
    )
    .unwrap();

    for m in [&cubic, &varied] {
        // the gap decreases with the ratio
        let u0 = 1.0;
        let (ln, l0) = (lambda_natural(m, u0).unwrap(), lambda_zero(m, u0).unwrap());
        for lam in [ln + 0.3 * (l0 - ln), ln + 0.8 * (l0 - ln)] {
            let w: Vec<f64> = (0..12).map(|k| connection_gap(m, u0, lam, 0.15 * k as f64).unwrap()).collect();
            check("gap decreasing in α", w.windows(2).all(|p| p[1] < p[0]));
        }

        // kinetic function: decreasing in u0 and between φ0 and φ♮
        for alpha in [0.3, 0.9] {
            let states: Vec<f64> = (1..=12).map(|k| 0.15 * k as f64).collect();
            let flat: Vec<f64> = states.iter().map(|&u| kinetic_function(m, u, alpha).unwrap().phi_flat).collect();
            check("φ♭ decreasing in u0", flat.windows(2).all(|p| p[1] < p[0]));
            for (&u, &p) in states.iter().zip(&flat) {
                let (z, n) = (phi_zero(m, u).unwrap(), phi_natural(m, u).unwrap());
                check("φ0 < φ♭ ≤ φ♮", z < p && p <= n + 1e-12);
                let q = kinetic_function(m, -u, alpha).unwrap().phi_flat;
                let (zq, nq) = (phi_zero(m, -u).unwrap(), phi_natural(m, -u).unwrap());
                check("φ♮ ≤ φ♭ < φ0 for u < 0", nq - 1e-12 <= q && q < zq);
            }
        }

        // sign pattern of G at the equilibria
        for u0 in [0.4, 1.0, 1.3] {
            let (ln, l0, fp) = (lambda_natural(m, u0).unwrap(), lambda_zero(m, u0).unwrap(), m.df(u0));
            let g = |lam: f64| {
                let e = equilibria(m, u0, lam).unwrap();
                (
                    big_g(m, e.u2, u0, lam).unwrap(),
                    big_g(m, e.u1, u0, lam).unwrap(),
                    big_g(m, u0, u0, lam).unwrap(),
                )
            };
            let (g2, g1, g0) = g(0.5 * (ln + l0));
            check("G(u0) = 0 < G(u2) < G(u1) below λ0", g0 == 0.0 && 0.0 < g2 && g2 < g1);
            let (g2, g1, _) = g(l0);
            check("G(u2) = 0 < G(u1) at λ0", g2.abs() < 1e-10 && g1 > 0.0);
            let (g2, g1, _) = g(0.5 * (l0 + fp));
            check("G(u2) < 0 < G(u1) above λ0", g2 < 0.0 && g1 > 0.0);
        }

        // eigenvalue monotonicity by centered differences
        let h = 1e-6;
        for &(u, lam, alpha) in &[(1.0, 0.9, 0.3), (-0.3, 0.9, 2.5), (0.8, 0.2, 1.0), (1.5, 2.0, 0.5)] {
            let pair = |l: f64, a: f64| eigenvalues(m, u, l, a, DispersionSign::Positive).unwrap();
            if !pair(lam, alpha).is_real() {
                continue;
            }
            let lo = |l: f64, a: f64| pair(l, a).lower().unwrap();
            let up = |l: f64, a: f64| pair(l, a).upper().unwrap();
            check("∂μ̲/∂λ > 0", lo(lam + h, alpha) - lo(lam - h, alpha) > 0.0);
            check("∂μ̲/∂α < 0", lo(lam, alpha + h) - lo(lam, alpha - h) < 0.0);
            check("∂μ̄/∂λ < 0", up(lam + h, alpha) - up(lam - h, alpha) < 0.0);
            if m.df(u) - lam > 0.0 {
                check("∂μ̄/∂α < 0", up(lam, alpha + h) - up(lam, alpha - h) < 0.0);
            }
        }

        // zero-ratio waves join u− to φ0(u−)
        for u in [0.5, 1.0, -0.7] {
            let d = dispersive_trajectory(m, u).unwrap();
            let z = phi_zero(m, u).unwrap();
            check("dispersive end states", d.u_start == u && (d.u_end - z).abs() < 1e-12);
            let s = shock_set(m, u, 0.0).unwrap();
            check("S_0(u−) = {φ0(u−), u−}", s.isolated == Some(z) && s.interval.lo == u && s.interval.hi == u);
        }
    }

    // Oleinik test and diffusive profile existence agree
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut admissible = 0;
    for _ in 0..100 {
        let um: f64 = rng.gen_range(-2.0..2.0);
        let up: f64 = rng.gen_range(-2.0..2.0);
        let ole = oleinik_strict(&cubic, um, up).unwrap();
        let wave = integrate_diffusive_wave(&cubic, um, up).is_ok();
        admissible += ole as usize;
        check("Oleinik ⇔ diffusive wave", ole == wave);
    }

    let pass = failures.is_empty();
    failures.dedup();
    outcome(
        pass,
        if pass {
            format!("{checks} checks, {admissible}/100 random pairs admissible")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn small_ratio_limit() -> Outcome {
    let m = FluxModel::cubic();
    let mut dist = Vec::new();
    for alpha in [0.4, 0.2, 0.1, 0.05] {
        match kinetic_function(&m, 1.0, alpha) {
            Ok(s) => dist.push((s.phi_flat + 1.0).abs()),
            Err(e) => return outcome(false, format!("φ♭(1, {alpha}) failed: {e}")),
        }
    }
    let last = dist[3];
    let exact = SQRT2 * 0.05 / 3.0;
    let ok = dist.windows(2).all(|w| w[1] < w[0]) && last <= 0.05 && (last - exact).abs() <= 1e-5;
    let shown: Vec<String> = dist.iter().map(|d| format!("{d:.7}")).collect();
    outcome(ok, format!("|φ♭ + 1| = [{}], expected {exact:.7} at α = 0.05", shown.join(", ")))
}

#[test]
fn acceptance() {
    let results = [
        run(1, "critical ratio on a 10x10 grid", Some(Duration::from_secs(30)), critical_ratio_grid),
        run(2, "threshold ratios", Some(Duration::from_secs(10)), thresholds),
        run(3, "kinetic function on a 5x4 grid", Some(Duration::from_secs(60)), kinetic_grid),
        run(4, "trajectory shape", None, trajectory_shape),
        run(5, "entropy dissipation", None, entropy_values),
        run(6, "asymptotic threshold slope", Some(Duration::from_secs(120)), asymptotic_slopes),
        run(7, "property suite", Some(Duration::from_secs(300)), property_suite),
        run(8, "small-ratio limit", None, small_ratio_limit),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len());
}
