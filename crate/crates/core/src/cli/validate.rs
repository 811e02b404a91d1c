//! Checks run by `kinetic validate`.

use serde::Serialize;

use crate::cubic_oracle::{cubic_critical_ratio, cubic_kinetic, cubic_threshold, CubicParams};
use crate::error::{Error, Result};
use crate::kinetics::{critical_ratio, kinetic_function, threshold_ratio, threshold_slope_at_zero};
use crate::model::{
    entropy_dissipation, entropy_dissipation_jump, lambda_natural, lambda_zero, phi_natural, phi_zero, FluxModel,
    FluxShape,
};
use crate::phaseplane::connection_gap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    /// Largest accepted `|got − expected|`.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, expected: f64, got: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            got,
            tolerance,
            passed: (got - expected).abs() <= tolerance,
        }
    }

    fn relative(name: impl Into<String>, expected: f64, got: f64, rel: f64) -> Self {
        Self::new(name, expected, got, rel * expected.abs())
    }

    /// Counts violations of an invariant; passes when there are none.
    fn violations(name: impl Into<String>, count: usize) -> Self {
        Self::new(name, 0.0, count as f64, 0.0)
    }
}

/// `(K, C)` when the flux is `K u³ + a u` with `b = c2 = 1` and constant `c1 = C`.
fn cubic_form(model: &FluxModel) -> Option<(f64, f64)> {
    let coeffs = model.flux_coefficients()?;
    let [b, c1, c2] = model.coefficients().map(|c| c.constant_value());
    match (coeffs, b?, c1?, c2?) {
        (&[z0, _, z2, k], 1.0, c, 1.0) if z0 == 0.0 && z2 == 0.0 && k > 0.0 => Some((k, c)),
        _ => None,
    }
}

/// Oracle comparisons for cubic fluxes and invariants for any concave-convex flux.
pub fn validation_checks(model: &FluxModel) -> Result<Vec<Check>> {
    if model.shape() != FluxShape::ConcaveConvex {
        return Err(Error::FluxClass(format!("validation needs a concave-convex flux, found {:?}", model.shape())));
    }
    let mut checks = invariant_checks(model)?;
    if let Some((k, c)) = cubic_form(model) {
        checks.extend(oracle_checks(model, k, c)?);
    }
    Ok(checks)
}

fn inside(model: &FluxModel, u: f64) -> bool {
    model.check_state(u).is_ok() && phi_natural(model, u).is_ok() && phi_zero(model, u).is_ok()
}

fn oracle_checks(model: &FluxModel, k: f64, c: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let params = CubicParams::new(k, c, 0.0)?;
    let scale = (k * c).sqrt();
    for u0 in [0.5, 1.0, 2.0].into_iter().filter(|&u| inside(model, u)) {
        checks.push(Check::relative(
            format!("threshold ratio at u0 = {u0}"),
            cubic_threshold(u0, &params),
            threshold_ratio(model, u0)?,
            1e-4,
        ));
        for alpha in [0.3, 0.6, 1.2] {
            checks.push(Check::new(
                format!("kinetic function at u0 = {u0}, alpha = {alpha}"),
                cubic_kinetic(u0, alpha / scale),
                kinetic_function(model, u0, alpha)?.phi_flat,
                1e-5,
            ));
        }
        for frac in [0.2, 0.6] {
            let u2 = -u0 + frac * u0 / 2.0;
            checks.push(Check::relative(
                format!("critical ratio at u0 = {u0}, u2 = {u2}"),
                scale * cubic_critical_ratio(u0, u2)?,
                critical_ratio(model, u0, u2)?,
                1e-5,
            ));
        }
    }
    Ok(checks)
}

fn invariant_checks(model: &FluxModel) -> Result<Vec<Check>> {
    let (lo, hi) = model.domain();
    let reach = 0.25 * lo.abs().min(hi);
    let top = (1..=40)
        .map(|i| reach.min(1.0) * i as f64 / 40.0)
        .rev()
        .find(|&u| inside(model, u) && inside(model, -u))
        .ok_or_else(|| Error::FluxClass("no left state with both tangency points in the domain".into()))?;
    let states: Vec<f64> = (1..=6).map(|i| top * i as f64 / 6.0).collect();
    let alpha = 0.5 * threshold_ratio(model, top)?;
    let mut checks = Vec::new();

    let mut decreasing = 0;
    let mut outside = 0;
    for sign in [1.0, -1.0] {
        let flat = states
            .iter()
            .map(|&u| kinetic_function(model, sign * u, alpha).map(|s| s.phi_flat))
            .collect::<Result<Vec<_>>>()?;
        decreasing += flat.windows(2).filter(|w| sign * (w[1] - w[0]) >= 0.0).count();
        for (&u, &p) in states.iter().zip(&flat) {
            let (z, n) = (phi_zero(model, sign * u)?, phi_natural(model, sign * u)?);
            let slack = 1e-12 * (n - z).abs();
            if !(sign * (p - z) > 0.0 && sign * (n - p) >= -slack) {
                outside += 1;
            }
        }
    }
    checks.push(Check::violations(format!("kinetic function decreasing in u0 (alpha = {alpha})"), decreasing));
    checks.push(Check::violations("kinetic function between the zero-dissipation and tangency states", outside));

    for &u in &[top, -top] {
        checks.push(Check::new(
            format!("zero ratio gives the zero-dissipation state at u0 = {u}"),
            phi_zero(model, u)?,
            kinetic_function(model, u, 0.0)?.phi_flat,
            1e-12 * top,
        ));
    }

    let (ln, l0) = (lambda_natural(model, top)?, lambda_zero(model, top)?);
    let lam = 0.5 * (ln + l0);
    let gaps = (0..10)
        .map(|i| connection_gap(model, top, lam, 0.2 * alpha * i as f64))
        .collect::<Result<Vec<_>>>()?;
    checks.push(Check::violations(
        "connection gap decreasing in alpha",
        gaps.windows(2).filter(|w| w[1] >= w[0]).count(),
    ));

    let phi = kinetic_function(model, top, alpha)?.phi_flat;
    let e = entropy_dissipation(model, top, phi)?;
    checks.push(Check::new(
        "entropy dissipation from the potential and from the jump",
        entropy_dissipation_jump(model, top, phi)?,
        e,
        1e-8 * e.abs().max(1e-3),
    ));
    checks.push(Check::violations("nonclassical shock dissipates entropy", usize::from(e >= 0.0)));

    let slope = threshold_slope_at_zero(model)?;
    for &(u, est) in &slope.estimates {
        checks.push(Check::relative(
            format!("threshold slope estimate at u0 = {u}"),
            slope.analytic,
            est,
            0.02,
        ));
    }
    Ok(checks)
}
