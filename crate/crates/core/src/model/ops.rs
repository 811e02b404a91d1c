use serde::Serialize;

use super::FluxModel;
use crate::error::{Error, Result};
use crate::numerics::{bracketed_root, scan_sign_changes, Quadrature, RootOptions};

const SCAN_CELLS: usize = 256;

/// Chord speed `ā(u−, u+)`, equal to `f'(u−)` when the states coincide.
pub fn chord_speed(model: &FluxModel, u_minus: f64, u_plus: f64) -> Result<f64> {
    model.check_state(u_minus)?;
    model.check_state(u_plus)?;
    Ok(model.chord(u_minus, u_plus))
}

/// `g(u, λ) = f(u) − λ u`.
pub fn g_value(model: &FluxModel, u: f64, lam: f64) -> f64 {
    model.f(u) - lam * u
}

/// `G(u; u0, λ) = ∫_{u0}^{u} (g(z, λ) − g(u0, λ)) c2(z)/c1(z) dz`.
pub fn big_g(model: &FluxModel, u: f64, u0: f64, lam: f64) -> Result<f64> {
    model.check_state(u)?;
    model.check_state(u0)?;
    Quadrature::default().integrate(
        |z| (z - u0) * (model.chord(u0, z) - lam) * model.entropy_weight(z),
        u0,
        u,
    )
}

/// The `G` function for the speed `ā(u0, u2)`, written so that the integrand
/// carries no cancellation: `g(z) − g(u0) = (z − u0)(z − u2) f[u0, u2, z]`.
pub(crate) fn big_g_through(model: &FluxModel, u: f64, u0: f64, u2: f64) -> Result<f64> {
    Quadrature::default().integrate(|z| g_through(model, z, u0, u2) * model.entropy_weight(z), u0, u)
}

#[inline]
pub(crate) fn g_through(model: &FluxModel, z: f64, u0: f64, u2: f64) -> f64 {
    (z - u0) * (z - u2) * model.chord2(u0, u2, z)
}

/// The three states `u2 < u1 < u0` sharing the chord speed `lam`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibria {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub lam: f64,
    /// `u1 = u2 = φ♮(u0)`: the speed is tangent at the lower states.
    pub tangential: bool,
}

impl Equilibria {
    /// Equilibria determined by the right state `u2 ≤ φ♮(u0)` instead of the speed.
    pub(crate) fn through(model: &FluxModel, u0: f64, u2: f64, phi_nat: f64) -> Result<Self> {
        let lam = model.chord(u0, u2);
        if u2 >= phi_nat {
            return Ok(Self {
                u0,
                u1: phi_nat,
                u2: phi_nat,
                lam,
                tangential: true,
            });
        }
        let u1 = bracketed_root(
            "middle equilibrium",
            |u| Ok(model.chord2(u0, u2, u)),
            phi_nat,
            u0,
            RootOptions::default(),
        )?;
        Ok(Self {
            u0,
            u1,
            u2,
            lam,
            tangential: false,
        })
    }

    pub fn span(&self) -> f64 {
        self.u0 - self.u2
    }
}

pub fn equilibria(model: &FluxModel, u0: f64, lam: f64) -> Result<Equilibria> {
    model.require_concave_convex()?;
    model.check_state(u0)?;
    if u0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("equilibria need u0 > 0, got {u0}")));
    }
    let phi = phi_natural(model, u0)?;
    let lam_nat = model.df(phi);
    let lam_max = model.df(u0);
    let width = lam_max - lam_nat;
    if !(lam < lam_max) || lam < lam_nat - 1e-12 * width {
        return Err(Error::SpeedOutOfRange { u0, lam });
    }
    if lam - lam_nat <= 1e-12 * width {
        return Ok(Equilibria {
            u0,
            u1: phi,
            u2: phi,
            lam,
            tangential: true,
        });
    }
    let h = |u: f64| Ok(model.chord(u0, u) - lam);
    let opts = RootOptions::default();
    let u1 = bracketed_root("middle equilibrium", h, phi, u0, opts)?;
    let (lo, _) = model.domain();
    if model.chord(u0, lo) < lam {
        return Err(Error::SpeedOutOfRange { u0, lam });
    }
    let u2 = bracketed_root("lower equilibrium", h, lo, phi, opts)?;
    Ok(Equilibria {
        u0,
        u1,
        u2,
        lam,
        tangential: false,
    })
}

/// First root of `q` moving away from `start` towards `end`.
fn first_root<F>(what: &'static str, q: F, start: f64, end: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let cells = scan_sign_changes(|x| Ok(q(x)), start, end, SCAN_CELLS)?;
    let ((a, fa), (b, fb)) = *cells.first().ok_or(Error::NoBracket {
        what,
        lo: start.min(end),
        hi: start.max(end),
    })?;
    crate::numerics::roots::bracketed_root_from(what, |x| Ok(q(x)), (a, fa), (b, fb), RootOptions::default())
}

/// Tangency point `φ♮(u)`: the state on the other side of zero where the
/// chord from `u` touches the flux graph.
pub fn phi_natural(model: &FluxModel, u: f64) -> Result<f64> {
    model.check_state(u)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = model.domain();
    let end = if u > 0.0 { lo } else { hi };
    // f'(φ) − f[φ, u] = (φ − u) f[φ, φ, u]
    first_root("tangency point", |p| model.chord2(p, p, u), 0.0, end)
}

/// `λ♮(u) = f'(φ♮(u))`.
pub fn lambda_natural(model: &FluxModel, u: f64) -> Result<f64> {
    Ok(model.df(phi_natural(model, u)?))
}

/// Inverse of [`phi_natural`]: the state `w` with `φ♮(w) = u`.
pub fn phi_natural_inverse(model: &FluxModel, u: f64) -> Result<f64> {
    model.check_state(u)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = model.domain();
    let end = if u > 0.0 { lo } else { hi };
    first_root("inverse tangency point", |w| model.chord2(u, u, w), 0.0, end)
}

/// Zero-entropy-dissipation state `φ0(u−) ≠ u−`.
pub fn phi_zero(model: &FluxModel, u_minus: f64) -> Result<f64> {
    model.check_state(u_minus)?;
    if u_minus == 0.0 {
        return Ok(0.0);
    }
    let near = phi_natural(model, u_minus)?;
    let far = phi_natural_inverse(model, u_minus)?;
    let e = |w: f64| super::entropy_dissipation(model, u_minus, w);
    bracketed_root("zero-dissipation state", e, far, near, RootOptions::default())
}

/// `λ0(u−) = ā(u−, φ0(u−))`.
pub fn lambda_zero(model: &FluxModel, u_minus: f64) -> Result<f64> {
    let phi = phi_zero(model, u_minus)?;
    Ok(model.chord(u_minus, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn chord_speed_examples() {
        let m = FluxModel::cubic();
        close(chord_speed(&m, 1.0, -0.5).unwrap(), 0.75, 1e-15);
        close(chord_speed(&m, 1.0, 1.0).unwrap(), 3.0, 1e-15);
        close(chord_speed(&m, 1.0, -1.0).unwrap(), 1.0, 1e-15);
        assert!(matches!(chord_speed(&m, 11.0, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn g_examples() {
        let m = FluxModel::cubic();
        assert_eq!(g_value(&m, 1.0, 1.0), 0.0);
        assert_eq!(g_value(&m, 2.0, 1.0), 6.0);
        assert_eq!(g_value(&m, 0.0, 0.37), 0.0);
    }

    #[test]
    fn big_g_examples() {
        let m = FluxModel::cubic();
        assert_eq!(big_g(&m, 0.4, 0.4, 0.9).unwrap(), 0.0);
        let u2 = -0.5 - 0.15f64.sqrt();
        assert!(big_g(&m, u2, 1.0, 0.9).unwrap() > 0.0);
        close(big_g(&m, -1.0, 1.0, 1.0).unwrap(), 0.0, 1e-12);
        // cubic, u0 = 1, λ = 1: G(0) = ∫_1^0 (z³ − z) dz = 1/4
        close(big_g(&m, 0.0, 1.0, 1.0).unwrap(), 0.25, 1e-12);
    }

    #[test]
    fn equilibria_examples() {
        let m = FluxModel::cubic();
        let e = equilibria(&m, 1.0, 0.9).unwrap();
        // roots of u² + u + 0.1 = 0
        close(e.u1, -0.5 + 0.15f64.sqrt(), 1e-12);
        close(e.u2, -0.5 - 0.15f64.sqrt(), 1e-12);
        for u in [e.u1, e.u2] {
            close(g_value(&m, u, 0.9), g_value(&m, 1.0, 0.9), 1e-12);
        }
        let e = equilibria(&m, 1.0, 1.0).unwrap();
        close(e.u1, 0.0, 1e-12);
        close(e.u2, -1.0, 1e-12);
        let e = equilibria(&m, 1.0, 0.75 + 1e-10).unwrap();
        assert!(!e.tangential);
        close(e.u1, -0.5, 2e-5);
        close(e.u2, -0.5, 2e-5);
        let e = equilibria(&m, 1.0, 0.75).unwrap();
        assert!(e.tangential);
        assert_eq!(e.u1, e.u2);
        assert!(matches!(equilibria(&m, 1.0, 0.7), Err(Error::SpeedOutOfRange { .. })));
        assert!(matches!(equilibria(&m, 1.0, 3.0), Err(Error::SpeedOutOfRange { .. })));
    }

    #[test]
    fn phi_natural_examples() {
        let m = FluxModel::cubic();
        close(phi_natural(&m, 1.0).unwrap(), -0.5, 1e-12);
        close(phi_natural(&m, -0.8).unwrap(), 0.4, 1e-12);
        assert_eq!(phi_natural(&m, 0.0).unwrap(), 0.0);
        close(lambda_natural(&m, 1.0).unwrap(), 0.75, 1e-12);
        close(phi_natural(&FluxModel::cubic_plus_linear(), 1.0).unwrap(), -0.5, 1e-12);
        close(phi_natural(&m, 1e-3).unwrap(), -5e-4, 1e-15);
    }

    #[test]
    fn phi_natural_matches_brute_force_scan() {
        // quartic perturbation, located independently by a fine scan of the
        // tangency residual f'(φ)(u − φ) − (f(u) − f(φ))
        let m = FluxModel::polynomial(
            Polynomial::new(vec![0.0, 0.5, 0.0, 1.0, 0.1]),
            Polynomial::constant(1.0),
            Polynomial::constant(1.0),
            Polynomial::constant(1.0),
            (-3.0, 3.0),
        )
        .unwrap();
        let u = 1.2;
        let h = |p: f64| m.df(p) * (u - p) - (m.f(u) - m.f(p));
        let n = 2_000_000;
        let mut best = 0.0;
        for i in 1..n {
            let p = -3.0 * i as f64 / n as f64;
            let q = p - 3.0 / n as f64;
            if h(p).signum() != h(q).signum() {
                best = 0.5 * (p + q);
                break;
            }
        }
        close(phi_natural(&m, u).unwrap(), best, 2e-6);
    }

    #[test]
    fn phi_natural_inverse_examples() {
        let m = FluxModel::cubic();
        close(phi_natural_inverse(&m, -0.5).unwrap(), 1.0, 1e-12);
        close(phi_natural_inverse(&m, 1.0).unwrap(), -2.0, 1e-12);
        assert_eq!(phi_natural_inverse(&m, 0.0).unwrap(), 0.0);
        for &u in &[-2.0, -0.3, 0.7, 3.0] {
            let w = phi_natural_inverse(&m, u).unwrap();
            close(phi_natural(&m, w).unwrap(), u, 1e-10);
        }
    }

    #[test]
    fn phi_zero_examples() {
        let m = FluxModel::cubic();
        close(phi_zero(&m, 1.0).unwrap(), -1.0, 1e-10);
        close(phi_zero(&m, -0.4).unwrap(), 0.4, 1e-10);
        close(phi_zero(&m, 1e-4).unwrap(), -1e-4, 1e-12);
        close(phi_zero(&FluxModel::cubic_plus_linear(), 1.0).unwrap(), -1.0, 1e-10);
        close(lambda_zero(&m, 1.0).unwrap(), 1.0, 1e-9);
        close(lambda_zero(&m, 2.0).unwrap(), 4.0, 1e-9);
        close(lambda_zero(&m, 1e-3).unwrap(), 0.0, 1e-5);
    }
}
