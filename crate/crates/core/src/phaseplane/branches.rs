use std::io::Write;
use std::ops::ControlFlow;

use serde::Serialize;

use super::{eigenvalues, DispersionSign, EigenPair};
use crate::error::{Error, Result};
use crate::model::{equilibria, phi_natural, Equilibria, FluxModel};
use crate::numerics::{dopri5, OdeOptions};
use crate::output::write_table;

/// Dense samples per recorded branch, in addition to the solver's own steps.
const CURVE_SAMPLES: usize = 512;

/// Monotone graph `u ↦ v(u)` in the phase plane, `v = c2(u) u_y`.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryCurve {
    /// `(u, v)` ordered from `u_start` to `u_end`.
    pub samples: Vec<(f64, f64)>,
    /// `dv/du` at each sample.
    pub slopes: Vec<f64>,
    pub u_start: f64,
    pub u_end: f64,
    pub lam: f64,
    pub alpha: f64,
}

impl TrajectoryCurve {
    /// `v` at the last sample (`V±` for a single branch).
    pub fn end_value(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.1)
    }

    /// Cubic Hermite interpolation of `v` between samples.
    pub fn eval(&self, u: f64) -> Option<f64> {
        let n = self.samples.len();
        if n < 2 {
            return None;
        }
        let decreasing = self.samples[0].0 > self.samples[n - 1].0;
        let key = |x: f64| if decreasing { -x } else { x };
        let i = self.samples.partition_point(|s| key(s.0) < key(u));
        if i == 0 {
            return (self.samples[0].0 == u).then_some(self.samples[0].1);
        }
        if i == n {
            return None;
        }
        Some(self.hermite(i - 1, u))
    }

    pub(crate) fn hermite(&self, i: usize, u: f64) -> f64 {
        let (x0, x1) = (self.samples[i].0, self.samples[i + 1].0);
        self.hermite_local(i, (u - x0) / (x1 - x0))
    }

    /// Hermite interpolant on sample interval `i` at local parameter `t ∈ [0, 1]`.
    pub(crate) fn hermite_local(&self, i: usize, t: f64) -> f64 {
        let (x0, v0) = self.samples[i];
        let (x1, v1) = self.samples[i + 1];
        let h = x1 - x0;
        let (s0, s1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * s0 + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * s1
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_table(out, &["u", "v"], self.samples.iter().map(|&(u, v)| [u, v]))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// From `u0` down to `u1`.
    Minus,
    /// From `u2` up to `u1`.
    Plus,
}

struct Shot {
    v_end: f64,
    curve: Option<TrajectoryCurve>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be finite and non-negative, got {alpha}")))
    }
}

/// Integrates `dv/du = G'(u)/v − α b/c1` from the saddle on `side` to `u1`.
fn shoot(model: &FluxModel, eq: &Equilibria, alpha: f64, side: Side, record: bool) -> Result<Shot> {
    if eq.tangential || !(eq.u2 < eq.u1 && eq.u1 < eq.u0) {
        return Err(Error::InvalidArgument(format!(
            "shooting needs three distinct equilibria, got u2 = {}, u1 = {}, u0 = {}",
            eq.u2, eq.u1, eq.u0
        )));
    }
    let settings = *model.settings();
    let Equilibria { u0, u1, u2, lam, .. } = *eq;
    let (start, target) = match side {
        Side::Minus => (u0, u1),
        Side::Plus => (u2, u1),
    };
    let slope = match (side, eigenvalues(model, start, lam, alpha, DispersionSign::Positive)?) {
        (Side::Minus, EigenPair::Real { upper, .. }) if upper > 0.0 => upper * model.c2(start),
        (Side::Plus, EigenPair::Real { lower, .. }) if lower < 0.0 => lower * model.c2(start),
        (_, pair) => {
            return Err(Error::InvalidArgument(format!(
                "state {start} is not a saddle at speed {lam} (eigenvalues {pair:?})"
            )))
        }
    };
    let len = (target - start).abs();
    let dir = (target - start).signum();
    let delta = settings.launch_offset * len;
    let u_launch = start + dir * delta;
    let v_launch = slope * dir * delta;
    let scale_v = slope.abs() * len;
    let guard = 1e-9 * scale_v;

    let rhs = |u: f64, v: f64| {
        let gp = crate::model::g_through(model, u, u0, u2) * model.entropy_weight(u);
        gp / v - alpha * model.b(u) / model.c1(u)
    };
    let opts = OdeOptions {
        rtol: settings.ode_rtol,
        atol: settings.ode_atol * scale_v,
        h_init: Some(1e-3 * len),
        h_max: Some(0.125 * len),
        max_steps: 1_000_000,
    };
    let run = dopri5(
        |u, y: &[f64; 1]| [rhs(u, y[0])],
        u_launch,
        [v_launch],
        target,
        &opts,
        record,
        |_, _, y| {
            if y[0] > -guard {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;

    let mut v_end = run.y[0];
    let mut stop = None;
    if run.stopped_early {
        let reached = (run.t - target).abs() <= 1e-4 * len;
        if side == Side::Minus && reached {
            // the branch enters u1 through a node: V− = 0
            v_end = 0.0;
            stop = Some(run.t);
        } else {
            return Err(Error::PrematureAxisCrossing { u: run.t, target });
        }
    }

    let curve = record.then(|| {
        let last = stop.unwrap_or(target);
        let mut us: Vec<f64> = (1..CURVE_SAMPLES)
            .map(|i| u_launch + (last - u_launch) * i as f64 / CURVE_SAMPLES as f64)
            .chain(run.segments.iter().map(|s| s.t_new()))
            .filter(|&u| dir * (last - u) > 0.0)
            .collect();
        us.push(u_launch);
        us.sort_by(|a, b| (dir * a).total_cmp(&(dir * b)));
        us.dedup();
        let mut samples = vec![(start, 0.0)];
        let mut slopes = vec![slope];
        for u in us {
            let v = run.eval(u).map_or(v_launch, |y| y[0]);
            samples.push((u, v));
            slopes.push(rhs(u, v));
        }
        samples.push((target, v_end));
        if v_end == 0.0 {
            let (pu, pv) = samples[samples.len() - 2];
            slopes.push((v_end - pv) / (target - pu));
        } else {
            slopes.push(rhs(target, v_end));
        }
        TrajectoryCurve {
            samples,
            slopes,
            u_start: start,
            u_end: target,
            lam,
            alpha,
        }
    });
    Ok(Shot { v_end, curve })
}

fn checked_equilibria(model: &FluxModel, u0: f64, lam: f64, alpha: f64) -> Result<Equilibria> {
    check_alpha(alpha)?;
    let eq = equilibria(model, u0, lam)?;
    if eq.tangential {
        return Err(Error::SpeedOutOfRange { u0, lam });
    }
    Ok(eq)
}

/// Branch leaving the saddle `u0` downwards, integrated to `u1`.
pub fn v_minus_branch(model: &FluxModel, u0: f64, lam: f64, alpha: f64) -> Result<TrajectoryCurve> {
    let eq = checked_equilibria(model, u0, lam, alpha)?;
    Ok(shoot(model, &eq, alpha, Side::Minus, true)?.curve.expect("recorded"))
}

/// Branch leaving the saddle `u2` upwards, integrated to `u1`.
pub fn v_plus_branch(model: &FluxModel, u0: f64, lam: f64, alpha: f64) -> Result<TrajectoryCurve> {
    let eq = checked_equilibria(model, u0, lam, alpha)?;
    Ok(shoot(model, &eq, alpha, Side::Plus, true)?.curve.expect("recorded"))
}

/// `W(α) = V+(α) − V−(α)`.
pub fn connection_gap(model: &FluxModel, u0: f64, lam: f64, alpha: f64) -> Result<f64> {
    let eq = checked_equilibria(model, u0, lam, alpha)?;
    gap(model, &eq, alpha)
}

fn gap(model: &FluxModel, eq: &Equilibria, alpha: f64) -> Result<f64> {
    let plus = shoot(model, eq, alpha, Side::Plus, false)?.v_end;
    let minus = shoot(model, eq, alpha, Side::Minus, false)?.v_end;
    Ok(plus - minus)
}

/// Gap for the speed `ā(u0, u2)`, with `φ♮(u0)` supplied by the caller.
pub(crate) fn gap_through(model: &FluxModel, u0: f64, u2: f64, phi_nat: f64, alpha: f64) -> Result<f64> {
    let eq = Equilibria::through(model, u0, u2, phi_nat)?;
    gap(model, &eq, alpha)
}

/// Both branches joined into one curve from `u0` to `u2`; a heteroclinic
/// orbit when `alpha` is the critical ratio of `(u0, u2)`.
pub fn saddle_connection(model: &FluxModel, u0: f64, u2: f64, alpha: f64) -> Result<TrajectoryCurve> {
    model.require_concave_convex()?;
    model.check_state(u0)?;
    model.check_state(u2)?;
    check_alpha(alpha)?;
    if u0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("saddle connection needs u0 > 0, got {u0}")));
    }
    let phi = phi_natural(model, u0)?;
    if u2 >= phi {
        let (lo, _) = model.domain();
        return Err(Error::OutsideBand { u0, u2, lo, hi: phi });
    }
    let eq = Equilibria::through(model, u0, u2, phi)?;
    let minus = shoot(model, &eq, alpha, Side::Minus, true)?.curve.expect("recorded");
    let plus = shoot(model, &eq, alpha, Side::Plus, true)?.curve.expect("recorded");
    let mut samples = minus.samples;
    let mut slopes = minus.slopes;
    for (&s, &d) in plus.samples.iter().zip(&plus.slopes).rev().skip(1) {
        samples.push(s);
        slopes.push(d);
    }
    Ok(TrajectoryCurve {
        samples,
        slopes,
        u_start: u0,
        u_end: u2,
        lam: eq.lam,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{big_g, Settings};
    use crate::numerics::Quadrature;

    fn sqrt2() -> f64 {
        std::f64::consts::SQRT_2
    }

    #[test]
    fn cubic_connection_follows_parabola() {
        let m = FluxModel::cubic();
        let (u0, u2) = (1.0, -0.8);
        let alpha = 3.0 / sqrt2() * (u0 + u2);
        let c = saddle_connection(&m, u0, u2, alpha).unwrap();
        let a = 1.0 / sqrt2();
        let worst = c
            .samples
            .iter()
            .map(|&(u, v)| (v - a * (u - u2) * (u - u0)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "max deviation {worst}");
        assert!(c.samples.windows(2).all(|w| w[1].0 < w[0].0));
        let n = c.samples.len();
        assert!(c.samples[1..n - 1].iter().all(|s| s.1 < 0.0));
    }

    #[test]
    fn gap_vanishes_at_closed_form_ratio() {
        let m = FluxModel::cubic();
        let lam = m.chord(1.0, -0.8);
        let w = connection_gap(&m, 1.0, lam, 0.424_264_068_711_928_5).unwrap();
        assert!(w.abs() < 1e-6, "{w}");
        let lo = connection_gap(&m, 1.0, lam, 0.3).unwrap();
        let hi = connection_gap(&m, 1.0, lam, 0.6).unwrap();
        assert!(lo > 0.0 && hi < 0.0);
    }

    #[test]
    fn gap_sign_at_zero_ratio() {
        let m = FluxModel::cubic();
        assert!(connection_gap(&m, 1.0, 0.9, 0.0).unwrap() > 0.0);
        let w = connection_gap(&m, 1.0, 1.0 - 1e-12, 0.0).unwrap();
        assert!(w.abs() < 1e-6, "{w}");
    }

    #[test]
    fn zero_ratio_energy() {
        let m = FluxModel::cubic();
        let eq = equilibria(&m, 1.0, 0.9).unwrap();
        let vm = v_minus_branch(&m, 1.0, 0.9, 0.0).unwrap().end_value();
        let vp = v_plus_branch(&m, 1.0, 0.9, 0.0).unwrap().end_value();
        let g1 = big_g(&m, eq.u1, 1.0, 0.9).unwrap();
        let g2 = big_g(&m, eq.u2, 1.0, 0.9).unwrap();
        assert!((0.5 * vm * vm - g1).abs() < 1e-9);
        assert!((0.5 * vp * vp - (g1 - g2)).abs() < 1e-9);
    }

    #[test]
    fn plus_branch_bound() {
        let m = FluxModel::cubic().with_coefficients(
            crate::model::Coefficient::Poly(crate::poly::Polynomial::new(vec![1.0, 0.0, 0.5])),
            crate::model::Coefficient::constant(1.0),
            crate::model::Coefficient::constant(1.0),
        );
        let m = m.unwrap();
        let eq = equilibria(&m, 1.0, 0.85).unwrap();
        for &alpha in &[0.1, 0.5, 1.5] {
            let vp = v_plus_branch(&m, 1.0, 0.85, alpha).unwrap().end_value();
            let kappa = (0..=200)
                .map(|i| eq.u2 + (eq.u1 - eq.u2) * i as f64 / 200.0)
                .map(|u| m.b(u) / m.c1(u))
                .fold(f64::INFINITY, f64::min);
            assert!(vp <= -kappa * alpha * (eq.u1 - eq.u2), "{vp}");
        }
    }

    #[test]
    fn energy_identity_along_branches() {
        let m = FluxModel::cubic()
            .with_coefficients(
                crate::model::Coefficient::Poly(crate::poly::Polynomial::new(vec![1.2, 0.1])),
                crate::model::Coefficient::Poly(crate::poly::Polynomial::new(vec![1.0, 0.0, 0.2])),
                crate::model::Coefficient::constant(0.8),
            )
            .unwrap();
        let (u0, lam, alpha) = (1.0, 0.9, 0.4);
        let q = Quadrature::default();
        for curve in [v_minus_branch(&m, u0, lam, alpha).unwrap(), v_plus_branch(&m, u0, lam, alpha).unwrap()] {
            let us = curve.u_start;
            let g0 = big_g(&m, us, u0, lam).unwrap();
            for k in 1..8 {
                let u = us + (curve.u_end - us) * k as f64 / 8.0;
                let v = curve.eval(u).unwrap();
                // ½v² + α∫ v b/c1 du = G(u) − G(u_start)
                let damping = q
                    .integrate(|s| curve.eval(s).unwrap_or(0.0) * m.b(s) / m.c1(s), us, u)
                    .unwrap();
                let lhs = 0.5 * v * v + alpha * damping;
                let rhs = big_g(&m, u, u0, lam).unwrap() - g0;
                assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn launch_offset_convergence() {
        let m = FluxModel::cubic();
        let halved = m.with_settings(Settings {
            launch_offset: 0.5e-6,
            ..Settings::default()
        });
        for &alpha in &[0.0, 0.6, 2.0] {
            let a = v_minus_branch(&m, 1.0, 0.9, alpha).unwrap().end_value();
            let b = v_minus_branch(&halved, 1.0, 0.9, alpha).unwrap().end_value();
            assert!((a - b).abs() < 1e-7);
            let a = v_plus_branch(&m, 1.0, 0.9, alpha).unwrap().end_value();
            let b = v_plus_branch(&halved, 1.0, 0.9, alpha).unwrap().end_value();
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn gap_decreases_in_alpha() {
        let m = FluxModel::cubic();
        let mut prev = f64::INFINITY;
        for i in 0..25 {
            let w = connection_gap(&m, 1.0, 0.85, 0.1 * i as f64).unwrap();
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn minus_branch_negative_interior() {
        let m = FluxModel::cubic();
        let c = v_minus_branch(&m, 1.0, 0.8, 0.7).unwrap();
        let n = c.samples.len();
        assert!(n > 512);
        assert!(c.samples[1..n - 1].iter().all(|s| s.1 < 0.0));
        assert!(c.samples.windows(2).all(|w| w[1].0 < w[0].0));
    }
}
