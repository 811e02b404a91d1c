use std::io::Write;

use serde::Serialize;

use super::TrajectoryCurve;
use crate::error::{Error, Result};
use crate::model::{g_through, phi_zero, FluxModel};
use crate::numerics::Quadrature;
use crate::output::write_table;

/// Fraction of the curve length cut off at each end of a profile.
const TRUNCATION: f64 = 1e-8;
const UNIFORM_SAMPLES: usize = 512;

/// Wave profile `y ↦ u(y)`, with `y = 0` at the mid value of the endpoints.
#[derive(Debug, Clone, Serialize)]
pub struct Profile {
    /// `(y, u)` ordered by increasing `y`.
    pub samples: Vec<(f64, f64)>,
}

impl Profile {
    /// Linear interpolation of `u` at `y` inside the sampled range.
    pub fn eval(&self, y: f64) -> Option<f64> {
        let i = self.samples.partition_point(|s| s.0 < y);
        if i == 0 {
            return (self.samples.first()?.0 == y).then(|| self.samples[0].1);
        }
        let (y1, u1) = *self.samples.get(i)?;
        let (y0, u0) = self.samples[i - 1];
        Some(u0 + (u1 - u0) * (y - y0) / (y1 - y0))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_table(out, &["y", "u"], self.samples.iter().map(|&(y, u)| [y, u]))
    }
}

/// Dispersive (zero-diffusion) orbit `v = −√(2 G(u; u−, λ0(u−)))` joining
/// `u−` to `φ0(u−)`.
pub fn dispersive_trajectory(model: &FluxModel, u_minus: f64) -> Result<TrajectoryCurve> {
    model.require_concave_convex()?;
    model.check_state(u_minus)?;
    if u_minus == 0.0 {
        return Err(Error::InvalidArgument("dispersive trajectory needs u− ≠ 0".into()));
    }
    let phi0 = phi_zero(model, u_minus)?;
    let lam = model.chord(u_minus, phi0);
    let span = u_minus - phi0;

    // nodes from u− to φ0, refined geometrically towards both ends
    let mut offsets: Vec<f64> = (1..UNIFORM_SAMPLES).map(|i| i as f64 / UNIFORM_SAMPLES as f64).collect();
    for k in 8..=28 {
        let d = 10f64.powf(-(k as f64) / 4.0);
        offsets.push(d);
        offsets.push(1.0 - d);
    }
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();
    let us: Vec<f64> = offsets.iter().map(|t| u_minus - span * t).collect();

    // G accumulated from the nearer endpoint, where it vanishes
    let q = Quadrature::default();
    let dg = |a: f64, b: f64| q.integrate(|z| g_through(model, z, u_minus, phi0) * model.entropy_weight(z), a, b);
    let half = us.len() / 2;
    let mut g = vec![0.0; us.len()];
    let (mut acc, mut prev) = (0.0, u_minus);
    for i in 0..half {
        acc += dg(prev, us[i])?;
        g[i] = acc;
        prev = us[i];
    }
    let (mut acc, mut prev) = (0.0, phi0);
    for i in (half..us.len()).rev() {
        acc += dg(prev, us[i])?;
        g[i] = acc;
        prev = us[i];
    }

    let weight_slope = |u: f64| ((model.df(u) - lam) * model.entropy_weight(u)).max(0.0).sqrt();
    let mut samples = vec![(u_minus, 0.0)];
    let mut slopes = vec![weight_slope(u_minus)];
    for (&u, &gu) in us.iter().zip(&g) {
        if !(gu > 0.0) {
            return Err(Error::NegativePotential { u, value: gu });
        }
        let v = -(2.0 * gu).sqrt();
        samples.push((u, v));
        slopes.push(g_through(model, u, u_minus, phi0) * model.entropy_weight(u) / v);
    }
    samples.push((phi0, 0.0));
    slopes.push(-weight_slope(phi0));
    Ok(TrajectoryCurve {
        samples,
        slopes,
        u_start: u_minus,
        u_end: phi0,
        lam,
        alpha: 0.0,
    })
}

/// Integrates `dy/du = c2(u)/v(u)` along the curve.
pub fn profile_from_curve(model: &FluxModel, curve: &TrajectoryCurve) -> Result<Profile> {
    let n = curve.samples.len();
    if n < 3 {
        return Err(Error::InvalidArgument("curve has too few samples".into()));
    }
    let (ua, ub) = (curve.u_start, curve.u_end);
    let span = (ua - ub).abs();
    let cut = TRUNCATION * span;
    let dir = (ub - ua).signum();
    for &(u, v) in &curve.samples[1..n - 1] {
        if !(v < 0.0) && (u - ua).abs() >= cut && (u - ub).abs() >= cut {
            return Err(Error::ProfileBlowUp { u });
        }
    }

    // each sample interval is integrated in its local parameter, which keeps
    // the distance to the end states exact where v is tiny
    let q = Quadrature::default();
    let cell = |i: usize, t0: f64, t1: f64| -> Result<f64> {
        let (x0, x1) = (curve.samples[i].0, curve.samples[i + 1].0);
        let h = x1 - x0;
        let dy = q
            .integrate(|t| h * model.c2(x0 + h * t) / curve.hermite_local(i, t), t0, t1)
            .map_err(|_| Error::ProfileBlowUp { u: x0 + h * t1 })?;
        if dy.is_finite() {
            Ok(dy)
        } else {
            Err(Error::ProfileBlowUp { u: x0 + h * t1 })
        }
    };
    let range = |i: usize| {
        let (x0, x1) = (curve.samples[i].0, curve.samples[i + 1].0);
        let h = (x1 - x0).abs();
        let (from_a, to_b) = ((x0 - ua).abs(), (x1 - ub).abs());
        let t0 = if from_a < cut { (cut - from_a) / h } else { 0.0 };
        let t1 = if to_b < cut { 1.0 - (cut - to_b) / h } else { 1.0 };
        (t0, t1)
    };

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut starts = vec![None; n - 1];
    let mut y = 0.0;
    for (i, start) in starts.iter_mut().enumerate() {
        let (t0, t1) = range(i);
        if !(t0 < t1) {
            continue;
        }
        let (x0, x1) = (curve.samples[i].0, curve.samples[i + 1].0);
        if points.is_empty() {
            let u = if t0 > 0.0 { ua + dir * cut } else { x0 };
            points.push((0.0, u));
        }
        *start = Some((t0, y));
        y += cell(i, t0, t1)?;
        let u = if t1 < 1.0 { ub - dir * cut } else { x1 };
        points.push((y, u));
    }

    // anchor: y = 0 where u equals the mid value
    let mid = 0.5 * (ua + ub);
    let i = curve
        .samples
        .partition_point(|s| dir * s.0 <= dir * mid)
        .clamp(1, n - 1)
        - 1;
    let (x0, x1) = (curve.samples[i].0, curve.samples[i + 1].0);
    let (t0, y0) = starts[i].ok_or(Error::ProfileBlowUp { u: mid })?;
    let shift = y0 + cell(i, t0, (mid - x0) / (x1 - x0))?;

    let mut samples: Vec<(f64, f64)> = points.into_iter().map(|(yy, u)| (yy - shift, u)).collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Profile { samples })
}
