//! Diffusion-only traveling waves and the strict Oleinik test.

use std::io::Write;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinetics::Interval;
use crate::model::{phi_natural, phi_natural_inverse, FluxModel, FluxShape};
use crate::numerics::{dopri5, golden_minimize, OdeOptions};
use crate::output::write_table;

const GRID: usize = 1024;
const TRUNCATION: f64 = 1e-8;
const Y_MAX: f64 = 1e12;
/// Dense-output points added inside each accepted step.
const SUBSAMPLES: usize = 3;
const SPOT_CHECKS: usize = 8;

/// Whether every state strictly between `u−` and `u+` has a chord from `u−`
/// strictly above the chord to `u+`.
pub fn oleinik_strict(model: &FluxModel, u_minus: f64, u_plus: f64) -> Result<bool> {
    model.check_state(u_minus)?;
    model.check_state(u_plus)?;
    if u_minus == u_plus {
        return Err(Error::InvalidArgument("Oleinik test needs u+ ≠ u−".into()));
    }
    let s = model.chord(u_minus, u_plus);
    let scale = s.abs().max(model.df(u_minus).abs()).max(model.df(u_plus).abs()).max(1.0);
    let margin = 1e-12 * scale;
    // f[u−, v] − f[u−, u+] = (v − u+) f[u−, u+, v]
    let excess = |v: f64| (v - u_plus) * model.chord2(u_minus, u_plus, v);
    let step = (u_plus - u_minus) / (GRID + 1) as f64;
    let node = |i: usize| u_minus + step * i as f64;
    let (i_min, grid_min) = (1..=GRID)
        .map(|i| (i, excess(node(i))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let (a, b) = (node(i_min.max(2) - 1), node((i_min + 1).min(GRID)));
    let (_, refined) = golden_minimize(excess, a.min(b), a.max(b), 1e-10 * step.abs());
    if grid_min.min(refined) <= margin {
        return Ok(false);
    }
    // the excess must not turn negative inside the first and last grid cells,
    // so its slope at each end may not point below zero
    let sigma = (u_minus - u_plus).signum();
    let slack = margin / (u_plus - u_minus).abs();
    let ends = [model.chord2(u_minus, u_plus, u_plus), model.chord2(u_minus, u_plus, u_minus)];
    Ok(ends.iter().all(|&q| sigma * q >= -slack))
}

/// Diffusive traveling wave `y ↦ u(y)` with `y = 0` at the mid value.
#[derive(Debug, Clone, Serialize)]
pub struct DiffusiveProfile {
    /// `(y, u)` ordered by increasing `y`.
    pub samples: Vec<(f64, f64)>,
    pub u_minus: f64,
    pub u_plus: f64,
    pub lam: f64,
}

impl DiffusiveProfile {
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

/// Diffusive wave from `u−` to `u+`, which must satisfy the strict Oleinik test.
pub fn diffusive_profile(model: &FluxModel, u_minus: f64, u_plus: f64) -> Result<DiffusiveProfile> {
    if !oleinik_strict(model, u_minus, u_plus)? {
        return Err(Error::NoConnection {
            u_minus,
            u_plus,
            reason: "strict Oleinik inequalities fail".into(),
        });
    }
    integrate_diffusive_wave(model, u_minus, u_plus)
}

/// Integrates `u' = (u − u−)(f[u−, u] − f[u−, u+]) / b(u)` from the mid
/// value in both directions without checking admissibility first.
pub fn integrate_diffusive_wave(model: &FluxModel, u_minus: f64, u_plus: f64) -> Result<DiffusiveProfile> {
    model.check_state(u_minus)?;
    model.check_state(u_plus)?;
    if u_minus == u_plus {
        return Err(Error::InvalidArgument("diffusive wave needs u+ ≠ u−".into()));
    }
    let lam = model.chord(u_minus, u_plus);
    let rhs = |_: f64, y: &[f64; 1]| {
        let u = y[0];
        [(u - u_minus) * (u - u_plus) * model.chord2(u_minus, u_plus, u) / model.b(u)]
    };
    let mid = 0.5 * (u_minus + u_plus);
    let dir = (u_plus - u_minus).signum();
    if !(rhs(0.0, &[mid])[0] * dir > 0.0) {
        return Err(Error::NoConnection {
            u_minus,
            u_plus,
            reason: format!("the wave equation does not move from the mid value {mid} towards u+"),
        });
    }
    let ahead = half_profile(model, &rhs, mid, u_minus, u_plus, 1.0)?;
    let behind = half_profile(model, &rhs, mid, u_minus, u_plus, -1.0)?;
    let mut samples: Vec<(f64, f64)> = behind.into_iter().rev().collect();
    samples.extend(ahead.into_iter().skip(1));
    Ok(DiffusiveProfile {
        samples,
        u_minus,
        u_plus,
        lam,
    })
}

/// Samples from `y = 0` towards `u+` (`sense = 1`) or `u−` (`sense = −1`).
fn half_profile<F>(
    model: &FluxModel,
    rhs: &F,
    mid: f64,
    u_minus: f64,
    u_plus: f64,
    sense: f64,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, &[f64; 1]) -> [f64; 1],
{
    let settings = model.settings();
    let span = (u_plus - u_minus).abs();
    let cut = TRUNCATION * span;
    let target = if sense > 0.0 { u_plus } else { u_minus };
    let towards = (target - mid).signum();
    let opts = OdeOptions {
        rtol: settings.ode_rtol,
        atol: settings.ode_atol * span,
        h_init: Some(1e-3),
        ..OdeOptions::default()
    };
    let mut samples = vec![(0.0, mid)];
    let mut reached = false;
    let mut error = None;
    dopri5(|t, y: &[f64; 1]| rhs(t, y), 0.0, [mid], sense * Y_MAX, &opts, false, |seg, t, y| {
        let u = y[0];
        if (u - mid) * towards < 0.0 || (u - target) * towards > 0.0 {
            error = Some(Error::Integration {
                t,
                reason: "diffusive wave left the band between its end states",
            });
            return ControlFlow::Break(());
        }
        if (target - u) * towards <= cut {
            // locate the truncation point on the dense output
            let edge = target - towards * cut;
            let (mut a, mut b) = (seg.t_old, t);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if (seg.eval(m)[0] - edge) * towards < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            samples.push((b, edge));
            reached = true;
            return ControlFlow::Break(());
        }
        for k in 1..=SUBSAMPLES {
            let s = seg.t_old + seg.h * k as f64 / (SUBSAMPLES + 1) as f64;
            samples.push((s, seg.eval(s)[0]));
        }
        samples.push((t, u));
        ControlFlow::Continue(())
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    if !reached {
        let last = samples.last().map_or(mid, |s| s.1);
        return Err(Error::NoConnection {
            u_minus,
            u_plus,
            reason: format!("diffusive wave stalls at {last} before reaching {target}"),
        });
    }
    Ok(samples)
}

/// Closure of the diffusive shock set as a union of closed pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffusiveShockSet {
    pub u_minus: f64,
    /// Disjoint pieces in increasing order.
    pub pieces: Vec<Interval>,
}

impl DiffusiveShockSet {
    pub fn contains(&self, u: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(u))
    }
}

/// States `u+` reachable from `u−` by a diffusive wave, for convex,
/// concave-convex and convex-concave fluxes.
pub fn diffusive_shock_set(model: &FluxModel, u_minus: f64) -> Result<DiffusiveShockSet> {
    model.check_state(u_minus)?;
    let (lo, hi) = model.domain();
    let pieces = match model.shape() {
        FluxShape::Convex => vec![Interval::closed(lo, u_minus)],
        FluxShape::ConcaveConvex => {
            let phi = phi_natural(model, u_minus).unwrap_or(if u_minus > 0.0 { lo } else { hi });
            vec![Interval::closed(phi.min(u_minus), phi.max(u_minus))]
        }
        FluxShape::ConvexConcave => {
            if u_minus == 0.0 {
                vec![Interval::closed(lo, hi)]
            } else {
                // beyond the state whose chord from u− matches f'(u−)
                let far = phi_natural_inverse(model, u_minus).ok();
                if u_minus > 0.0 {
                    let mut p = far.map(|w| vec![Interval::closed(lo, w)]).unwrap_or_default();
                    p.push(Interval::closed(u_minus, hi));
                    p
                } else {
                    let mut p = vec![Interval::closed(lo, u_minus)];
                    p.extend(far.map(|w| Interval::closed(w, hi)));
                    p
                }
            }
        }
        shape => {
            return Err(Error::FluxClass(format!(
                "diffusive shock sets need a convex, concave-convex or convex-concave flux, found {shape:?}"
            )))
        }
    };
    for piece in &pieces {
        for k in 1..=SPOT_CHECKS {
            let u = piece.lo + (piece.hi - piece.lo) * k as f64 / (SPOT_CHECKS + 1) as f64;
            if u != u_minus && !oleinik_strict(model, u_minus, u)? {
                return Err(Error::FluxClass(format!(
                    "state {u} of the predicted shock set fails the Oleinik test"
                )));
            }
        }
    }
    Ok(DiffusiveShockSet { u_minus, pieces })
}
