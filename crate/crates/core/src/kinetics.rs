//! Critical ratios, threshold ratios and the kinetic function.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{phi_natural, phi_zero, Equilibria, FluxModel};
use crate::numerics::roots::bracketed_root_from;
use crate::numerics::RootOptions;
use crate::phaseplane::gap_through;

/// Refinement levels `k` with `u2 = φ♮ − 2^{-k} (φ♮ − φ0)` used for the threshold.
const THRESHOLD_LEVELS: std::ops::RangeInclusive<i32> = 6..=12;
const RICHARDSON_ORDER: usize = 3;
/// Largest multiple of the starting ratio tried when bracketing a critical ratio.
const MAX_GROWTH: f64 = 1048576.0;
const SNAP: f64 = 1e-7;

fn key(x: f64) -> i64 {
    (x * 1e12).round() as i64
}

/// Memo of threshold ratios and kinetic values, shared by clones of a model.
#[derive(Debug, Default)]
pub struct KineticCache {
    threshold: Mutex<HashMap<i64, f64>>,
    flat: Mutex<HashMap<(i64, i64), f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Nonclassical,
    ClassicalThreshold,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Nonclassical => "nonclassical",
            Regime::ClassicalThreshold => "classical-threshold",
        }
    }
}

/// One evaluation of the kinetic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KineticSample {
    pub u0: f64,
    pub alpha: f64,
    pub phi_flat: f64,
    pub phi_sharp: f64,
    pub lam: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        let above = if self.lo_closed { u >= self.lo } else { u > self.lo };
        let below = if self.hi_closed { u <= self.hi } else { u < self.hi };
        above && below
    }
}

/// Right states reachable from `u−`: an optional isolated point and an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockSet {
    pub isolated: Option<f64>,
    pub interval: Interval,
}

impl ShockSet {
    pub fn contains(&self, u: f64) -> bool {
        self.isolated == Some(u) || self.interval.contains(u)
    }

    /// Equality of the point and the interval ends within `tol`, ignoring
    /// whether endpoints belong to the set.
    pub fn approx_eq(&self, other: &ShockSet, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        let iso = match (self.isolated, other.isolated) {
            (Some(a), Some(b)) => close(a, b),
            (None, None) => true,
            _ => false,
        };
        iso && close(self.interval.lo, other.interval.lo) && close(self.interval.hi, other.interval.hi)
    }

    fn mirrored(&self) -> Self {
        let i = self.interval;
        Self {
            isolated: self.isolated.map(|u| -u),
            interval: Interval {
                lo: -i.hi,
                hi: -i.lo,
                lo_closed: i.hi_closed,
                hi_closed: i.lo_closed,
            },
        }
    }
}

/// Sampled threshold curve with the slope at the origin.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdCurve {
    pub samples: Vec<(f64, f64)>,
    /// Closed-form slope `κ` at `u0 = 0`.
    pub kappa: f64,
    /// Least-squares slope through the origin of the points with the smallest `|u0|`.
    pub fitted_slope: Option<f64>,
}

/// Analytic and sampled slope of `α♮` at the origin.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSlope {
    pub analytic: f64,
    /// `(u0, α♮(u0)/u0)`.
    pub estimates: Vec<(f64, f64)>,
}

impl ThresholdSlope {
    pub fn agrees(&self, rel: f64) -> bool {
        self.estimates
            .iter()
            .all(|&(_, s)| (s - self.analytic).abs() <= rel * self.analytic.abs())
    }
}

fn prepare(model: &FluxModel, u0: f64) -> Result<()> {
    model.require_concave_convex()?;
    model.check_state(u0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be finite and non-negative, got {alpha}")))
    }
}

/// Runs `op` for `u0 > 0`, mirroring the model for `u0 < 0`.
fn oriented<T>(model: &FluxModel, u0: f64, op: impl FnOnce(&FluxModel, f64) -> Result<T>) -> Result<(T, bool)> {
    if u0 < 0.0 {
        Ok((op(model.mirrored(), -u0)?, true))
    } else {
        Ok((op(model, u0)?, false))
    }
}

/// Critical ratio `A(u0, u2)`: the ratio for which a saddle-to-saddle
/// connection joins `u0` to `u2`.
pub fn critical_ratio(model: &FluxModel, u0: f64, u2: f64) -> Result<f64> {
    prepare(model, u0)?;
    model.check_state(u2)?;
    if u0 == 0.0 {
        return Err(Error::InvalidArgument("critical ratio needs u0 ≠ 0".into()));
    }
    let (m, u0, u2) = if u0 < 0.0 { (model.mirrored(), -u0, -u2) } else { (model, u0, u2) };
    let phi_nat = phi_natural(m, u0)?;
    let phi0 = phi_zero(m, u0)?;
    let slack = 1e-9 * (u0 - phi0);
    if !(u2 >= phi0 - slack && u2 < phi_nat) {
        return Err(Error::OutsideBand {
            u0,
            u2,
            lo: phi0,
            hi: phi_nat,
        });
    }
    critical_ratio_inner(m, u0, u2.max(phi0), phi_nat)
}

fn critical_ratio_inner(model: &FluxModel, u0: f64, u2: f64, phi_nat: f64) -> Result<f64> {
    let w = |alpha: f64| gap_through(model, u0, u2, phi_nat, alpha);
    let w0 = w(0.0)?;
    if w0 <= 0.0 {
        return Ok(0.0);
    }
    // ratio at which damping and the saddle's restoring term balance at u0
    let lam = model.chord(u0, u2);
    let natural = ((model.df(u0) - lam) * model.c1(u0) * model.c2(u0)).sqrt() / model.b(u0);
    let start = if natural.is_finite() && natural > 0.0 { natural } else { 1.0 };
    let mut lo = (0.0, w0);
    let mut hi_alpha = start;
    let mut w_hi = w(hi_alpha)?;
    while w_hi >= 0.0 {
        lo = (hi_alpha, w_hi);
        hi_alpha *= 2.0;
        if hi_alpha > MAX_GROWTH * start {
            return Err(Error::BracketExpansion { limit: MAX_GROWTH * start });
        }
        w_hi = w(hi_alpha)?;
    }
    let tol = model.settings().alpha_tol * (u0 - u2).min(1.0);
    bracketed_root_from("critical ratio", w, lo, (hi_alpha, w_hi), RootOptions::absolute(tol))
}

/// Threshold ratio `α♮(u0)`, the limit of `A(u0, u2)` as `u2 ↑ φ♮(u0)`.
pub fn threshold_ratio(model: &FluxModel, u0: f64) -> Result<f64> {
    prepare(model, u0)?;
    if u0 == 0.0 {
        return Ok(0.0);
    }
    Ok(oriented(model, u0, threshold_positive)?.0)
}

fn threshold_positive(model: &FluxModel, u0: f64) -> Result<f64> {
    if let Some(&a) = model.cache().threshold.lock().expect("cache lock").get(&key(u0)) {
        return Ok(a);
    }
    let phi_nat = phi_natural(model, u0)?;
    let phi0 = phi_zero(model, u0)?;
    let width = phi_nat - phi0;
    let values = THRESHOLD_LEVELS
        .map(|k| critical_ratio_inner(model, u0, phi_nat - width * 2f64.powi(-k), phi_nat))
        .collect::<Result<Vec<f64>>>()?;
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneExtrapolation { u0 });
    }
    let alpha = richardson(&values, RICHARDSON_ORDER);
    model.cache().threshold.lock().expect("cache lock").insert(key(u0), alpha);
    Ok(alpha)
}

/// Extrapolates a sequence sampled at step sizes halving each time, with an
/// error expansion in integer powers of the step.
fn richardson(values: &[f64], order: usize) -> f64 {
    let mut row = values.to_vec();
    for j in 1..=order.min(values.len() - 1) {
        let f = 2f64.powi(j as i32) - 1.0;
        row = row.windows(2).map(|w| w[1] + (w[1] - w[0]) / f).collect();
    }
    *row.last().expect("non-empty")
}

/// Kinetic function `φ♭_α(u0)` together with `φ♯_α(u0)` and the speed `Λ_α(u0)`.
pub fn kinetic_function(model: &FluxModel, u0: f64, alpha: f64) -> Result<KineticSample> {
    prepare(model, u0)?;
    check_alpha(alpha)?;
    if u0 == 0.0 {
        return Ok(KineticSample {
            u0,
            alpha,
            phi_flat: 0.0,
            phi_sharp: 0.0,
            lam: model.df(0.0),
            regime: Regime::ClassicalThreshold,
        });
    }
    let (s, flipped) = oriented(model, u0, |m, u0| kinetic_positive(m, u0, alpha))?;
    Ok(if flipped {
        KineticSample {
            u0,
            phi_flat: -s.phi_flat,
            phi_sharp: -s.phi_sharp,
            ..s
        }
    } else {
        s
    })
}

fn kinetic_positive(model: &FluxModel, u0: f64, alpha: f64) -> Result<KineticSample> {
    let phi_nat = phi_natural(model, u0)?;
    let threshold = threshold_positive(model, u0)?;
    let flat = if alpha >= threshold {
        None
    } else if alpha == 0.0 {
        Some(phi_zero(model, u0)?)
    } else {
        flat_state(model, u0, alpha, phi_nat)?
    };
    let sample = match flat {
        Some(phi) => {
            let eq = Equilibria::through(model, u0, phi, phi_nat)?;
            KineticSample {
                u0,
                alpha,
                phi_flat: phi,
                phi_sharp: eq.u1,
                lam: eq.lam,
                regime: Regime::Nonclassical,
            }
        }
        None => KineticSample {
            u0,
            alpha,
            phi_flat: phi_nat,
            phi_sharp: phi_nat,
            lam: model.df(phi_nat),
            regime: Regime::ClassicalThreshold,
        },
    };
    Ok(sample)
}

/// Root in `u2` of `W(u0, ā(u0, u2), α)`; `None` when it merges with `φ♮`.
fn flat_state(model: &FluxModel, u0: f64, alpha: f64, phi_nat: f64) -> Result<Option<f64>> {
    let k = (key(u0), key(alpha));
    if let Some(&phi) = model.cache().flat.lock().expect("cache lock").get(&k) {
        return Ok(Some(phi));
    }
    let phi0 = phi_zero(model, u0)?;
    let width = phi_nat - phi0;
    let w = |u2: f64| gap_through(model, u0, u2, phi_nat, alpha);
    let lo = (phi0, w(phi0)?);
    let mut hi = None;
    for level in 6..=20 {
        let u2 = phi_nat - width * 2f64.powi(-level);
        let wu = w(u2)?;
        if wu > 0.0 {
            hi = Some((u2, wu));
            break;
        }
    }
    let Some(hi) = hi else {
        return Ok(None);
    };
    let phi = if lo.1 >= 0.0 {
        phi0
    } else {
        bracketed_root_from("kinetic function", w, lo, hi, RootOptions::absolute(1e-12 * (u0 - phi0)))?
    };
    if (phi - phi_nat).abs() < SNAP * (u0 - phi0).min(1.0) {
        return Ok(None);
    }
    model.cache().flat.lock().expect("cache lock").insert(k, phi);
    Ok(Some(phi))
}

/// Speed `Λ_α(u0)` of the nonclassical connection, `λ♮(u0)` above the threshold.
pub fn lambda_alpha(model: &FluxModel, u0: f64, alpha: f64) -> Result<f64> {
    Ok(kinetic_function(model, u0, alpha)?.lam)
}

/// Shock set `S_α(u−)`.
pub fn shock_set(model: &FluxModel, u_minus: f64, alpha: f64) -> Result<ShockSet> {
    prepare(model, u_minus)?;
    check_alpha(alpha)?;
    if u_minus == 0.0 {
        return Ok(ShockSet {
            isolated: None,
            interval: Interval::closed(0.0, 0.0),
        });
    }
    let (set, flipped) = oriented(model, u_minus, |m, u| {
        if alpha == 0.0 {
            // pure dispersion: only the trivial jump and the zero-dissipation one
            return Ok(ShockSet {
                isolated: Some(phi_zero(m, u)?),
                interval: Interval::closed(u, u),
            });
        }
        let s = kinetic_positive(m, u, alpha)?;
        Ok(match s.regime {
            Regime::Nonclassical => ShockSet {
                isolated: Some(s.phi_flat),
                interval: Interval {
                    lo: s.phi_sharp,
                    hi: u,
                    lo_closed: false,
                    hi_closed: true,
                },
            },
            Regime::ClassicalThreshold => ShockSet {
                isolated: None,
                interval: Interval::closed(s.phi_flat, u),
            },
        })
    })?;
    Ok(if flipped { set.mirrored() } else { set })
}

/// Whether a classical traveling wave joins `u0` to the middle state `u1`
/// at speed `lam`.
pub fn classical_exists(model: &FluxModel, u0: f64, lam: f64, alpha: f64) -> Result<bool> {
    prepare(model, u0)?;
    check_alpha(alpha)?;
    if u0 == 0.0 {
        return Err(Error::InvalidArgument("classical waves need u0 ≠ 0".into()));
    }
    let (ok, _) = oriented(model, u0, |m, u| {
        let phi_nat = phi_natural(m, u)?;
        let (lam_nat, lam_max) = (m.df(phi_nat), m.df(u));
        let slack = 1e-12 * (lam_max - lam_nat);
        if lam < lam_nat - slack || lam > lam_max + slack {
            return Err(Error::SpeedOutOfRange { u0, lam });
        }
        let s = kinetic_positive(m, u, alpha)?;
        Ok(match s.regime {
            Regime::ClassicalThreshold => true,
            Regime::Nonclassical => lam > s.lam,
        })
    })?;
    Ok(ok)
}

/// Closed-form slope `κ` of `α♮(u0) ∼ κ u0` at the origin.
pub fn threshold_kappa(model: &FluxModel) -> Result<f64> {
    model.require_concave_convex()?;
    let (b, c1, c2, f3) = (model.b(0.0), model.c1(0.0), model.c2(0.0), model.d3f(0.0));
    Ok((c1 * c2).sqrt() * (3.0 * f3).sqrt() / (4.0 * b))
}

/// Analytic slope of the threshold at zero with sampled estimates at
/// `u0 = 1e-2` and `1e-3`.
pub fn threshold_slope_at_zero(model: &FluxModel) -> Result<ThresholdSlope> {
    let analytic = threshold_kappa(model)?;
    let estimates = [1e-2, 1e-3]
        .par_iter()
        .map(|&u| Ok((u, threshold_ratio(model, u)? / u)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdSlope { analytic, estimates })
}

/// `α♮` on the given states, with the fitted slope at the origin.
pub fn threshold_curve(model: &FluxModel, states: &[f64]) -> Result<ThresholdCurve> {
    let kappa = threshold_kappa(model)?;
    let samples = states
        .par_iter()
        .map(|&u| Ok((u, threshold_ratio(model, u)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve {
        fitted_slope: fitted_slope(&samples),
        samples,
        kappa,
    })
}

/// Least squares through the origin over the half of the points nearest zero.
pub fn fitted_slope(samples: &[(f64, f64)]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = samples.iter().copied().filter(|p| p.0 != 0.0).collect();
    if pts.len() < 2 {
        return None;
    }
    pts.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    pts.truncate(pts.len().div_ceil(2).max(2));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(sxy, sxx), &(x, y)| (sxy + x.abs() * y, sxx + x * x));
    Some(sxy / sxx)
}
