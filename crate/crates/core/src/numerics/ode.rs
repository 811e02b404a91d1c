//! Dormand-Prince 5(4) with Hairer's fourth-order continuous extension.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; the sign follows the integration direction.
    pub h_init: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: None,
            max_steps: 200_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment<const N: usize> {
    pub t_old: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t_new(&self) -> f64 {
        self.t_old + self.h
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 {
            (self.t_old, self.t_old + self.h)
        } else {
            (self.t_old + self.h, self.t_old)
        };
        t >= lo && t <= hi
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        let c = &self.coeffs;
        std::array::from_fn(|i| c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i]))))
    }
}

/// Final state of an integration, plus the dense segments when recorded.
#[derive(Debug, Clone)]
pub struct OdeRun<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub stopped_early: bool,
    pub segments: Vec<DenseSegment<N>>,
}

impl<const N: usize> OdeRun<N> {
    /// Evaluates the recorded solution at `t` (inside the integrated span).
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let forward = self.segments.first().map(|s| s.h > 0.0)?;
        let idx = self.segments.partition_point(|s| {
            if forward {
                s.t_new() < t
            } else {
                s.t_new() > t
            }
        });
        let seg = self.segments.get(idx.min(self.segments.len() - 1))?;
        seg.contains(t).then(|| seg.eval(t))
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`.
///
/// `observe` sees every accepted step (segment, new time, new state) and may
/// stop the integration by returning `ControlFlow::Break`.
pub fn dopri5<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    record: bool,
    mut observe: O,
) -> Result<OdeRun<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseSegment<N>, f64, &[f64; N]) -> ControlFlow<()>,
{
    let span = t_end - t0;
    let mut run = OdeRun {
        t: t0,
        y: y0,
        steps: 0,
        stopped_early: false,
        segments: Vec::new(),
    };
    if span == 0.0 {
        return Ok(run);
    }
    let dir = span.signum();
    let h_max = opts.h_max.unwrap_or(span.abs()).abs();
    let mut h = dir * opts.h_init.unwrap_or(span.abs() * 1e-3).abs().min(h_max);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration { t, reason: "non-finite derivative at start" });
    }
    let mut last_rejected = false;

    while run.steps < opts.max_steps {
        let remaining = t_end - t;
        if remaining * dir <= 0.0 {
            break;
        }
        let mut last = false;
        if (h.abs() >= remaining.abs()) || (remaining.abs() - h.abs()) < 1e-12 * remaining.abs() {
            h = remaining;
            last = true;
        }
        if h == 0.0 || h.abs() <= 16.0 * f64::EPSILON * t.abs() {
            return Err(Error::Integration { t, reason: "step size underflow" });
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y_new);

        let finite = [&k2, &k3, &k4, &k5, &k6, &k7]
            .iter()
            .all(|k| k.iter().all(|v| v.is_finite()))
            && y_new.iter().all(|v| v.is_finite());

        let err = if finite {
            let mut acc = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                acc += (e / sc).powi(2);
            }
            (acc / N as f64).sqrt()
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let seg = DenseSegment {
                t_old: t,
                h,
                coeffs: [
                    y,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                    std::array::from_fn(|i| {
                        h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                    }),
                ],
            };
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            run.steps += 1;
            if record {
                run.segments.push(seg);
            }
            let flow = observe(&seg, t, &y);
            run.t = t;
            run.y = y;
            if flow.is_break() {
                run.stopped_early = true;
                return Ok(run);
            }
            if last {
                return Ok(run);
            }
            let mut fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            h = dir * (h.abs() * fac).min(h_max);
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
            last_rejected = true;
        }
    }
    if run.t == t_end {
        Ok(run)
    } else {
        Err(Error::Integration { t, reason: "maximum number of steps exceeded" })
    }
}
