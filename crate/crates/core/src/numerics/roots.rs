use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub x_abs: f64,
    pub x_rel: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            x_abs: 0.0,
            x_rel: 1e-12,
            max_iter: 200,
        }
    }
}

impl RootOptions {
    pub fn absolute(x_abs: f64) -> Self {
        Self {
            x_abs,
            x_rel: 1e-14,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` in `[a, b]`, which must bracket a sign change.
///
/// Regula falsi with the Illinois correction, falling back to bisection
/// whenever the secant candidate leaves the bracket or the bracket stops
/// shrinking by at least half every three iterations.
pub fn bracketed_root<F>(what: &'static str, mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    bracketed_root_from(what, f, (a, fa), (b, fb), opts)
}

/// Same as [`bracketed_root`] with the endpoint values already known.
pub fn bracketed_root_from<F>(
    what: &'static str,
    mut f: F,
    (mut a, mut fa): (f64, f64),
    (mut b, mut fb): (f64, f64),
    opts: RootOptions,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            what,
            lo: a.min(b),
            hi: a.max(b),
        });
    }

    let mut side = 0i8;
    let mut widths = [f64::INFINITY; 3];
    for iter in 0..opts.max_iter {
        let width = (b - a).abs();
        let tol = opts.x_abs + opts.x_rel * a.abs().max(b.abs());
        if width <= tol || width <= f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(0.5 * (a + b));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let force_bisect = iter >= 3 && width > 0.5 * widths[iter % 3];
        widths[iter % 3] = width;

        let secant = (a * fb - b * fa) / (fb - fa);
        let margin = 0.5 * tol;
        let x = if !force_bisect && secant.is_finite() && secant > lo + margin && secant < hi - margin {
            secant
        } else {
            0.5 * (a + b)
        };

        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::RootNotConverged { what, iterations: iter });
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::RootNotConverged {
        what,
        iterations: opts.max_iter,
    })
}

/// Cell `((x0, f(x0)), (x1, f(x1)))` reported by [`scan_sign_changes`].
pub type SignCell = ((f64, f64), (f64, f64));

/// Uniform scan of `[a, b]` with `n` cells; returns every cell whose end
/// values differ in sign (or touch zero), together with those values.
pub fn scan_sign_changes<F>(mut f: F, a: f64, b: f64, n: usize) -> Result<Vec<SignCell>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = n.max(1);
    let mut out = Vec::new();
    let mut prev = (a, f(a)?);
    for i in 1..=n {
        let x = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
        let cur = (x, f(x)?);
        let starts_at_root = i == 1 && prev.1 == 0.0;
        if starts_at_root || cur.1 == 0.0 || prev.1 * cur.1 < 0.0 {
            out.push((prev, cur));
        }
        prev = cur;
    }
    Ok(out)
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_minimize<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
