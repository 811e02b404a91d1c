use crate::error::{Error, Result};

/// Adaptive Simpson quadrature.
///
/// The absolute tolerance is tightened in proportion to the integrand's
/// magnitude when that magnitude is below one, so the same settings serve
/// problems near the origin where every quantity is tiny.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
        }
    }
}

const INITIAL_PANELS: usize = 8;

impl Quadrature {
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if a == b {
            return Ok(0.0);
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Quadrature { a, b });
        }
        let h = (b - a) / INITIAL_PANELS as f64;
        let nodes: Vec<f64> = (0..=2 * INITIAL_PANELS)
            .map(|i| if i == 2 * INITIAL_PANELS { b } else { a + 0.5 * h * i as f64 })
            .collect();
        let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature { a, b });
        }

        // magnitude of the integral of |f|, used to scale the tolerance
        let magnitude: f64 = (0..INITIAL_PANELS)
            .map(|p| {
                let (fa, fm, fb) = (values[2 * p], values[2 * p + 1], values[2 * p + 2]);
                h.abs() / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs())
            })
            .sum();
        if magnitude == 0.0 {
            return Ok(0.0);
        }
        let tol = self.abs_tol * magnitude.min(1.0);
        let panel_tol = tol / INITIAL_PANELS as f64;

        let mut total = 0.0;
        for p in 0..INITIAL_PANELS {
            let (x0, x2) = (nodes[2 * p], nodes[2 * p + 2]);
            let (f0, f1, f2) = (values[2 * p], values[2 * p + 1], values[2 * p + 2]);
            let whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
            total += self.refine(&f, x0, x2, f0, f1, f2, whole, panel_tol, self.max_depth)?;
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        if !flm.is_finite() || !frm.is_finite() {
            return Err(Error::Quadrature { a, b });
        }
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 || m == a || m == b {
            return Err(Error::Quadrature { a, b });
        }
        Ok(self.refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + self.refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = Quadrature::default();
        let v = q.integrate(|x| x * x * x - 2.0 * x, -1.0, 2.0).unwrap();
        assert!((v - (15.0 / 4.0 - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn smooth_transcendental() {
        let q = Quadrature::default();
        let v = q.integrate(f64::sin, 0.0, std::f64::consts::PI).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v = q.integrate(|x| 1.0 / (1.0 + x * x), -3.0, 3.0).unwrap();
        assert!((v - 2.0 * 3f64.atan()).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let q = Quadrature::default();
        assert_eq!(q.integrate(|x| x, 1.0, 1.0).unwrap(), 0.0);
        let fwd = q.integrate(f64::exp, 0.0, 1.0).unwrap();
        let back = q.integrate(f64::exp, 1.0, 0.0).unwrap();
        assert!((fwd + back).abs() < 1e-14);
    }

    #[test]
    fn tiny_integrands_keep_relative_accuracy() {
        let q = Quadrature::default();
        let s = 1e-4;
        let v = q.integrate(|x| (x / s).sin() * s.powi(3), 0.0, s).unwrap();
        let exact = s.powi(4) * (1.0 - 1f64.cos());
        assert!(((v - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn singular_integrand_fails() {
        let q = Quadrature::default();
        assert!(q.integrate(|x| 1.0 / x, 0.0, 1.0).is_err());
    }
}
