//! Closed forms for the cubic flux `f = K u³` with dispersion scale `C`.
//!
//! Everything except [`cubic_threshold`] and [`CubicParams`] assumes `K = C = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinetics::{Interval, ShockSet};
use crate::numerics::Quadrature;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicParams {
    pub k: f64,
    pub c: f64,
    /// Left state at which the ratio `α` reaches the threshold.
    pub alpha_tilde: f64,
}

impl CubicParams {
    pub fn new(k: f64, c: f64, alpha: f64) -> Result<Self> {
        if !(k > 0.0 && c > 0.0) {
            return Err(Error::InvalidModel(format!("K = {k} and C = {c} must be positive")));
        }
        if !(alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
        }
        Ok(Self {
            k,
            c,
            alpha_tilde: alpha_tilde(alpha) / (k * c).sqrt(),
        })
    }

    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(1.0, 1.0, alpha)
    }
}

/// `α̃ = 2√2 α / 3`.
pub fn alpha_tilde(alpha: f64) -> f64 {
    2.0 * SQRT2 * alpha / 3.0
}

pub fn cubic_kinetic(u_minus: f64, alpha: f64) -> f64 {
    let at = alpha_tilde(alpha);
    if u_minus >= at {
        -u_minus + at / 2.0
    } else if u_minus <= -at {
        -u_minus - at / 2.0
    } else {
        -u_minus / 2.0
    }
}

/// Shock set with the endpoint conventions of the closed form. In the middle
/// branch the interval runs between `−u−/2` (included) and `u−` (excluded)
/// whichever is larger.
pub fn cubic_shock_set(u_minus: f64, alpha: f64) -> ShockSet {
    let at = alpha_tilde(alpha);
    if u_minus >= at {
        ShockSet {
            isolated: Some(-u_minus + at / 2.0),
            interval: Interval {
                lo: -at / 2.0,
                hi: u_minus,
                lo_closed: true,
                hi_closed: false,
            },
        }
    } else if u_minus <= -at {
        ShockSet {
            isolated: Some(-u_minus - at / 2.0),
            interval: Interval {
                lo: u_minus,
                hi: at / 2.0,
                lo_closed: false,
                hi_closed: true,
            },
        }
    } else {
        let half = -u_minus / 2.0;
        let interval = if u_minus >= 0.0 {
            Interval {
                lo: half,
                hi: u_minus,
                lo_closed: true,
                hi_closed: false,
            }
        } else {
            Interval {
                lo: u_minus,
                hi: half,
                lo_closed: false,
                hi_closed: true,
            }
        };
        ShockSet { isolated: None, interval }
    }
}

/// `A(u0, u2) = 3 (u0 + u2) / √2` for `u2 ∈ [−u0, −u0/2)`.
pub fn cubic_critical_ratio(u0: f64, u2: f64) -> Result<f64> {
    let (lo, hi) = if u0 > 0.0 { (-u0, -u0 / 2.0) } else { (-u0 / 2.0, -u0) };
    let inside = if u0 > 0.0 { u2 >= lo && u2 < hi } else { u2 > lo && u2 <= hi };
    if u0 == 0.0 || !inside {
        return Err(Error::OutsideBand { u0, u2, lo, hi });
    }
    Ok((3.0 / SQRT2 * (u0 + u2)).abs())
}

/// `α♮(u0) = 3 |u0| √(KC) / (2√2)`.
pub fn cubic_threshold(u0: f64, params: &CubicParams) -> f64 {
    3.0 * u0.abs() / (2.0 * SQRT2) * (params.k * params.c).sqrt()
}

fn require_nonclassical(u_minus: f64, alpha: f64) -> Result<()> {
    if u_minus > alpha_tilde(alpha) {
        Ok(())
    } else {
        Err(Error::NoConnection {
            u_minus,
            u_plus: cubic_kinetic(u_minus, alpha),
            reason: format!("left state is not above the threshold state {}", alpha_tilde(alpha)),
        })
    }
}

/// Nonclassical wave `u(y) = m − (u− − m) tanh((u− − m) y/√2)` with `m = α/(3√2)`.
pub fn cubic_profile(y: f64, u_minus: f64, alpha: f64) -> Result<f64> {
    require_nonclassical(u_minus, alpha)?;
    let m = alpha / (3.0 * SQRT2);
    let h = u_minus - m;
    Ok(if y == f64::NEG_INFINITY {
        u_minus
    } else if y == f64::INFINITY {
        m - h
    } else {
        m - h * (h * y / SQRT2).tanh()
    })
}

/// `v = (u − u2)(u − u0)/√2`.
pub fn cubic_parabola_v(u: f64, u0: f64, u2: f64) -> f64 {
    (u - u2) * (u - u0) / SQRT2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CubicEntropy {
    /// `U = u²/2`, `F = 3u⁴/4`.
    Quadratic,
    /// `U = |u − k|`, `F = sgn(u − k)(u³ − k³)`.
    Kruzkov { k: f64 },
}

impl CubicEntropy {
    fn pair(&self, u: f64) -> (f64, f64) {
        match *self {
            CubicEntropy::Quadratic => (0.5 * u * u, 0.75 * u.powi(4)),
            CubicEntropy::Kruzkov { k } => {
                let s = if u > k {
                    1.0
                } else if u < k {
                    -1.0
                } else {
                    0.0
                };
                ((u - k).abs(), s * (u.powi(3) - k.powi(3)))
            }
        }
    }
}

/// Dissipation of the nonclassical jump from `u−` to `φ♭_α(u−)`.
pub fn cubic_entropy_dissipation(u_minus: f64, alpha: f64, entropy: CubicEntropy) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
    }
    if u_minus.abs() <= alpha_tilde(alpha) {
        return Err(Error::NoConnection {
            u_minus,
            u_plus: cubic_kinetic(u_minus, alpha),
            reason: "classical regime has no nonclassical jump".into(),
        });
    }
    let p = cubic_kinetic(u_minus, alpha);
    let (ua, fa) = entropy.pair(u_minus);
    let (up, fp) = entropy.pair(p);
    Ok(-(p * p + p * u_minus + u_minus * u_minus) * (up - ua) + fp - fa)
}

/// Quadratic-entropy dissipation as `−α ∫ u_y² dy` along the explicit wave,
/// computed as `−α ∫ |v| du` over the parabola.
pub fn cubic_quadratic_dissipation_integral(u_minus: f64, alpha: f64) -> Result<f64> {
    require_nonclassical(u_minus, alpha)?;
    let u2 = cubic_kinetic(u_minus, alpha);
    let q = Quadrature::default();
    let area = q.integrate(|u| -cubic_parabola_v(u, u_minus, u2), u2, u_minus)?;
    Ok(-alpha * area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinetic_branches() {
        assert!((cubic_kinetic(1.0, 0.6) + 0.717_157_3).abs() < 1e-7);
        assert_eq!(cubic_kinetic(0.3, 0.6), -0.15);
        assert!((cubic_kinetic(-1.0, 0.6) - 0.717_157_3).abs() < 1e-7);
        for u in [-2.0, -0.5, 0.0, 0.1, 0.9, 3.0] {
            assert_eq!(cubic_kinetic(-u, 0.6), -cubic_kinetic(u, 0.6));
            let k = cubic_kinetic(u, 0.6);
            let (a, b) = (-u / 2.0, -u);
            assert!(k >= a.min(b) && k <= a.max(b));
        }
        // u ≥ α̃: φ♭ = −u + √2 α/3
        for u in [0.6, 1.0, 5.0] {
            assert!((cubic_kinetic(u, 0.6) - (-u + SQRT2 * 0.6 / 3.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn shock_sets() {
        let s = cubic_shock_set(1.0, 0.6);
        assert!((s.isolated.unwrap() + 0.717_157_3).abs() < 1e-7);
        assert!((s.interval.lo + 0.282_842_7).abs() < 1e-7);
        assert!(s.interval.lo_closed && !s.interval.hi_closed && s.interval.hi == 1.0);

        let s = cubic_shock_set(0.3, 0.6);
        assert!(s.isolated.is_none());
        assert_eq!((s.interval.lo, s.interval.hi), (-0.15, 0.3));
        assert!(s.contains(-0.15) && !s.contains(0.3));

        let s = cubic_shock_set(-1.0, 0.6);
        assert!((s.isolated.unwrap() - 0.717_157_3).abs() < 1e-7);
        assert!(!s.interval.lo_closed && s.interval.hi_closed);
        assert!((s.interval.hi - 0.282_842_7).abs() < 1e-7);

        let s = cubic_shock_set(-0.2, 0.6);
        assert_eq!((s.interval.lo, s.interval.hi), (-0.2, 0.1));
        assert!(s.contains(0.1) && !s.contains(-0.2));
    }

    #[test]
    fn critical_ratio_formula() {
        assert!((cubic_critical_ratio(1.0, -0.8).unwrap() - 0.424_264_1).abs() < 1e-7);
        assert!((cubic_critical_ratio(1.0, -0.999).unwrap() - 0.002_121_3).abs() < 1e-7);
        let near = cubic_critical_ratio(1.0, -0.5 - 1e-9).unwrap();
        assert!(near < 1.060_660_2 && near > 1.060_660_1);
        assert!(cubic_critical_ratio(1.0, -0.5).is_err());
        assert!(cubic_critical_ratio(1.0, -1.1).is_err());
        assert_eq!(cubic_critical_ratio(1.0, -1.0).unwrap(), 0.0);
        assert!((cubic_critical_ratio(-1.0, 0.8).unwrap() - 0.424_264_1).abs() < 1e-7);
    }

    #[test]
    fn threshold_formula() {
        let unit = CubicParams::unit(0.6).unwrap();
        assert!((cubic_threshold(1.0, &unit) - 1.060_660_2).abs() < 1e-7);
        let p = CubicParams::new(2.0, 2.0, 0.6).unwrap();
        assert!((cubic_threshold(1.0, &p) - 2.121_320_3).abs() < 1e-7);
        assert_eq!(cubic_threshold(0.0, &p), 0.0);
        // the threshold state for α is α̃
        assert!((cubic_threshold(p.alpha_tilde, &p) - 0.6).abs() < 1e-15);
        assert!(CubicParams::new(0.0, 1.0, 0.6).is_err());
    }

    #[test]
    fn profile_and_parabola() {
        assert!((cubic_profile(0.0, 1.0, 0.6).unwrap() - 0.141_421_4).abs() < 1e-7);
        assert_eq!(cubic_profile(f64::NEG_INFINITY, 1.0, 0.6).unwrap(), 1.0);
        assert!((cubic_profile(f64::INFINITY, 1.0, 0.6).unwrap() + 0.717_157_3).abs() < 1e-7);
        assert!(cubic_profile(0.0, 0.5, 0.6).is_err());

        let (u0, u2) = (1.0, cubic_kinetic(1.0, 0.6));
        assert_eq!(cubic_parabola_v(u0, u0, u2), 0.0);
        assert_eq!(cubic_parabola_v(u2, u0, u2), 0.0);
        let d: f64 = 0.858_578_6;
        assert!((cubic_parabola_v(0.141_421_4, u0, u2) + d * d / SQRT2).abs() < 1e-7);
        let mid = 0.5 * (u0 + u2);
        for d in [1e-3, 0.1, 0.5] {
            assert!(cubic_parabola_v(mid + d, u0, u2) > cubic_parabola_v(mid, u0, u2));
            assert!(cubic_parabola_v(mid - d, u0, u2) > cubic_parabola_v(mid, u0, u2));
        }
        // u_y from a centered difference of the profile equals v(u)
        let h = 1e-4;
        for y in [-4.0, -1.0, 0.0, 0.7, 3.0] {
            let u = cubic_profile(y, 1.0, 0.6).unwrap();
            let du = (cubic_profile(y + h, 1.0, 0.6).unwrap() - cubic_profile(y - h, 1.0, 0.6).unwrap()) / (2.0 * h);
            assert!((du - cubic_parabola_v(u, u0, u2)).abs() < 1e-8);
        }
    }

    #[test]
    fn dissipation_values() {
        let e = cubic_entropy_dissipation(1.0, 0.6, CubicEntropy::Quadratic).unwrap();
        // by hand: φ = −0.7171573, (φ² + φ + 1)(φ²/2 − 1/2) vs 3(φ⁴ − 1)/4
        let p: f64 = -1.0 + SQRT2 * 0.2;
        let expect = -(p * p + p + 1.0) * (0.5 * p * p - 0.5) + 0.75 * (p.powi(4) - 1.0);
        assert!((e - expect).abs() < 1e-14);
        assert!((e + 0.358_02).abs() < 1e-4);

        let k = cubic_entropy_dissipation(1.0, 0.6, CubicEntropy::Kruzkov { k: -0.5 }).unwrap();
        let expect = 0.75 * (1.0 - alpha_tilde(0.6)).powi(2);
        assert!((k - expect).abs() < 1e-12);
        assert!((k - 0.141_471_5).abs() < 1e-6);
        for dk in [-1e-3, -5e-4, 5e-4, 1e-3] {
            let v = cubic_entropy_dissipation(1.0, 0.6, CubicEntropy::Kruzkov { k: -0.5 + dk }).unwrap();
            assert!(v > 0.0);
        }
        assert!(cubic_entropy_dissipation(0.3, 0.6, CubicEntropy::Quadratic).is_err());
        let neg = cubic_entropy_dissipation(-1.0, 0.6, CubicEntropy::Quadratic).unwrap();
        assert!((neg - e).abs() < 1e-14);
    }

    #[test]
    fn integral_form_over_tanh_profile() {
        let e = cubic_entropy_dissipation(1.0, 0.6, CubicEntropy::Quadratic).unwrap();
        let i = cubic_quadratic_dissipation_integral(1.0, 0.6).unwrap();
        assert!((e - i).abs() < 1e-9, "{e} vs {i}");

        // −α ∫ u_y² dy by composite Simpson in y on the explicit wave
        let (n, l) = (20_000, 60.0);
        let h = 2.0 * l / n as f64;
        let uy = |y: f64| {
            let d = 1e-5;
            (cubic_profile(y + d, 1.0, 0.6).unwrap() - cubic_profile(y - d, 1.0, 0.6).unwrap()) / (2.0 * d)
        };
        let sum: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * uy(-l + h * i as f64).powi(2)
            })
            .sum();
        let by_y = -0.6 * sum * h / 3.0;
        assert!((by_y - e).abs() < 1e-6, "{by_y} vs {e}");
    }
}
