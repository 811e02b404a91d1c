//! Phase-plane analysis of the traveling-wave system
//! `c2 u' = v`, `c2 v' = −η α (b/c1) v + η (g(u) − g(u0)) c2/c1`.

mod branches;
mod profile;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::FluxModel;

pub use branches::{
    connection_gap, saddle_connection, v_minus_branch, v_plus_branch, TrajectoryCurve,
};
pub(crate) use branches::gap_through;
pub use profile::{dispersive_trajectory, profile_from_curve, Profile};

/// Sign `η` of the dispersion coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DispersionSign {
    Positive,
    Negative,
}

impl DispersionSign {
    pub fn eta(self) -> f64 {
        match self {
            DispersionSign::Positive => 1.0,
            DispersionSign::Negative => -1.0,
        }
    }
}

/// Roots of `μ² + η α b/(c1 c2) μ − η (f' − λ)/(c1 c2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EigenPair {
    Real { lower: f64, upper: f64 },
    Complex { re: f64, im: f64 },
}

impl EigenPair {
    pub fn is_real(&self) -> bool {
        matches!(self, EigenPair::Real { .. })
    }

    pub fn lower(&self) -> Option<f64> {
        match *self {
            EigenPair::Real { lower, .. } => Some(lower),
            EigenPair::Complex { .. } => None,
        }
    }

    pub fn upper(&self) -> Option<f64> {
        match *self {
            EigenPair::Real { upper, .. } => Some(upper),
            EigenPair::Complex { .. } => None,
        }
    }

    pub fn real_parts(&self) -> (f64, f64) {
        match *self {
            EigenPair::Real { lower, upper } => (lower, upper),
            EigenPair::Complex { re, .. } => (re, re),
        }
    }

    pub fn sum(&self) -> f64 {
        let (a, b) = self.real_parts();
        a + b
    }

    pub fn product(&self) -> f64 {
        match *self {
            EigenPair::Real { lower, upper } => lower * upper,
            EigenPair::Complex { re, im } => re * re + im * im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumNature {
    StableNode,
    StableSpiral,
    Saddle,
    UnstableNode,
    UnstableSpiral,
    /// Purely imaginary pair.
    Center,
    /// A zero eigenvalue.
    Degenerate,
}

pub fn eigenvalues(model: &FluxModel, u: f64, lam: f64, alpha: f64, eta: DispersionSign) -> Result<EigenPair> {
    model.check_state(u)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
    }
    let e = eta.eta();
    let (b, c1, c2) = (model.b(u), model.c1(u), model.c2(u));
    let cc = c1 * c2;
    let p = e * alpha * b / cc;
    let q = -e * (model.df(u) - lam) / cc;
    // sign of p² − 4q, computed without the common factor 1/(c1 c2)²
    let disc_num = alpha * alpha * b * b + 4.0 * e * cc * (model.df(u) - lam);
    if disc_num >= 0.0 {
        let root = (p * p - 4.0 * q).max(0.0).sqrt();
        let t = -0.5 * (p + if p >= 0.0 { root } else { -root });
        let (r1, r2) = if t == 0.0 { (0.0, 0.0) } else { (t, q / t) };
        Ok(EigenPair::Real {
            lower: r1.min(r2),
            upper: r1.max(r2),
        })
    } else {
        Ok(EigenPair::Complex {
            re: -0.5 * p,
            im: 0.5 * (4.0 * q - p * p).sqrt(),
        })
    }
}

/// Nature of the equilibrium `(u, 0)` of the system started from `u0`.
pub fn classify_equilibrium(
    model: &FluxModel,
    u0: f64,
    u: f64,
    lam: f64,
    alpha: f64,
    eta: DispersionSign,
) -> Result<EquilibriumNature> {
    model.check_state(u0)?;
    if u != u0 {
        let diff = model.chord(u0, u) - lam;
        let scale = model.chord(u0, u).abs() + lam.abs() + model.df(u0).abs() + model.df(u).abs();
        if diff.abs() > 1e-8 * scale {
            return Err(Error::NotEquilibrium {
                u0,
                u,
                lam,
                residual: diff * (u - u0),
            });
        }
    }
    let pair = eigenvalues(model, u, lam, alpha, eta)?;
    Ok(match pair {
        EigenPair::Real { lower, upper } => {
            if lower == 0.0 || upper == 0.0 {
                EquilibriumNature::Degenerate
            } else if lower < 0.0 && upper > 0.0 {
                EquilibriumNature::Saddle
            } else if upper < 0.0 {
                EquilibriumNature::StableNode
            } else {
                EquilibriumNature::UnstableNode
            }
        }
        EigenPair::Complex { re, .. } => {
            if re < 0.0 {
                EquilibriumNature::StableSpiral
            } else if re > 0.0 {
                EquilibriumNature::UnstableSpiral
            } else {
                EquilibriumNature::Center
            }
        }
    })
}
