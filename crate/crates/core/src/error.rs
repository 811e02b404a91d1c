use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while evaluating a model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state {value} lies outside the model domain [{min}, {max}]")]
    Domain { value: f64, min: f64, max: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change brackets a root of {what} on [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },

    #[error("root finding for {what} did not converge within {iterations} iterations")]
    RootNotConverged { what: &'static str, iterations: usize },

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("speed {lam} admits fewer than three distinct equilibria from u0 = {u0}")]
    SpeedOutOfRange { u0: f64, lam: f64 },

    #[error("state {u} is not an equilibrium for u0 = {u0} at speed {lam} (residual {residual:e})")]
    NotEquilibrium { u0: f64, u: f64, lam: f64, residual: f64 },

    #[error("ODE integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },

    #[error("branch reached v = 0 at u = {u} before the matching state {target}")]
    PrematureAxisCrossing { u: f64, target: f64 },

    #[error("right state {u2} lies outside the admissible band [{lo}, {hi}) for u0 = {u0}")]
    OutsideBand { u0: f64, u2: f64, lo: f64, hi: f64 },

    #[error("bracket expansion for the critical ratio exceeded alpha = {limit}")]
    BracketExpansion { limit: f64 },

    #[error("threshold extrapolation sequence is not monotone at u0 = {u0}")]
    NonMonotoneExtrapolation { u0: f64 },

    #[error("flux class cannot be certified on the domain: {0}")]
    FluxClass(String),

    #[error("no traveling wave connects {u_minus} to {u_plus}: {reason}")]
    NoConnection { u_minus: f64, u_plus: f64, reason: String },

    #[error("G is negative ({value:e}) at u = {u}")]
    NegativePotential { u: f64, value: f64 },

    #[error("curve blows up at u = {u} outside the truncation window")]
    ProfileBlowUp { u: f64 },
}
