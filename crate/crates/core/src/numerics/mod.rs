//! Scalar numerical building blocks: adaptive Simpson quadrature, bracketed
//! root finding and an embedded Runge-Kutta 5(4) integrator with dense output.

pub mod ode;
pub mod quadrature;
pub mod roots;

pub use ode::{dopri5, DenseSegment, OdeOptions, OdeRun};
pub use quadrature::Quadrature;
pub use roots::{bracketed_root, golden_minimize, scan_sign_changes, RootOptions};
