//! Kinetic functions, critical ratios and traveling waves for scalar
//! conservation laws with diffusion and dispersion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cubic_oracle;
pub mod diffusion_limit;
pub mod error;
pub mod kinetics;
pub mod model;
pub mod numerics;
pub mod output;
pub mod phaseplane;
pub mod poly;

pub use error::{Error, Result};
pub use model::{FluxModel, FluxShape, Settings};
