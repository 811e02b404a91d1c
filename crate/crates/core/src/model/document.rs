//! JSON model documents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FluxModel, DEFAULT_DOMAIN};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxSpec {
    Cubic,
    ScaledCubic {
        #[serde(rename = "K", default = "one")]
        k: f64,
        #[serde(rename = "C", default = "one")]
        c: f64,
    },
    Polynomial {
        coeffs: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn unit() -> Vec<f64> {
    vec![1.0]
}

fn default_domain() -> [f64; 2] {
    [DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1]
}

/// `{"flux": {...}, "b": [...], "c1": [...], "c2": [...], "domain": [lo, hi]}`,
/// coefficient arrays in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub flux: FluxSpec,
    #[serde(default = "unit")]
    pub b: Vec<f64>,
    #[serde(default = "unit")]
    pub c1: Vec<f64>,
    #[serde(default = "unit")]
    pub c2: Vec<f64>,
    #[serde(default = "default_domain")]
    pub domain: [f64; 2],
}

impl ModelDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("model document: {e}")))
    }

    pub fn build(&self) -> Result<FluxModel> {
        let poly = |name: &str, c: &[f64]| {
            if c.is_empty() || c.iter().any(|x| !x.is_finite()) {
                Err(Error::InvalidModel(format!("{name} needs finite coefficients")))
            } else {
                Ok(Polynomial::new(c.to_vec()))
            }
        };
        let (flux, c1_scale) = match &self.flux {
            FluxSpec::Cubic => (Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]), 1.0),
            FluxSpec::ScaledCubic { k, c } => {
                if !(*k > 0.0 && *c > 0.0) {
                    return Err(Error::InvalidModel(format!("K = {k} and C = {c} must be positive")));
                }
                (Polynomial::new(vec![0.0, 0.0, 0.0, *k]), *c)
            }
            FluxSpec::Polynomial { coeffs } => (poly("flux", coeffs)?, 1.0),
        };
        FluxModel::polynomial(
            flux,
            poly("b", &self.b)?,
            poly("c1", &self.c1)?.scaled(c1_scale),
            poly("c2", &self.c2)?,
            (self.domain[0], self.domain[1]),
        )
    }
}

impl FluxModel {
    pub fn from_json_str(text: &str) -> Result<Self> {
        ModelDocument::parse(text)?.build()
    }

    pub fn from_json_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidModel(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }
}
