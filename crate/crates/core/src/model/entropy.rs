use super::ops::big_g_through;
use super::FluxModel;
use crate::error::Result;
use crate::numerics::Quadrature;

/// Entropy `U` with `U(0) = U'(0) = 0`, `U'' = c2/c1`, and entropy flux `F`
/// with `F(0) = 0`, `F' = U' f'`.
#[derive(Debug, Clone)]
pub struct EntropyPair {
    model: FluxModel,
    /// `c2/c1` when it is constant.
    weight: Option<f64>,
}

impl EntropyPair {
    pub fn new(model: &FluxModel) -> Self {
        let [_, c1, c2] = model.coefficients();
        let weight = c1.constant_value().zip(c2.constant_value()).map(|(a, b)| b / a);
        Self {
            model: model.clone(),
            weight,
        }
    }

    pub fn entropy(&self, u: f64) -> Result<f64> {
        if let Some(r) = self.weight {
            return Ok(0.5 * r * u * u);
        }
        let m = &self.model;
        Quadrature::default().integrate(|z| (u - z) * m.entropy_weight(z), 0.0, u)
    }

    pub fn entropy_derivative(&self, u: f64) -> Result<f64> {
        if let Some(r) = self.weight {
            return Ok(r * u);
        }
        let m = &self.model;
        Quadrature::default().integrate(|z| m.entropy_weight(z), 0.0, u)
    }

    pub fn entropy_second_derivative(&self, u: f64) -> f64 {
        self.model.entropy_weight(u)
    }

    /// `F(u) = ∫_0^u U''(s) (f(u) − f(s)) ds`, which is `∫_0^u U' f'` after an
    /// integration by parts.
    pub fn entropy_flux(&self, u: f64) -> Result<f64> {
        let m = &self.model;
        let fu = m.f(u);
        Quadrature::default().integrate(|s| m.entropy_weight(s) * (fu - m.f(s)), 0.0, u)
    }
}

/// Entropy dissipation `E(u−, u+)` of the jump, computed as `−G(u+; u−, ā(u−, u+))`.
pub fn entropy_dissipation(model: &FluxModel, u_minus: f64, u_plus: f64) -> Result<f64> {
    model.check_state(u_minus)?;
    model.check_state(u_plus)?;
    if u_minus == u_plus {
        return Ok(0.0);
    }
    Ok(-big_g_through(model, u_plus, u_minus, u_plus)?)
}

/// `E(u−, u+) = −ā (U(u+) − U(u−)) + F(u+) − F(u−)` from the entropy pair.
pub fn entropy_dissipation_jump(model: &FluxModel, u_minus: f64, u_plus: f64) -> Result<f64> {
    model.check_state(u_minus)?;
    model.check_state(u_plus)?;
    let pair = EntropyPair::new(model);
    let a = model.chord(u_minus, u_plus);
    Ok(-a * (pair.entropy(u_plus)? - pair.entropy(u_minus)?) + pair.entropy_flux(u_plus)? - pair.entropy_flux(u_minus)?)
}
