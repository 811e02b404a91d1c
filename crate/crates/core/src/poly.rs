//! Dense real polynomials with exact divided differences.

use serde::{Deserialize, Serialize};

/// Polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.is_constant() {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `x ↦ p(-x)`.
    pub fn mirrored(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    /// First divided difference `p[a, b]`, exact for coincident points.
    pub fn divided_difference(&self, a: f64, b: f64) -> f64 {
        // p[a,b] = sum_k c_k h_{k-1}(a,b), h_n the complete homogeneous sum
        let mut h_a = 1.0;
        let mut h_ab = 1.0;
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            if k > 1 {
                h_a *= a;
                h_ab = b * h_ab + h_a;
            }
            acc += c * h_ab;
        }
        acc
    }

    /// Second divided difference `p[a, b, c]`, exact for coincident points.
    pub fn divided_difference2(&self, a: f64, b: f64, c: f64) -> f64 {
        let mut h_a = 1.0;
        let mut h_ab = 1.0;
        let mut h_abc = 1.0;
        let mut acc = 0.0;
        for (k, &coef) in self.coeffs.iter().enumerate().skip(2) {
            if k > 2 {
                h_a *= a;
                h_ab = b * h_ab + h_a;
                h_abc = c * h_abc + h_ab;
            }
            acc += coef * h_abc;
        }
        acc
    }
}
