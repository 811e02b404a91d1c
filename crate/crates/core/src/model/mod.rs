//! Flux and coefficient data for `u_t + f(u)_x = ε (b u_x)_x + δ (c1 (c2 u_x)_x)_x`.

mod document;
mod entropy;
mod ops;

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::kinetics::KineticCache;
use crate::poly::Polynomial;

pub use document::{FluxSpec, ModelDocument};
pub use entropy::{entropy_dissipation, entropy_dissipation_jump, EntropyPair};
pub use ops::{
    big_g, chord_speed, equilibria, g_value, lambda_natural, lambda_zero, phi_natural, phi_natural_inverse,
    phi_zero, Equilibria,
};
pub(crate) use ops::g_through;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A positive coefficient function (b, c1 or c2).
#[derive(Clone)]
pub enum Coefficient {
    Poly(Polynomial),
    Custom(ScalarFn),
}

impl Coefficient {
    pub fn constant(c: f64) -> Self {
        Coefficient::Poly(Polynomial::constant(c))
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Coefficient::Poly(p) => p.eval(u),
            Coefficient::Custom(f) => f(u),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Coefficient::Poly(p) if p.is_constant() => Some(p.coeffs()[0]),
            _ => None,
        }
    }

    fn mirrored(&self) -> Self {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.mirrored()),
            Coefficient::Custom(f) => {
                let f = f.clone();
                Coefficient::Custom(Arc::new(move |u| f(-u)))
            }
        }
    }
}

impl From<Polynomial> for Coefficient {
    fn from(p: Polynomial) -> Self {
        Coefficient::Poly(p)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Poly(p) => write!(f, "Poly({:?})", p.coeffs()),
            Coefficient::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone)]
enum Flux {
    Poly { f: Polynomial, d: [Polynomial; 3] },
    Custom { f: [ScalarFn; 4] },
}

impl Flux {
    fn poly(f: Polynomial) -> Self {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        Flux::Poly { f, d: [d1, d2, d3] }
    }

    #[inline]
    fn eval(&self, k: usize, u: f64) -> f64 {
        match self {
            Flux::Poly { f, d } => {
                if k == 0 {
                    f.eval(u)
                } else {
                    d[k - 1].eval(u)
                }
            }
            Flux::Custom { f } => f[k](u),
        }
    }

    /// `u ↦ -f(-u)` with matching derivatives.
    fn mirrored(&self) -> Self {
        match self {
            Flux::Poly { f, .. } => Flux::poly(f.mirrored().scaled(-1.0)),
            Flux::Custom { f } => {
                let [f0, f1, f2, f3] = f.clone();
                Flux::Custom {
                    f: [
                        Arc::new(move |u| -f0(-u)),
                        Arc::new(move |u| f1(-u)),
                        Arc::new(move |u| -f2(-u)),
                        Arc::new(move |u| f3(-u)),
                    ],
                }
            }
        }
    }
}

/// Convexity class of the flux on the working domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxShape {
    /// `u f''(u) > 0` away from zero and `f'''(0) > 0`.
    ConcaveConvex,
    ConvexConcave,
    Convex,
    Concave,
    Other,
}

/// Numerical settings shared by the shooting and root-finding layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub ode_rtol: f64,
    /// Absolute ODE tolerance relative to the natural scale of `v`.
    pub ode_atol: f64,
    /// Launch offset from a saddle as a fraction of the branch length.
    pub launch_offset: f64,
    /// Tolerance on roots in `α`, relative to `min(1, u0 - u2)`.
    pub alpha_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            launch_offset: 1e-6,
            alpha_tol: 1e-8,
        }
    }
}

const SAMPLE_POINTS: usize = 1000;
pub const DEFAULT_DOMAIN: (f64, f64) = (-10.0, 10.0);

/// Flux with derivatives, diffusion `b` and dispersion `c1`, `c2` on a
/// working interval `[u_min, u_max]` containing zero.
#[derive(Clone)]
pub struct FluxModel {
    flux: Flux,
    b: Coefficient,
    c1: Coefficient,
    c2: Coefficient,
    domain: (f64, f64),
    shape: FluxShape,
    settings: Settings,
    cache: Arc<KineticCache>,
    mirror: Arc<OnceLock<FluxModel>>,
}

impl fmt::Debug for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flux = match &self.flux {
            Flux::Poly { f, .. } => format!("Poly({:?})", f.coeffs()),
            Flux::Custom { .. } => "Custom(..)".to_string(),
        };
        f.debug_struct("FluxModel")
            .field("flux", &flux)
            .field("b", &self.b)
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("domain", &self.domain)
            .field("shape", &self.shape)
            .finish()
    }
}

impl FluxModel {
    fn build(flux: Flux, b: Coefficient, c1: Coefficient, c2: Coefficient, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < 0.0 && hi > 0.0) {
            return Err(Error::InvalidModel(format!(
                "domain [{lo}, {hi}] must be finite and contain 0 in its interior"
            )));
        }
        let mut model = Self {
            flux,
            b,
            c1,
            c2,
            domain,
            shape: FluxShape::Other,
            settings: Settings::default(),
            cache: Arc::default(),
            mirror: Arc::default(),
        };
        model.check_coefficients()?;
        if matches!(model.flux, Flux::Custom { .. }) {
            model.check_derivatives()?;
        }
        model.shape = model.classify_shape();
        Ok(model)
    }

    /// General polynomial flux with polynomial coefficients.
    pub fn polynomial(
        flux: Polynomial,
        b: Polynomial,
        c1: Polynomial,
        c2: Polynomial,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::build(Flux::poly(flux), b.into(), c1.into(), c2.into(), domain)
    }

    /// `f = u³`, `b = c1 = c2 = 1`.
    pub fn cubic() -> Self {
        Self::scaled_cubic(1.0, 1.0).expect("unit cubic is valid")
    }

    /// `f = K u³` with dispersion scale `C` applied to `c1`.
    pub fn scaled_cubic(k: f64, c: f64) -> Result<Self> {
        if !(k > 0.0 && c > 0.0) {
            return Err(Error::InvalidModel(format!("K = {k} and C = {c} must be positive")));
        }
        Self::polynomial(
            Polynomial::new(vec![0.0, 0.0, 0.0, k]),
            Polynomial::constant(1.0),
            Polynomial::constant(c),
            Polynomial::constant(1.0),
            DEFAULT_DOMAIN,
        )
    }

    /// `f = u³ + u` with unit coefficients.
    pub fn cubic_plus_linear() -> Self {
        Self::polynomial(
            Polynomial::new(vec![0.0, 1.0, 0.0, 1.0]),
            Polynomial::constant(1.0),
            Polynomial::constant(1.0),
            Polynomial::constant(1.0),
            DEFAULT_DOMAIN,
        )
        .expect("u^3 + u is valid")
    }

    /// Flux given as closures for `f, f', f'', f'''`.
    pub fn from_fns(
        f: [ScalarFn; 4],
        b: Coefficient,
        c1: Coefficient,
        c2: Coefficient,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::build(Flux::Custom { f }, b, c1, c2, domain)
    }

    /// Same flux with new coefficients.
    pub fn with_coefficients(&self, b: Coefficient, c1: Coefficient, c2: Coefficient) -> Result<Self> {
        let mut m = Self::build(self.flux.clone(), b, c1, c2, self.domain)?;
        m.settings = self.settings;
        Ok(m)
    }

    pub fn with_domain(&self, domain: (f64, f64)) -> Result<Self> {
        let mut m = Self::build(self.flux.clone(), self.b.clone(), self.c1.clone(), self.c2.clone(), domain)?;
        m.settings = self.settings;
        Ok(m)
    }

    pub fn with_settings(&self, settings: Settings) -> Self {
        let mut m = self.clone();
        m.settings = settings;
        m.cache = Arc::default();
        m.mirror = Arc::default();
        m
    }

    /// The model seen through `u → -u`: `f̃(u) = -f(-u)`, coefficients `c̃(u) = c(-u)`.
    pub fn mirrored(&self) -> &FluxModel {
        self.mirror.get_or_init(|| {
            let (lo, hi) = self.domain;
            let shape = match self.shape {
                FluxShape::Convex => FluxShape::Concave,
                FluxShape::Concave => FluxShape::Convex,
                s => s,
            };
            FluxModel {
                flux: self.flux.mirrored(),
                b: self.b.mirrored(),
                c1: self.c1.mirrored(),
                c2: self.c2.mirrored(),
                domain: (-hi, -lo),
                shape,
                settings: self.settings,
                cache: Arc::default(),
                mirror: Arc::default(),
            }
        })
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub(crate) fn cache(&self) -> &KineticCache {
        &self.cache
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn shape(&self) -> FluxShape {
        self.shape
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.flux, Flux::Poly { .. })
    }

    /// Flux polynomial coefficients when the flux is polynomial.
    pub fn flux_coefficients(&self) -> Option<&[f64]> {
        match &self.flux {
            Flux::Poly { f, .. } => Some(f.coeffs()),
            Flux::Custom { .. } => None,
        }
    }

    pub fn coefficients(&self) -> [&Coefficient; 3] {
        [&self.b, &self.c1, &self.c2]
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        self.flux.eval(0, u)
    }
    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        self.flux.eval(1, u)
    }
    #[inline]
    pub fn d2f(&self, u: f64) -> f64 {
        self.flux.eval(2, u)
    }
    #[inline]
    pub fn d3f(&self, u: f64) -> f64 {
        self.flux.eval(3, u)
    }
    #[inline]
    pub fn b(&self, u: f64) -> f64 {
        self.b.eval(u)
    }
    #[inline]
    pub fn c1(&self, u: f64) -> f64 {
        self.c1.eval(u)
    }
    #[inline]
    pub fn c2(&self, u: f64) -> f64 {
        self.c2.eval(u)
    }
    /// `U''(u) = c2(u) / c1(u)`.
    #[inline]
    pub fn entropy_weight(&self, u: f64) -> f64 {
        self.c2(u) / self.c1(u)
    }

    /// `f[a, b]`; the derivative when the points coincide.
    pub fn chord(&self, a: f64, b: f64) -> f64 {
        match &self.flux {
            Flux::Poly { f, .. } => f.divided_difference(a, b),
            Flux::Custom { .. } => {
                let scale = a.abs().max(b.abs()).max(1e-300);
                if (a - b).abs() <= 1e-7 * scale {
                    self.df(0.5 * (a + b))
                } else {
                    (self.f(b) - self.f(a)) / (b - a)
                }
            }
        }
    }

    /// `f[a, b, c]`; limits are taken where points coincide.
    pub fn chord2(&self, a: f64, b: f64, c: f64) -> f64 {
        match &self.flux {
            Flux::Poly { f, .. } => f.divided_difference2(a, b, c),
            Flux::Custom { .. } => {
                let mut p = [a, b, c];
                p.sort_by(f64::total_cmp);
                let [x, y, z] = p;
                let scale = x.abs().max(z.abs()).max(1e-300);
                let close = |s: f64, t: f64| (s - t).abs() <= 1e-5 * scale;
                if close(x, z) {
                    0.5 * self.d2f(y)
                } else if close(x, y) {
                    (self.chord(x, z) - self.df(0.5 * (x + y))) / (z - x)
                } else if close(y, z) {
                    (self.df(0.5 * (y + z)) - self.chord(x, z)) / (z - x)
                } else {
                    (self.chord(y, z) - self.chord(x, y)) / (z - x)
                }
            }
        }
    }

    pub fn check_state(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if u.is_finite() && u >= lo && u <= hi {
            Ok(())
        } else {
            Err(Error::Domain { value: u, min: lo, max: hi })
        }
    }

    pub fn require_concave_convex(&self) -> Result<()> {
        if self.shape == FluxShape::ConcaveConvex {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!(
                "flux must be concave-convex around 0 (found {:?})",
                self.shape
            )))
        }
    }

    fn sample_points(&self) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = self.domain;
        (0..=SAMPLE_POINTS).map(move |i| lo + (hi - lo) * i as f64 / SAMPLE_POINTS as f64)
    }

    fn check_coefficients(&self) -> Result<()> {
        for (name, c) in [("b", &self.b), ("c1", &self.c1), ("c2", &self.c2)] {
            for u in self.sample_points() {
                let v = c.eval(u);
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidModel(format!("{name}({u}) = {v} is not positive")));
                }
            }
        }
        Ok(())
    }

    fn check_derivatives(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        let h = 2e-6 * (hi - lo);
        for k in 1..=3 {
            let samples: Vec<(f64, f64, f64)> = (1..64)
                .map(|i| lo + h + (hi - lo - 2.0 * h) * i as f64 / 64.0)
                .map(|u| {
                    let fd = (self.flux.eval(k - 1, u + h) - self.flux.eval(k - 1, u - h)) / (2.0 * h);
                    (u, self.flux.eval(k, u), fd)
                })
                .collect();
            let typical = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
            for (u, exact, fd) in samples {
                if (exact - fd).abs() > 1e-5 * exact.abs().max(1e-3 * typical) {
                    return Err(Error::InvalidModel(format!(
                        "derivative {k} of the flux disagrees with finite differences at u = {u}: {exact} vs {fd}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn classify_shape(&self) -> FluxShape {
        let mut neg_left = true;
        let mut pos_right = true;
        let mut pos_left = true;
        let mut neg_right = true;
        let mut nonneg = true;
        let mut nonpos = true;
        for u in self.sample_points() {
            let s = self.d2f(u);
            nonneg &= s >= 0.0;
            nonpos &= s <= 0.0;
            if u < 0.0 {
                neg_left &= s < 0.0;
                pos_left &= s > 0.0;
            } else if u > 0.0 {
                pos_right &= s > 0.0;
                neg_right &= s < 0.0;
            }
        }
        if neg_left && pos_right && self.d3f(0.0) > 0.0 {
            FluxShape::ConcaveConvex
        } else if pos_left && neg_right && self.d3f(0.0) < 0.0 {
            FluxShape::ConvexConcave
        } else if nonneg && !nonpos {
            FluxShape::Convex
        } else if nonpos && !nonneg {
            FluxShape::Concave
        } else {
            FluxShape::Other
        }
    }
}
