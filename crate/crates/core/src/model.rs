//! Parameters, state and the vector field of the refuge model
//!
//! ```text
//! dx = [ x(1-x) - a y (x-m)+ / (k1 + (x-m)+) ] dt + sigma1 x dw1
//! dy = [ b y (1 - y / (k2 + (x-m)+)) ]         dt + sigma2 y dw2
//! ```
//!
//! With `sigma1 = sigma2 = 0` this is the deterministic planar system. Every
//! formula in the crate reads its constants from [`ModelParams`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensional parameters of the raw model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub rho1: f64,
    pub rho2: f64,
    pub beta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub mu: f64,
}

impl RawParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("beta", self.beta),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        let capacity = self.rho1 / self.beta;
        if !(self.mu.is_finite() && self.mu >= 0.0 && self.mu < capacity) {
            return Err(Error::InvalidParams(format!(
                "mu must satisfy 0 <= mu < rho1/beta = {capacity}, got {}",
                self.mu
            )));
        }
        Ok(())
    }

    /// Multipliers mapping raw densities to dimensionless ones:
    /// `x = sx * xi(t/rho1)`, `y = sy * upsilon(t/rho1)`.
    ///
    /// The predator scale is `alpha2 beta / (rho1 rho2)`; it reduces to
    /// `beta / rho1` only when `alpha2 = rho2`.
    pub fn state_scale(&self) -> (f64, f64) {
        (
            self.beta / self.rho1,
            self.alpha2 * self.beta / (self.rho1 * self.rho2),
        )
    }

    /// Time multiplier: dimensionless time `t` corresponds to raw time `t / rho1`.
    pub fn time_scale(&self) -> f64 {
        self.rho1
    }

    /// Right-hand side of the raw (dimensional) system.
    pub fn raw_field(&self, xi: f64, upsilon: f64) -> (f64, f64) {
        let acc = (xi - self.mu).max(0.0);
        let dxi = xi * (self.rho1 - self.beta * xi) - self.alpha1 * upsilon * acc / (self.kappa1 + acc);
        let dup = upsilon * (self.rho2 - self.alpha2 * upsilon / (self.kappa2 + acc));
        (dxi, dup)
    }
}

/// Dimensionless parameters `(a, b, k1, k2, m)` plus noise intensities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub k1: f64,
    pub k2: f64,
    pub m: f64,
    #[serde(default)]
    pub sigma1: f64,
    #[serde(default)]
    pub sigma2: f64,
}

impl ModelParams {
    /// Deterministic parameters (both noise intensities zero), validated.
    pub fn new(a: f64, b: f64, k1: f64, k2: f64, m: f64) -> Result<Self> {
        let p = Self {
            a,
            b,
            k1,
            k2,
            m,
            sigma1: 0.0,
            sigma2: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_noise(mut self, sigma1: f64, sigma2: f64) -> Result<Self> {
        self.sigma1 = sigma1;
        self.sigma2 = sigma2;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("k1", self.k1), ("k2", self.k2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.m.is_finite() && (0.0..1.0).contains(&self.m)) {
            return Err(Error::InvalidParams(format!("m must lie in [0, 1), got {}", self.m)));
        }
        for (name, v) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_deterministic(&self) -> bool {
        self.sigma1 == 0.0 && self.sigma2 == 0.0
    }

    /// Prey density accessible to predators, `(x - m)+`.
    #[inline]
    pub fn accessible(&self, x: f64) -> f64 {
        (x - self.m).max(0.0)
    }

    /// Upper bound `L = 1 + k2 - m` of the attracting rectangle.
    pub fn l_bound(&self) -> f64 {
        1.0 + self.k2 - self.m
    }

    /// Parses a parameter file: either a flat `{"a":..,"b":..,...}` object or
    /// `{"raw": {...}}`, which is rescaled. Missing sigmas default to 0; a
    /// raw file may still carry top-level `sigma1`/`sigma2`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("bad JSON: {e}")))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let parse_err = |e: serde_json::Error| Error::InvalidParams(e.to_string());
        let p = match value.get("raw") {
            Some(raw) => {
                let raw: RawParams = serde_json::from_value(raw.clone()).map_err(parse_err)?;
                let sigma = |key: &str| value.get(key).and_then(|v| v.as_f64()).unwrap_or(0.0);
                let mut p = nondimensionalize(&raw)?;
                p.sigma1 = sigma("sigma1");
                p.sigma2 = sigma("sigma2");
                p
            }
            None => serde_json::from_value(value.clone()).map_err(parse_err)?,
        };
        p.validate()?;
        Ok(p)
    }
}

/// A point of the closed quadrant: prey `x`, predator `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn in_quadrant(&self) -> bool {
        self.x >= 0.0 && self.y >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub dx: f64,
    pub dy: f64,
}

impl Velocity {
    pub fn norm(&self) -> f64 {
        self.dx.hypot(self.dy)
    }
}

/// Partial derivatives of `(v1, v2)` with respect to `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
}

impl Jacobian2 {
    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    pub fn det(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j21
    }

    /// Eigenvalues as `(re, im)` pairs; the pair with `im >= 0` comes first.
    pub fn eigenvalues(&self) -> [(f64, f64); 2] {
        let half_tr = 0.5 * self.trace();
        let disc = half_tr * half_tr - self.det();
        if disc >= 0.0 {
            let r = disc.sqrt();
            [(half_tr + r, 0.0), (half_tr - r, 0.0)]
        } else {
            let w = (-disc).sqrt();
            [(half_tr, w), (half_tr, -w)]
        }
    }
}

pub fn nondimensionalize(raw: &RawParams) -> Result<ModelParams> {
    raw.validate()?;
    let p = ModelParams {
        a: raw.alpha1 * raw.rho2 / (raw.alpha2 * raw.rho1),
        b: raw.rho2 / raw.rho1,
        k1: raw.kappa1 * raw.beta / raw.rho1,
        k2: raw.kappa2 * raw.beta / raw.rho1,
        m: raw.mu * raw.beta / raw.rho1,
        sigma1: 0.0,
        sigma2: 0.0,
    };
    p.validate()?;
    Ok(p)
}

#[inline]
pub fn vector_field(p: &ModelParams, s: State) -> Velocity {
    let acc = p.accessible(s.x);
    Velocity {
        dx: s.x * (1.0 - s.x) - p.a * s.y * acc / (p.k1 + acc),
        dy: p.b * s.y * (1.0 - s.y / (p.k2 + acc)),
    }
}

pub fn jacobian(p: &ModelParams, s: State) -> Result<Jacobian2> {
    if p.m > 0.0 && s.x == p.m {
        return Err(Error::KinkPoint { m: p.m });
    }
    let above = s.x >= p.m;
    let acc = p.accessible(s.x);
    let d1 = p.k1 + acc;
    let d2 = p.k2 + acc;
    let (pred_dx, comp_dx) = if above {
        (p.a * s.y * p.k1 / (d1 * d1), p.b * s.y * s.y / (d2 * d2))
    } else {
        (0.0, 0.0)
    };
    Ok(Jacobian2 {
        j11: 1.0 - 2.0 * s.x - pred_dx,
        j12: -p.a * acc / d1,
        j21: comp_dx,
        j22: p.b - 2.0 * p.b * s.y / d2,
    })
}

/// Drift and diagonal diffusion `(sigma1 x, sigma2 y)` of the perturbed system.
pub fn sde_coefficients(p: &ModelParams, s: State) -> (Velocity, Velocity) {
    (
        vector_field(p, s),
        Velocity {
            dx: p.sigma1 * s.x,
            dy: p.sigma2 * s.y,
        },
    )
}
