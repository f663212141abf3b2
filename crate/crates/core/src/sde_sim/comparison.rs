//! Comparison processes driven by the same noise as the system.
//!
//! With `G(t) = (1 - sigma1^2/2) t + sigma1 w1(t)` the upper prey process is
//!
//! ```text
//! xu(t) = e^G(t) / (1/x0 + int_0^t e^G(s) ds)
//! ```
//!
//! Writing `Q = 1/xu` gives `Q(t_{k+1}) = e^{-dG} Q(t_k) + int_{t_k}^{t_{k+1}} e^{G(s) - G(t_{k+1})} ds`,
//! which avoids overflow of `e^G` on long horizons. The upper predator process
//! is the same construction with `H(t) = (b - sigma2^2/2) t + sigma2 w2(t)` and
//! weight `b / (k2 + xu)` inside the integral.
//!
//! In the bundle the integrals use the left endpoint and the system and lower
//! processes use log-Euler steps. With that pairing every grid value respects
//! `xl <= x <= xu` and `yl <= y <= yu`: each step map is monotone in its
//! state, and `e^{-u} <= 1/(1+u)` orders the two step forms.

use serde::{Deserialize, Serialize};

use super::noise::NoisePath;
use super::path::{check_grid, check_init, simulate_path, SdeScheme};
use crate::error::{Error, Result};
use crate::model::{ModelParams, State};

/// Rule for the integral over one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    Trapezoid,
    LeftPoint,
}

/// Largest ordering breach tolerated by [`ComparisonBundle::check_ordering`].
pub const ORDERING_SLACK: f64 = 1e-9;

fn needed_steps(noise: &NoisePath, t_max: f64) -> Result<usize> {
    let n = check_grid(noise.h, t_max)?;
    if noise.len() < n {
        return Err(Error::InvalidParams(format!(
            "noise path has {} increments, {n} needed",
            noise.len()
        )));
    }
    Ok(n)
}

/// `xu` on the noise grid, from the closed form with the given quadrature.
pub fn explicit_upper_prey_with(
    sigma1: f64,
    x0: f64,
    noise: &NoisePath,
    t_max: f64,
    rule: Quadrature,
) -> Result<Vec<f64>> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::InvalidParams(format!("x0 must be positive, got {x0}")));
    }
    let n = needed_steps(noise, t_max)?;
    let h = noise.h;
    let drift = (1.0 - 0.5 * sigma1 * sigma1) * h;
    let sh = h.sqrt();
    let mut q = 1.0 / x0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(x0);
    for &xi in &noise.xi1[..n] {
        let decay = (-(drift + sigma1 * sh * xi)).exp();
        q = match rule {
            Quadrature::Trapezoid => decay * (q + 0.5 * h) + 0.5 * h,
            Quadrature::LeftPoint => decay * (q + h),
        };
        out.push(1.0 / q);
    }
    Ok(out)
}

/// `xu` with trapezoidal quadrature.
pub fn explicit_upper_prey(sigma1: f64, x0: f64, noise: &NoisePath, t_max: f64) -> Result<Vec<f64>> {
    explicit_upper_prey_with(sigma1, x0, noise, t_max, Quadrature::Trapezoid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBundle {
    pub times: Vec<f64>,
    pub system: Vec<State>,
    pub x_upper: Vec<f64>,
    pub y_upper: Vec<f64>,
    pub x_lower: Vec<f64>,
    pub y_lower: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    /// Largest of `x - xu`, `xl - x`, `y - yu`, `yl - y` over the grid.
    pub worst_breach: f64,
    pub worst_step: usize,
    pub holds: bool,
}

impl ComparisonBundle {
    pub fn check_ordering(&self) -> OrderingCheck {
        let mut worst = f64::NEG_INFINITY;
        let mut at = 0;
        for k in 0..self.times.len() {
            let s = self.system[k];
            let breach = (s.x - self.x_upper[k])
                .max(self.x_lower[k] - s.x)
                .max(s.y - self.y_upper[k])
                .max(self.y_lower[k] - s.y);
            if breach > worst {
                worst = breach;
                at = k;
            }
        }
        OrderingCheck {
            worst_breach: worst,
            worst_step: at,
            holds: worst <= ORDERING_SLACK,
        }
    }
}

/// System path plus the four comparison processes on one noise path.
pub fn comparison_bundle(
    p: &ModelParams,
    init: State,
    noise: &NoisePath,
    t_max: f64,
) -> Result<ComparisonBundle> {
    comparison_bundle_with(p, init, noise, t_max, SdeScheme::LogEuler, Quadrature::LeftPoint)
}

pub fn comparison_bundle_with(
    p: &ModelParams,
    init: State,
    noise: &NoisePath,
    t_max: f64,
    scheme: SdeScheme,
    rule: Quadrature,
) -> Result<ComparisonBundle> {
    check_init(init)?;
    if !(init.x > 0.0 && init.y > 0.0) {
        return Err(Error::InvalidParams(
            "comparison processes need a strictly positive initial state".into(),
        ));
    }
    let n = needed_steps(noise, t_max)?;
    let h = noise.h;
    let sh = h.sqrt();
    let path = simulate_path(p, init, scheme, noise, t_max)?;
    let x_upper = explicit_upper_prey_with(p.sigma1, init.x, noise, t_max, rule)?;

    let (s1, s2) = (p.sigma1, p.sigma2);
    let mut y_upper = Vec::with_capacity(n + 1);
    let mut x_lower = Vec::with_capacity(n + 1);
    let mut y_lower = Vec::with_capacity(n + 1);
    let (mut qy, mut xl, mut yl) = (1.0 / init.y, init.x, init.y);
    y_upper.push(init.y);
    x_lower.push(xl);
    y_lower.push(yl);

    for k in 0..n {
        let (xi1, xi2) = (noise.xi1[k], noise.xi2[k]);
        let dh = (p.b - 0.5 * s2 * s2) * h + s2 * sh * xi2;
        let w0 = p.b / (p.k2 + x_upper[k]);
        let decay = (-dh).exp();
        qy = match rule {
            Quadrature::Trapezoid => {
                let w1 = p.b / (p.k2 + x_upper[k + 1]);
                decay * (qy + 0.5 * h * w0) + 0.5 * h * w1
            }
            Quadrature::LeftPoint => decay * (qy + h * w0),
        };
        let yu_k = y_upper[k];
        y_upper.push(1.0 / qy);

        // lower prey: dxl = (xl (1 - xl) - a yu) dt + sigma1 xl dw1, absorbed at 0
        xl = if xl > 0.0 {
            let rate = (1.0 - xl) - p.a * yu_k / xl - 0.5 * s1 * s1;
            let next = xl * (rate * h + s1 * sh * xi1).exp();
            if next.is_finite() {
                next
            } else {
                return Err(Error::NonFinite { step: k + 1 });
            }
        } else {
            0.0
        };
        x_lower.push(xl);

        yl = if yl > 0.0 {
            yl * ((p.b * (1.0 - yl / p.k2) - 0.5 * s2 * s2) * h + s2 * sh * xi2).exp()
        } else {
            0.0
        };
        y_lower.push(yl);
    }

    Ok(ComparisonBundle {
        times: path.times,
        system: path.states,
        x_upper,
        y_upper,
        x_lower,
        y_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_prey_starts_at_x0() {
        let noise = NoisePath::generate(1, 0.01, 100);
        let xu = explicit_upper_prey(0.3, 0.42, &noise, 1.0).unwrap();
        assert_eq!(xu[0], 0.42);
        assert_eq!(xu.len(), 101);
    }

    #[test]
    fn noise_free_upper_prey_is_logistic() {
        let h = 1e-4;
        let noise = NoisePath::generate(1, h, 100_000);
        let x0 = 0.2;
        let xu = explicit_upper_prey(0.0, x0, &noise, 10.0).unwrap();
        for (k, v) in xu.iter().enumerate().step_by(997) {
            let t = k as f64 * h;
            let exact = x0 * t.exp() / (1.0 + x0 * (t.exp() - 1.0));
            assert!((v - exact).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn noise_free_bundle_orders_the_logistic() {
        let p = ModelParams::new(0.4, 0.1, 0.08, 0.2, 0.0025).unwrap();
        let noise = NoisePath::generate(3, 0.01, 10_000);
        let b = comparison_bundle(&p, State::new(0.55, 0.6), &noise, 100.0).unwrap();
        assert!(b.check_ordering().holds);
        for (k, s) in b.system.iter().enumerate() {
            let t = b.times[k];
            let logistic = 0.55 * t.exp() / (1.0 + 0.55 * (t.exp() - 1.0));
            assert!(s.x <= logistic + 1e-9);
        }
    }

    #[test]
    fn bundle_ordering_holds_under_noise() {
        let p = ModelParams::new(0.4, 0.1, 0.08, 0.2, 0.0025)
            .unwrap()
            .with_noise(0.3, 0.2)
            .unwrap();
        for seed in 0..5 {
            let noise = NoisePath::generate(seed, 0.01, 10_000);
            let b = comparison_bundle(&p, State::new(0.55, 0.6), &noise, 100.0).unwrap();
            let c = b.check_ordering();
            assert!(c.holds, "seed {seed}: {c:?}");
        }
    }
}
