//! Single sample paths of the perturbed system.

use serde::{Deserialize, Serialize};

use super::noise::{NoisePath, NoiseSource};
use crate::error::{Error, Result};
use crate::model::{vector_field, ModelParams, State};
use crate::ode_sim::step_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdeScheme {
    /// Euler drift plus the `sigma^2 x (h xi^2 - h) / 2` correction.
    Milstein,
    /// Euler on `(log x, log y)`; stays positive.
    LogEuler,
}

/// How the two Gaussian sequences feed the two equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseCoupling {
    /// `xi1` drives `x`, `xi2` drives `y`.
    #[default]
    Independent,
    /// `xi2` drives both equations.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub scheme: SdeScheme,
    pub coupling: NoiseCoupling,
    pub seed: u64,
    pub h: f64,
}

impl SamplePath {
    pub fn last(&self) -> State {
        *self.states.last().expect("a path holds its initial state")
    }
}

/// One step from `s` with standard normals `(xi1, xi2)`.
#[inline]
pub fn sde_step(p: &ModelParams, scheme: SdeScheme, s: State, h: f64, xi1: f64, xi2: f64) -> State {
    let sh = h.sqrt();
    match scheme {
        SdeScheme::Milstein => {
            let v = vector_field(p, s);
            let (s1, s2) = (p.sigma1, p.sigma2);
            State::new(
                s.x + v.dx * h + s1 * s.x * sh * xi1 + 0.5 * s1 * s1 * s.x * (h * xi1 * xi1 - h),
                s.y + v.dy * h + s2 * s.y * sh * xi2 + 0.5 * s2 * s2 * s.y * (h * xi2 * xi2 - h),
            )
        }
        SdeScheme::LogEuler => {
            let v = vector_field(p, s);
            let grow = |u: f64, du: f64, sigma: f64, xi: f64| {
                if u == 0.0 {
                    0.0
                } else {
                    u * ((du / u - 0.5 * sigma * sigma) * h + sigma * sh * xi).exp()
                }
            };
            State::new(
                grow(s.x, v.dx, p.sigma1, xi1),
                grow(s.y, v.dy, p.sigma2, xi2),
            )
        }
    }
}

/// Quadrant rule for stochastic steps: a component that was positive must stay
/// positive under Milstein; a component at zero stays at zero.
#[inline]
fn admit(prev: State, next: State, scheme: SdeScheme, k: usize) -> Result<State> {
    if !(next.x.is_finite() && next.y.is_finite()) {
        return Err(Error::NonFinite { step: k });
    }
    if scheme == SdeScheme::Milstein
        && ((prev.x > 0.0 && next.x <= 0.0) || (prev.y > 0.0 && next.y <= 0.0))
    {
        return Err(Error::PositivityViolation { step: k });
    }
    Ok(next)
}

pub(crate) fn check_init(init: State) -> Result<()> {
    if !(init.x >= 0.0 && init.y >= 0.0 && init.x.is_finite() && init.y.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "initial state ({}, {}) is outside the quadrant",
            init.x, init.y
        )));
    }
    Ok(())
}

pub(crate) fn check_grid(h: f64, t_max: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite() && t_max >= h && t_max.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "need 0 < h <= t_max, got h = {h}, t_max = {t_max}"
        )));
    }
    Ok(step_count(h, t_max))
}

/// Runs up to `n` steps, calling `visit(k, state_k)` for `k = 0..=n`; a
/// `false` from `visit` stops the run early.
pub fn simulate_with<N, F>(
    p: &ModelParams,
    init: State,
    scheme: SdeScheme,
    coupling: NoiseCoupling,
    noise: &mut N,
    h: f64,
    n: usize,
    mut visit: F,
) -> Result<()>
where
    N: NoiseSource,
    F: FnMut(usize, State) -> bool,
{
    check_init(init)?;
    let mut s = init;
    if !visit(0, s) {
        return Ok(());
    }
    for k in 1..=n {
        let (xi1, xi2) = noise.next_pair();
        let xi1 = match coupling {
            NoiseCoupling::Independent => xi1,
            NoiseCoupling::Shared => xi2,
        };
        let next = sde_step(p, scheme, s, h, xi1, xi2);
        s = admit(s, next, scheme, k)?;
        if !visit(k, s) {
            break;
        }
    }
    Ok(())
}

pub fn simulate_path(
    p: &ModelParams,
    init: State,
    scheme: SdeScheme,
    noise: &NoisePath,
    t_max: f64,
) -> Result<SamplePath> {
    simulate_path_coupled(p, init, scheme, NoiseCoupling::Independent, noise, t_max)
}

pub fn simulate_path_coupled(
    p: &ModelParams,
    init: State,
    scheme: SdeScheme,
    coupling: NoiseCoupling,
    noise: &NoisePath,
    t_max: f64,
) -> Result<SamplePath> {
    let h = noise.h;
    let n = check_grid(h, t_max)?;
    if noise.len() < n {
        return Err(Error::InvalidParams(format!(
            "noise path has {} increments, {n} needed",
            noise.len()
        )));
    }
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    simulate_with(p, init, scheme, coupling, &mut noise.cursor(), h, n, |k, s| {
        times.push(k as f64 * h);
        states.push(s);
        true
    })?;
    Ok(SamplePath {
        times,
        states,
        scheme,
        coupling,
        seed: noise.seed,
        h,
    })
}
