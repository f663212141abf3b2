//! Deterministic integration, limit-cycle detection and long-run bounds.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{vector_field, ModelParams, State};

/// Largest negative excursion that is snapped back onto an axis.
pub const UNDERSHOOT_TOL: f64 = 1e-12;

const MIN_RETURNS: usize = 5;
const PERIOD_REL_TOL: f64 = 0.01;
const MIN_AMPLITUDE: f64 = 1e-4;
/// Last-period amplitude relative to the first one below which the tail is
/// read as a spiral into the equilibrium rather than a cycle.
const MIN_AMPLITUDE_RETENTION: f64 = 0.5;
const MIN_TAIL_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub scheme: Scheme,
    pub h: f64,
}

impl Trajectory {
    pub fn last(&self) -> State {
        *self.states.last().expect("a trajectory holds its initial state")
    }
}

/// One step of the chosen scheme, without the quadrant check.
#[inline]
pub fn step(p: &ModelParams, scheme: Scheme, s: State, h: f64) -> State {
    match scheme {
        Scheme::Euler => {
            let v = vector_field(p, s);
            State::new(s.x + v.dx * h, s.y + v.dy * h)
        }
        Scheme::Rk4 => {
            let k1 = vector_field(p, s);
            let k2 = vector_field(p, State::new(s.x + 0.5 * h * k1.dx, s.y + 0.5 * h * k1.dy));
            let k3 = vector_field(p, State::new(s.x + 0.5 * h * k2.dx, s.y + 0.5 * h * k2.dy));
            let k4 = vector_field(p, State::new(s.x + h * k3.dx, s.y + h * k3.dy));
            State::new(
                s.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
                s.y + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
            )
        }
    }
}

/// Applies the quadrant rule to the state produced by step `k`.
pub(crate) fn admit(s: State, k: usize) -> Result<State> {
    if !(s.x.is_finite() && s.y.is_finite()) {
        return Err(Error::NonFinite { step: k });
    }
    let fix = |v: f64| -> Result<f64> {
        if v >= 0.0 {
            Ok(v)
        } else if v >= -UNDERSHOOT_TOL {
            Ok(0.0)
        } else {
            Err(Error::StepTooLarge {
                step: k,
                undershoot: -v,
            })
        }
    };
    Ok(State::new(fix(s.x)?, fix(s.y)?))
}

/// Number of steps of size `h` needed to reach `t_max`.
pub fn step_count(h: f64, t_max: f64) -> usize {
    let n = t_max / h;
    // absorb the rounding of t_max / h so that 500 / 1e-3 is 500000 steps
    let r = n.round();
    if (n - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        n.ceil() as usize
    }
}

fn check_grid(h: f64, t_max: f64, init: State) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParams(format!("step h must be positive, got {h}")));
    }
    if !(t_max >= h && t_max.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "t_max must be finite and at least h, got {t_max}"
        )));
    }
    if !(init.in_quadrant() && init.x.is_finite() && init.y.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "initial state ({}, {}) is outside the quadrant",
            init.x, init.y
        )));
    }
    Ok(())
}

/// Calls `visit(k, t_k, state_k)` for `k = 0..=n` without storing the path.
pub fn integrate_with<F>(
    p: &ModelParams,
    init: State,
    scheme: Scheme,
    h: f64,
    t_max: f64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, f64, State),
{
    check_grid(h, t_max, init)?;
    let n = step_count(h, t_max);
    let mut s = init;
    visit(0, 0.0, s);
    for k in 1..=n {
        s = admit(step(p, scheme, s, h), k)?;
        visit(k, k as f64 * h, s);
    }
    Ok(())
}

pub fn integrate(
    p: &ModelParams,
    init: State,
    scheme: Scheme,
    h: f64,
    t_max: f64,
) -> Result<Trajectory> {
    check_grid(h, t_max, init)?;
    let n = step_count(h, t_max);
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    integrate_with(p, init, scheme, h, t_max, |_, t, s| {
        times.push(t);
        states.push(s);
    })?;
    Ok(Trajectory {
        times,
        states,
        scheme,
        h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionCrossing {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub found: bool,
    pub period: Option<f64>,
    pub amplitude_x: f64,
    pub amplitude_y: f64,
    /// Extent of the last full revolution.
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub crossings: Vec<SectionCrossing>,
    pub stable: bool,
}

#[derive(Debug, Clone, Copy)]
struct Extent {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Extent {
    fn empty() -> Self {
        Self {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, s: State) {
        self.x_min = self.x_min.min(s.x);
        self.x_max = self.x_max.max(s.x);
        self.y_min = self.y_min.min(s.y);
        self.y_max = self.y_max.max(s.y);
    }

    fn amplitude(&self) -> f64 {
        (self.x_max - self.x_min).max(self.y_max - self.y_min)
    }
}

/// Integrates with RK4 and reads returns to the section `y = k2 + x - m`,
/// crossed with `x` increasing, after `t_burn`.
pub fn detect_limit_cycle(
    p: &ModelParams,
    init: State,
    h: f64,
    t_burn: f64,
    t_max: f64,
) -> Result<CycleReport> {
    if !(t_burn >= 0.0 && t_burn < t_max) {
        return Err(Error::InvalidParams(format!(
            "burn-in {t_burn} must lie in [0, t_max = {t_max})"
        )));
    }
    let section = |s: State| s.y - (p.k2 + s.x - p.m);

    let mut crossings: Vec<SectionCrossing> = Vec::new();
    // extent of each revolution between consecutive crossings
    let mut laps: Vec<Extent> = Vec::new();
    let mut lap = Extent::empty();
    let mut prev: Option<(f64, State, f64)> = None;

    integrate_with(p, init, Scheme::Rk4, h, t_max, |_, t, s| {
        let g = section(s);
        if t >= t_burn {
            lap.add(s);
            if let Some((t0, s0, g0)) = prev {
                // dg/dt = -dx/dt on the isocline, so x increases where g falls
                if g0 > 0.0 && g <= 0.0 {
                    let w = g0 / (g0 - g);
                    crossings.push(SectionCrossing {
                        t: t0 + w * (t - t0),
                        x: s0.x + w * (s.x - s0.x),
                        y: s0.y + w * (s.y - s0.y),
                    });
                    laps.push(lap);
                    lap = Extent::empty();
                    lap.add(s);
                }
            }
            prev = Some((t, s, g));
        }
    })?;

    if crossings.len() < MIN_RETURNS {
        return Err(Error::Inconclusive {
            crossings: crossings.len(),
        });
    }

    // laps[0] precedes the first crossing and is partial
    let full = &laps[1..];
    let last = *full.last().expect("at least four full laps");
    let first = full[0];

    let intervals: Vec<f64> = crossings.windows(2).map(|w| w[1].t - w[0].t).collect();
    let period = intervals.iter().sum::<f64>() / intervals.len() as f64;
    let periods_agree = intervals
        .iter()
        .all(|d| (d - period).abs() <= PERIOD_REL_TOL * period);
    let sustained = last.amplitude() >= MIN_AMPLITUDE_RETENTION * first.amplitude();
    let found = periods_agree && last.amplitude() > MIN_AMPLITUDE && sustained;

    Ok(CycleReport {
        found,
        period: found.then_some(period),
        amplitude_x: last.x_max - last.x_min,
        amplitude_y: last.y_max - last.y_min,
        x_min: last.x_min,
        x_max: last.x_max,
        y_min: last.y_min,
        y_max: last.y_max,
        stable: returns_contract(&crossings),
        crossings,
    })
}

/// Sign of the least-squares slope of `log |x_{i+1} - x_i|`; returns that are
/// already equal to within `1e-8` count as converged.
fn returns_contract(c: &[SectionCrossing]) -> bool {
    let logs: Vec<(f64, f64)> = c
        .windows(2)
        .map(|w| (w[1].x - w[0].x).abs())
        .enumerate()
        .filter(|(_, d)| *d > 1e-13)
        .map(|(i, d)| (i as f64, d.ln()))
        .collect();
    let converged = c.windows(2).all(|w| (w[1].x - w[0].x).abs() < 1e-8);
    if converged || logs.len() < 2 {
        return true;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|v| v.0).sum::<f64>() / n;
    let my = logs.iter().map(|v| v.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|v| (v.0 - mx) * (v.1 - my)).sum();
    sxy < 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongRunBounds {
    pub liminf_x: f64,
    pub limsup_x: f64,
    pub liminf_y: f64,
    pub limsup_y: f64,
}

pub fn long_run_bounds(traj: &Trajectory, tail_fraction: f64) -> Result<LongRunBounds> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let len = traj.states.len();
    let tail = ((len as f64) * tail_fraction).ceil() as usize;
    if tail < MIN_TAIL_POINTS {
        return Err(Error::TooShort {
            points: tail,
            required: MIN_TAIL_POINTS,
        });
    }
    let mut e = Extent::empty();
    for s in &traj.states[len - tail..] {
        e.add(*s);
    }
    Ok(LongRunBounds {
        liminf_x: e.x_min,
        limsup_x: e.x_max,
        liminf_y: e.y_min,
        limsup_y: e.y_max,
    })
}

/// `t,x,y` rows with 17 significant digits.
pub fn write_csv<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    writeln!(w, "t,x,y")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", t, s.x, s.y)?;
    }
    w.flush()
}
