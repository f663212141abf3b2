//! Fully resolved run configuration. Every field has a default, and the whole
//! struct round-trips through JSON, so a saved config replays a run exactly.

use lglab_core::ode_sim::Scheme;
use lglab_core::sde_sim::{NoiseCoupling, SdeScheme, Target};
use lglab_core::{nondimensionalize, ModelParams, RawParams, State};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Where the dimensionless parameters come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    Model(ModelParams),
    /// Raw parameters are rescaled; noise intensities are given separately.
    Raw {
        raw: RawParams,
        #[serde(default)]
        sigma1: f64,
        #[serde(default)]
        sigma2: f64,
    },
}

impl Default for ParamSource {
    /// `a = 0.4, b = 0.1, k1 = 0.08, k2 = 0.2, m = 0.0025`, no noise.
    fn default() -> Self {
        Self::Model(ModelParams {
            a: 0.4,
            b: 0.1,
            k1: 0.08,
            k2: 0.2,
            m: 0.0025,
            sigma1: 0.0,
            sigma2: 0.0,
        })
    }
}

impl ParamSource {
    pub fn resolve(&self) -> CliResult<ModelParams> {
        let p = match *self {
            Self::Model(p) => p,
            Self::Raw { raw, sigma1, sigma2 } => ModelParams {
                sigma1,
                sigma2,
                ..nondimensionalize(&raw)?
            },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn raw(&self) -> Option<RawParams> {
        match self {
            Self::Raw { raw, .. } => Some(*raw),
            Self::Model(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzeOptions {
    /// Compute the Hopf point and Lyapunov coefficient of each interior
    /// equilibrium. Default `false`.
    pub hopf: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeOptions {
    /// Default `rk4`.
    pub scheme: Scheme,
    /// Default `1e-3`.
    pub h: f64,
    /// Default `500`.
    pub t_max: f64,
    /// Default `(0.55, 0.6)`.
    pub init: State,
    /// Default `false`.
    pub detect_cycle: bool,
    /// Burn-in for cycle detection; default `t_max / 2`.
    pub burn_in: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::Rk4,
            h: 1e-3,
            t_max: 500.0,
            init: State::new(0.55, 0.6),
            detect_cycle: false,
            burn_in: None,
        }
    }
}

impl OdeOptions {
    pub fn burn_in(&self) -> f64 {
        self.burn_in.unwrap_or(0.5 * self.t_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SdeOptions {
    /// Default `log-euler`.
    pub scheme: SdeScheme,
    /// Default `independent`; `shared` feeds the predator's sequence to both equations.
    pub coupling: NoiseCoupling,
    /// Default `0.01`.
    pub h: f64,
    /// Horizon, and the censoring time of hitting runs. Default `200`.
    pub t_max: f64,
    /// Default `(0.55, 0.6)`.
    pub init: State,
    /// Required by every stochastic subcommand; there is no default.
    pub seed: Option<u64>,
    /// Second seed of the stationary uniqueness check; default `seed + 1`.
    pub second_seed: Option<u64>,
    /// Default `100`.
    pub paths: usize,
    /// Default `50`.
    pub bins: usize,
    /// Histogram burn-in; default `min(100, t_max / 2)`.
    pub burn_in: Option<f64>,
    /// Ensemble checkpoint times; default `[t_max]`.
    pub checkpoints: Vec<f64>,
    /// Add comparison-process columns to a path CSV. Default `false`.
    pub comparison: bool,
    /// Hitting target; default the whole plane.
    pub target: TargetBounds,
}

impl Default for SdeOptions {
    fn default() -> Self {
        Self {
            scheme: SdeScheme::LogEuler,
            coupling: NoiseCoupling::Independent,
            h: 0.01,
            t_max: 200.0,
            init: State::new(0.55, 0.6),
            seed: None,
            second_seed: None,
            paths: 100,
            bins: 50,
            burn_in: None,
            checkpoints: Vec::new(),
            comparison: false,
            target: TargetBounds::default(),
        }
    }
}

impl SdeOptions {
    pub fn seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            CliError::Input("stochastic runs need an explicit --seed".to_string())
        })
    }

    pub fn burn_in(&self) -> f64 {
        self.burn_in.unwrap_or(100f64.min(0.5 * self.t_max))
    }

    pub fn checkpoints(&self) -> Vec<f64> {
        if self.checkpoints.is_empty() {
            vec![self.t_max]
        } else {
            self.checkpoints.clone()
        }
    }
}

/// Open rectangle for hitting runs; a missing bound is infinite. Kept as
/// options because JSON has no infinities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TargetBounds {
    pub x_lo: Option<f64>,
    pub x_hi: Option<f64>,
    pub y_lo: Option<f64>,
    pub y_hi: Option<f64>,
}

impl TargetBounds {
    pub fn to_target(self) -> Target {
        Target {
            x_lo: self.x_lo.unwrap_or(f64::NEG_INFINITY),
            x_hi: self.x_hi.unwrap_or(f64::INFINITY),
            y_lo: self.y_lo.unwrap_or(f64::NEG_INFINITY),
            y_hi: self.y_hi.unwrap_or(f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScanParam {
    A,
    B,
    K1,
    K2,
    M,
    Sigma1,
    Sigma2,
}

impl ScanParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::K1 => "k1",
            Self::K2 => "k2",
            Self::M => "m",
            Self::Sigma1 => "sigma1",
            Self::Sigma2 => "sigma2",
        }
    }

    pub fn set(self, p: &mut ModelParams, v: f64) {
        match self {
            Self::A => p.a = v,
            Self::B => p.b = v,
            Self::K1 => p.k1 = v,
            Self::K2 => p.k2 = v,
            Self::M => p.m = v,
            Self::Sigma1 => p.sigma1 = v,
            Self::Sigma2 => p.sigma2 = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub name: ScanParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub params: ParamSource,
    pub analyze: AnalyzeOptions,
    pub ode: OdeOptions,
    pub sde: SdeOptions,
    pub scan: Option<ScanOptions>,
    /// Output path; `None` or `-` writes to stdout.
    pub out: Option<String>,
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
