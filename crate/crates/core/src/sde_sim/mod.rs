//! Stochastic simulation of the perturbed system.

mod comparison;
mod ensemble;
mod histogram;
mod noise;
mod path;

pub use comparison::{
    comparison_bundle, comparison_bundle_with, explicit_upper_prey, explicit_upper_prey_with,
    ComparisonBundle, OrderingCheck, Quadrature, ORDERING_SLACK,
};
pub use ensemble::{
    ensemble, hitting_time, stationary_histogram, CheckpointStats, EnsembleConfig,
    EnsembleStats, ExtinctionFractions, HittingStats, StationaryConfig, StationaryReport, Target,
    EXTINCTION_THRESHOLD,
};
pub use histogram::{Histogram2, DOMAIN_MAX};
pub use noise::{NoisePath, NoiseSource, NoiseStream};
pub use path::{
    sde_step, simulate_path, simulate_path_coupled, simulate_with, NoiseCoupling, SamplePath,
    SdeScheme,
};
