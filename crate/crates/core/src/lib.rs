//! Analysis and simulation of a Leslie-Gower / Holling II prey-predator model
//! with a constant prey refuge, deterministic and stochastic.

pub mod equilibria;
pub mod error;
pub mod model;
pub mod ode_sim;
pub mod qualitative;
pub mod sde_sim;

pub use error::{Error, Result};
pub use model::{
    jacobian, nondimensionalize, sde_coefficients, vector_field, Jacobian2, ModelParams,
    RawParams, State, Velocity,
};
