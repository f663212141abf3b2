use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("jacobian undefined on the refuge line x = m = {m}")]
    KinkPoint { m: f64 },

    #[error("root polishing did not converge after {iterations} iterations")]
    NumericalFailure { iterations: usize },

    #[error("state ({x}, {y}) is not an equilibrium (field residual {residual:e})")]
    NotAnEquilibrium { x: f64, y: f64, residual: f64 },

    #[error("index sum skipped: equilibrium at x = {x} is not hyperbolic")]
    NonHyperbolicPresent { x: f64 },

    #[error("no Hopf point: need 0 < b0 < a*cbar, got b0 = {b0}, a*cbar = {a_cbar}")]
    NoHopf { b0: f64, a_cbar: f64 },

    #[error("step {step} left the quadrant (undershoot {undershoot:e}); reduce h")]
    StepTooLarge { step: usize, undershoot: f64 },

    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error("inconclusive: only {crossings} section crossings after burn-in (need 5)")]
    Inconclusive { crossings: usize },

    #[error("trajectory tail has {points} points, need at least {required}")]
    TooShort { points: usize, required: usize },

    #[error("Milstein step {step} produced a non-positive state; use the log-Euler scheme or a smaller h")]
    PositivityViolation { step: usize },

    #[error("path {index}: {source}")]
    Path {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}
