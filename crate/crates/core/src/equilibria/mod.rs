//! Counting, locating and classifying equilibria.

mod classify;
mod cubic;
mod hopf;
mod jet;

pub use classify::{
    classify, find_interior_equilibria, index_sum_check, trivial_equilibria, Equilibrium,
    IndexReport, Taxonomy, EPS_H, RESIDUAL_TOL,
};
pub use cubic::{
    count_interior_equilibria, cubic_coefficients, interior_roots, CountBranch, CountReport,
    CubicCoeffs, ShiftedRoot,
};
pub use hopf::{hopf_basis, hopf_point, HopfData};
