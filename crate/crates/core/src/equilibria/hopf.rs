//! Hopf point in `b` and the first Lyapunov coefficient.
//!
//! Interior equilibria do not depend on `b`, and `s` is affine in `b` with unit
//! slope, so the trace vanishes at `b0 = J11 = 1 - 2x* - a y* k1 / z^2`. The
//! eigenvalues are purely imaginary there when `0 < b0 < a cbar`, with
//! `cbar = (x* - m) / z` and `z = k1 + x* - m`.
//!
//! The coefficient is the Guckenheimer-Holmes combination
//!
//! ```text
//! 16 a = f_uuu + f_uvv + g_uuv + g_vvv
//!      + (f_uv (f_uu + f_vv) - g_uv (g_uu + g_vv) - f_uu g_uu + f_vv g_vv) / omega
//! ```
//!
//! for the field written in a basis where the linear part is
//! `[[0, -omega], [omega, 0]]`. The derivatives come from Taylor jets, so they
//! are exact up to rounding.

use serde::{Deserialize, Serialize};

use super::classify::{Equilibrium, RESIDUAL_TOL};
use super::jet::Jet;
use crate::error::{Error, Result};
use crate::model::{jacobian, vector_field, ModelParams, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfData {
    pub b0: f64,
    /// `16 a` in the notation above; only its sign is basis independent.
    pub lambda: f64,
    pub subcritical: bool,
    pub omega: f64,
}

/// Change of basis `(x, y) = (x*, y*) + P (u, v)` used for the coefficient.
///
/// The columns are the imaginary and real parts of the eigenvector for
/// `+i omega` of the Jacobian at `b = b0`.
pub fn hopf_basis(j11: f64, j12: f64, omega: f64) -> [[f64; 2]; 2] {
    [[0.0, j12], [omega, -j11]]
}

pub fn hopf_point(p: &ModelParams, e: &Equilibrium) -> Result<HopfData> {
    let (x, y) = (e.x, e.y);
    if !(x > p.m && y > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Hopf analysis needs an interior equilibrium, got ({x}, {y})"
        )));
    }
    let residual = vector_field(p, e.state()).norm();
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::NotAnEquilibrium { x, y, residual });
    }

    let z = p.k1 + x - p.m;
    let cbar = (x - p.m) / z;
    let b0 = 1.0 - 2.0 * x - p.a * y * p.k1 / (z * z);
    let a_cbar = p.a * cbar;
    if !(b0 > 0.0 && b0 < a_cbar) {
        return Err(Error::NoHopf { b0, a_cbar });
    }

    let at = ModelParams { b: b0, ..*p };
    let j = jacobian(&at, e.state())?;
    let omega = j.det().sqrt();
    let basis = hopf_basis(j.j11, j.j12, omega);
    let lambda = lyapunov_combination(&at, e.state(), basis, omega);

    Ok(HopfData {
        b0,
        lambda,
        subcritical: lambda > 0.0,
        omega,
    })
}

fn lyapunov_combination(p: &ModelParams, at: State, basis: [[f64; 2]; 2], omega: f64) -> f64 {
    let xj = Jet::affine(at.x, basis[0][0], basis[0][1]);
    let yj = Jet::affine(at.y, basis[1][0], basis[1][1]);

    // branch x > m of the field, valid in a neighbourhood of the equilibrium
    let big_x = xj + (-p.m);
    let one_minus_x = -xj + 1.0;
    let v1 = xj * one_minus_x - yj * big_x * (big_x + p.k1).recip() * p.a;
    let v2 = yj * (-(yj * (big_x + p.k2).recip()) + 1.0) * p.b;

    // inverse of the basis matrix
    let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
    let f = (v1 * basis[1][1] - v2 * basis[0][1]) * (1.0 / det);
    let g = (v2 * basis[0][0] - v1 * basis[1][0]) * (1.0 / det);

    let d = |h: &Jet, i, k| h.derivative(i, k);
    let cubic = d(&f, 3, 0) + d(&f, 1, 2) + d(&g, 2, 1) + d(&g, 0, 3);
    let quad = d(&f, 1, 1) * (d(&f, 2, 0) + d(&f, 0, 2)) - d(&g, 1, 1) * (d(&g, 2, 0) + d(&g, 0, 2))
        - d(&f, 2, 0) * d(&g, 2, 0)
        + d(&f, 0, 2) * d(&g, 0, 2);
    cubic + quad / omega
}
