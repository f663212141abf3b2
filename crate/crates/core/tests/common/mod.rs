//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use lglab_core::equilibria::hopf_basis;
use lglab_core::{jacobian, vector_field, ModelParams, State};

/// Fixed-point residual along the predator nullcline `y = k2 + X`, `x = m + X`:
/// `(m + X)(1 - m - X)(k1 + X) - a (k2 + X) X`. Its zeros in `(0, 1 - m)` are the
/// interior equilibria.
pub fn nullcline_residual(p: &ModelParams, big_x: f64) -> f64 {
    let x = p.m + big_x;
    x * (1.0 - x) * (p.k1 + big_x) - p.a * (p.k2 + big_x) * big_x
}

/// Sign changes of the residual on the `n + 1` equispaced points of `[0, 1 - m]`.
///
/// Neither endpoint is a root: the residual is `k1 m (1 - m) > 0` at the left
/// end when `m > 0` (and exactly zero, hence skipped, when `m = 0`) and
/// `-a (k2 + 1 - m)(1 - m) < 0` at the right end.
pub fn grid_sign_changes(p: &ModelParams, n: usize) -> usize {
    let upper = 1.0 - p.m;
    let mut last = 0.0f64;
    let mut changes = 0;
    for i in 0..=n {
        let v = nullcline_residual(p, upper * i as f64 / n as f64);
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

/// The Lyapunov combination at `b0` from central finite differences of the
/// model field in the rotation basis. The stencil moves the state by about
/// `rel` times the distance `k1 + x - m` to the pole of the response.
pub fn lyapunov_by_differences(p: &ModelParams, e: State, b0: f64, rel: f64) -> f64 {
    let at = ModelParams { b: b0, ..*p };
    let j = jacobian(&at, e).unwrap();
    let omega = j.det().sqrt();
    let pm = hopf_basis(j.j11, j.j12, omega);
    let reach = pm.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let scale = (p.k1 + e.x - p.m).min(e.x - p.m).min(e.y);
    let h = rel * scale / reach;
    let det = pm[0][0] * pm[1][1] - pm[0][1] * pm[1][0];
    let field = |u: f64, v: f64| {
        let s = State::new(e.x + pm[0][0] * u + pm[0][1] * v, e.y + pm[1][0] * u + pm[1][1] * v);
        let w = vector_field(&at, s);
        [
            (w.dx * pm[1][1] - w.dy * pm[0][1]) / det,
            (w.dy * pm[0][0] - w.dx * pm[1][0]) / det,
        ]
    };
    let c = |i: usize, u: f64, v: f64| field(u * h, v * h)[i];
    let d_uu = |i| (c(i, 1.0, 0.0) - 2.0 * c(i, 0.0, 0.0) + c(i, -1.0, 0.0)) / (h * h);
    let d_vv = |i| (c(i, 0.0, 1.0) - 2.0 * c(i, 0.0, 0.0) + c(i, 0.0, -1.0)) / (h * h);
    let d_uv = |i| {
        (c(i, 1.0, 1.0) - c(i, 1.0, -1.0) - c(i, -1.0, 1.0) + c(i, -1.0, -1.0)) / (4.0 * h * h)
    };
    let d_uuu = |i| {
        (c(i, 2.0, 0.0) - 2.0 * c(i, 1.0, 0.0) + 2.0 * c(i, -1.0, 0.0) - c(i, -2.0, 0.0))
            / (2.0 * h * h * h)
    };
    let d_vvv = |i| {
        (c(i, 0.0, 2.0) - 2.0 * c(i, 0.0, 1.0) + 2.0 * c(i, 0.0, -1.0) - c(i, 0.0, -2.0))
            / (2.0 * h * h * h)
    };
    let d_uvv = |i| {
        (c(i, 1.0, 1.0) - 2.0 * c(i, 1.0, 0.0) + c(i, 1.0, -1.0) - c(i, -1.0, 1.0)
            + 2.0 * c(i, -1.0, 0.0)
            - c(i, -1.0, -1.0))
            / (2.0 * h * h * h)
    };
    let d_uuv = |i| {
        (c(i, 1.0, 1.0) - 2.0 * c(i, 0.0, 1.0) + c(i, -1.0, 1.0) - c(i, 1.0, -1.0)
            + 2.0 * c(i, 0.0, -1.0)
            - c(i, -1.0, -1.0))
            / (2.0 * h * h * h)
    };
    let (f, g) = (0, 1);
    d_uuu(f) + d_uvv(f) + d_uuv(g) + d_vvv(g)
        + (d_uv(f) * (d_uu(f) + d_vv(f)) - d_uv(g) * (d_uu(g) + d_vv(g)) - d_uu(f) * d_uu(g)
            + d_vv(f) * d_vv(g))
            / omega
}

/// Eigenvalue-based description of a hyperbolic linearization:
/// `(saddle, stable, complex)`.
pub fn eigen_kind(p: &ModelParams, e: State) -> (bool, bool, bool) {
    let j = jacobian(p, e).unwrap();
    let [(r1, i1), (r2, _)] = j.eigenvalues();
    let complex = i1 != 0.0;
    let saddle = !complex && r1 * r2 < 0.0;
    (saddle, r1 < 0.0 && r2 < 0.0, complex)
}
