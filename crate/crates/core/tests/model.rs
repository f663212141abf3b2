use lglab_core::{jacobian, nondimensionalize, vector_field, Error, ModelParams, RawParams, State};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.05f64..2.0, 0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0, 0.0f64..0.5)
        .prop_map(|(a, b, k1, k2, m)| ModelParams::new(a, b, k1, k2, m).unwrap())
}

fn fd_jacobian(p: &ModelParams, s: State, h: f64) -> [[f64; 2]; 2] {
    let f = |x: f64, y: f64| {
        let v = vector_field(p, State::new(x, y));
        [v.dx, v.dy]
    };
    let (xp, xm) = (f(s.x + h, s.y), f(s.x - h, s.y));
    let (yp, ym) = (f(s.x, s.y + h), f(s.x, s.y - h));
    [
        [(xp[0] - xm[0]) / (2.0 * h), (yp[0] - ym[0]) / (2.0 * h)],
        [(xp[1] - xm[1]) / (2.0 * h), (yp[1] - ym[1]) / (2.0 * h)],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jacobian_matches_finite_differences(
        p in params(),
        x in 0.0f64..1.5,
        y in 0.0f64..1.5,
    ) {
        prop_assume!((x - p.m).abs() > 1e-3);
        let s = State::new(x, y);
        let j = jacobian(&p, s).unwrap();
        let fd = fd_jacobian(&p, s, 1e-6);
        let exact = [[j.j11, j.j12], [j.j21, j.j22]];
        for r in 0..2 {
            for c in 0..2 {
                let scale = exact[r][c].abs().max(1.0);
                prop_assert!((exact[r][c] - fd[r][c]).abs() / scale < 1e-6,
                    "entry ({r},{c}): {} vs {}", exact[r][c], fd[r][c]);
            }
        }
    }

    #[test]
    fn field_is_continuous_across_the_refuge_line(p in params(), y in 0.0f64..1.5) {
        prop_assume!(p.m > 0.0);
        let at = vector_field(&p, State::new(p.m, y));
        for d in [1e-9, -1e-9] {
            let near = vector_field(&p, State::new(p.m + d, y));
            prop_assert!((at.dx - near.dx).abs() <= 1e-9 * (2.0 + p.a * y / p.k1));
            prop_assert!((at.dy - near.dy).abs() <= 1e-9 * (1.0 + p.b * y * y / (p.k2 * p.k2)));
        }
    }

    #[test]
    fn axes_are_invariant(p in params(), u in 0.0f64..2.0) {
        prop_assert_eq!(vector_field(&p, State::new(0.0, u)).dx, 0.0);
        prop_assert_eq!(vector_field(&p, State::new(u, 0.0)).dy, 0.0);
    }

    #[test]
    fn rescaling_maps_the_raw_field(
        rho1 in 0.1f64..3.0, rho2 in 0.1f64..3.0, beta in 0.1f64..3.0,
        alpha1 in 0.1f64..3.0, alpha2 in 0.1f64..3.0,
        kappa1 in 0.05f64..2.0, kappa2 in 0.05f64..2.0,
        mu_frac in 0.0f64..0.5,
        xi_frac in 0.0f64..1.5, up in 0.0f64..3.0,
    ) {
        let raw = RawParams {
            rho1, rho2, beta, alpha1, alpha2, kappa1, kappa2,
            mu: mu_frac * rho1 / beta,
        };
        let p = nondimensionalize(&raw).unwrap();
        let (sx, sy) = raw.state_scale();
        let xi = xi_frac * rho1 / beta;
        let (dxi, dup) = raw.raw_field(xi, up);
        let v = vector_field(&p, State::new(sx * xi, sy * up));
        // d(sx xi)/d(rho1 t) = sx dxi / rho1
        let ex = sx * dxi / raw.time_scale();
        let ey = sy * dup / raw.time_scale();
        prop_assert!((v.dx - ex).abs() <= 1e-12 * (1.0 + ex.abs()), "{} vs {ex}", v.dx);
        prop_assert!((v.dy - ey).abs() <= 1e-12 * (1.0 + ey.abs()), "{} vs {ey}", v.dy);
    }
}

#[test]
fn kink_point_has_no_jacobian() {
    let p = ModelParams::new(0.5, 0.1, 0.08, 0.2, 0.01).unwrap();
    assert!(matches!(
        jacobian(&p, State::new(0.01, 0.3)),
        Err(Error::KinkPoint { .. })
    ));
    let p0 = ModelParams { m: 0.0, ..p };
    assert!(jacobian(&p0, State::new(0.0, 0.3)).is_ok());
}

#[test]
fn unit_raw_parameters_are_the_identity() {
    let raw = RawParams {
        rho1: 1.0,
        rho2: 1.0,
        beta: 1.0,
        alpha1: 1.0,
        alpha2: 1.0,
        kappa1: 1.0,
        kappa2: 1.0,
        mu: 0.3,
    };
    let p = nondimensionalize(&raw).unwrap();
    assert_eq!((p.a, p.b, p.k1, p.k2, p.m), (1.0, 1.0, 1.0, 1.0, 0.3));
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(ModelParams::new(-1.0, 0.1, 0.1, 0.1, 0.0).is_err());
    assert!(ModelParams::new(1.0, 0.1, 0.1, 0.1, 1.0).is_err());
    assert!(ModelParams::new(1.0, f64::NAN, 0.1, 0.1, 0.0).is_err());
}
