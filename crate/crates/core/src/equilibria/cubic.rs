//! Counting and locating the interior equilibria.
//!
//! Interior equilibria sit on the predator isocline `y = k2 + x - m` at the
//! positive roots `X = x - m` of
//!
//! ```text
//! R(X) = X^3 + alpha2 X^2 + alpha1 X + alpha0
//! alpha2 = a + k1 - 1 + 2m
//! alpha1 = m^2 + m(2 k1 - 1) + a k2 - k1
//! alpha0 = -k1 m (1 - m)
//! ```
//!
//! For `m > 0` the count comes from the Routh sign sequence combined with
//! Tong's three-real-roots test; for `m = 0` the factor `X` is dropped and the
//! remaining quadratic decides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

const MAX_POLISH_ITERATIONS: usize = 200;
const DEDUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub alpha2: f64,
    pub alpha1: f64,
    pub alpha0: f64,
}

impl CubicCoeffs {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        ((x + self.alpha2) * x + self.alpha1) * x + self.alpha0
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * x + 2.0 * self.alpha2) * x + self.alpha1
    }

    /// `alpha2^2 - 3 alpha1`, the (scaled) discriminant of `R'`.
    pub fn derivative_discriminant(&self) -> f64 {
        self.alpha2 * self.alpha2 - 3.0 * self.alpha1
    }

    /// Real roots of `R'(X) = 3X^2 + 2 alpha2 X + alpha1`, ascending.
    pub fn critical_points(&self) -> Option<(f64, f64)> {
        let d = self.derivative_discriminant();
        if d < 0.0 {
            return None;
        }
        let (lo, hi) = quadratic_roots(3.0, 2.0 * self.alpha2, self.alpha1, d.sqrt() * 2.0);
        Some((lo, hi))
    }

    /// `R(x'min) R(x'max)`, evaluated at the critical points themselves.
    pub fn tong_product(&self) -> Option<f64> {
        if self.derivative_discriminant() <= 0.0 {
            return None;
        }
        let (lo, hi) = self.critical_points()?;
        Some(self.eval(lo) * self.eval(hi))
    }

    /// Signs of the Routh sequence `(1, alpha2, alpha1 - alpha0/alpha2, alpha0)`,
    /// zero entries skipped.
    pub fn routh_sign_changes(&self) -> usize {
        let third = if self.alpha2 != 0.0 {
            self.alpha1 - self.alpha0 / self.alpha2
        } else {
            0.0
        };
        let seq = [1.0, self.alpha2, third, self.alpha0];
        let signs: Vec<f64> = seq.iter().copied().filter(|v| *v != 0.0).map(f64::signum).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Roots of `a x^2 + b x + c` given `sqrt_disc = sqrt(b^2 - 4ac)`, computed
/// without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64, sqrt_disc: f64) -> (f64, f64) {
    let q = -0.5 * (b + b.signum() * sqrt_disc);
    if q == 0.0 {
        return (0.0, 0.0);
    }
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

pub fn cubic_coefficients(p: &ModelParams) -> CubicCoeffs {
    let m = p.m;
    CubicCoeffs {
        alpha2: p.a + p.k1 - 1.0 + 2.0 * m,
        alpha1: m * m + m * (2.0 * p.k1 - 1.0) + p.a * p.k2 - p.k1,
        alpha0: -p.k1 * m * (1.0 - m),
    }
}

/// Which case of the counting theorems produced the count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountBranch {
    /// `m > 0`: three distinct roots.
    MPosCaseA,
    /// `m > 0`: Tong product exactly zero, a double root.
    MPosCaseB,
    /// `m > 0`: every other configuration, one root.
    MPosCaseC,
    /// `m = 0`: two positive roots of the quadratic.
    MZeroCaseA,
    /// `m = 0`: one positive root.
    MZeroCaseB,
    /// `m = 0`: none.
    MZeroCaseC,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    #[serde(rename = "n")]
    pub n_predicted: usize,
    pub routh_sign_changes: usize,
    pub tong_delta: f64,
    pub tong_product: Option<f64>,
    /// `alpha2^2 - 4 alpha1`, only for `m = 0`.
    pub quadratic_discriminant: Option<f64>,
    pub branch: CountBranch,
}

pub fn count_interior_equilibria(p: &ModelParams) -> CountReport {
    let c = cubic_coefficients(p);
    let tong_delta = c.derivative_discriminant();
    let tong_product = c.tong_product();
    let routh_sign_changes = c.routh_sign_changes();

    if p.m > 0.0 {
        let front = c.alpha2 < 0.0 && c.alpha1 * c.alpha2 < c.alpha0 && tong_delta > 0.0;
        let product = tong_product.unwrap_or(f64::NAN);
        let (n, branch) = if front && product < 0.0 {
            (3, CountBranch::MPosCaseA)
        } else if front && product == 0.0 {
            (2, CountBranch::MPosCaseB)
        } else {
            (1, CountBranch::MPosCaseC)
        };
        CountReport {
            n_predicted: n,
            routh_sign_changes,
            tong_delta,
            tong_product,
            quadratic_discriminant: None,
            branch,
        }
    } else {
        let dq = c.alpha2 * c.alpha2 - 4.0 * c.alpha1;
        let (n, branch) = if dq > 0.0 && c.alpha1 > 0.0 && c.alpha2 < 0.0 {
            (2, CountBranch::MZeroCaseA)
        } else if (dq > 0.0 && (c.alpha1 < 0.0 || (c.alpha1 == 0.0 && c.alpha2 < 0.0)))
            || (dq == 0.0 && c.alpha2 < 0.0)
        {
            (1, CountBranch::MZeroCaseB)
        } else {
            (0, CountBranch::MZeroCaseC)
        };
        CountReport {
            n_predicted: n,
            routh_sign_changes,
            tong_delta,
            tong_product,
            quadratic_discriminant: Some(dq),
            branch,
        }
    }
}

/// A root `X*` of `R` in `(0, 1 - m)` with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedRoot {
    pub x_shift: f64,
    pub multiplicity: u8,
}

/// Locates every root of `R` in `(0, 1 - m)`, ascending.
///
/// The interval is cut at the real critical points of the polynomial; each
/// piece with a sign change holds exactly one simple root, found by safeguarded
/// Newton. A critical value that is exactly zero is a double root.
pub fn interior_roots(p: &ModelParams) -> Result<Vec<ShiftedRoot>> {
    let c = cubic_coefficients(p);
    let upper = 1.0 - p.m;
    let mut roots = if p.m > 0.0 {
        let poly = |x: f64| c.eval(x);
        let dpoly = |x: f64| c.derivative(x);
        let crit = if c.derivative_discriminant() > 0.0 {
            c.critical_points().map(|(a, b)| vec![a, b]).unwrap_or_default()
        } else {
            Vec::new()
        };
        roots_on(poly, dpoly, upper, &crit)?
    } else {
        // R(X) = X (X^2 + alpha2 X + alpha1); the X = 0 root is E2.
        let poly = |x: f64| (x + c.alpha2) * x + c.alpha1;
        let dpoly = |x: f64| 2.0 * x + c.alpha2;
        let dq = c.alpha2 * c.alpha2 - 4.0 * c.alpha1;
        let vertex = -0.5 * c.alpha2;
        if dq == 0.0 {
            // same test as the count, not a rounded evaluation at the vertex
            return Ok(if vertex > 0.0 && vertex < upper {
                vec![ShiftedRoot {
                    x_shift: vertex,
                    multiplicity: 2,
                }]
            } else {
                Vec::new()
            });
        }
        let crit = if dq > 0.0 { vec![vertex] } else { Vec::new() };
        roots_on(poly, dpoly, upper, &crit)?
    };
    roots.dedup_by(|later, earlier| {
        if (later.x_shift - earlier.x_shift).abs() <= DEDUP_TOL {
            earlier.multiplicity = earlier.multiplicity.max(2);
            true
        } else {
            false
        }
    });
    Ok(roots)
}

fn roots_on<F, D>(f: F, df: D, upper: f64, critical: &[f64]) -> Result<Vec<ShiftedRoot>>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut knots = vec![0.0];
    knots.extend(critical.iter().copied().filter(|c| *c > 0.0 && *c < upper));
    knots.push(upper);

    let mut roots = Vec::new();
    for (i, w) in knots.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        // interior knots are critical points; a zero there is a double root
        if i > 0 && flo == 0.0 {
            roots.push(ShiftedRoot {
                x_shift: lo,
                multiplicity: 2,
            });
            continue;
        }
        if flo * fhi < 0.0 {
            roots.push(ShiftedRoot {
                x_shift: polish(&f, &df, lo, hi)?,
                multiplicity: 1,
            });
        }
    }
    Ok(roots)
}

/// Newton iteration kept inside a shrinking sign-change bracket.
fn polish<F, D>(f: &F, df: &D, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let f_lo_sign = f(lo).signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_POLISH_ITERATIONS {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if x == lo || x == hi {
            return Ok(x);
        }
    }
    Err(Error::NumericalFailure {
        iterations: MAX_POLISH_ITERATIONS,
    })
}
