//! Bivariate Taylor polynomials truncated at total degree 3.
//!
//! Just enough arithmetic to push the vector field through a linear change of
//! coordinates and read off its partial derivatives up to third order exactly.

use std::ops::{Add, Mul, Neg, Sub};

const DEG: usize = 3;

/// `c[i][j]` is the coefficient of `u^i v^j`; entries with `i + j > 3` stay zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    c: [[f64; DEG + 1]; DEG + 1],
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        let mut c = [[0.0; DEG + 1]; DEG + 1];
        c[0][0] = value;
        Self { c }
    }

    /// `value + du * u + dv * v`.
    pub fn affine(value: f64, du: f64, dv: f64) -> Self {
        let mut j = Self::constant(value);
        j.c[1][0] = du;
        j.c[0][1] = dv;
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    /// `d^(i+j) / du^i dv^j` at the origin.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        self.c[i][j] * factorial(i) * factorial(j)
    }

    pub fn scale(mut self, k: f64) -> Self {
        for row in self.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        self
    }

    pub fn recip(&self) -> Self {
        let g0 = self.value();
        // 1/(g0 + h) = (1/g0) sum_k (-h/g0)^k
        let mut h = *self;
        h.c[0][0] = 0.0;
        let r = h.scale(-1.0 / g0);
        let mut term = Jet::constant(1.0);
        let mut sum = Jet::constant(1.0);
        for _ in 0..DEG {
            term = term * r;
            sum = sum + term;
        }
        sum.scale(1.0 / g0)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for i in 0..=DEG {
            for j in 0..=DEG - i {
                self.c[i][j] += rhs.c[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [[0.0; DEG + 1]; DEG + 1];
        for i1 in 0..=DEG {
            for j1 in 0..=DEG - i1 {
                let a = self.c[i1][j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=DEG - i1 - j1 {
                    for j2 in 0..=DEG - i1 - j1 - i2 {
                        out[i1 + i2][j1 + j2] += a * rhs.c[i2][j2];
                    }
                }
            }
        }
        Jet { c: out }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0][0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}
