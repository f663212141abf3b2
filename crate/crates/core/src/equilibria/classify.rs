//! Equilibria on the axes and in the interior, with their local type.

use serde::{Deserialize, Serialize};

use super::cubic::{count_interior_equilibria, interior_roots};
use crate::error::{Error, Result};
use crate::model::{jacobian, vector_field, ModelParams, State};

/// Absolute tolerance on `s` and `p` below which an equilibrium counts as
/// non-hyperbolic.
pub const EPS_H: f64 = 1e-9;

/// Largest field norm accepted at a claimed equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Taxonomy {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    StableDegenerateNode,
    UnstableDegenerateNode,
    /// Purely imaginary eigenvalues; a center or weak focus.
    LinearCenter,
    SaddleNode,
    Cusp,
    AttractingTopologicalNode,
    TopologicalSaddle,
    /// Non-hyperbolic configuration the local lemmas do not settle.
    Undetermined,
}

impl Taxonomy {
    pub fn index(self) -> i8 {
        use Taxonomy::*;
        match self {
            Saddle | TopologicalSaddle => -1,
            SaddleNode | Cusp | Undetermined => 0,
            StableNode | UnstableNode | StableFocus | UnstableFocus | StableDegenerateNode
            | UnstableDegenerateNode | LinearCenter | AttractingTopologicalNode => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: f64,
    pub y: f64,
    /// Negative trace of the Jacobian.
    pub s: f64,
    #[serde(rename = "p")]
    pub p_det: f64,
    #[serde(rename = "delta")]
    pub delta_c: f64,
    pub taxonomy: Taxonomy,
    pub index: i8,
    pub multiplicity: u8,
}

impl Equilibrium {
    /// An unclassified point; [`classify`] fills in the rest.
    pub fn at(x: f64, y: f64, multiplicity: u8) -> Self {
        Self {
            x,
            y,
            s: f64::NAN,
            p_det: f64::NAN,
            delta_c: f64::NAN,
            taxonomy: Taxonomy::Undetermined,
            index: 0,
            multiplicity,
        }
    }

    pub fn state(&self) -> State {
        State::new(self.x, self.y)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.multiplicity < 2
            && (self.p_det < -EPS_H || (self.p_det > EPS_H && self.s.abs() > EPS_H))
    }

    fn with_taxonomy(mut self, t: Taxonomy) -> Self {
        self.taxonomy = t;
        self.index = t.index();
        self
    }
}

/// `E0 = (0,0)`, `E1 = (1,0)` and `E2 = (0,k2)`.
pub fn trivial_equilibria(p: &ModelParams) -> Vec<Equilibrium> {
    let fill = |x: f64, y: f64, t: Taxonomy| {
        let j = jacobian(p, State::new(x, y)).expect("axis points are off the refuge line");
        let (s, det) = (-j.trace(), j.det());
        Equilibrium {
            s,
            p_det: det,
            delta_c: s * s - 4.0 * det,
            ..Equilibrium::at(x, y, 1)
        }
        .with_taxonomy(t)
    };

    let e2 = if p.m > 0.0 {
        Taxonomy::Saddle
    } else {
        // J11 at E2 is 1 - a k2 / k1
        let j11 = 1.0 - p.a * p.k2 / p.k1;
        if j11 > EPS_H {
            Taxonomy::Saddle
        } else if j11 < -EPS_H {
            Taxonomy::StableNode
        } else if 1.0 - p.k1 - p.a > 0.0 {
            Taxonomy::TopologicalSaddle
        } else {
            Taxonomy::AttractingTopologicalNode
        }
    };

    vec![
        fill(0.0, 0.0, Taxonomy::UnstableNode),
        fill(1.0, 0.0, Taxonomy::Saddle),
        fill(0.0, p.k2, e2),
    ]
}

/// Fills `s`, `p`, `delta`, taxonomy and index of an interior equilibrium.
pub fn classify(p: &ModelParams, e: &Equilibrium) -> Result<Equilibrium> {
    let st = e.state();
    let residual = vector_field(p, st).norm();
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::NotAnEquilibrium {
            x: e.x,
            y: e.y,
            residual,
        });
    }

    let (s, det) = if e.x > p.m && e.y > 0.0 {
        let (x, y) = (e.x, e.y);
        let z = p.k1 + x - p.m;
        let pred = p.a * y * p.k1 / (z * z);
        let s = -1.0 + 2.0 * x + pred + p.b;
        let det = p.b * (-1.0 + 2.0 * x + pred + p.a * (x - p.m) / z);
        (s, det)
    } else {
        let j = jacobian(p, st)?;
        (-j.trace(), j.det())
    };

    let out = Equilibrium {
        s,
        p_det: det,
        delta_c: s * s - 4.0 * det,
        ..*e
    };
    Ok(out.with_taxonomy(taxonomy_of(p, &out)))
}

fn taxonomy_of(p: &ModelParams, e: &Equilibrium) -> Taxonomy {
    use Taxonomy::*;
    let (s, det, delta) = (e.s, e.p_det, e.delta_c);
    let det_zero = e.multiplicity >= 2 || det.abs() <= EPS_H;

    if !det_zero && det < 0.0 {
        return Saddle;
    }
    if !det_zero {
        if s.abs() <= EPS_H {
            return LinearCenter;
        }
        let stable = s > 0.0;
        return match (delta > EPS_H, delta < -EPS_H, stable) {
            (true, _, true) => StableNode,
            (true, _, false) => UnstableNode,
            (_, true, true) => StableFocus,
            (_, true, false) => UnstableFocus,
            (_, _, true) => StableDegenerateNode,
            (_, _, false) => UnstableDegenerateNode,
        };
    }

    if e.x <= p.m {
        return Undetermined;
    }
    let z = p.k1 + e.x - p.m;
    if s.abs() > EPS_H {
        let w = z * z * z - p.k1 * e.y * p.a + p.a * p.k1 * z;
        if w.abs() > EPS_H {
            SaddleNode
        } else if p.k1 > p.k2 {
            UnstableNode
        } else if p.k1 < p.k2 {
            Saddle
        } else {
            Undetermined
        }
    } else {
        let w = 1.0 - p.a * e.y * p.k1 / (z * z * z) + p.a * p.k1 / (z * z);
        if w.abs() > EPS_H {
            Cusp
        } else {
            Saddle
        }
    }
}

/// All interior equilibria, classified and sorted by `x`.
pub fn find_interior_equilibria(p: &ModelParams) -> Result<Vec<Equilibrium>> {
    interior_roots(p)?
        .into_iter()
        .map(|r| {
            let e = Equilibrium::at(p.m + r.x_shift, p.k2 + r.x_shift, r.multiplicity);
            classify(p, &e)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub indices: Vec<i8>,
    pub sum: i32,
    pub expected: i32,
    pub pass: bool,
}

/// Checks the interior index sum against the value the disk argument forces.
pub fn index_sum_check(p: &ModelParams, eqs: &[Equilibrium]) -> Result<IndexReport> {
    if let Some(e) = eqs.iter().find(|e| !e.is_hyperbolic()) {
        return Err(Error::NonHyperbolicPresent { x: e.x });
    }
    let indices: Vec<i8> = eqs.iter().map(|e| e.index).collect();
    let sum: i32 = indices.iter().map(|&i| i32::from(i)).sum();
    let ak2 = p.a * p.k2;
    let expected = if p.m > 0.0 || ak2 < p.k1 {
        1
    } else if ak2 > p.k1 {
        0
    } else {
        // E2 is itself non-hyperbolic here; one interior point or none
        count_interior_equilibria(p).n_predicted.min(1) as i32
    };
    Ok(IndexReport {
        indices,
        sum,
        expected,
        pass: sum == expected,
    })
}
