//! Seeded Gaussian increments.
//!
//! Each component draws from its own ChaCha stream under the same key, so the
//! two Brownian motions are independent and a given `(seed, component)` always
//! yields the same sequence, whether stored or drawn lazily.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn component_rng(seed: u64, component: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(component);
    rng
}

/// Source of standard normal pairs `(xi1, xi2)`, one per step.
pub trait NoiseSource {
    fn next_pair(&mut self) -> (f64, f64);
}

/// Lazily drawn increments; identical to [`NoisePath::generate`] term by term.
pub struct NoiseStream {
    r1: ChaCha8Rng,
    r2: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self {
            r1: component_rng(seed, 0),
            r2: component_rng(seed, 1),
        }
    }
}

impl NoiseSource for NoiseStream {
    #[inline]
    fn next_pair(&mut self) -> (f64, f64) {
        (
            StandardNormal.sample(&mut self.r1),
            StandardNormal.sample(&mut self.r2),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub seed: u64,
    pub h: f64,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
}

impl NoisePath {
    pub fn generate(seed: u64, h: f64, n_steps: usize) -> Self {
        let mut s = NoiseStream::new(seed);
        let (mut xi1, mut xi2) = (Vec::with_capacity(n_steps), Vec::with_capacity(n_steps));
        for _ in 0..n_steps {
            let (a, b) = s.next_pair();
            xi1.push(a);
            xi2.push(b);
        }
        Self { seed, h, xi1, xi2 }
    }

    pub fn len(&self) -> usize {
        self.xi1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi1.is_empty()
    }

    /// The same Brownian paths on a grid `factor` times coarser:
    /// `xi = (sum of factor fine xi) / sqrt(factor)`.
    pub fn coarsen(&self, factor: usize) -> Result<NoisePath> {
        if factor == 0 || !self.len().is_multiple_of(factor) {
            return Err(Error::InvalidParams(format!(
                "cannot coarsen {} increments by {factor}",
                self.len()
            )));
        }
        let scale = 1.0 / (factor as f64).sqrt();
        let fold = |v: &[f64]| -> Vec<f64> {
            v.chunks(factor).map(|c| c.iter().sum::<f64>() * scale).collect()
        };
        Ok(NoisePath {
            seed: self.seed,
            h: self.h * factor as f64,
            xi1: fold(&self.xi1),
            xi2: fold(&self.xi2),
        })
    }

    /// `w(t_k)` for `k = 0..=len` of one component (0 or 1).
    pub fn brownian(&self, component: usize) -> Vec<f64> {
        let xi = if component == 0 { &self.xi1 } else { &self.xi2 };
        let sh = self.h.sqrt();
        let mut w = Vec::with_capacity(xi.len() + 1);
        let mut acc = 0.0;
        w.push(acc);
        for v in xi {
            acc += sh * v;
            w.push(acc);
        }
        w
    }

    pub(crate) fn cursor(&self) -> PathCursor<'_> {
        PathCursor { path: self, k: 0 }
    }
}

pub(crate) struct PathCursor<'a> {
    path: &'a NoisePath,
    k: usize,
}

impl NoiseSource for PathCursor<'_> {
    #[inline]
    fn next_pair(&mut self) -> (f64, f64) {
        let k = self.k;
        self.k += 1;
        (self.path.xi1[k], self.path.xi2[k])
    }
}
