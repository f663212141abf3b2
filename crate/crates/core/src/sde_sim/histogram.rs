use serde::{Deserialize, Serialize};

use crate::model::State;

/// Upper edge of the binned square `[0, DOMAIN_MAX]^2`.
pub const DOMAIN_MAX: f64 = 1.5;

/// Square grid of occupation weights over `[0, 1.5]^2`, with one bin for
/// everything outside. Counts are row-major in `x`: `counts[ix * bins + iy]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2 {
    pub bins: usize,
    pub range: [f64; 2],
    pub counts: Vec<f64>,
    pub overflow: f64,
}

impl Histogram2 {
    pub fn new(bins: usize) -> Self {
        Self {
            bins,
            range: [0.0, DOMAIN_MAX],
            counts: vec![0.0; bins * bins],
            overflow: 0.0,
        }
    }

    pub fn bin_of(&self, s: State) -> Option<usize> {
        let w = DOMAIN_MAX / self.bins as f64;
        if !(s.x >= 0.0 && s.x < DOMAIN_MAX && s.y >= 0.0 && s.y < DOMAIN_MAX) {
            return None;
        }
        let ix = ((s.x / w) as usize).min(self.bins - 1);
        let iy = ((s.y / w) as usize).min(self.bins - 1);
        Some(ix * self.bins + iy)
    }

    pub fn add(&mut self, s: State, weight: f64) {
        match self.bin_of(s) {
            Some(i) => self.counts[i] += weight,
            None => self.overflow += weight,
        }
    }

    pub fn mass(&self) -> f64 {
        self.counts.iter().sum::<f64>() + self.overflow
    }

    /// Rescales so the total mass is `target`; an empty histogram is left alone.
    pub fn normalize_to(&mut self, target: f64) {
        let m = self.mass();
        if m > 0.0 {
            let k = target / m;
            self.counts.iter_mut().for_each(|c| *c *= k);
            self.overflow *= k;
        }
    }

    pub fn accumulate(&mut self, other: &Histogram2) {
        assert_eq!(self.bins, other.bins, "histograms on different grids");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
    }

    /// Total variation distance `(1/2) sum |p - q|` between the two histograms
    /// after each is normalized to unit mass, overflow bin included.
    pub fn tv_distance(&self, other: &Histogram2) -> f64 {
        assert_eq!(self.bins, other.bins, "histograms on different grids");
        let (ma, mb) = (self.mass(), other.mass());
        let d: f64 = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| (a / ma - b / mb).abs())
            .sum::<f64>()
            + (self.overflow / ma - other.overflow / mb).abs();
        0.5 * d
    }

    /// Index and weight of the heaviest bin; `None` when overflow dominates.
    pub fn mode(&self) -> Option<(usize, f64)> {
        let (i, w) = self
            .counts
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, w)| if w > best.1 { (i, w) } else { best });
        (w >= self.overflow).then_some((i, w))
    }
}
