//! Numerical Hausdorff-dimension tooling: cover sums, Moran roots, the Jarník
//! σ value, mass distributions and empirical Hölder exponents.

mod cover;
mod frostman;
mod moran;
mod sigma;

pub use cover::{cover_sum, CoverPlan, CoverSum, LevelFactor, DIRECT_TERMS};
pub use frostman::{
    empirical_holder, frostman_measure, ln_frostman_measure, HolderReport, MeasureKind,
};
pub use moran::{moran_root, theoretical_dimension, DimensionEstimate, Theory, DEFAULT_TOL};
pub use sigma::{sigma_from_sequence, SigmaReport};

/// Compensated (Neumaier) summation; the order of `add` calls fixes the result.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut n = Neumaier::default();
        for x in iter {
            n.add(x);
        }
        n
    }
}
