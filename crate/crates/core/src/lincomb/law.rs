//! Common interface of the laws driving the simulation and pricing code.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::inversion::{invert_cf, InversionTarget};
use crate::error::{Error, Result};
use crate::special::QuadratureSpec;

/// An infinitely divisible law built from weighted gamma variables.
pub trait Law: InversionTarget + Clone + Send + Sync {
    /// `ln E[e^{zX}]`, or [`Error::OutOfStrip`] outside [`strip`](Law::strip).
    fn ln_mgf(&self, z: f64) -> Result<f64>;
    /// Open interval on which the mgf is finite.
    fn strip(&self) -> (f64, f64);
    /// The law of the Lévy process at time `t` (all shapes times `t`).
    fn time_scaled(&self, t: f64) -> Result<Self>;
    /// The Esscher transform with density `e^{θx} / E[e^{θX}]` relative to this law.
    fn tilted(&self, theta: f64) -> Result<Self>;
    fn cumulant(&self, k: u32) -> f64;
    fn sampler(&self) -> Result<LawSampler>;

    fn mean(&self) -> f64 {
        self.cumulant(1)
    }

    /// Density by Fourier inversion.
    fn pdf(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        Ok(invert_cf(self, x, spec)?.value)
    }
}

/// Exact sampler of `Σ w_j G_j - Σ w'_k H_k` for independent gamma variables.
#[derive(Debug, Clone)]
pub struct LawSampler {
    pos: Vec<Gamma<f64>>,
    neg: Vec<Gamma<f64>>,
}

impl LawSampler {
    /// Terms are `(shape, rate, weight)`; each becomes `Ga(shape)` with scale `weight/rate`.
    pub fn new(
        pos: impl IntoIterator<Item = (f64, f64, f64)>,
        neg: impl IntoIterator<Item = (f64, f64, f64)>,
    ) -> Result<Self> {
        let build = |(shape, rate, w): (f64, f64, f64)| {
            Gamma::new(shape, w / rate).map_err(|e| Error::Domain(format!("gamma sampler: {e}")))
        };
        Ok(Self {
            pos: pos.into_iter().map(build).collect::<Result<_>>()?,
            neg: neg.into_iter().map(build).collect::<Result<_>>()?,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut x = 0.0;
        for g in &self.pos {
            x += g.sample(rng);
        }
        for g in &self.neg {
            x -= g.sample(rng);
        }
        x
    }
}
