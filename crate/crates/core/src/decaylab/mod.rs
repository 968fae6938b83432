//! Decay diagnostics: sampling histories along surfaces, weighted norms and
//! energies, power-law fits, and empirical checks of the Sobolev and frame
//! inequalities used to turn energies into pointwise decay.

pub mod checks;
pub mod fit;
pub mod phat;
pub mod report;
pub mod sampler;
pub mod sobolev;
pub mod supnorms;

use serde::Serialize;

use crate::error::{Error, Result};
use fit::{fit_decay, DecayFit};

/// A weighted quantity sampled along a family of surfaces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySeries {
    pub id: String,
    /// Human-readable weight, e.g. `tau_plus^1.5 |phi|`.
    pub weight: String,
    /// `(abscissa, value)` with strictly increasing abscissae.
    pub points: Vec<(f64, f64)>,
    pub fit: Option<DecayFit>,
}

impl DecaySeries {
    pub fn new(id: &str, weight: &str) -> Self {
        DecaySeries {
            id: id.into(),
            weight: weight.into(),
            points: Vec::new(),
            fit: None,
        }
    }

    pub fn push(&mut self, x: f64, v: f64) -> Result<()> {
        if let Some(&(last, _)) = self.points.last() {
            if x <= last {
                return Err(Error::Fit(format!("series {}: abscissa {x} after {last}", self.id)));
            }
        }
        self.points.push((x, v));
        Ok(())
    }

    pub fn abscissae(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Fits and stores the decay exponent over `window` (default: all but
    /// the first 20% of the samples).
    pub fn fit(&mut self, window: Option<(f64, f64)>) -> Result<&DecayFit> {
        let f = fit_decay(&self.abscissae(), &self.values(), window)?;
        Ok(self.fit.insert(f))
    }

    /// Largest over smallest value.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
        hi / lo
    }
}
