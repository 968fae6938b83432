//! Constraint residuals of an evolving state.

use std::f64::consts::PI;

use serde::Serialize;

use super::config::Ceilings;
use super::mmkg::MmkgState;
use super::maxwell::MaxwellState;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fields::state;
use crate::grid::{self, GridSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Norms {
    pub l2: f64,
    pub max: f64,
}

impl Norms {
    fn of(g: &GridSpec, f: &[f64], exec: Exec) -> Self {
        Norms {
            l2: grid::l2_norm(g, f, exec),
            max: grid::max_norm(f),
        }
    }
}

/// Named residuals at one step. Charge drift is measured against the
/// initial total charge and normalized by `(1/4π) ∫ |J_0|` at `t0`, since
/// the total charge on a periodic box is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub step: usize,
    pub t: f64,
    /// `div E − J_0`.
    pub gauss: Norms,
    /// `∂^μ A_μ = −∂_t A_0 + div A`.
    pub lorenz: Norms,
    /// `div B`.
    pub bianchi: Norms,
    pub charge: f64,
    pub charge_drift: f64,
}

/// Reference values for the charge drift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargeRef {
    pub q: f64,
    pub scale: f64,
}

impl ChargeRef {
    pub fn of(g: &GridSpec, s: &MmkgState, exec: Exec) -> Self {
        let scale = exec.sum(g.len(), |i| (s.scalar.phi[i] * s.scalar.pi[i].conj()).im.abs()) * g.cell_volume() / (4.0 * PI);
        ChargeRef { q: state::charge(g, &s.scalar, exec), scale }
    }
}

impl ConstraintReport {
    pub fn max_residual(&self) -> f64 {
        self.gauss.max.max(self.lorenz.max).max(self.bianchi.max).max(self.charge_drift)
    }

    pub fn is_finite(&self) -> bool {
        [self.gauss.l2, self.lorenz.l2, self.bianchi.l2, self.charge].iter().all(|v| v.is_finite())
    }

    /// First ceiling exceeded, by name.
    pub fn check(&self, c: &Ceilings) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite { field: "state".into(), step: self.step });
        }
        for (name, value, ceiling) in [
            ("gauss", self.gauss.max, c.gauss),
            ("lorenz", self.lorenz.max, c.lorenz),
            ("bianchi", self.bianchi.max, c.bianchi),
            ("charge-drift", self.charge_drift, c.charge_drift),
        ] {
            if value > ceiling {
                return Err(Error::ConstraintBreach {
                    name: name.into(),
                    value,
                    ceiling,
                    step: self.step,
                });
            }
        }
        Ok(())
    }
}

pub fn constraint_report(g: &GridSpec, s: &MmkgState, reference: Option<ChargeRef>, exec: Exec) -> ConstraintReport {
    let f = state::curvature(g, &s.gauge, exec);
    let dive = grid::divergence(g, [&f.e[0], &f.e[1], &f.e[2]], exec);
    // A frozen potential has no source.
    let j0 = if s.coupled {
        exec.map(g.len(), |i| (s.scalar.phi[i] * s.scalar.pi[i].conj()).im)
    } else {
        vec![0.0; g.len()]
    };
    let gauss: Vec<f64> = dive.iter().zip(&j0).map(|(d, j)| d - j).collect();
    let a = &s.gauge.a;
    let diva = grid::divergence(g, [&a[1], &a[2], &a[3]], exec);
    let lorenz: Vec<f64> = diva.iter().zip(&s.gauge.da[0]).map(|(d, a0)| d - a0).collect();
    let divb = grid::divergence(g, [&f.b[0], &f.b[1], &f.b[2]], exec);
    let q = state::charge(g, &s.scalar, exec);
    let charge_drift = match reference {
        Some(r) if r.scale > 0.0 => (q - r.q).abs() / r.scale,
        Some(r) => (q - r.q).abs(),
        None => 0.0,
    };
    ConstraintReport {
        step: s.step,
        t: s.t,
        gauss: Norms::of(g, &gauss, exec),
        lorenz: Norms::of(g, &lorenz, exec),
        bianchi: Norms::of(g, &divb, exec),
        charge: q,
        charge_drift,
    }
}

/// Divergences of a source-free state; `gauss` holds `div E`.
pub fn maxwell_report(g: &GridSpec, s: &MaxwellState, exec: Exec) -> ConstraintReport {
    let de = grid::divergence(g, [&s.e[0], &s.e[1], &s.e[2]], exec);
    let db = grid::divergence(g, [&s.b[0], &s.b[1], &s.b[2]], exec);
    ConstraintReport {
        step: s.step,
        t: s.t,
        gauss: Norms::of(g, &de, exec),
        lorenz: Norms::default(),
        bianchi: Norms::of(g, &db, exec),
        charge: 0.0,
        charge_drift: 0.0,
    }
}
