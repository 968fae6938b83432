//! Maxwell–Klein–Gordon in Lorenz gauge, method of lines.
//!
//! With `π = D_0 φ` the system is first order in time:
//!
//! ```text
//! ∂_t φ   = π − i A_0 φ
//! ∂_t π   = −i A_0 π + Σ_i D_i D_i φ − m² φ
//! ∂_t A_μ = Ȧ_μ
//! ∂_t Ȧ_μ = Δ A_μ + J_μ,     J_μ = Im(φ · conj D_μ φ)
//! ```
//!
//! `D_i D_i` nests the first-derivative stencil and `Δ` is the matching
//! composed Laplacian. Nesting makes the total charge a semi-discrete
//! invariant (summation by parts), and the composed Laplacian makes the
//! Lorenz residual obey `∂_t ℓ = −(div E − J_0)` exactly on the grid.

use num_complex::Complex64 as C64;

use super::rk4::{axpy_complex, axpy_real, rk4_step, OdeState};
use crate::error::Result;
use crate::exec::Exec;
use crate::fields::snapshot::FieldSnapshot;
use crate::fields::state::{self, GaugeState, ScalarState};
use crate::grid::{self, GridSpec};

const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct MmkgState {
    pub t: f64,
    pub step: usize,
    pub scalar: ScalarState,
    pub gauge: GaugeState,
    /// Whether the current feeds back into the potential. When off the
    /// potential is frozen at its initial value.
    pub coupled: bool,
}

#[derive(Clone)]
struct Vars {
    scalar: ScalarState,
    gauge: GaugeState,
}

impl OdeState for Vars {
    fn axpy(&mut self, a: f64, x: &Self, exec: Exec) {
        axpy_complex(&mut self.scalar.phi, a, &x.scalar.phi, exec);
        axpy_complex(&mut self.scalar.pi, a, &x.scalar.pi, exec);
        for mu in 0..4 {
            if !x.gauge.a[mu].is_empty() {
                axpy_real(&mut self.gauge.a[mu], a, &x.gauge.a[mu], exec);
                axpy_real(&mut self.gauge.da[mu], a, &x.gauge.da[mu], exec);
            }
        }
    }
}

/// `D_i φ = ∂_i φ + i A_i φ`.
fn cov_spatial(g: &GridSpec, f: &[C64], a: &[f64], axis: usize, exec: Exec) -> Vec<C64> {
    let mut d = grid::deriv(g, f, axis, exec);
    exec.for_chunks(&mut d, CHUNK, |ci, c| {
        let off = ci * CHUNK;
        for (o, v) in c.iter_mut().enumerate() {
            *v += C64::new(0.0, a[off + o]) * f[off + o];
        }
    });
    d
}

fn rhs(g: &GridSpec, y: &Vars, mass: f64, coupled: bool, exec: Exec) -> Vars {
    let n = g.len();
    let (phi, pi) = (&y.scalar.phi, &y.scalar.pi);
    let a = &y.gauge.a;
    let dphi: [Vec<C64>; 3] = std::array::from_fn(|i| cov_spatial(g, phi, &a[i + 1], i + 1, exec));
    let mut lap = vec![C64::default(); n];
    for i in 0..3 {
        let dd = cov_spatial(g, &dphi[i], &a[i + 1], i + 1, exec);
        axpy_complex(&mut lap, 1.0, &dd, exec);
    }
    let m2 = mass * mass;
    let a0 = &a[0];
    let dphi_dt = exec.map(n, |k| pi[k] - C64::new(0.0, a0[k]) * phi[k]);
    let dpi_dt = exec.map(n, |k| -C64::new(0.0, a0[k]) * pi[k] + lap[k] - phi[k] * m2);
    let gauge = if coupled {
        let da: [Vec<f64>; 4] = std::array::from_fn(|mu| {
            let mut l = grid::laplacian(g, &a[mu], exec);
            let d = if mu == 0 { pi } else { &dphi[mu - 1] };
            exec.for_chunks(&mut l, CHUNK, |ci, c| {
                let off = ci * CHUNK;
                for (o, v) in c.iter_mut().enumerate() {
                    let k = off + o;
                    *v += (phi[k] * d[k].conj()).im;
                }
            });
            l
        });
        GaugeState { a: y.gauge.da.clone(), da }
    } else {
        GaugeState::zeros(0)
    };
    Vars {
        scalar: ScalarState { phi: dphi_dt, pi: dpi_dt },
        gauge,
    }
}

impl MmkgState {
    pub fn new(t: f64, scalar: ScalarState, gauge: GaugeState, coupled: bool) -> Self {
        MmkgState { t, step: 0, scalar, gauge, coupled }
    }

    pub fn step(&mut self, g: &GridSpec, dt: f64, mass: f64, exec: Exec) -> Result<()> {
        let mut y = Vars {
            scalar: std::mem::replace(&mut self.scalar, ScalarState::zeros(0)),
            gauge: std::mem::replace(&mut self.gauge, GaugeState::zeros(0)),
        };
        let coupled = self.coupled;
        rk4_step(&mut y, dt, exec, |v| Ok(rhs(g, v, mass, coupled, exec)))?;
        self.scalar = y.scalar;
        self.gauge = y.gauge;
        self.t += dt;
        self.step += 1;
        Ok(())
    }

    pub fn snapshot(&self, g: &GridSpec, exec: Exec) -> FieldSnapshot {
        FieldSnapshot {
            grid: *g,
            t: self.t,
            scalar: self.scalar.clone(),
            gauge: self.gauge.clone(),
            form: state::curvature(g, &self.gauge, exec),
        }
    }
}
