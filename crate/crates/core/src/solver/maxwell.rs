//! Source-free Maxwell in curl form: `∂_t E = −curl B`, `∂_t B = curl E`.

use super::rk4::{axpy_real, rk4_step, OdeState};
use crate::error::Result;
use crate::exec::Exec;
use crate::fields::snapshot::FieldSnapshot;
use crate::fields::state::{FormTag, GaugeState, ScalarState, TwoFormField};
use crate::grid::{self, GridSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellState {
    pub t: f64,
    pub step: usize,
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

#[derive(Clone)]
struct Vars {
    e: [Vec<f64>; 3],
    b: [Vec<f64>; 3],
}

impl OdeState for Vars {
    fn axpy(&mut self, a: f64, x: &Self, exec: Exec) {
        for c in 0..3 {
            axpy_real(&mut self.e[c], a, &x.e[c], exec);
            axpy_real(&mut self.b[c], a, &x.b[c], exec);
        }
    }
}

fn rhs(g: &GridSpec, y: &Vars, exec: Exec) -> Vars {
    let cb = grid::curl(g, [&y.b[0], &y.b[1], &y.b[2]], exec);
    let ce = grid::curl(g, [&y.e[0], &y.e[1], &y.e[2]], exec);
    Vars {
        e: cb.map(|v| v.into_iter().map(|x| -x).collect()),
        b: ce,
    }
}

impl MaxwellState {
    pub fn new(t: f64, e: [Vec<f64>; 3], b: [Vec<f64>; 3]) -> Self {
        MaxwellState { t, step: 0, e, b }
    }

    pub fn step(&mut self, g: &GridSpec, dt: f64, exec: Exec) -> Result<()> {
        let mut y = Vars {
            e: std::mem::take(&mut self.e),
            b: std::mem::take(&mut self.b),
        };
        rk4_step(&mut y, dt, exec, |v| Ok(rhs(g, v, exec)))?;
        self.e = y.e;
        self.b = y.b;
        self.t += dt;
        self.step += 1;
        Ok(())
    }

    pub fn form(&self) -> TwoFormField {
        TwoFormField {
            e: self.e.clone(),
            b: self.b.clone(),
            tag: FormTag::Linear,
        }
    }

    /// Form-only snapshot.
    pub fn snapshot(&self, g: &GridSpec) -> FieldSnapshot {
        FieldSnapshot {
            grid: *g,
            t: self.t,
            scalar: ScalarState::zeros(0),
            gauge: GaugeState::zeros(0),
            form: self.form(),
        }
    }
}
