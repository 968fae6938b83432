//! Gridded field states and their discrete derived quantities.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{self, Boundary, GridSpec};

/// Complex scalar `φ` and `π = D_0 φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarState {
    pub phi: Vec<C64>,
    pub pi: Vec<C64>,
}

/// Potential components `A_mu` and their time derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeState {
    pub a: [Vec<f64>; 4],
    pub da: [Vec<f64>; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormTag {
    Full,
    Linear,
    Perturbation,
    Chargeless,
    Charge,
}

/// A 2-form stored as `E_i = G_{0i}` and `B_i = (*G)_{0i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormField {
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
    pub tag: FormTag,
}

impl ScalarState {
    pub fn zeros(len: usize) -> Self {
        ScalarState {
            phi: vec![C64::default(); len],
            pi: vec![C64::default(); len],
        }
    }
}

impl GaugeState {
    pub fn zeros(len: usize) -> Self {
        GaugeState {
            a: std::array::from_fn(|_| vec![0.0; len]),
            da: std::array::from_fn(|_| vec![0.0; len]),
        }
    }
}

impl TwoFormField {
    pub fn zeros(len: usize, tag: FormTag) -> Self {
        TwoFormField {
            e: std::array::from_fn(|_| vec![0.0; len]),
            b: std::array::from_fn(|_| vec![0.0; len]),
            tag,
        }
    }

    /// Point value as a 4×4 antisymmetric array.
    pub fn at(&self, idx: usize) -> crate::algebra::TwoForm {
        crate::algebra::form_from_eb(
            [self.e[0][idx], self.e[1][idx], self.e[2][idx]],
            [self.b[0][idx], self.b[1][idx], self.b[2][idx]],
        )
    }

    pub fn energy(&self, g: &GridSpec, exec: Exec) -> f64 {
        let s = exec.sum(g.len(), |i| {
            (0..3).map(|a| self.e[a][i] * self.e[a][i] + self.b[a][i] * self.b[a][i]).sum::<f64>()
        });
        0.5 * s * g.cell_volume()
    }
}

/// `D_mu φ`: `π` for `mu = 0`, stencils plus `i A_i φ` otherwise.
pub fn covariant_derivative(g: &GridSpec, s: &ScalarState, a: &GaugeState, mu: usize, exec: Exec) -> Vec<C64> {
    if mu == 0 {
        return s.pi.clone();
    }
    let mut d = grid::deriv(g, &s.phi, mu, exec);
    let am = &a.a[mu];
    exec.for_chunks(&mut d, 4096, |ci, chunk| {
        for (o, v) in chunk.iter_mut().enumerate() {
            let i = ci * 4096 + o;
            *v += C64::new(0.0, am[i]) * s.phi[i];
        }
    });
    d
}

/// `F = dA`: `E_i = ∂_t A_i − ∂_i A_0`, `B = curl A`.
pub fn curvature(g: &GridSpec, a: &GaugeState, exec: Exec) -> TwoFormField {
    let grad0 = grid::gradient(g, &a.a[0], exec);
    let e = [0, 1, 2].map(|i| {
        a.da[i + 1]
            .iter()
            .zip(&grad0[i])
            .map(|(x, y)| x - y)
            .collect()
    });
    let b = grid::curl(g, [&a.a[1], &a.a[2], &a.a[3]], exec);
    TwoFormField { e, b, tag: FormTag::Full }
}

/// `J_mu = Im(φ · conj(D_mu φ))`.
pub fn current(g: &GridSpec, s: &ScalarState, a: &GaugeState, exec: Exec) -> [Vec<f64>; 4] {
    std::array::from_fn(|mu| {
        let d = covariant_derivative(g, s, a, mu, exec);
        exec.map(g.len(), |i| (s.phi[i] * d[i].conj()).im)
    })
}

/// `q0 = (1/4π) ∫ Im(φ · conj(D_0 φ)) dx`.
pub fn charge(g: &GridSpec, s: &ScalarState, exec: Exec) -> f64 {
    exec.sum(g.len(), |i| (s.phi[i] * s.pi[i].conj()).im) * g.cell_volume() / (4.0 * PI)
}

/// [`charge`], rejecting charged data on a periodic box.
pub fn charge_checked(g: &GridSpec, s: &ScalarState, tol: f64, exec: Exec) -> Result<f64> {
    let q0 = charge(g, s, exec);
    if g.boundary == Boundary::Periodic && q0.abs() > tol {
        return Err(Error::NonzeroCharge { q0 });
    }
    Ok(q0)
}

/// `(1/4π) ∫ div E dx`.
pub fn charge_from_field(g: &GridSpec, e: &[Vec<f64>; 3], exec: Exec) -> f64 {
    let d = grid::divergence(g, [&e[0], &e[1], &e[2]], exec);
    exec.sum(d.len(), |i| d[i]) * g.cell_volume() / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample;

    #[test]
    fn constant_potential_derivative() {
        let g = GridSpec::periodic(8, 0.5);
        let s = ScalarState {
            phi: vec![C64::new(1.0, 0.0); g.len()],
            pi: vec![C64::default(); g.len()],
        };
        let mut a = GaugeState::zeros(g.len());
        a.a[1] = vec![0.3; g.len()];
        let d = covariant_derivative(&g, &s, &a, 1, Exec::Parallel);
        assert!(d.iter().all(|v| (v - C64::new(0.0, 0.3)).norm() < 1e-15));
    }

    #[test]
    fn charge_of_phase_rotating_data() {
        // φ1 = iλφ0 with real φ0 gives q0 = −(λ/4π) ∫ φ0².
        let g = GridSpec::new(32, 0.25, Boundary::Outflow);
        let lam = 0.8;
        let phi0 = sample(&g, Exec::Sequential, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let s = ScalarState {
            phi: phi0.iter().map(|&v| C64::new(v, 0.0)).collect(),
            pi: phi0.iter().map(|&v| C64::new(0.0, lam * v)).collect(),
        };
        let int: f64 = phi0.iter().map(|v| v * v).sum::<f64>() * g.cell_volume();
        let q = charge(&g, &s, Exec::Parallel);
        assert!((q + lam * int / (4.0 * PI)).abs() < 1e-14);
        assert!(charge_checked(&g, &s, 1e-12, Exec::Sequential).is_ok());
        let gp = GridSpec::periodic(32, 0.25);
        assert!(matches!(charge_checked(&gp, &s, 1e-12, Exec::Sequential), Err(Error::NonzeroCharge { .. })));
        assert_eq!(charge(&g, &ScalarState::zeros(g.len()), Exec::Sequential), 0.0);
    }

    #[test]
    fn magnetic_curvature() {
        let g = GridSpec::periodic(8, 0.5);
        let mut a = GaugeState::zeros(g.len());
        // A_2 = sin(w x1) gives B_3 = w̃ cos(w x1) with the stencil symbol w̃.
        let w = 2.0 * PI / (g.n as f64 * g.dx);
        let wt = crate::fields::split::stencil_wavenumber(1, g.n, g.dx);
        a.a[2] = sample(&g, Exec::Sequential, |x| (w * x[0]).sin());
        let f = curvature(&g, &a, Exec::Sequential);
        let want = sample(&g, Exec::Sequential, |x| wt * (w * x[0]).cos());
        assert!(f.b[2].iter().zip(&want).all(|(x, y)| (x - y).abs() < 1e-13));
        assert!(f.e.iter().all(|c| c.iter().all(|v| *v == 0.0)));
    }
}
