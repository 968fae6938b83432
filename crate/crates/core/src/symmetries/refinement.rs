//! Grid-path convergence studies of the commutation identities.
//!
//! A residual is evaluated on two `n³` grids with spacings `dx` and `dx/2`,
//! both centred on the origin, and its RMS is taken over the same central
//! cube of half-width `n·dx/8`. Stencils near the box edges never reach
//! that cube, so the box boundary condition plays no role.

use num_complex::Complex64 as C64;

use crate::calculus::{AffineField, Calculus};
use crate::exec::Exec;
use crate::gridcalc::{GField, GridCalc};
use crate::grid::GridSpec;
use crate::symmetries::commutators::{cov_swap_residual, kg_commutator_residual, lie_current_residual, lie_d_residual};
use crate::symmetries::manufactured::FieldRecipe;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    KleinGordon,
    Current,
    CovariantSwap,
    LieExterior,
}

impl ResidualKind {
    pub fn id(&self) -> &'static str {
        match self {
            ResidualKind::KleinGordon => "kg-commutator",
            ResidualKind::Current => "lie-current",
            ResidualKind::CovariantSwap => "covariant-swap",
            ResidualKind::LieExterior => "lie-exterior",
        }
    }
}

/// Residual components under any calculus.
pub fn residual_parts<C: Calculus, R: FieldRecipe>(c: &C, rec: &R, kind: ResidualKind, zs: &[AffineField]) -> Vec<C::F> {
    let phi = rec.phi(c);
    let a = rec.potential(c);
    match kind {
        ResidualKind::KleinGordon => vec![kg_commutator_residual(c, &phi, &a, zs)],
        ResidualKind::Current => lie_current_residual(c, &phi, &a, zs).to_vec(),
        ResidualKind::CovariantSwap => vec![cov_swap_residual(c, &phi, &a, &zs[0], &zs[1])],
        ResidualKind::LieExterior => lie_d_residual(c, &a, &zs[0]).comp.to_vec(),
    }
}

fn window_rms(g: &GridSpec, parts: &[GField], half: f64) -> f64 {
    let vals: Vec<Vec<C64>> = parts.iter().map(|p| p.values(g)).collect();
    let mut s = 0.0;
    let mut count = 0usize;
    for idx in 0..g.len() {
        let x = g.position(idx);
        if x.iter().all(|v| v.abs() <= half) {
            s += vals.iter().map(|v| v[idx].norm_sqr()).sum::<f64>();
            count += 1;
        }
    }
    (s / count.max(1) as f64).sqrt()
}

/// RMS of a residual over the central window on one grid.
pub fn grid_residual<R: FieldRecipe>(
    rec: &R,
    kind: ResidualKind,
    zs: &[AffineField],
    g: GridSpec,
    t_ref: f64,
    half_window: f64,
    exec: Exec,
) -> f64 {
    let c = GridCalc::new(g, t_ref, 4, exec);
    window_rms(&g, &residual_parts(&c, rec, kind, zs), half_window)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement {
    pub dx: [f64; 2],
    pub norm: [f64; 2],
}

impl Refinement {
    pub fn order(&self) -> f64 {
        (self.norm[0] / self.norm[1]).log2()
    }
}

pub fn refinement_study<R: FieldRecipe>(
    rec: &R,
    kind: ResidualKind,
    zs: &[AffineField],
    n: usize,
    dx: f64,
    t_ref: f64,
    exec: Exec,
) -> Refinement {
    let half = n as f64 * dx / 8.0;
    let coarse = grid_residual(rec, kind, zs, GridSpec::periodic(n, dx), t_ref, half, exec);
    let fine = grid_residual(rec, kind, zs, GridSpec::periodic(n, dx / 2.0), t_ref, half, exec);
    Refinement {
        dx: [dx, dx / 2.0],
        norm: [coarse, fine],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeneratorId;
    use crate::symmetries::manufactured::GaussFields;

    #[test]
    fn first_order_kg_converges() {
        let rec = GaussFields::random(4, 1.0, 2.0);
        let zs = [GeneratorId::Boost(2).field()];
        let r = refinement_study(&rec, ResidualKind::KleinGordon, &zs, 32, 0.15, 2.0, Exec::Parallel);
        assert!(r.norm[0] > 0.0 && r.order() > 3.5, "{r:?}");
    }

    #[test]
    fn flat_translation_residual_vanishes() {
        struct Free(GaussFields);
        impl FieldRecipe for Free {
            fn phi<C: Calculus>(&self, c: &C) -> C::F {
                self.0.phi(c)
            }
            fn potential<C: Calculus>(&self, c: &C) -> crate::fields::ops::Potential<C::F> {
                std::array::from_fn(|_| c.zero())
            }
        }
        let rec = Free(GaussFields::random(1, 1.0, 2.0));
        let g = GridSpec::periodic(24, 0.2);
        let zs = [GeneratorId::Translation(1).field()];
        let r = grid_residual(&rec, ResidualKind::KleinGordon, &zs, g, 2.0, 1.0, Exec::Sequential);
        assert!(r < 1e-10, "{r:e}");
    }
}
