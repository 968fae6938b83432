//! Residuals of the commutation identities between the covariant wave
//! operator, the current, the Maxwell divergence and Lie/covariant
//! derivatives along Killing fields.
//!
//! Every residual vanishes identically for arbitrary smooth `(φ, A)`; none
//! of them assumes that the field equations hold. Evaluated with jets the
//! residuals sit at round-off; on a grid they measure stencil error.

use crate::calculus::{re, AffineField, Calculus, Form2, I};
use crate::fields::ops::{
    cov, cov_along, cov_chain, curvature, current, ff_contract, form_divergence, form_sub, interior, kg_operator,
    lie_form1, lie_form2, q_form, Potential,
};

/// `L_{Z_1} … L_{Z_k} G` (outermost first).
pub fn lie_chain<C: Calculus>(c: &C, g: &Form2<C::F>, zs: &[AffineField]) -> Form2<C::F> {
    zs.iter().rev().fold(g.clone(), |acc, z| lie_form2(c, &acc, z))
}

fn lie_chain1<C: Calculus>(c: &C, w: &[C::F; 4], zs: &[AffineField]) -> [C::F; 4] {
    zs.iter().rev().fold(w.clone(), |acc, z| lie_form1(c, &acc, z))
}

/// `D_X D_Y φ − D_Y D_X φ − i F_{XY} φ − D_{[X,Y]} φ`.
pub fn cov_swap_residual<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>, x: &AffineField, y: &AffineField) -> C::F {
    let f = curvature(c, a);
    let xy = cov_chain(c, phi, a, &[*x, *y]);
    let yx = cov_chain(c, phi, a, &[*y, *x]);
    let fx = interior(c, &f, x);
    let fxy = y.contract(c, |mu| fx[mu].clone());
    let br = cov_along(c, phi, a, &x.bracket(y));
    c.sum(&[xy, c.neg(&yx), c.scale(&c.mul(&fxy, phi), -I), c.neg(&br)])
}

/// `(□_A − 1) D_Z^k φ − D_Z^k (□_A − 1) φ` minus its closed form, `k ∈ {1, 2}`.
///
/// First order: `Q(F, φ, Z)`. Second order (`Z^2 = XY`):
/// `Q(F, D_Xφ, Y) + Q(F, D_Yφ, X) + Q(L_X F, φ, Y) + Q(F, φ, [X,Y]) − 2 F_{Xμ} F^μ_Y φ`.
pub fn kg_commutator_residual<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>, zs: &[AffineField]) -> C::F {
    let f = curvature(c, a);
    let lhs = c.sub(
        &kg_operator(c, &cov_chain(c, phi, a, zs), a),
        &cov_chain(c, &kg_operator(c, phi, a), a, zs),
    );
    let rhs = match zs {
        [z] => q_form(c, &f, phi, a, z),
        [x, y] => {
            let dx = cov_along(c, phi, a, x);
            let dy = cov_along(c, phi, a, y);
            c.sum(&[
                q_form(c, &f, &dx, a, y),
                q_form(c, &f, &dy, a, x),
                q_form(c, &lie_form2(c, &f, x), phi, a, y),
                q_form(c, &f, phi, a, &x.bracket(y)),
                c.scale(&c.mul(&ff_contract(c, &f, x, y), phi), re(-2.0)),
            ])
        }
        _ => panic!("commutation index must have length 1 or 2"),
    };
    c.sub(&lhs, &rhs)
}

/// `Im(ψ · conj(D_mu χ))` for all `mu`.
fn im_pair<C: Calculus>(c: &C, psi: &C::F, chi: &C::F, a: &Potential<C::F>) -> [C::F; 4] {
    [0, 1, 2, 3].map(|mu| c.im_part(&c.mul(psi, &c.conj(&cov(c, chi, a, mu)))))
}

/// `L_Z^k J[φ]` minus its expansion in covariant derivatives, `k ∈ {1, 2}`.
pub fn lie_current_residual<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>, zs: &[AffineField]) -> [C::F; 4] {
    let j = current(c, phi, a);
    let lhs = lie_chain1(c, &j, zs);
    let f = curvature(c, a);
    let mod2 = c.abs2(phi);
    let rhs: [C::F; 4] = match zs {
        [z] => {
            let dz = cov_along(c, phi, a, z);
            let t1 = im_pair(c, &dz, phi, a);
            let t2 = im_pair(c, phi, &dz, a);
            let fz = interior(c, &f, z);
            [0, 1, 2, 3].map(|mu| c.sum(&[t1[mu].clone(), t2[mu].clone(), c.neg(&c.mul(&fz[mu], &mod2))]))
        }
        [x, y] => {
            let dx = cov_along(c, phi, a, x);
            let dy = cov_along(c, phi, a, y);
            let dxy = cov_along(c, &dy, a, x);
            let fx = interior(c, &f, x);
            let fy = interior(c, &f, y);
            let lxf = interior(c, &lie_form2(c, &f, x), y);
            let fbr = interior(c, &f, &x.bracket(y));
            let xmod = x.apply(c, &mod2);
            let t1 = im_pair(c, &dxy, phi, a);
            let t2 = im_pair(c, &dy, &dx, a);
            let t3 = im_pair(c, &dx, &dy, a);
            let t4 = im_pair(c, phi, &dxy, a);
            [0, 1, 2, 3].map(|mu| {
                // Im(ψ conj(i F χ)) = −F Re(ψ conj χ)
                let e2 = c.neg(&c.mul(&fx[mu], &c.re_part(&c.mul(&dy, &c.conj(phi)))));
                let e4 = c.neg(&c.mul(&fx[mu], &c.re_part(&c.mul(phi, &c.conj(&dy)))));
                c.sum(&[
                    t1[mu].clone(),
                    t2[mu].clone(),
                    e2,
                    t3[mu].clone(),
                    t4[mu].clone(),
                    e4,
                    c.neg(&c.mul(&c.add(&lxf[mu], &fbr[mu]), &mod2)),
                    c.neg(&c.mul(&fy[mu], &xmod)),
                ])
            })
        }
        _ => panic!("commutation index must have length 1 or 2"),
    };
    [0, 1, 2, 3].map(|mu| c.sub(&lhs[mu], &rhs[mu]))
}

/// `∂^ν (L_Z^k G)_{μν} − (L_Z^k J[φ])_μ`; zero iff `G` solves the Maxwell
/// equation with source `J[φ]`.
pub fn maxwell_commutation_residual<C: Calculus>(
    c: &C,
    g: &Form2<C::F>,
    phi: &C::F,
    a: &Potential<C::F>,
    zs: &[AffineField],
) -> [C::F; 4] {
    let lg = lie_chain(c, g, zs);
    // form_divergence gives ∂^μ G_{μν} = −∂^ν G_{νμ} after relabelling.
    let div = form_divergence(c, &lg).map(|v| c.neg(&v));
    let lj = lie_chain1(c, &current(c, phi, a), zs);
    [0, 1, 2, 3].map(|mu| c.sub(&div[mu], &lj[mu]))
}

/// `L_Z dA − d(L_Z A)`, which vanishes for every vector field.
pub fn lie_d_residual<C: Calculus>(c: &C, a: &Potential<C::F>, z: &AffineField) -> Form2<C::F> {
    let lhs = lie_form2(c, &curvature(c, a), z);
    let rhs = curvature(c, &lie_form1(c, a, z));
    form_sub(c, &lhs, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::JetCalc;
    use crate::geometry::GeneratorId;
    use crate::symmetries::manufactured::{FieldRecipe, PolyFields};

    fn pairs() -> Vec<(GeneratorId, GeneratorId)> {
        let g = GeneratorId::poincare();
        vec![(g[1], g[4]), (g[5], g[0]), (g[8], g[6]), (g[4], g[4]), (g[9], g[3])]
    }

    #[test]
    fn identities_hold_on_polynomials() {
        let rec = PolyFields::random(5, [1.5, 0.0, 0.0, 0.0]);
        let c = JetCalc::new(4, [1.8, 0.4, -0.7, 0.3]);
        let phi = rec.phi(&c);
        let a = rec.potential(&c);
        let mut worst: f64 = 0.0;
        for z in GeneratorId::poincare() {
            let zf = [z.field()];
            worst = worst.max(kg_commutator_residual(&c, &phi, &a, &zf).value().norm());
            for v in lie_current_residual(&c, &phi, &a, &zf) {
                worst = worst.max(v.value().norm());
            }
            for v in lie_d_residual(&c, &a, &z.field()).comp {
                worst = worst.max(v.value().norm());
            }
        }
        for (x, y) in pairs() {
            let zs = [x.field(), y.field()];
            worst = worst.max(cov_swap_residual(&c, &phi, &a, &zs[0], &zs[1]).value().norm());
            worst = worst.max(kg_commutator_residual(&c, &phi, &a, &zs).value().norm());
            for v in lie_current_residual(&c, &phi, &a, &zs) {
                worst = worst.max(v.value().norm());
            }
        }
        assert!(worst < 1e-10, "worst residual {worst:e}");
    }

    #[test]
    fn flat_translations_commute() {
        let rec = PolyFields::random(9, [0.0; 4]);
        let c = JetCalc::new(4, [0.3, 0.2, 0.1, -0.5]);
        let phi = rec.phi(&c);
        let z = c.zero();
        let a = [z.clone(), z.clone(), z.clone(), z];
        let lhs = c.sub(
            &kg_operator(&c, &cov_along(&c, &phi, &a, &GeneratorId::Translation(2).field()), &a),
            &cov_along(&c, &kg_operator(&c, &phi, &a), &a, &GeneratorId::Translation(2).field()),
        );
        assert!(lhs.value().norm() < 1e-12);
    }

    #[test]
    fn maxwell_residual_detects_non_solutions() {
        // F = dA with A = 0 and φ = 0 solves trivially; a nonzero current breaks it.
        let rec = PolyFields::random(2, [0.0; 4]);
        let c = JetCalc::new(3, [0.5, 0.1, 0.2, 0.3]);
        let z = c.zero();
        let a0 = [z.clone(), z.clone(), z.clone(), z.clone()];
        let g = curvature(&c, &a0);
        let r = maxwell_commutation_residual(&c, &g, &z, &a0, &[GeneratorId::Boost(1).field()]);
        assert!(r.iter().all(|v| v.value().norm() == 0.0));
        let phi = rec.phi(&c);
        let r = maxwell_commutation_residual(&c, &g, &phi, &a0, &[]);
        assert!(r.iter().any(|v| v.value().norm() > 1e-3));
    }
}
