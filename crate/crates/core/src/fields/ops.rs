//! Gauge-covariant differential operators written once for every calculus.
//!
//! A potential is a real 1-form `A_mu` (lower index); scalars are complex.

use crate::calculus::{re, AffineField, Calculus, Form2, ETA, I, PAIRS};

pub type Potential<F> = [F; 4];

/// `D_mu φ = ∂_mu φ + i A_mu φ`.
pub fn cov<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>, mu: usize) -> C::F {
    c.add(&c.deriv(phi, mu), &c.scale(&c.mul(&a[mu], phi), I))
}

/// All four `D_mu φ`.
pub fn cov_all<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>) -> [C::F; 4] {
    [0, 1, 2, 3].map(|mu| cov(c, phi, a, mu))
}

/// `D_Z φ = Z^mu D_mu φ`.
pub fn cov_along<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>, z: &AffineField) -> C::F {
    z.contract(c, |mu| cov(c, phi, a, mu))
}

/// Nested `D_{Z_1} … D_{Z_k} φ` (outermost first).
pub fn cov_chain<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>, zs: &[AffineField]) -> C::F {
    zs.iter()
        .rev()
        .fold(phi.clone(), |f, z| cov_along(c, &f, a, z))
}

/// `□_A φ = m^{mu nu} D_mu D_nu φ`.
pub fn box_a<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>) -> C::F {
    let terms: Vec<C::F> = (0..4)
        .map(|mu| {
            let d = cov(c, phi, a, mu);
            c.scale(&cov(c, &d, a, mu), re(ETA[mu]))
        })
        .collect();
    c.sum(&terms)
}

/// `(□_A − 1) φ`.
pub fn kg_operator<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>) -> C::F {
    c.sub(&box_a(c, phi, a), phi)
}

/// `F = dA`.
pub fn curvature<C: Calculus>(c: &C, a: &Potential<C::F>) -> Form2<C::F> {
    Form2 {
        comp: PAIRS.map(|(mu, nu)| c.sub(&c.deriv(&a[nu], mu), &c.deriv(&a[mu], nu))),
    }
}

/// `J_mu = Im(φ · conj(D_mu φ))`.
pub fn current<C: Calculus>(c: &C, phi: &C::F, a: &Potential<C::F>) -> [C::F; 4] {
    [0, 1, 2, 3].map(|mu| {
        let d = cov(c, phi, a, mu);
        c.im_part(&c.mul(phi, &c.conj(&d)))
    })
}

/// Hodge dual of a 2-form with `ε_{0123} = +1`: `(E, B) ↦ (B, −E)`.
pub fn dual<C: Calculus>(c: &C, g: &Form2<C::F>) -> Form2<C::F> {
    let [g01, g02, g03, g12, g13, g23] = &g.comp;
    Form2 {
        comp: [
            g23.clone(),
            c.neg(g13),
            g12.clone(),
            c.neg(g03),
            g02.clone(),
            c.neg(g01),
        ],
    }
}

/// `(L_Z G)_{mu nu} = Z(G_{mu nu}) + ∂_mu Z^a G_{a nu} + ∂_nu Z^a G_{mu a}`.
pub fn lie_form2<C: Calculus>(c: &C, g: &Form2<C::F>, z: &AffineField) -> Form2<C::F> {
    let jac = z.jacobian();
    Form2 {
        comp: std::array::from_fn(|slot| {
            let (mu, nu) = PAIRS[slot];
            let mut acc = z.apply(c, &g.comp[slot]);
            for a in 0..4 {
                if jac[a][mu] != 0.0 && a != nu {
                    acc = c.add(&acc, &c.scale(&g.get(c, a, nu), re(jac[a][mu])));
                }
                if jac[a][nu] != 0.0 && a != mu {
                    acc = c.add(&acc, &c.scale(&g.get(c, mu, a), re(jac[a][nu])));
                }
            }
            acc
        }),
    }
}

/// `(L_Z w)_mu = Z(w_mu) + ∂_mu Z^a w_a` for a 1-form.
pub fn lie_form1<C: Calculus>(c: &C, w: &[C::F; 4], z: &AffineField) -> [C::F; 4] {
    let jac = z.jacobian();
    [0, 1, 2, 3].map(|mu| {
        let mut acc = z.apply(c, &w[mu]);
        for a in 0..4 {
            if jac[a][mu] != 0.0 {
                acc = c.add(&acc, &c.scale(&w[a], re(jac[a][mu])));
            }
        }
        acc
    })
}

/// `G_{Z mu} = Z^nu G_{nu mu}`.
pub fn interior<C: Calculus>(c: &C, g: &Form2<C::F>, z: &AffineField) -> [C::F; 4] {
    [0, 1, 2, 3].map(|mu| z.contract(c, |nu| g.get(c, nu, mu)))
}

/// `Q(G, f, Z) = 2i Z^nu G_{mu nu} D^mu f + i ∂^mu(Z^nu G_{mu nu}) f`.
pub fn q_form<C: Calculus>(
    c: &C,
    g: &Form2<C::F>,
    f: &C::F,
    a: &Potential<C::F>,
    z: &AffineField,
) -> C::F {
    // W_mu = Z^nu G_{mu nu} = −G_{Z mu}
    let w = interior(c, g, z).map(|v| c.neg(&v));
    let mut terms = Vec::with_capacity(8);
    for mu in 0..4 {
        let df = cov(c, f, a, mu);
        terms.push(c.scale(&c.mul(&w[mu], &df), I * (2.0 * ETA[mu])));
        terms.push(c.scale(&c.mul(&c.deriv(&w[mu], mu), f), I * ETA[mu]));
    }
    c.sum(&terms)
}

/// `F_{X mu} F^mu_Y`.
pub fn ff_contract<C: Calculus>(c: &C, g: &Form2<C::F>, x: &AffineField, y: &AffineField) -> C::F {
    let gx = interior(c, g, x);
    let gy = interior(c, g, y);
    // F^mu_Y = m^{mu mu} F_{mu Y} = −m^{mu mu} F_{Y mu}
    let terms: Vec<C::F> = (0..4)
        .map(|mu| c.scale(&c.mul(&gx[mu], &gy[mu]), re(-ETA[mu])))
        .collect();
    c.sum(&terms)
}

/// Componentwise combination of 2-forms.
pub fn form_sub<C: Calculus>(c: &C, a: &Form2<C::F>, b: &Form2<C::F>) -> Form2<C::F> {
    Form2 {
        comp: std::array::from_fn(|i| c.sub(&a.comp[i], &b.comp[i])),
    }
}

pub fn form_add<C: Calculus>(c: &C, a: &Form2<C::F>, b: &Form2<C::F>) -> Form2<C::F> {
    Form2 {
        comp: std::array::from_fn(|i| c.add(&a.comp[i], &b.comp[i])),
    }
}

/// Divergence `∂^mu G_{mu nu}`.
pub fn form_divergence<C: Calculus>(c: &C, g: &Form2<C::F>) -> [C::F; 4] {
    [0, 1, 2, 3].map(|nu| {
        let terms: Vec<C::F> = (0..4)
            .filter(|&mu| mu != nu)
            .map(|mu| c.scale(&c.deriv(&g.get(c, mu, nu), mu), re(ETA[mu])))
            .collect();
        c.sum(&terms)
    })
}

/// Cyclic sums `∂_a G_{bc} + ∂_b G_{ca} + ∂_c G_{ab}` for `a < b < c`.
pub fn bianchi<C: Calculus>(c: &C, g: &Form2<C::F>) -> [C::F; 4] {
    [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)].map(|(a, b, d)| {
        c.sum(&[
            c.deriv(&g.get(c, b, d), a),
            c.deriv(&g.get(c, d, a), b),
            c.deriv(&g.get(c, a, b), d),
        ])
    })
}

/// Gauge transform `(A − dχ, e^{iχ} φ)`.
pub fn gauge_transform<C: Calculus>(
    c: &C,
    phi: &C::F,
    a: &Potential<C::F>,
    chi: &C::F,
) -> (C::F, Potential<C::F>) {
    let phase = c.exp(&c.scale(chi, I));
    let a2 = [0, 1, 2, 3].map(|mu| c.sub(&a[mu], &c.deriv(chi, mu)));
    (c.mul(&phase, phi), a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::JetCalc;
    use crate::jet::Jet;
    use num_complex::Complex64 as C64;

    fn jc() -> JetCalc {
        JetCalc::new(4, [0.7, 0.3, -0.4, 0.9])
    }

    fn sample_fields(c: &JetCalc) -> (Jet, Potential<Jet>) {
        let x: Vec<Jet> = (0..4).map(|m| c.coord(m)).collect();
        let r2 = c.sum(&[c.mul(&x[1], &x[1]), c.mul(&x[2], &x[2]), c.mul(&x[3], &x[3])]);
        let phi = c.exp(&c.add(
            &c.scale(&r2, re(-0.3)),
            &c.scale(&c.add(&x[1], &x[0]), C64::new(0.0, 1.2)),
        ));
        let a = [
            c.scale(&c.mul(&x[1], &x[2]), re(0.2)),
            c.scale(&c.mul(&x[0], &x[3]), re(-0.5)),
            c.exp(&c.scale(&x[1], re(0.3))),
            c.mul(&x[2], &x[2]),
        ];
        (phi, a)
    }

    #[test]
    fn pure_gauge_has_no_curvature() {
        let c = jc();
        let x1 = c.coord(1);
        let chi = c.mul(&x1, &c.coord(2));
        let a = [0, 1, 2, 3].map(|mu| c.deriv(&chi, mu));
        let f = curvature(&c, &a);
        for comp in &f.comp {
            assert!(comp.value().norm() < 1e-14);
        }
    }

    #[test]
    fn magnetic_potential() {
        let c = jc();
        let z = c.zero();
        let a = [z.clone(), z.clone(), c.scale(&c.coord(1), re(2.5)), z];
        let f = curvature(&c, &a);
        let vals: Vec<f64> = f.comp.iter().map(|j| j.value().re).collect();
        assert_eq!(vals, vec![0.0, 0.0, 0.0, 2.5, 0.0, 0.0]);
    }

    #[test]
    fn gauge_covariance_and_invariant_current() {
        let c = jc();
        let (phi, a) = sample_fields(&c);
        let x: Vec<Jet> = (0..4).map(|m| c.coord(m)).collect();
        let chi = c.add(&c.mul(&x[0], &x[1]), &c.mul(&x[2], &c.mul(&x[2], &x[3])));
        let (phi2, a2) = gauge_transform(&c, &phi, &a, &chi);
        let phase = c.exp(&c.scale(&chi, I));
        for mu in 0..4 {
            let lhs = cov(&c, &phi2, &a2, mu);
            let rhs = c.mul(&phase, &cov(&c, &phi, &a, mu));
            assert!((lhs.value() - rhs.value()).norm() < 1e-13);
        }
        let j1 = current(&c, &phi, &a);
        let j2 = current(&c, &phi2, &a2);
        for mu in 0..4 {
            assert!((j1[mu].value() - j2[mu].value()).norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_current() {
        let c = jc();
        let k = [0.5, 1.0, -2.0, 0.25];
        let mut arg = c.zero();
        for mu in 0..4 {
            arg = c.add(&arg, &c.scale(&c.coord(mu), C64::new(0.0, k[mu])));
        }
        let phi = c.exp(&arg);
        let z = c.zero();
        let a = [z.clone(), z.clone(), z.clone(), z];
        let j = current(&c, &phi, &a);
        for mu in 0..4 {
            assert!((j[mu].value().re + k[mu]).abs() < 1e-13);
        }
    }

    #[test]
    fn double_dual_and_bianchi() {
        let c = jc();
        let (_, a) = sample_fields(&c);
        let f = curvature(&c, &a);
        let dd = dual(&c, &dual(&c, &f));
        for i in 0..6 {
            assert!((dd.comp[i].value() + f.comp[i].value()).norm() < 1e-14);
        }
        for b in bianchi(&c, &f) {
            assert!(b.value().norm() < 1e-12);
        }
    }

    #[test]
    fn q_form_single_term() {
        // f = x1, G with only F_{10} = −k, Z = ∂_t gives Q = −2ik.
        let c = jc();
        let k = 0.75;
        let z = c.zero();
        let mut g = Form2 { comp: std::array::from_fn(|_| z.clone()) };
        g.comp[0] = c.constant(re(k)); // F_{01} = k
        let a = [z.clone(), z.clone(), z.clone(), z];
        let mut zt = AffineField::ZERO;
        zt.c[0] = 1.0;
        let q = q_form(&c, &g, &c.coord(1), &a, &zt).value();
        assert!((q - C64::new(0.0, -2.0 * k)).norm() < 1e-14);
    }

    #[test]
    fn lie_of_closed_form_is_closed() {
        let c = jc();
        let (_, a) = sample_fields(&c);
        let f = curvature(&c, &a);
        for gid in crate::geometry::GeneratorId::all() {
            let lf = lie_form2(&c, &f, &gid.field());
            for b in bianchi(&c, &lf) {
                assert!(b.value().norm() < 1e-12);
            }
        }
    }
}
