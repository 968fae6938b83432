//! The gauge-invariant stress-energy tensor and its pointwise expansions.

use num_complex::Complex64 as C64;

use crate::algebra::{hodge, TwoForm, Vec4};
use crate::calculus::{re, Calculus, Form2, ETA};
use crate::error::Result;
use crate::fields::components::{frame_convert, null_decompose_in};
use crate::fields::ops::{cov_all, curvature, current, dual, form_divergence, kg_operator, Potential};
use crate::geometry::{null_frame, optical_coords, Point4};

/// Values at one point: `f`, its covariant derivatives `D_mu f` (lower
/// index) and a 2-form `G` (lower indices).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointFields {
    pub f: C64,
    pub df: [C64; 4],
    pub g: TwoForm,
}

impl PointFields {
    pub fn scalar(f: C64, df: [C64; 4]) -> Self {
        PointFields { f, df, g: [[0.0; 4]; 4] }
    }

    pub fn form(g: TwoForm) -> Self {
        PointFields { g, ..Default::default() }
    }

    pub fn scalar_part(&self) -> Self {
        PointFields::scalar(self.f, self.df)
    }

    pub fn form_part(&self) -> Self {
        PointFields::form(self.g)
    }

    fn d_along(&self, v: &Vec4) -> C64 {
        (0..4).map(|mu| self.df[mu] * v[mu]).sum()
    }
}

/// `T_{mu nu}` with lower indices, mass 1.
pub fn stress_tensor(pf: &PointFields) -> [[f64; 4]; 4] {
    let g = &pf.g;
    let d = hodge(g);
    let lag = (0..4).map(|m| ETA[m] * pf.df[m].norm_sqr()).sum::<f64>() + pf.f.norm_sqr();
    let mut t = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in mu..4 {
            let mut v = 0.0;
            for de in 0..4 {
                v += 0.5 * ETA[de] * (g[mu][de] * g[nu][de] + d[mu][de] * d[nu][de]);
            }
            v += (pf.df[mu].conj() * pf.df[nu]).re;
            if mu == nu {
                v -= 0.5 * ETA[mu] * lag;
            }
            t[mu][nu] = v;
            t[nu][mu] = v;
        }
    }
    t
}

/// `T(X, Y)` for vectors given by upper components.
pub fn stress_energy(pf: &PointFields, x: &Vec4, y: &Vec4) -> f64 {
    contract_tensor(&stress_tensor(pf), x, y)
}

pub fn contract_tensor(t: &[[f64; 4]; 4], x: &Vec4, y: &Vec4) -> f64 {
    let mut s = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            s += t[mu][nu] * x[mu] * y[nu];
        }
    }
    s
}

/// `m^{mu nu} T_{mu nu}`.
pub fn trace(t: &[[f64; 4]; 4]) -> f64 {
    (0..4).map(|m| ETA[m] * t[m][m]).sum()
}

/// Trace of the Maxwell part alone; zero for every 2-form.
pub fn maxwell_trace(g: &TwoForm) -> f64 {
    trace(&stress_tensor(&PointFields::form(*g)))
}

/// Energy multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Multiplier {
    /// `∂_t`, Killing.
    T0,
    /// Scaling field `t∂_t + r∂_r`, with deformation tensor `m`.
    S,
}

impl Multiplier {
    pub fn at(&self, p: &Point4) -> Vec4 {
        match self {
            Multiplier::T0 => [1.0, 0.0, 0.0, 0.0],
            Multiplier::S => [p.t, p.x[0], p.x[1], p.x[2]],
        }
    }

    /// `T_{mu nu} (π^X)^{mu nu}` with `π^X = ½ L_X m`.
    pub fn deformation_density(&self, t: &[[f64; 4]; 4]) -> f64 {
        match self {
            Multiplier::T0 => 0.0,
            Multiplier::S => trace(t),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Multiplier::T0 => "T0",
            Multiplier::S => "S",
        }
    }
}

struct NullView {
    tau: f64,
    tp: f64,
    tm: f64,
    t: f64,
    frame: [Vec4; 4],
}

fn null_view(p: &Point4) -> Result<NullView> {
    let frame = null_frame(p)?;
    crate::geometry::hyperboloid_normal(p)?;
    let o = optical_coords(p);
    Ok(NullView {
        tau: o.tau.expect("checked by hyperboloid_normal"),
        tp: o.tau_plus,
        tm: o.tau_minus,
        t: p.t,
        frame,
    })
}

/// Right-hand side of the null expansion of `4 T[f, G](T0, T̄)`.
pub fn expansion_t0(pf: &PointFields, p: &Point4) -> Result<f64> {
    let v = null_view(p)?;
    let n = null_decompose_in(&pf.g, &v.frame);
    let [l, lb, e1, e2] = &v.frame;
    let a2 = n.alpha[0].powi(2) + n.alpha[1].powi(2);
    let ab2 = n.alphab[0].powi(2) + n.alphab[1].powi(2);
    let sl = pf.d_along(e1).norm_sqr() + pf.d_along(e2).norm_sqr();
    Ok(v.tm / v.tau * (ab2 + pf.d_along(lb).norm_sqr())
        + v.tp / v.tau * (a2 + pf.d_along(l).norm_sqr())
        + 2.0 * v.t / v.tau * (n.rho * n.rho + n.sigma * n.sigma + sl + pf.f.norm_sqr()))
}

/// Right-hand side of the null expansion of `4 T[G](S, T̄)`.
pub fn expansion_s(g: &TwoForm, p: &Point4) -> Result<f64> {
    let v = null_view(p)?;
    let n = null_decompose_in(g, &v.frame);
    let a2 = n.alpha[0].powi(2) + n.alpha[1].powi(2);
    let ab2 = n.alphab[0].powi(2) + n.alphab[1].powi(2);
    Ok(v.tm * v.tm / v.tau * ab2 + v.tp * v.tp / v.tau * a2 + 2.0 * v.tau * (n.rho * n.rho + n.sigma * n.sigma))
}

/// `(4T[f,G](T0,T̄) − expansion, 4T[G](S,T̄) − expansion)`.
pub fn density_expansion_residual(pf: &PointFields, p: &Point4) -> Result<(f64, f64)> {
    let tb = crate::geometry::hyperboloid_normal(p)?;
    let lhs_t0 = 4.0 * stress_energy(pf, &Multiplier::T0.at(p), &tb);
    let lhs_s = 4.0 * stress_energy(&pf.form_part(), &Multiplier::S.at(p), &tb);
    Ok((lhs_t0 - expansion_t0(pf, p)?, lhs_s - expansion_s(&pf.g, p)?))
}

/// `|ñt G|² = G_{T̄N̄}² + |G(T̄)|²_γ + |G(N̄)|²_γ + σ²`.
pub fn hyperb_norm2(g: &TwoForm, p: &Point4) -> Result<f64> {
    let n = null_decompose_in(g, &null_frame(p)?);
    let h = frame_convert(&n, p)?;
    Ok(h.tn * h.tn + h.te[0].powi(2) + h.te[1].powi(2) + h.ne[0].powi(2) + h.ne[1].powi(2) + h.sigma * h.sigma)
}

/// `T[G](S, T̄) / (τ |ñt G|²)`, absent when `G` vanishes.
pub fn hyperb_density_bounds(g: &TwoForm, p: &Point4) -> Result<Option<f64>> {
    let tb = crate::geometry::hyperboloid_normal(p)?;
    let n2 = hyperb_norm2(g, p)?;
    let tau = optical_coords(p).tau.expect("checked by hyperboloid_normal");
    if n2 <= 0.0 {
        return Ok(None);
    }
    let e = stress_energy(&PointFields::form(*g), &Multiplier::S.at(p), &tb);
    Ok(Some(e / (tau * n2)))
}

/// `T_{mu nu}` under any calculus; `a` is the connection used in `D f`.
pub fn stress_tensor_calc<C: Calculus>(c: &C, f: &C::F, a: &Potential<C::F>, g: &Form2<C::F>) -> [[C::F; 4]; 4] {
    let d = dual(c, g);
    let df = cov_all(c, f, a);
    let lag_terms: Vec<C::F> = (0..4)
        .map(|m| c.scale(&c.abs2(&df[m]), re(ETA[m])))
        .chain(std::iter::once(c.abs2(f)))
        .collect();
    let lag = c.sum(&lag_terms);
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            let mut terms = Vec::with_capacity(10);
            for de in 0..4 {
                if de != mu && de != nu {
                    let gg = c.mul(&g.get(c, mu, de), &g.get(c, nu, de));
                    let dd = c.mul(&d.get(c, mu, de), &d.get(c, nu, de));
                    terms.push(c.scale(&c.add(&gg, &dd), re(0.5 * ETA[de])));
                }
            }
            terms.push(c.re_part(&c.mul(&c.conj(&df[mu]), &df[nu])));
            if mu == nu {
                terms.push(c.scale(&lag, re(-0.5 * ETA[mu])));
            }
            c.sum(&terms)
        })
    })
}

/// `(∂^mu T_{mu nu}, G_{mu nu} J[G]^mu + Re(conj((□_A − 1) f) D_nu f) + F_{nu mu} J^mu[f])`
/// with `F = dA` and `J[G]_mu = ∂^nu G_{mu nu}`. The two agree whenever `G` is closed.
pub fn divergence_stress<C: Calculus>(
    c: &C,
    f: &C::F,
    a: &Potential<C::F>,
    g: &Form2<C::F>,
) -> ([C::F; 4], [C::F; 4]) {
    let t = stress_tensor_calc(c, f, a, g);
    let lhs = [0, 1, 2, 3].map(|nu| {
        let terms: Vec<C::F> = (0..4).map(|mu| c.scale(&c.deriv(&t[mu][nu], mu), re(ETA[mu]))).collect();
        c.sum(&terms)
    });
    let jg = form_divergence(c, g).map(|v| c.neg(&v));
    let jf = current(c, f, a);
    let fa = curvature(c, a);
    let box_f = c.conj(&kg_operator(c, f, a));
    let df = cov_all(c, f, a);
    let rhs = [0, 1, 2, 3].map(|nu| {
        let mut terms = Vec::with_capacity(9);
        for mu in 0..4 {
            if mu != nu {
                terms.push(c.scale(&c.mul(&g.get(c, mu, nu), &jg[mu]), re(ETA[mu])));
                terms.push(c.scale(&c.mul(&fa.get(c, nu, mu), &jf[mu]), re(ETA[mu])));
            }
        }
        terms.push(c.re_part(&c.mul(&box_f, &df[nu])));
        c.sum(&terms)
    });
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::form_from_eb;
    use crate::calculus::JetCalc;
    use crate::fields::split::coulomb_form;
    use crate::symmetries::manufactured::{FieldRecipe, GaussFields, PolyFields};
    use proptest::prelude::*;

    fn arb_point_fields() -> impl Strategy<Value = PointFields> {
        (prop::array::uniform6(-2.0..2.0f64), prop::array::uniform10(-2.0..2.0f64)).prop_map(|(gp, s)| PointFields {
            f: C64::new(s[0], s[1]),
            df: [
                C64::new(s[2], s[3]),
                C64::new(s[4], s[5]),
                C64::new(s[6], s[7]),
                C64::new(s[8], s[9]),
            ],
            g: crate::algebra::form_from_pairs(&gp),
        })
    }

    fn arb_interior_point() -> impl Strategy<Value = Point4> {
        (0.1..5.0f64, 0.05..0.95f64, prop::array::uniform3(-1.0..1.0f64))
            .prop_filter("direction", |(_, _, w)| w.iter().map(|c| c * c).sum::<f64>() > 1e-2)
            .prop_map(|(r, frac, w)| {
                let n = w.iter().map(|c| c * c).sum::<f64>().sqrt();
                Point4::polar(r / frac, r, w.map(|c| c / n))
            })
    }

    #[test]
    fn coulomb_energy_density() {
        let q0 = 0.7;
        let p = Point4::new(4.0, [1.2, -0.5, 0.9]);
        let r = p.r();
        let pf = PointFields::form(coulomb_form(q0, &p));
        let e = stress_energy(&pf, &Multiplier::T0.at(&p), &Multiplier::T0.at(&p));
        assert!((e - q0 * q0 / (2.0 * r.powi(4))).abs() < 1e-12);
        let ratio = hyperb_density_bounds(&pf.g, &p).unwrap().unwrap();
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_scalar_has_mass_energy_only() {
        let pf = PointFields::scalar(C64::new(0.6, 0.0), [C64::default(); 4]);
        let t0 = [1.0, 0.0, 0.0, 0.0];
        assert!((stress_energy(&pf, &t0, &t0) - 0.18).abs() < 1e-15);
        assert_eq!(stress_energy(&PointFields::default(), &t0, &t0), 0.0);
    }

    #[test]
    fn pure_sigma_ratio_is_half() {
        // σ = B·r̂ on the z axis: a radial magnetic field.
        let p = Point4::new(3.0, [0.0, 0.0, 1.0]);
        let g = form_from_eb([0.0; 3], [0.0, 0.0, 2.0]);
        assert!((hyperb_density_bounds(&g, &p).unwrap().unwrap() - 0.5).abs() < 1e-12);
        assert!(hyperb_density_bounds(&[[0.0; 4]; 4], &p).unwrap().is_none());
    }

    #[test]
    fn divergence_formula_on_jets() {
        let rec = GaussFields::random(3, 1.0, 2.0);
        let other = PolyFields::random(8, [2.0, 0.0, 0.0, 0.0]);
        let c = JetCalc::new(3, [2.2, 0.3, -0.4, 0.1]);
        let f = rec.phi(&c);
        let a = rec.potential(&c);
        let g = crate::fields::ops::curvature(&c, &other.potential(&c));
        let (lhs, rhs) = divergence_stress(&c, &f, &a, &g);
        for nu in 0..4 {
            let d = (lhs[nu].value() - rhs[nu].value()).norm();
            assert!(d < 1e-10, "nu={nu} diff {d:e}");
        }
    }

    #[test]
    fn zero_fields_have_zero_divergence() {
        let c = JetCalc::new(2, [2.0, 0.1, 0.2, 0.3]);
        let z = c.zero();
        let a = [z.clone(), z.clone(), z.clone(), z.clone()];
        let g = crate::fields::ops::curvature(&c, &a);
        let (lhs, rhs) = divergence_stress(&c, &z, &a, &g);
        assert!(lhs.iter().chain(rhs.iter()).all(|v| v.value().norm() == 0.0));
    }

    proptest! {
        #[test]
        fn tensor_is_symmetric_and_bilinear(pf in arb_point_fields(), x in prop::array::uniform4(-1.0..1.0f64),
                                            y in prop::array::uniform4(-1.0..1.0f64), s in -2.0..2.0f64) {
            let a = stress_energy(&pf, &x, &y);
            prop_assert!((a - stress_energy(&pf, &y, &x)).abs() < 1e-12);
            let xs: Vec4 = std::array::from_fn(|i| s * x[i] + y[i]);
            let lin = s * a + stress_energy(&pf, &y, &y);
            prop_assert!((stress_energy(&pf, &xs, &y) - lin).abs() < 1e-11);
            prop_assert!(maxwell_trace(&pf.g).abs() < 1e-12);
        }

        #[test]
        fn expansions_match(pf in arb_point_fields(), p in arb_interior_point()) {
            let (r0, rs) = density_expansion_residual(&pf, &p).unwrap();
            let scale = 1.0 + expansion_t0(&pf, &p).unwrap() + expansion_s(&pf.g, &p).unwrap();
            prop_assert!(r0.abs() < 1e-12 * scale && rs.abs() < 1e-12 * scale, "{r0:e} {rs:e}");
            prop_assert!(expansion_t0(&pf, &p).unwrap() >= 0.0);
            prop_assert!(expansion_s(&pf.g, &p).unwrap() >= 0.0);
        }
    }
}
