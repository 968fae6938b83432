//! Null and hyperboloidal views of a 2-form at a point.

use crate::algebra::{contract, hodge, lower, TwoForm, Vec4};
use crate::error::Result;
use crate::geometry::{null_frame, optical_coords, tetrad_at, Point4, TetradKind};

/// `α_A = G(L, e_A)`, `ᾱ_A = G(L̄, e_A)`, `ρ = ½ G(L̄, L)`, `σ = G(e1, e2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NullComponents {
    pub alpha: [f64; 2],
    pub alphab: [f64; 2],
    pub rho: f64,
    pub sigma: f64,
}

impl NullComponents {
    pub fn max_abs(&self) -> f64 {
        [self.alpha[0], self.alpha[1], self.alphab[0], self.alphab[1], self.rho, self.sigma]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, o: &NullComponents) -> NullComponents {
        NullComponents {
            alpha: [self.alpha[0] - o.alpha[0], self.alpha[1] - o.alpha[1]],
            alphab: [self.alphab[0] - o.alphab[0], self.alphab[1] - o.alphab[1]],
            rho: self.rho - o.rho,
            sigma: self.sigma - o.sigma,
        }
    }
}

pub fn null_decompose_in(g: &TwoForm, frame: &[Vec4; 4]) -> NullComponents {
    let [l, lb, e1, e2] = frame;
    NullComponents {
        alpha: [contract(g, l, e1), contract(g, l, e2)],
        alphab: [contract(g, lb, e1), contract(g, lb, e2)],
        rho: 0.5 * contract(g, lb, l),
        sigma: contract(g, e1, e2),
    }
}

pub fn null_decompose(g: &TwoForm, p: &Point4) -> Result<NullComponents> {
    Ok(null_decompose_in(g, &null_frame(p)?))
}

/// Reassembles the Cartesian components from the null components, using
/// the dual coframe `θ^L = −½ L̄♭`, `θ^L̄ = −½ L♭`, `θ^A = e_A♭`.
pub fn null_reassemble(n: &NullComponents, p: &Point4) -> Result<TwoForm> {
    let [l, lb, e1, e2] = null_frame(p)?;
    let th_l = lower(&lb).map(|v| -0.5 * v);
    let th_lb = lower(&l).map(|v| -0.5 * v);
    let th_e = [lower(&e1), lower(&e2)];
    let mut g = [[0.0; 4]; 4];
    let mut wedge = |s: f64, a: &Vec4, b: &Vec4| {
        for mu in 0..4 {
            for nu in 0..4 {
                g[mu][nu] += s * (a[mu] * b[nu] - b[mu] * a[nu]);
            }
        }
    };
    // G(L, L̄) = −2ρ
    wedge(-2.0 * n.rho, &th_l, &th_lb);
    for a in 0..2 {
        wedge(n.alpha[a], &th_l, &th_e[a]);
        wedge(n.alphab[a], &th_lb, &th_e[a]);
    }
    wedge(n.sigma, &th_e[0], &th_e[1]);
    Ok(g)
}

/// Electric and magnetic parts relative to the hyperboloid:
/// `Ē_i = G(T̄, ē_i)`, `H̄_i = *G(T̄, ē_i)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EmHyperbComponents {
    pub e: [f64; 3],
    pub h: [f64; 3],
}

pub fn em_decompose(g: &TwoForm, p: &Point4) -> Result<EmHyperbComponents> {
    let fr = tetrad_at(p, TetradKind::HyperbOrthonormal)?;
    let d = hodge(g);
    let tb = fr.legs[0];
    Ok(EmHyperbComponents {
        e: [1, 2, 3].map(|i| contract(g, &tb, &fr.legs[i])),
        h: [1, 2, 3].map(|i| contract(&d, &tb, &fr.legs[i])),
    })
}

/// `|G|_h² = Σ_i G(T̄, ē_i)² + Σ_{i<j} G(ē_i, ē_j)²`.
pub fn h_norm2(g: &TwoForm, p: &Point4) -> Result<f64> {
    let fr = tetrad_at(p, TetradKind::HyperbOrthonormal)?;
    let l = &fr.legs;
    let mut s = 0.0;
    for i in 1..4 {
        s += contract(g, &l[0], &l[i]).powi(2);
        for j in i + 1..4 {
            s += contract(g, &l[i], &l[j]).powi(2);
        }
    }
    Ok(s)
}

/// Components in the radial hyperboloidal frame `(T̄, N̄, e_A)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HyperbRadialComponents {
    pub tn: f64,
    pub te: [f64; 2],
    pub ne: [f64; 2],
    pub sigma: f64,
}

/// Converts null components to the `(T̄, N̄, e_A)` frame:
/// `G_{T̄N̄} = ρ`, `2G_{T̄e_A} = (τ₊α + τ₋ᾱ)/τ`, `2G_{N̄e_A} = (τ₊α − τ₋ᾱ)/τ`.
pub fn frame_convert(n: &NullComponents, p: &Point4) -> Result<HyperbRadialComponents> {
    tetrad_at(p, TetradKind::HyperbRadial)?;
    let o = optical_coords(p);
    let tau = o.tau.expect("checked by the frame request");
    let (tp, tm) = (o.tau_plus / tau, o.tau_minus / tau);
    Ok(HyperbRadialComponents {
        tn: n.rho,
        te: [0, 1].map(|a| 0.5 * (tp * n.alpha[a] + tm * n.alphab[a])),
        ne: [0, 1].map(|a| 0.5 * (tp * n.alpha[a] - tm * n.alphab[a])),
        sigma: n.sigma,
    })
}

/// The same components by direct contraction with the radial hyperboloidal frame.
pub fn hyperb_radial_direct(g: &TwoForm, p: &Point4) -> Result<HyperbRadialComponents> {
    let fr = tetrad_at(p, TetradKind::HyperbRadial)?;
    let [tb, nb, e1, e2] = &fr.legs;
    Ok(HyperbRadialComponents {
        tn: contract(g, tb, nb),
        te: [contract(g, tb, e1), contract(g, tb, e2)],
        ne: [contract(g, nb, e1), contract(g, nb, e2)],
        sigma: contract(g, e1, e2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{form_from_eb, form_from_pairs, form_max_diff};
    use proptest::prelude::*;

    fn coulomb(q0: f64, p: &Point4) -> TwoForm {
        let r = p.r();
        form_from_eb(p.x.map(|c| q0 * c / (r * r * r)), [0.0; 3])
    }

    #[test]
    fn coulomb_is_pure_rho() {
        let p = Point4::new(3.0, [1.0, -2.0, 0.5]);
        let n = null_decompose(&coulomb(0.7, &p), &p).unwrap();
        let r2 = 1.0 + 4.0 + 0.25;
        assert!((n.rho - 0.7 / r2).abs() < 1e-15);
        assert!(n.alpha.iter().chain(&n.alphab).all(|v| v.abs() < 1e-15));
        assert!(n.sigma.abs() < 1e-15);
        let em = em_decompose(&hodge(&coulomb(0.7, &p)), &p).unwrap();
        assert!(em.e.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn radial_magnetic_field_is_sigma() {
        // B = B0 ẑ seen from a point on the z axis is radial.
        let g = form_from_eb([0.0; 3], [0.0, 0.0, 1.5]);
        let p = Point4::new(2.0, [0.0, 0.0, 1.0]);
        let n = null_decompose(&g, &p).unwrap();
        assert!((n.sigma - 1.5).abs() < 1e-15 && n.rho.abs() < 1e-15);
        // From the x axis the same field is tangential and σ vanishes.
        let q = Point4::new(2.0, [1.0, 0.0, 0.0]);
        assert!(null_decompose(&g, &q).unwrap().sigma.abs() < 1e-15);
    }

    #[test]
    fn conversion_examples() {
        let p = Point4::new(5.0, [3.0, 0.0, 0.0]);
        let rho_only = NullComponents { rho: 2.0, ..Default::default() };
        assert_eq!(frame_convert(&rho_only, &p).unwrap().tn, 2.0);
        let alpha_only = NullComponents { alpha: [1.0, -0.5], ..Default::default() };
        let c = frame_convert(&alpha_only, &p).unwrap();
        assert!((2.0 * c.te[0] - 2.0).abs() < 1e-15 && (2.0 * c.te[1] + 1.0).abs() < 1e-15);
        let z = frame_convert(&NullComponents::default(), &p).unwrap();
        assert_eq!(z, HyperbRadialComponents::default());
    }

    fn arb_case() -> impl Strategy<Value = (TwoForm, Point4)> {
        (
            prop::array::uniform6(-2.0..2.0f64),
            0.05..0.95f64,
            prop::array::uniform3(-1.0..1.0f64),
            1.0..30.0f64,
        )
            .prop_filter_map("direction", |(c, frac, d, t)| {
                let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                (n > 1e-3).then(|| (form_from_pairs(&c), Point4::polar(t, frac * t, d.map(|v| v / n))))
            })
    }

    proptest! {
        #[test]
        fn reassembly_is_identity((g, p) in arb_case()) {
            let n = null_decompose(&g, &p).unwrap();
            let back = null_reassemble(&n, &p).unwrap();
            prop_assert!(form_max_diff(&back, &g) < 1e-12);
        }

        #[test]
        fn conversion_matches_contraction((g, p) in arb_case()) {
            let n = null_decompose(&g, &p).unwrap();
            let a = frame_convert(&n, &p).unwrap();
            let b = hyperb_radial_direct(&g, &p).unwrap();
            let s = 1e-12 * (1.0 + p.t);
            prop_assert!((a.tn - b.tn).abs() < s && (a.sigma - b.sigma).abs() < s);
            for k in 0..2 {
                prop_assert!((a.te[k] - b.te[k]).abs() < s && (a.ne[k] - b.ne[k]).abs() < s);
            }
        }

        #[test]
        fn electric_magnetic_pythagoras((g, p) in arb_case()) {
            let em = em_decompose(&g, &p).unwrap();
            let lhs = h_norm2(&g, &p).unwrap();
            let rhs: f64 = em.e.iter().chain(&em.h).map(|v| v * v).sum();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs));
        }
    }
}
