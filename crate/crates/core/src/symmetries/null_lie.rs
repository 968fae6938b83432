//! Null components of Lie derivatives.
//!
//! For a Killing field `Z` write `[Z, L] = Q_A e_A + M L` and
//! `[Z, L̄] = Q̲_A e_A + M̲ L̄`. Then, with `(*α)_A = ε_AB α_B`,
//!
//! ```text
//! α[L_Z G]_A = sl-L_Z α_A − M α_A + Q_A ρ + ε_AB Q_B σ
//! ᾱ[L_Z G]_A = sl-L_Z ᾱ_A − M̲ ᾱ_A − Q̲_A ρ + ε_AB Q̲_B σ
//! ρ[L_Z G]   = Z ρ + ½ Q̲_A α_A − ½ Q_A ᾱ_A
//! σ[L_Z G]   = Z σ − ½ Q̲_A (*α)_A − ½ Q_A (*ᾱ)_A
//! ```
//!
//! where `sl-L_Z α_A = (L_Z w)(e_A)` for the sphere-projected 1-form
//! `w_ν = L^μ G_{μν'} Π^{ν'}_ν`. Everything here runs on jets.

use num_complex::Complex64 as C64;

use crate::algebra::{TwoForm, Vec4};
use crate::calculus::{re, Calculus, Form2, JetCalc, ETA};
use crate::error::{Error, Result};
use crate::fields::components::{null_decompose_in, NullComponents};
use crate::fields::ops::{lie_form1, lie_form2};
use crate::fields::split::in_charge_cutoff;
use crate::geometry::{null_frame, optical_coords, GeneratorId, Point4};
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NullLieCoefficients {
    pub m: f64,
    pub mb: f64,
    pub q: [f64; 2],
    pub qb: [f64; 2],
}

const EPS2: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

/// Tabulated coefficients for translations, boosts and rotations.
pub fn null_lie_coefficients(z: GeneratorId, p: &Point4) -> Result<NullLieCoefficients> {
    let [_, _, e1, e2] = null_frame(p)?;
    let r = p.r();
    let w = p.x.map(|c| c / r);
    let wa = |i: usize| [e1[i], e2[i]];
    Ok(match z {
        GeneratorId::Translation(0) | GeneratorId::Rotation(..) => NullLieCoefficients::default(),
        GeneratorId::Translation(i) => {
            let q = wa(i).map(|v| v / r);
            NullLieCoefficients {
                m: 0.0,
                mb: 0.0,
                q,
                qb: q.map(|v| -v),
            }
        }
        GeneratorId::Boost(i) => {
            let o = optical_coords(p);
            NullLieCoefficients {
                m: w[i - 1],
                mb: -w[i - 1],
                q: wa(i).map(|v| -o.tau_minus / r * v),
                qb: wa(i).map(|v| o.tau_plus / r * v),
            }
        }
        GeneratorId::Scaling => {
            return Err(Error::Unsupported("null Lie coefficients of the scaling field".into()));
        }
    })
}

/// `M, Q` read off from the bracket decomposition, for cross-checking the table.
pub fn coefficients_from_brackets(z: GeneratorId, p: &Point4) -> Result<NullLieCoefficients> {
    let [l, lb, e1, e2] = null_frame(p)?;
    let c = JetCalc::new(1, p.as_array());
    let (lj, lbj) = null_pair_jets(&c);
    let zf = z.field();
    // [Z, V]^μ = Z(V^μ) − V(Z^μ)
    let bracket = |v: &[Jet; 4], vp: &Vec4| -> Vec4 {
        let zp = zf.at(p.as_array());
        std::array::from_fn(|mu| {
            let zv: f64 = (0..4).map(|nu| zp[nu] * v[mu].deriv(nu).value().re).sum();
            let vz: f64 = (0..4).map(|nu| vp[nu] * zf.lin[mu][nu]).sum();
            zv - vz
        })
    };
    let dot = |a: &Vec4, b: &Vec4| (0..4).map(|m| ETA[m] * a[m] * b[m]).sum::<f64>();
    let bl = bracket(&lj, &l);
    let blb = bracket(&lbj, &lb);
    // V = a L + b L̄ + q_A e_A: a = −½ m(V, L̄), b = −½ m(V, L)
    Ok(NullLieCoefficients {
        m: -0.5 * dot(&bl, &lb),
        mb: -0.5 * dot(&blb, &l),
        q: [dot(&bl, &e1), dot(&bl, &e2)],
        qb: [dot(&blb, &e1), dot(&blb, &e2)],
    })
}

/// Component fields `L^μ = (1, x/r)` and `L̄^μ = (1, −x/r)` as jets.
fn null_pair_jets(c: &JetCalc) -> ([Jet; 4], [Jet; 4]) {
    let x: [Jet; 3] = std::array::from_fn(|i| c.coord(i + 1));
    let r = c.sum(&x.each_ref().map(|v| c.mul(v, v))).sqrt();
    let inv = r.recip();
    let w: [Jet; 3] = std::array::from_fn(|i| c.mul(&x[i], &inv));
    let one = c.constant(re(1.0));
    (
        [one.clone(), w[0].clone(), w[1].clone(), w[2].clone()],
        [one, c.neg(&w[0]), c.neg(&w[1]), c.neg(&w[2])],
    )
}

fn contract_vec(c: &JetCalc, w: &[Jet; 4], v: &[Jet; 4]) -> Jet {
    c.sum(&[0, 1, 2, 3].map(|mu| c.mul(&w[mu], &v[mu])))
}

fn form_values(g: &Form2<Jet>) -> TwoForm {
    let mut out = [[0.0; 4]; 4];
    for (slot, &(a, b)) in crate::calculus::PAIRS.iter().enumerate() {
        out[a][b] = g.comp[slot].value().re;
        out[b][a] = -out[a][b];
    }
    out
}

/// Null components of `L_Z G` computed directly and through the projected
/// Lie derivative formulas, at the jet base point.
pub fn lie_null_pair(c: &JetCalc, g: &Form2<Jet>, z: GeneratorId) -> Result<(NullComponents, NullComponents)> {
    let p = Point4::from_array(c.base());
    let frame = null_frame(&p)?;
    let coef = null_lie_coefficients(z, &p)?;
    let zf = z.field();
    let direct = null_decompose_in(&form_values(&lie_form2(c, g, &zf)), &frame);
    let n = null_decompose_in(&form_values(g), &frame);

    let (lj, lbj) = null_pair_jets(c);
    let lower = |v: &[Jet; 4]| -> [Jet; 4] { std::array::from_fn(|mu| c.scale(&v[mu], re(ETA[mu]))) };
    // V^μ G_{μν}
    let g_v = |v: &[Jet; 4]| -> [Jet; 4] {
        std::array::from_fn(|nu| c.sum(&[0, 1, 2, 3].map(|mu| c.mul(&v[mu], &g.get(c, mu, nu)))))
    };
    let gl = g_v(&lj);
    let glb = g_v(&lbj);
    let g_llb = contract_vec(c, &gl, &lbj);
    // w_ν = G_{Lν} + ½ G_{L L̄} L_ν, and the barred analogue.
    let ll = lower(&lj);
    let llb = lower(&lbj);
    let w: [Jet; 4] = std::array::from_fn(|nu| c.add(&gl[nu], &c.scale(&c.mul(&g_llb, &ll[nu]), re(0.5))));
    let wb: [Jet; 4] = std::array::from_fn(|nu| c.sub(&glb[nu], &c.scale(&c.mul(&g_llb, &llb[nu]), re(0.5))));
    let lw = lie_form1(c, &w, &zf).map(|v| v.value().re);
    let lwb = lie_form1(c, &wb, &zf).map(|v| v.value().re);
    let ea = [frame[2], frame[3]];
    let on = |f: &[f64; 4], e: &Vec4| (0..4).map(|mu| f[mu] * e[mu]).sum::<f64>();
    let sl_alpha = ea.map(|e| on(&lw, &e));
    let sl_alphab = ea.map(|e| on(&lwb, &e));

    // ρ = ½ G(L̄, L), σ = B · x / r; both frame independent.
    let rho = c.scale(&contract_vec(c, &glb, &lj), re(0.5));
    let x: [Jet; 3] = std::array::from_fn(|i| c.coord(i + 1));
    let inv_r = c.sum(&x.each_ref().map(|v| c.mul(v, v))).sqrt().recip();
    let b = [g.comp[5].clone(), c.neg(&g.comp[4]), g.comp[3].clone()];
    let sigma = c.mul(&c.sum(&[0, 1, 2].map(|i| c.mul(&b[i], &x[i]))), &inv_r);
    let z_rho = zf.apply(c, &rho).value().re;
    let z_sigma = zf.apply(c, &sigma).value().re;

    let star = |v: [f64; 2]| [0, 1].map(|a| EPS2[a][0] * v[0] + EPS2[a][1] * v[1]);
    let dot2 = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];
    let eq = star(coef.q);
    let eqb = star(coef.qb);
    let formula = NullComponents {
        alpha: [0, 1].map(|a| sl_alpha[a] - coef.m * n.alpha[a] + coef.q[a] * n.rho + eq[a] * n.sigma),
        alphab: [0, 1].map(|a| sl_alphab[a] - coef.mb * n.alphab[a] - coef.qb[a] * n.rho + eqb[a] * n.sigma),
        rho: z_rho + 0.5 * dot2(coef.qb, n.alpha) - 0.5 * dot2(coef.q, n.alphab),
        sigma: z_sigma - 0.5 * dot2(coef.qb, star(n.alpha)) - 0.5 * dot2(coef.q, star(n.alphab)),
    };
    Ok((direct, formula))
}

/// Max-norm of the difference between the two sides of the null Lie formulas.
pub fn lie_null_residual(c: &JetCalc, g: &Form2<Jet>, z: GeneratorId) -> Result<f64> {
    let (d, f) = lie_null_pair(c, g, z)?;
    Ok(d.sub(&f).max_abs())
}

/// Exact Coulomb 2-form `E = q0 x / r³` as jets.
pub fn coulomb_jets(c: &JetCalc, q0: f64) -> Form2<Jet> {
    let x: [Jet; 3] = std::array::from_fn(|i| c.coord(i + 1));
    let r2 = c.sum(&x.each_ref().map(|v| c.mul(v, v)));
    let inv3 = r2.powf(-1.5);
    let e: [Jet; 3] = std::array::from_fn(|i| c.scale(&c.mul(&x[i], &inv3), re(q0)));
    let z = c.zero();
    Form2 {
        comp: [e[0].clone(), e[1].clone(), e[2].clone(), z.clone(), z.clone(), z],
    }
}

/// Null components of `L_Y` applied to the exact Coulomb field, computed by
/// jet differentiation, paired with their closed forms.
pub fn coulomb_lie_identities(q0: f64, y: GeneratorId, p: &Point4) -> Result<(NullComponents, NullComponents)> {
    if !in_charge_cutoff(p) || p.r() <= 0.0 {
        return Err(Error::Degenerate {
            point: p.as_array(),
            reason: "Coulomb identities hold only where the charge cutoff is active",
        });
    }
    if y == GeneratorId::Scaling {
        return Err(Error::Unsupported("Coulomb identities for the scaling field".into()));
    }
    let c = JetCalc::new(1, p.as_array());
    let frame = null_frame(p)?;
    let lg = lie_form2(&c, &coulomb_jets(&c, q0), &y.field());
    let computed = null_decompose_in(&form_values(&lg), &frame);

    let r = p.r();
    let r3 = r * r * r;
    let wa = |i: usize| [frame[2][i], frame[3][i]];
    // Y(r⁻²) = −2 r⁻⁴ Y^i x_i
    let yv = y.at(p);
    let y_r2 = -2.0 / (r3 * r) * (1..4).map(|i| yv[i] * p.x[i - 1]).sum::<f64>();
    let o = optical_coords(p);
    let (alpha, alphab) = match y {
        GeneratorId::Translation(i) if i > 0 => {
            let v = wa(i).map(|w| q0 * w / r3);
            (v, v)
        }
        GeneratorId::Boost(i) => (
            wa(i).map(|w| -q0 * o.tau_minus * w / r3),
            wa(i).map(|w| -q0 * o.tau_plus * w / r3),
        ),
        _ => ([0.0; 2], [0.0; 2]),
    };
    let closed = NullComponents {
        alpha,
        alphab,
        rho: q0 * y_r2,
        sigma: 0.0,
    };
    Ok((computed, closed))
}

/// A smooth, non-closed test 2-form built from Gaussian-modulated harmonics.
pub fn smooth_test_form(c: &JetCalc, seed: u64) -> Form2<Jet> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Form2 {
        comp: std::array::from_fn(|_| {
            let mut arg = c.constant(re(rng.random_range(-0.5..0.5)));
            for mu in 0..4 {
                let k = rng.random_range(-0.6..0.6);
                arg = c.add(&arg, &c.scale(&c.coord(mu), re(k)));
            }
            let amp = rng.random_range(-2.0..2.0);
            let sq = c.mul(&c.coord(1), &c.coord(2));
            let arg = c.add(&arg, &c.scale(&sq, re(0.05)));
            c.scale(&c.exp(&arg), C64::new(amp, 0.0))
        }),
    }
}
