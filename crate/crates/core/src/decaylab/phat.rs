//! Weighted hyperboloidal energies `P̂_k` of a source-free Maxwell field.
//!
//! ```text
//! P̂_k(τ) = Σ_{Z^k} ∫_{H_τ} τ₋^{2+2ε}/τ |ᾱ|² + τ₊^{2+2ε}/τ |α|² + τ τ₊^{2ε} (ρ² + σ²)
//! ```
//!
//! with the null components taken of `L_Z^k F`, summed over all ordered
//! products of `k ≤ 2` Poincaré generators. The time derivatives the Lie
//! derivatives need come from the field equations `∂_t E = −curl B`,
//! `∂_t B = curl E`, so a spatial 2-jet fixes the full spacetime 2-jet.

use num_complex::Complex64 as C64;

use super::sampler::{Sample, SpatialJet};
use crate::algebra::form_from_pairs;
use crate::calculus::{Calculus, Form2, JetCalc};
use crate::error::{Error, Result};
use crate::exec::{pairwise, Exec};
use crate::fields::components::null_decompose;
use crate::fields::ops::lie_form2;
use crate::geometry::{optical_coords, GeneratorId, Point4, SurfaceNode};
use crate::jet::Jet;

/// Value and all first and second partials `(t, x, y, z)` of one component.
#[derive(Clone, Copy, Debug, Default)]
struct Jet4 {
    v: f64,
    d: [f64; 4],
    dd: [[f64; 4]; 4],
}

fn curl(d: &[[f64; 3]; 3]) -> [f64; 3] {
    // d[k][j] = ∂_j V_k
    [d[2][1] - d[1][2], d[0][2] - d[2][0], d[1][0] - d[0][1]]
}

/// `∂_l (curl V)_i` from the Hessians `h[k][l][j] = ∂_l ∂_j V_k`.
fn grad_curl(h: &[[[f64; 3]; 3]; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|l| match i {
            0 => h[2][l][1] - h[1][l][2],
            1 => h[0][l][2] - h[2][l][0],
            _ => h[1][l][0] - h[0][l][1],
        })
    })
}

/// `curl curl V = grad div V − ΔV`.
fn curl_curl(h: &[[[f64; 3]; 3]; 3]) -> [f64; 3] {
    std::array::from_fn(|i| {
        let grad_div: f64 = (0..3).map(|k| h[k][i][k]).sum();
        let lap: f64 = (0..3).map(|k| h[i][k][k]).sum();
        grad_div - lap
    })
}

/// Spacetime jets of `(E, B)` from spatial jets and the source-free
/// equations.
fn spacetime_components(e: &[SpatialJet; 3], b: &[SpatialJet; 3]) -> ([Jet4; 3], [Jet4; 3]) {
    let grads = |v: &[SpatialJet; 3]| -> [[f64; 3]; 3] { std::array::from_fn(|k| v[k].d) };
    let hess = |v: &[SpatialJet; 3]| -> [[[f64; 3]; 3]; 3] { std::array::from_fn(|k| v[k].dd) };
    let (ce, cb) = (curl(&grads(e)), curl(&grads(b)));
    let (gce, gcb) = (grad_curl(&hess(e)), grad_curl(&hess(b)));
    let (cce, ccb) = (curl_curl(&hess(e)), curl_curl(&hess(b)));
    let build = |s: &SpatialJet, dt: f64, dtx: [f64; 3], dtt: f64| {
        let mut j = Jet4 { v: s.v, ..Default::default() };
        j.d[0] = dt;
        j.dd[0][0] = dtt;
        for a in 0..3 {
            j.d[a + 1] = s.d[a];
            j.dd[0][a + 1] = dtx[a];
            j.dd[a + 1][0] = dtx[a];
            for c in 0..3 {
                j.dd[a + 1][c + 1] = s.dd[a][c];
            }
        }
        j
    };
    // ∂_t E = −curl B, ∂_t² E = −curl curl E; ∂_t B = curl E, ∂_t² B = −curl curl B.
    let ej = std::array::from_fn(|i| build(&e[i], -cb[i], gcb[i].map(|v| -v), -cce[i]));
    let bj = std::array::from_fn(|i| build(&b[i], ce[i], gce[i], -ccb[i]));
    (ej, bj)
}

fn to_jet(c: &JetCalc, j: &Jet4) -> Jet {
    let space = c.constant(C64::new(0.0, 0.0)).space().clone();
    let coeffs = space
        .exponents()
        .iter()
        .map(|e| {
            let nz: Vec<usize> = (0..4).filter(|&m| e[m] > 0).collect();
            let v = match (nz.as_slice(), e.iter().map(|&x| x as usize).sum::<usize>()) {
                (_, 0) => j.v,
                ([m], 1) => j.d[*m],
                ([m], 2) => 0.5 * j.dd[*m][*m],
                ([m, n], 2) => j.dd[*m][*n],
                _ => 0.0,
            };
            C64::new(v, 0.0)
        })
        .collect();
    Jet::from_coeffs(&space, coeffs)
}

/// Second-order spacetime jet of a source-free Maxwell field at the base
/// point of `c` (which must carry order-2 jets).
pub fn maxwell_spacetime_jet(c: &JetCalc, e: &[SpatialJet; 3], b: &[SpatialJet; 3]) -> Form2<Jet> {
    let (ej, bj) = spacetime_components(e, b);
    let e = ej.map(|j| to_jet(c, &j));
    let b = bj.map(|j| to_jet(c, &j));
    // PAIRS order: (01) (02) (03) (12) (13) (23) = E1 E2 E3 B3 −B2 B1.
    Form2 {
        comp: [
            e[0].clone(),
            e[1].clone(),
            e[2].clone(),
            b[2].clone(),
            b[1].scale(C64::new(-1.0, 0.0)),
            b[0].clone(),
        ],
    }
}

fn form_value(g: &Form2<Jet>) -> crate::algebra::TwoForm {
    form_from_pairs(&g.comp.each_ref().map(|j| j.value().re))
}

/// Weighted null density of one 2-form value at `p`.
pub fn phat_density(g: &crate::algebra::TwoForm, p: &Point4, eps: f64) -> Result<f64> {
    let n = null_decompose(g, p)?;
    let o = optical_coords(p);
    let tau = o.tau.filter(|t| *t > 0.0).ok_or(Error::Degenerate { point: p.as_array(), reason: "needs t > r" })?;
    let a2 = n.alpha[0].powi(2) + n.alpha[1].powi(2);
    let ab2 = n.alphab[0].powi(2) + n.alphab[1].powi(2);
    Ok(o.tau_minus.powf(2.0 + 2.0 * eps) / tau * ab2
        + o.tau_plus.powf(2.0 + 2.0 * eps) / tau * a2
        + tau * o.tau_plus.powf(2.0 * eps) * (n.rho * n.rho + n.sigma * n.sigma))
}

/// Integrands of `P̂_0`, `P̂_1`, `P̂_2` at one point.
pub fn phat_integrands(e: &[SpatialJet; 3], b: &[SpatialJet; 3], p: &Point4, eps: f64) -> Result<[f64; 3]> {
    let c = JetCalc::new(2, p.as_array());
    let g0 = maxwell_spacetime_jet(&c, e, b);
    let zs: Vec<_> = GeneratorId::poincare().iter().map(|z| z.field()).collect();
    let level1: Vec<Form2<Jet>> = zs.iter().map(|z| lie_form2(&c, &g0, z)).collect();
    let mut out = [phat_density(&form_value(&g0), p, eps)?, 0.0, 0.0];
    for g1 in &level1 {
        out[1] += phat_density(&form_value(g1), p, eps)?;
        for z in &zs {
            out[2] += phat_density(&form_value(&lie_form2(&c, g1, z)), p, eps)?;
        }
    }
    Ok(out)
}

/// `[P̂_0, P̂_1, P̂_2]` on a hyperboloid mesh from samples at its nodes.
/// Samples must carry second spatial derivatives of `E` and `B`.
pub fn phat_on_surface(nodes: &[SurfaceNode], samples: &[Sample], eps: f64, exec: Exec) -> Result<[f64; 3]> {
    assert_eq!(nodes.len(), samples.len());
    let per: Vec<Result<[f64; 3]>> = exec.map(nodes.len(), |i| {
        let (e, b) = samples[i].eb();
        let v = phat_integrands(&e, &b, &nodes[i].p, eps)?;
        Ok(v.map(|x| x * nodes[i].weight))
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(std::array::from_fn(|k| pairwise(&per.iter().map(|v| v[k]).collect::<Vec<_>>())))
}
