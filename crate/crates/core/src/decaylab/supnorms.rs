//! Weighted sup-norms over surfaces, one value per surface and weight.

use crate::algebra::eb_of;
use crate::energies::stress::PointFields;
use crate::error::{Error, Result};
use crate::fields::components::{h_norm2, null_decompose_in};
use crate::fields::split::chargeless_subtract;
use crate::geometry::{null_frame, optical_coords, Point4, T0};

use super::DecaySeries;

/// Groups of weighted quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Interior scalar rates on hyperboloids.
    Scalar,
    /// Interior rates of a nonlinear Maxwell field on hyperboloids.
    Form,
    /// Rates of a linear Maxwell field on hyperboloids, with `ε` loss.
    Linear,
    /// Exterior rates of the scalar and of the chargeless form on slices.
    Exterior,
}

/// Fixed weights of the norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub eps: f64,
    pub gamma0: f64,
    /// Charge whose Coulomb part is removed in the exterior family.
    pub q0: f64,
}

struct Quantity {
    id: &'static str,
    weight: &'static str,
}

const fn q(id: &'static str, weight: &'static str) -> Quantity {
    Quantity { id, weight }
}

const SCALAR: [Quantity; 4] = [
    q("phi", "tau_plus^1.5 |phi|"),
    q("dl_phi", "tau_plus^1.5 |D_L phi|"),
    q("dslash_phi", "tau_plus^1.5 |Dslash phi|"),
    q("dlb_phi", "tau_plus tau_minus^0.5 |D_Lb phi|"),
];

const FORM: [Quantity; 5] = [
    q("alpha", "tau_plus^2 |alpha|"),
    q("rho_sigma", "tau_plus^1.5 tau_minus^0.5 (|rho| + |sigma|)"),
    q("alphab", "tau_minus tau_plus |alphab|"),
    q("hyperb", "tau_plus tau |F|_h"),
    q("full", "tau_minus tau_plus |F|"),
];

const LINEAR: [Quantity; 3] = [
    q("lin_alpha", "tau_plus^(2+eps) |alpha|"),
    q("lin_rho_sigma", "tau_plus^(1+eps) tau (|rho| + |sigma|)"),
    q("lin_alphab", "tau_plus tau_minus^(1+eps) |alphab|"),
];

const EXTERIOR: [Quantity; 6] = [
    q("ext_phi", "r^1.5 u_plus^(gamma0/2) |phi|"),
    q("ext_dl_phi", "r^(9/4-eps/2) u_plus^(gamma0/2-1/4) |D_L phi|"),
    q("ext_dslash_phi", "r^(9/4-eps/2) u_plus^(gamma0/2-1/4) |Dslash phi|"),
    q("ext_dlb_phi", "r^(5/4-eps/2) u_plus^(gamma0/2+3/4) |D_Lb phi|"),
    q("ext_good", "r^(1+gamma0/2) u_plus^0.5 (|rho|+|alpha|+|sigma|) of the chargeless part"),
    q("ext_alphab", "r u_plus^((gamma0+1)/2) |alphab| of the chargeless part"),
];

impl Family {
    fn quantities(&self) -> &'static [Quantity] {
        match self {
            Family::Scalar => &SCALAR,
            Family::Form => &FORM,
            Family::Linear => &LINEAR,
            Family::Exterior => &EXTERIOR,
        }
    }

    /// Weighted quantities at one point, in the family's fixed order.
    fn values(&self, pf: &PointFields, p: &Point4, w: &Weights) -> Result<Vec<f64>> {
        let frame = null_frame(p)?;
        let o = optical_coords(p);
        let (tp, tm) = (o.tau_plus, o.tau_minus);
        let tau = (tp * tm).max(0.0).sqrt();
        let r = p.r();
        let d_along = |v: &[f64; 4]| -> f64 { (0..4).map(|m| pf.df[m] * v[m]).sum::<num_complex::Complex64>().norm() };
        let dl = d_along(&frame[0]);
        let dlb = d_along(&frame[1]);
        let dslash = (d_along(&frame[2]).powi(2) + d_along(&frame[3]).powi(2)).sqrt();
        let phi = pf.f.norm();
        let norm2 = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
        Ok(match self {
            Family::Scalar => vec![tp.powf(1.5) * phi, tp.powf(1.5) * dl, tp.powf(1.5) * dslash, tp * tm.sqrt() * dlb],
            Family::Form => {
                let n = null_decompose_in(&pf.g, &frame);
                let (e, b) = eb_of(&pf.g);
                let full = e.iter().chain(&b).map(|v| v * v).sum::<f64>().sqrt();
                vec![
                    tp * tp * norm2(n.alpha),
                    tp.powf(1.5) * tm.sqrt() * (n.rho.abs() + n.sigma.abs()),
                    tm * tp * norm2(n.alphab),
                    tp * tau * h_norm2(&pf.g, p)?.sqrt(),
                    tm * tp * full,
                ]
            }
            Family::Linear => {
                let n = null_decompose_in(&pf.g, &frame);
                let eps = w.eps;
                vec![
                    tp.powf(2.0 + eps) * norm2(n.alpha),
                    tp.powf(1.0 + eps) * tau * (n.rho.abs() + n.sigma.abs()),
                    tp * tm.powf(1.0 + eps) * norm2(n.alphab),
                ]
            }
            Family::Exterior => {
                let u = 0.5 * (p.t - T0 - r);
                let up = u.abs();
                let (g0, eps) = (w.gamma0, w.eps);
                let ck = chargeless_subtract(&pf.g, w.q0, p);
                let n = null_decompose_in(&ck.form, &frame);
                let rd = r.powf(2.25 - 0.5 * eps) * up.powf(0.5 * g0 - 0.25);
                vec![
                    r.powf(1.5) * up.powf(0.5 * g0) * phi,
                    rd * dl,
                    rd * dslash,
                    r.powf(1.25 - 0.5 * eps) * up.powf(0.5 * g0 + 0.75) * dlb,
                    r.powf(1.0 + 0.5 * g0) * up.sqrt() * (n.rho.abs() + norm2(n.alpha) + n.sigma.abs()),
                    r * up.powf(0.5 * (g0 + 1.0)) * norm2(n.alphab),
                ]
            }
        })
    }

    pub fn series_ids(&self) -> Vec<&'static str> {
        self.quantities().iter().map(|q| q.id).collect()
    }
}

/// Sup of each weighted quantity of `family` over one surface. Points at
/// the origin, where the radial frames degenerate, are skipped.
pub fn surface_supnorms(family: Family, samples: &[(Point4, PointFields)], w: &Weights) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; family.quantities().len()];
    let mut used = 0;
    for (p, pf) in samples {
        if p.r() <= 1e-12 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(family.values(pf, p, w)?) {
            *o = o.max(v);
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::Config("weighted sup-norm over an empty surface".into()));
    }
    Ok(out)
}

/// One series per weighted quantity, with one point per surface.
/// `surfaces` pairs the abscissa of each surface (τ, or t for slices) with
/// its samples; abscissae must increase.
pub fn weighted_supnorms(family: Family, surfaces: &[(f64, Vec<(Point4, PointFields)>)], w: &Weights) -> Result<Vec<DecaySeries>> {
    let qs = family.quantities();
    let mut series: Vec<DecaySeries> = qs.iter().map(|q| DecaySeries::new(q.id, q.weight)).collect();
    for (x, samples) in surfaces {
        let vals = surface_supnorms(family, samples, w)?;
        for (s, v) in series.iter_mut().zip(vals) {
            s.push(*x, v)?;
        }
    }
    Ok(series)
}
