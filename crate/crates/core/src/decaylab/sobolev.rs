//! Empirical ratios of the hyperboloidal Sobolev inequalities on smooth
//! random fields.
//!
//! Both sides are evaluated by quadrature on a truncated hyperboloid, with
//! boost derivatives taken exactly through jets. The ratio `LHS/RHS` over a
//! family of fields estimates the constant of each inequality; it carries
//! no meaning on its own beyond its stability under refinement.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::algebra::contract;
use crate::calculus::{re, Calculus, Form2, JetCalc, PAIRS};
use crate::error::{Error, Result};
use crate::exec::{pairwise, Exec};
use crate::fields::ops::{cov_along, lie_form2, Potential};
use crate::geometry::{optical_coords, surface_mesh, tetrad_at, truncation_radius, GeneratorId, MeshSpec, Point4, RegionSpec, TetradKind};
use crate::jet::Jet;
use crate::symmetries::manufactured::{FieldRecipe, GaussFields};

/// The inequalities checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    /// `sup τ₊^{3/2}|G| ≤ C (∫ (t/τ) |L_B^{≤2} G|² dH)^{1/2}` for an
    /// `H_τ`-tangent 2-form.
    TensorSup,
    /// `sup τ₊^{3/2}|φ| ≤ C (∫ (t/τ) |D_B^{≤2} φ|² dH)^{1/2}`.
    ScalarSup,
    /// `‖φ‖_{L⁶(H_τ)} ≤ C (‖D̄φ‖_{L²} + τ⁻¹ ‖φ‖_{L²})`.
    HyperboloidL6,
}

impl Inequality {
    pub const ALL: [Inequality; 3] = [Inequality::TensorSup, Inequality::ScalarSup, Inequality::HyperboloidL6];

    pub fn id(&self) -> &'static str {
        match self {
            Inequality::TensorSup => "tensor-sup",
            Inequality::ScalarSup => "scalar-sup",
            Inequality::HyperboloidL6 => "hyperboloid-l6",
        }
    }
}

/// A smooth test configuration: a gauged scalar and a (not necessarily
/// closed) 2-form, either of which may be absent (zero).
#[derive(Clone, Debug)]
pub struct TestField {
    pub id: String,
    scalar: Option<GaussFields>,
    form: Option<[GaussFields; 3]>,
}

impl TestField {
    pub fn zero() -> Self {
        TestField { id: "zero".into(), scalar: None, form: None }
    }

    /// Random Gaussian-modulated fields centred near the origin at time
    /// `t1`, widths between 0.6 and 1.4.
    pub fn random(seed: u64, t1: f64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut next = || {
            let w = rng.random_range(0.6..1.4);
            GaussFields::random(rng.random(), w, t1)
        };
        TestField {
            id: format!("gauss-{seed}"),
            scalar: Some(next()),
            form: Some([next(), next(), next()]),
        }
    }

    fn scalar_at(&self, c: &JetCalc) -> (Jet, Potential<Jet>) {
        match &self.scalar {
            Some(g) => (g.phi(c), g.potential(c)),
            None => (c.zero(), std::array::from_fn(|_| c.zero())),
        }
    }

    fn form_at(&self, c: &JetCalc) -> Form2<Jet> {
        match &self.form {
            Some(parts) => {
                let z: Vec<Jet> = parts.iter().map(|g| g.phi(c)).collect();
                Form2 {
                    comp: std::array::from_fn(|k| if k % 2 == 0 { c.re_part(&z[k / 2]) } else { c.im_part(&z[k / 2]) }),
                }
            }
            None => Form2 { comp: std::array::from_fn(|_| c.zero()) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevCheck {
    pub ineq_id: &'static str,
    pub field_id: String,
    /// Radial quadrature spacing of the mesh.
    pub dx: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when both sides vanish.
    pub ratio: Option<f64>,
}

/// Squared norm of the `H_τ`-tangent part of a 2-form value.
fn tangent_norm2(g: &Form2<Jet>, legs: &[[f64; 4]; 4]) -> f64 {
    let mut v = [[0.0; 4]; 4];
    for (slot, &(a, b)) in PAIRS.iter().enumerate() {
        v[a][b] = g.comp[slot].value().re;
        v[b][a] = -v[a][b];
    }
    let mut s = 0.0;
    for i in 1..4 {
        for j in i + 1..4 {
            s += contract(&v, &legs[i], &legs[j]).powi(2);
        }
    }
    s
}

/// Pointwise pieces: the sup (or `|φ|⁶`) quantity and the right-side
/// integrands against `dH_τ`.
fn pointwise(field: &TestField, ineq: Inequality, p: &Point4) -> Result<(f64, f64, f64)> {
    let c = JetCalc::new(2, p.as_array());
    let o = optical_coords(p);
    let legs = tetrad_at(p, TetradKind::HyperbOrthonormal)?.legs;
    let boosts: Vec<_> = (1..4).map(|a| GeneratorId::Boost(a).field()).collect();
    let tp15 = o.tau_plus.powf(1.5);
    let t_over_tau = p.t / o.tau.ok_or(Error::Degenerate { point: p.as_array(), reason: "outside the light cone" })?;
    Ok(match ineq {
        Inequality::TensorSup => {
            let g = field.form_at(&c);
            let mut sum = tangent_norm2(&g, &legs);
            for zb in &boosts {
                let g1 = lie_form2(&c, &g, zb);
                sum += tangent_norm2(&g1, &legs);
                for za in &boosts {
                    sum += tangent_norm2(&lie_form2(&c, &g1, za), &legs);
                }
            }
            (tp15 * tangent_norm2(&g, &legs).sqrt(), sum * t_over_tau, 0.0)
        }
        Inequality::ScalarSup => {
            let (phi, a) = field.scalar_at(&c);
            let mut sum = phi.value().norm_sqr();
            for zb in &boosts {
                let d1 = cov_along(&c, &phi, &a, zb);
                sum += d1.value().norm_sqr();
                for za in &boosts {
                    sum += cov_along(&c, &d1, &a, za).value().norm_sqr();
                }
            }
            (tp15 * phi.value().norm(), sum * t_over_tau, 0.0)
        }
        Inequality::HyperboloidL6 => {
            let (phi, a) = field.scalar_at(&c);
            let d: Vec<C64> = (0..4)
                .map(|mu| c.add(&c.deriv(&phi, mu), &c.scale(&c.mul(&a[mu], &phi), crate::calculus::I)).value())
                .collect();
            let tangential: f64 = (1..4)
                .map(|i| (0..4).map(|mu| d[mu] * re(legs[i][mu])).sum::<C64>().norm_sqr())
                .sum();
            let f2 = phi.value().norm_sqr();
            (f2 * f2 * f2, tangential, f2)
        }
    })
}

/// Both sides of `ineq` for `field` on `H_τ` truncated at the initial cone.
pub fn sobolev_ratio(field: &TestField, ineq: Inequality, tau: f64, mesh: &MeshSpec, exec: Exec) -> Result<SobolevCheck> {
    let nodes = surface_mesh(&RegionSpec::Hyperboloid { tau }, mesh);
    if nodes.is_empty() {
        return Err(Error::Config(format!("hyperboloid {tau} has no truncated part")));
    }
    let vals: Vec<Result<(f64, f64, f64, f64)>> = exec.map(nodes.len(), |i| {
        let n = &nodes[i];
        let (s, a, b) = pointwise(field, ineq, &n.p)?;
        Ok((s, n.weight, a, b))
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let integral = |f: &dyn Fn(&(f64, f64, f64, f64)) -> f64| pairwise(&vals.iter().map(f).collect::<Vec<_>>());
    let (lhs, rhs) = match ineq {
        Inequality::TensorSup | Inequality::ScalarSup => {
            let sup = vals.iter().fold(0.0f64, |m, v| m.max(v.0));
            (sup, integral(&|v| v.2 * v.1).sqrt())
        }
        Inequality::HyperboloidL6 => {
            let l6 = integral(&|v| v.0 * v.1).powf(1.0 / 6.0);
            let grad = integral(&|v| v.2 * v.1).sqrt();
            let l2 = integral(&|v| v.3 * v.1).sqrt();
            (l6, grad + l2 / tau)
        }
    };
    let ratio = if rhs > 0.0 {
        Some(lhs / rhs)
    } else if lhs > 0.0 {
        return Err(Error::Impossible(format!("{} has a positive left side over a vanishing right side", ineq.id())));
    } else {
        None
    };
    Ok(SobolevCheck {
        ineq_id: ineq.id(),
        field_id: field.id.clone(),
        dx: truncation_radius(tau) / mesh.n_radial as f64,
        lhs,
        rhs,
        ratio,
    })
}

/// Per inequality, the largest ratio over `fields` at each mesh, and the
/// relative spread between the two meshes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalConstant {
    pub ineq_id: &'static str,
    pub c_coarse: f64,
    pub c_fine: f64,
    pub variation: f64,
}

pub fn empirical_constants(
    fields: &[TestField],
    tau: f64,
    meshes: [MeshSpec; 2],
    exec: Exec,
) -> Result<(Vec<SobolevCheck>, Vec<EmpiricalConstant>)> {
    let mut checks = Vec::new();
    let mut consts = Vec::new();
    for ineq in Inequality::ALL {
        let mut c = [0.0f64; 2];
        for (k, mesh) in meshes.iter().enumerate() {
            for f in fields {
                let chk = sobolev_ratio(f, ineq, tau, mesh, exec)?;
                c[k] = c[k].max(chk.ratio.unwrap_or(0.0));
                checks.push(chk);
            }
        }
        consts.push(EmpiricalConstant {
            ineq_id: ineq.id(),
            c_coarse: c[0],
            c_fine: c[1],
            variation: (c[0] - c[1]).abs() / c[1].max(1e-300),
        });
    }
    Ok((checks, consts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Rule;

    #[test]
    fn zero_field_has_no_ratio() {
        let m = MeshSpec::new(6, 4, 6, Rule::GaussLegendre);
        for ineq in Inequality::ALL {
            let c = sobolev_ratio(&TestField::zero(), ineq, 3.0, &m, Exec::Sequential).unwrap();
            assert_eq!((c.lhs, c.rhs, c.ratio), (0.0, 0.0, None));
        }
    }

    #[test]
    fn ratios_are_finite_and_stable() {
        let fields: Vec<_> = (0..3).map(|s| TestField::random(s, 3.0)).collect();
        let meshes = [MeshSpec::new(12, 6, 12, Rule::GaussLegendre), MeshSpec::new(24, 12, 24, Rule::GaussLegendre)];
        let (checks, consts) = empirical_constants(&fields, 3.0, meshes, Exec::Parallel).unwrap();
        assert_eq!(checks.len(), 18);
        for c in &checks {
            let r = c.ratio.unwrap();
            assert!(r.is_finite() && r > 0.0, "{c:?}");
        }
        for k in &consts {
            assert!(k.variation < 0.2, "{k:?}");
        }
    }
}
