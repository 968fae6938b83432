//! Energies on hyperboloids, slices and the initial cone, and the exterior
//! null and slice fluxes.
//!
//! Fields are supplied through a fetch callback that maps a batch of points
//! and a commutation multi-index to [`PointFields`]; analytic recipes,
//! stored histories and streamed evolutions all fit behind it.

use std::fmt;

use crate::algebra::Vec4;
use crate::error::{Error, Result};
use crate::exec::pairwise;
use crate::fields::components::null_decompose_in;
use crate::geometry::{hyperboloid_normal, null_frame, surface_mesh, GeneratorClass, MeshSpec, MultiIndex, Point4, RegionSpec, SurfaceNode};

use super::stress::{stress_energy, Multiplier, PointFields};

/// Label of a surface for reports.
pub fn surface_label(spec: &RegionSpec) -> String {
    match *spec {
        RegionSpec::Hyperboloid { tau } => format!("H(tau={tau})"),
        RegionSpec::ConeC0 { tau_lo, tau_hi } => format!("C0(tau={tau_lo}..{tau_hi})"),
        RegionSpec::OutNull { u, v_lo, v_hi } => format!("Hout(u={u},v={v_lo}..{v_hi})"),
        RegionSpec::InNull { v, u_lo, u_hi } => format!("Hin(v={v},u={u_lo}..{u_hi})"),
        RegionSpec::Slice { t, r_lo, r_hi, .. } => format!("Sigma(t={t},r={r_lo}..{r_hi})"),
        RegionSpec::Domain { tau } => format!("D(tau={tau})"),
        RegionSpec::ExteriorDomain { u, v } => format!("Dext(u={u},v={v})"),
    }
}

/// Abscissa recorded for a surface: `τ` for hyperboloids, `u` or `v` for
/// null pieces, `t` for slices.
pub fn surface_parameter(spec: &RegionSpec) -> f64 {
    match *spec {
        RegionSpec::Hyperboloid { tau } | RegionSpec::Domain { tau } => tau,
        RegionSpec::ConeC0 { tau_hi, .. } => tau_hi,
        RegionSpec::OutNull { u, .. } => u,
        RegionSpec::InNull { v, .. } => v,
        RegionSpec::Slice { t, .. } => t,
        RegionSpec::ExteriorDomain { u, .. } => u,
    }
}

/// Flux direction paired with the multiplier: future normal on spacelike
/// surfaces, the null generator on null ones.
pub fn flux_direction(spec: &RegionSpec, p: &Point4) -> Result<Vec4> {
    match spec {
        RegionSpec::Hyperboloid { .. } => hyperboloid_normal(p),
        RegionSpec::ConeC0 { .. } | RegionSpec::OutNull { .. } => Ok(null_frame(p)?[0]),
        RegionSpec::InNull { .. } => Ok(null_frame(p)?[1]),
        RegionSpec::Slice { .. } => Ok([1.0, 0.0, 0.0, 0.0]),
        RegionSpec::Domain { .. } | RegionSpec::ExteriorDomain { .. } => {
            Err(Error::Unsupported("flux through a spacetime domain".into()))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub surface: String,
    pub multiplier: Multiplier,
    pub class: Option<GeneratorClass>,
    pub k: usize,
    pub tau_or_u: f64,
    pub value: f64,
    pub quad_nodes: usize,
    pub dx: Option<f64>,
}

/// Energy density `T(X, n)` at one node.
pub fn energy_density(spec: &RegionSpec, x: Multiplier, pf: &PointFields, p: &Point4) -> Result<f64> {
    Ok(stress_energy(pf, &x.at(p), &flux_direction(spec, p)?))
}

/// `Σ_i w_i v_i` summed pairwise.
pub fn integrate(nodes: &[SurfaceNode], vals: &[f64]) -> f64 {
    let prod: Vec<f64> = nodes.iter().zip(vals).map(|(n, v)| n.weight * v).collect();
    pairwise(&prod)
}

/// `Σ_{Z^k} ∫ T(D_Z^k f, L_Z^k G)(X, n)` over the surface.
pub fn surface_energy<F>(
    spec: &RegionSpec,
    x: Multiplier,
    class: Option<GeneratorClass>,
    k: usize,
    mesh: &MeshSpec,
    mut fetch: F,
) -> Result<EnergyReport>
where
    F: FnMut(&[Point4], &MultiIndex) -> Result<Vec<PointFields>>,
{
    let nodes = surface_mesh(spec, mesh);
    let pts: Vec<Point4> = nodes.iter().map(|n| n.p).collect();
    let indices = match (class, k) {
        (_, 0) => GeneratorClass::Poincare.indices(0),
        (Some(c), k) => c.indices(k),
        (None, _) => return Err(Error::Config("commuted energy needs a generator class".into())),
    };
    let mut total = Vec::with_capacity(indices.len());
    for mi in &indices {
        let fields = fetch(&pts, mi)?;
        let dens = nodes
            .iter()
            .zip(&fields)
            .map(|(n, pf)| energy_density(spec, x, pf, &n.p))
            .collect::<Result<Vec<f64>>>()?;
        total.push(integrate(&nodes, &dens));
    }
    Ok(EnergyReport {
        surface: surface_label(spec),
        multiplier: x,
        class: if k == 0 { None } else { class },
        k,
        tau_or_u: surface_parameter(spec),
        value: pairwise(&total),
        quad_nodes: nodes.len(),
        dx: None,
    })
}

/// Integrand families of the exterior fluxes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxClass {
    /// `|D_L f|² + |D̸ f|² + |f|² + ρ² + σ² + |α|²`
    Outgoing,
    /// `|D_L̄ f|² + |D̸ f|² + |f|² + ρ² + σ² + |ᾱ|²`
    Incoming,
    /// `|G|² + |Df|² + |f|²` with `|G|² = ρ² + σ² + ½(|α|² + |ᾱ|²)`
    Slice,
}

impl fmt::Display for FluxClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FluxClass::Outgoing => "outgoing",
            FluxClass::Incoming => "incoming",
            FluxClass::Slice => "slice",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxReport {
    pub surface: String,
    pub class: FluxClass,
    pub r_weight: f64,
    pub value: f64,
}

/// Integrand of the exterior flux at one point, times `r^{r_weight}`.
pub fn flux_density(class: FluxClass, pf: &PointFields, p: &Point4, r_weight: f64) -> Result<f64> {
    let fr = null_frame(p)?;
    let n = null_decompose_in(&pf.g, &fr);
    let d = |v: &Vec4| (0..4).map(|m| pf.df[m] * v[m]).sum::<num_complex::Complex64>().norm_sqr();
    let sl = d(&fr[2]) + d(&fr[3]);
    let a2 = n.alpha[0].powi(2) + n.alpha[1].powi(2);
    let ab2 = n.alphab[0].powi(2) + n.alphab[1].powi(2);
    let f2 = pf.f.norm_sqr();
    let rs = n.rho * n.rho + n.sigma * n.sigma;
    let v = match class {
        FluxClass::Outgoing => d(&fr[0]) + sl + f2 + rs + a2,
        FluxClass::Incoming => d(&fr[1]) + sl + f2 + rs + ab2,
        FluxClass::Slice => {
            let df2: f64 = pf.df.iter().map(|z| z.norm_sqr()).sum();
            rs + 0.5 * (a2 + ab2) + df2 + f2
        }
    };
    Ok(v * p.r().powf(r_weight))
}

/// The flux class that belongs to a surface.
pub fn flux_class_for(spec: &RegionSpec) -> Result<FluxClass> {
    match spec {
        RegionSpec::OutNull { .. } => Ok(FluxClass::Outgoing),
        RegionSpec::InNull { .. } => Ok(FluxClass::Incoming),
        RegionSpec::Slice { .. } => Ok(FluxClass::Slice),
        _ => Err(Error::Unsupported(format!("exterior flux on {}", surface_label(spec)))),
    }
}

/// Exterior flux of `(f, G)`; for `k > 0` the callback is asked for every
/// multi-index of the class and the contributions are summed.
pub fn exterior_flux<F>(
    spec: &RegionSpec,
    mesh: &MeshSpec,
    class: GeneratorClass,
    k: usize,
    r_weight: f64,
    mut fetch: F,
) -> Result<FluxReport>
where
    F: FnMut(&[Point4], &MultiIndex) -> Result<Vec<PointFields>>,
{
    let fc = flux_class_for(spec)?;
    let nodes = surface_mesh(spec, mesh);
    let pts: Vec<Point4> = nodes.iter().map(|n| n.p).collect();
    let mut total = Vec::new();
    for mi in class.indices(k) {
        let fields = fetch(&pts, &mi)?;
        let dens = nodes
            .iter()
            .zip(&fields)
            .map(|(n, pf)| flux_density(fc, pf, &n.p, r_weight))
            .collect::<Result<Vec<f64>>>()?;
        total.push(integrate(&nodes, &dens));
    }
    Ok(FluxReport {
        surface: surface_label(spec),
        class: fc,
        r_weight,
        value: pairwise(&total),
    })
}

/// Closed-form `Σ_t` energy of the Coulomb field on the shell `a ≤ r ≤ b`:
/// `∫ q0²/(2r⁴) dx = 2π q0² (1/a − 1/b)`.
pub fn coulomb_shell_energy(q0: f64, a: f64, b: f64) -> f64 {
    2.0 * std::f64::consts::PI * q0 * q0 * (1.0 / a - 1.0 / b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::split::coulomb_form;
    use crate::geometry::SlicePart;
    use crate::quadrature::Rule;
    use num_complex::Complex64 as C64;

    fn coulomb(q0: f64) -> impl FnMut(&[Point4], &MultiIndex) -> Result<Vec<PointFields>> {
        move |pts, _| Ok(pts.iter().map(|p| PointFields::form(coulomb_form(q0, p))).collect())
    }

    #[test]
    fn coulomb_shell_matches_closed_form() {
        let spec = RegionSpec::Slice { t: 2.0, r_lo: 1.0, r_hi: 3.0, part: SlicePart::Whole };
        let mesh = MeshSpec::new(24, 4, 4, Rule::GaussLegendre);
        let rep = surface_energy(&spec, Multiplier::T0, None, 0, &mesh, coulomb(0.8)).unwrap();
        let want = coulomb_shell_energy(0.8, 1.0, 3.0);
        assert!((rep.value - want).abs() < 1e-10 * want, "{} vs {want}", rep.value);
    }

    #[test]
    fn zero_fields_give_zero() {
        let zero = |pts: &[Point4], _: &MultiIndex| Ok(vec![PointFields::default(); pts.len()]);
        let mesh = MeshSpec::new(6, 4, 6, Rule::GaussLegendre);
        let h = RegionSpec::Hyperboloid { tau: 3.0 };
        assert_eq!(surface_energy(&h, Multiplier::S, None, 0, &mesh, zero).unwrap().value, 0.0);
        let inn = RegionSpec::InNull { v: 3.0, u_lo: -1.0, u_hi: 0.0 };
        let rep = exterior_flux(&inn, &mesh, GeneratorClass::Poincare, 0, 0.0, zero).unwrap();
        assert_eq!(rep.value, 0.0);
    }

    #[test]
    fn coulomb_null_flux_is_rho_only() {
        let q0 = 0.5;
        let p = Point4::new(2.5, [1.0, 2.0, -1.5]);
        let pf = PointFields::form(coulomb_form(q0, &p));
        let r = p.r();
        let rho2 = (q0 / (r * r)).powi(2);
        for c in [FluxClass::Outgoing, FluxClass::Incoming, FluxClass::Slice] {
            assert!((flux_density(c, &pf, &p, 0.0).unwrap() - rho2).abs() < 1e-14);
        }
        // r-weighted variant on an incoming piece: ∫ r^w q0²/r⁴ r² dω du with r = v − u.
        let spec = RegionSpec::InNull { v: 4.0, u_lo: -1.0, u_hi: 1.0 };
        let mesh = MeshSpec::new(20, 4, 4, Rule::GaussLegendre);
        let rep = exterior_flux(&spec, &mesh, GeneratorClass::Poincare, 0, 1.0, coulomb(q0)).unwrap();
        let want = 4.0 * std::f64::consts::PI * q0 * q0 * (5.0f64 / 3.0).ln();
        assert!((rep.value - want).abs() < 1e-10, "{} vs {want}", rep.value);
    }

    #[test]
    fn hyperboloid_energy_of_plane_scalar_is_positive() {
        // f = e^{i k·x − iωt}, k = (0.4, 0, 0), ω² = 1 + k².
        let k: f64 = 0.4;
        let w = (1.0 + k * k).sqrt();
        let fetch = |pts: &[Point4], _: &MultiIndex| {
            Ok(pts
                .iter()
                .map(|p| {
                    let f = C64::from_polar(1.0, k * p.x[0] - w * p.t);
                    PointFields::scalar(f, [f * C64::new(0.0, -w), f * C64::new(0.0, k), C64::default(), C64::default()])
                })
                .collect())
        };
        let mesh = MeshSpec::new(16, 8, 8, Rule::GaussLegendre);
        let h = RegionSpec::Hyperboloid { tau: 2.5 };
        let e0 = surface_energy(&h, Multiplier::T0, None, 0, &mesh, fetch).unwrap();
        let es = surface_energy(&h, Multiplier::S, None, 0, &mesh, fetch).unwrap();
        assert!(e0.value > 0.0 && es.value > 0.0);
    }
}
