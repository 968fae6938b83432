//! Discrete evaluation of the hyperboloidal energy identity
//!
//! `E(τ1) = E(τ0) + ∫_{C0} T(X, L) r² dω dt − ∫_D (∂^μT_{μν} X^ν + T·π^X) d⁴x`
//!
//! with `E(τ) = ∫_{H_τ} T(X, T̄) dH_τ`. The plan lists every quadrature
//! node up front so the fields can be produced by a streamed evolution in a
//! single pass. The bulk keeps only the deformation term: the divergence
//! `∂^μ T_{μν}` vanishes for solutions of the field equations, and the
//! identity is applied to solutions only.

use crate::error::{Error, Result};
use crate::exec::pairwise;
use crate::geometry::{surface_mesh, MeshSpec, Point4, RegionSpec, SurfaceNode};
use crate::quadrature::{self, Rule};

use super::stress::{stress_tensor, Multiplier, PointFields};
use super::surfaces::energy_density;

#[derive(Clone, Debug)]
pub struct IdentityPlan {
    pub multiplier: Multiplier,
    pub tau_lo: f64,
    pub tau_hi: f64,
    lo: Vec<SurfaceNode>,
    hi: Vec<SurfaceNode>,
    cone: Vec<SurfaceNode>,
    bulk: Vec<SurfaceNode>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityTerms {
    pub energy_lo: f64,
    pub energy_hi: f64,
    pub cone_flux: f64,
    pub bulk: f64,
}

impl IdentityTerms {
    /// `E(τ1) − E(τ0) − flux + bulk`.
    pub fn residual(&self) -> f64 {
        self.energy_hi - self.energy_lo - self.cone_flux + self.bulk
    }

    pub fn scale(&self) -> f64 {
        self.energy_lo.abs().max(self.energy_hi.abs()).max(self.cone_flux.abs())
    }
}

impl IdentityPlan {
    /// Surfaces use `mesh`; the bulk stacks `n_tau` hyperboloids with the
    /// same mesh. Gauss–Legendre throughout.
    pub fn new(multiplier: Multiplier, tau_lo: f64, tau_hi: f64, mesh: MeshSpec, n_tau: usize) -> Result<Self> {
        if !(tau_hi > tau_lo && tau_lo >= crate::geometry::TAU0) {
            return Err(Error::Config(format!("bad hyperboloid range [{tau_lo}, {tau_hi}]")));
        }
        let lo = surface_mesh(&RegionSpec::Hyperboloid { tau: tau_lo }, &mesh);
        let hi = surface_mesh(&RegionSpec::Hyperboloid { tau: tau_hi }, &mesh);
        let cone = surface_mesh(&RegionSpec::ConeC0 { tau_lo, tau_hi }, &mesh);
        let bulk = match multiplier {
            Multiplier::T0 => Vec::new(),
            Multiplier::S => quadrature::nodes(Rule::GaussLegendre, n_tau, tau_lo, tau_hi)
                .into_iter()
                .flat_map(|(tau, w)| {
                    surface_mesh(&RegionSpec::Hyperboloid { tau }, &mesh)
                        .into_iter()
                        .map(move |n| SurfaceNode { p: n.p, weight: n.weight * w })
                })
                .collect(),
        };
        Ok(IdentityPlan { multiplier, tau_lo, tau_hi, lo, hi, cone, bulk })
    }

    /// All nodes in a fixed order: lower surface, upper surface, cone, bulk.
    pub fn points(&self) -> Vec<Point4> {
        self.lo
            .iter()
            .chain(&self.hi)
            .chain(&self.cone)
            .chain(&self.bulk)
            .map(|n| n.p)
            .collect()
    }

    /// Time span the plan needs.
    pub fn time_range(&self) -> (f64, f64) {
        self.points()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.t), b.max(p.t)))
    }

    /// Largest radius the plan touches.
    pub fn max_radius(&self) -> f64 {
        self.points().iter().fold(0.0, |m, p| m.max(p.r()))
    }

    /// Evaluates the terms from fields given in [`Self::points`] order.
    pub fn evaluate(&self, fields: &[PointFields]) -> Result<IdentityTerms> {
        let n = self.lo.len() + self.hi.len() + self.cone.len() + self.bulk.len();
        if fields.len() != n {
            return Err(Error::Config(format!("expected {n} field samples, got {}", fields.len())));
        }
        let (f_lo, rest) = fields.split_at(self.lo.len());
        let (f_hi, rest) = rest.split_at(self.hi.len());
        let (f_cone, f_bulk) = rest.split_at(self.cone.len());
        let x = self.multiplier;
        let surf = |spec: RegionSpec, nodes: &[SurfaceNode], f: &[PointFields]| -> Result<f64> {
            let v = nodes
                .iter()
                .zip(f)
                .map(|(n, pf)| Ok(n.weight * energy_density(&spec, x, pf, &n.p)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(pairwise(&v))
        };
        let bulk: Vec<f64> = self
            .bulk
            .iter()
            .zip(f_bulk)
            .map(|(n, pf)| n.weight * x.deformation_density(&stress_tensor(pf)))
            .collect();
        Ok(IdentityTerms {
            energy_lo: surf(RegionSpec::Hyperboloid { tau: self.tau_lo }, &self.lo, f_lo)?,
            energy_hi: surf(RegionSpec::Hyperboloid { tau: self.tau_hi }, &self.hi, f_hi)?,
            cone_flux: surf(RegionSpec::ConeC0 { tau_lo: self.tau_lo, tau_hi: self.tau_hi }, &self.cone, f_cone)?,
            bulk: pairwise(&bulk),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    /// Superposition of two free Klein–Gordon plane waves, an exact solution.
    fn kg_waves(p: &Point4) -> PointFields {
        let mut f = C64::default();
        let mut df = [C64::default(); 4];
        for (amp, k) in [(0.7, [0.5, 0.0, -0.3]), (0.4, [0.0, 0.8, 0.2])] {
            let w = (1.0 + k.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let ph = C64::from_polar(amp, k[0] * p.x[0] + k[1] * p.x[1] + k[2] * p.x[2] - w * p.t);
            f += ph;
            df[0] += ph * C64::new(0.0, -w);
            for i in 0..3 {
                df[i + 1] += ph * C64::new(0.0, k[i]);
            }
        }
        PointFields::scalar(f, df)
    }

    /// Plane electromagnetic wave along x1: `E2 = −B3 = cos(x1 − t)`.
    fn em_wave(p: &Point4) -> PointFields {
        let c = (p.x[0] - p.t).cos();
        PointFields::form(crate::algebra::form_from_eb([0.0, c, 0.0], [0.0, 0.0, -c]))
    }

    fn check(x: Multiplier, f: impl Fn(&Point4) -> PointFields) -> IdentityTerms {
        let mesh = MeshSpec::new(24, 16, 24, Rule::GaussLegendre);
        let plan = IdentityPlan::new(x, 2.0, 3.0, mesh, 12).unwrap();
        let fields: Vec<PointFields> = plan.points().iter().map(&f).collect();
        plan.evaluate(&fields).unwrap()
    }

    #[test]
    fn exact_kg_solution_balances() {
        for x in [Multiplier::T0, Multiplier::S] {
            let t = check(x, kg_waves);
            assert!(t.residual().abs() < 1e-8 * t.scale(), "{x:?} {t:?}");
            assert!(t.cone_flux > 0.0);
        }
    }

    #[test]
    fn exact_maxwell_wave_balances() {
        let t = check(Multiplier::S, em_wave);
        assert!(t.bulk.abs() < 1e-12);
        assert!(t.residual().abs() < 1e-8 * t.scale(), "{t:?}");
    }

    #[test]
    fn zero_fields_give_zero_residual() {
        let t = check(Multiplier::T0, |_| PointFields::default());
        assert_eq!(t.residual(), 0.0);
    }
}
