//! Coordinates, frames, Poincaré generators and surface descriptions.
//!
//! Units: mass 1, `R = 1`, `t0 = 2`. The initial cone `C0` is
//! `{t − t0 = r − R, t ≥ t0}` and the interior hyperboloids start at
//! `τ0 = √3`.

use std::f64::consts::PI;

use crate::algebra::{levi_civita, mdot, Vec4};
use crate::calculus::{AffineField, ETA};
use crate::error::{Error, Result};
use crate::quadrature::{self, Rule};

pub const R: f64 = 1.0;
pub const T0: f64 = 2.0;
pub const TAU0: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point4 {
    pub t: f64,
    pub x: [f64; 3],
}

impl Point4 {
    pub fn new(t: f64, x: [f64; 3]) -> Self {
        Point4 { t, x }
    }

    /// Point at radius `r` along the unit direction `w`.
    pub fn polar(t: f64, r: f64, w: [f64; 3]) -> Self {
        Point4 {
            t,
            x: w.map(|c| c * r),
        }
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        Point4 {
            t: p[0],
            x: [p[1], p[2], p[3]],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.t, self.x[0], self.x[1], self.x[2]]
    }

    pub fn r(&self) -> f64 {
        (self.x[0] * self.x[0] + self.x[1] * self.x[1] + self.x[2] * self.x[2]).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpticalCoords {
    pub tau_plus: f64,
    pub tau_minus: f64,
    /// `√(t² − r²)`, only inside the light cone of the origin.
    pub tau: Option<f64>,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    /// `x / r`, absent on the axis.
    pub omega: Option<[f64; 3]>,
}

pub fn optical_coords(p: &Point4) -> OpticalCoords {
    let r = p.r();
    let tp = p.t + r;
    let tm = p.t - r;
    OpticalCoords {
        tau_plus: tp,
        tau_minus: tm,
        tau: (p.t >= r).then(|| (tp * tm).max(0.0).sqrt()),
        u: (p.t - T0 - r) / 2.0,
        v: (p.t - T0 + r) / 2.0,
        r,
        omega: (r > 0.0).then(|| p.x.map(|c| c / r)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TetradKind {
    /// `(L, L̄, e1, e2)`
    Null,
    /// `(T̄, N̄, e1, e2)`
    HyperbRadial,
    /// `(T̄, ē1, ē2, ē3)`
    HyperbOrthonormal,
    /// `(∂t, ∂1, ∂2, ∂3)`
    Cartesian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tetrad {
    pub kind: TetradKind,
    pub legs: [Vec4; 4],
}

/// Unit sphere frame `(θ̂, φ̂)` at direction `w`; oriented so that
/// `θ̂ × φ̂ = w`. On the poles the azimuth is taken as 0.
pub fn sphere_frame(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let ct = w[2].clamp(-1.0, 1.0);
    let rho = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let (cp, sp) = if rho > 0.0 {
        (w[0] / rho, w[1] / rho)
    } else {
        (1.0, 0.0)
    };
    ([ct * cp, ct * sp, -rho], [-sp, cp, 0.0])
}

fn spatial(v: [f64; 3]) -> Vec4 {
    [0.0, v[0], v[1], v[2]]
}

/// Null frame pieces `(L, L̄, e1, e2)` at a point with `r > 0`.
pub fn null_frame(p: &Point4) -> Result<[Vec4; 4]> {
    let r = p.r();
    if r <= 0.0 {
        return Err(Error::Degenerate {
            point: p.as_array(),
            reason: "radial frame requested at r = 0",
        });
    }
    let w = p.x.map(|c| c / r);
    let (e1, e2) = sphere_frame(w);
    Ok([
        [1.0, w[0], w[1], w[2]],
        [1.0, -w[0], -w[1], -w[2]],
        spatial(e1),
        spatial(e2),
    ])
}

/// Unit normal `T̄ = (t, x)/τ` of the hyperboloid through `p`.
pub fn hyperboloid_normal(p: &Point4) -> Result<Vec4> {
    let r = p.r();
    if p.t <= r {
        return Err(Error::Degenerate {
            point: p.as_array(),
            reason: "hyperboloidal frame requested outside the cone t > r",
        });
    }
    let tau = ((p.t - r) * (p.t + r)).sqrt();
    Ok([p.t / tau, p.x[0] / tau, p.x[1] / tau, p.x[2] / tau])
}

pub fn tetrad_at(p: &Point4, kind: TetradKind) -> Result<Tetrad> {
    let legs = match kind {
        TetradKind::Cartesian => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        TetradKind::Null => null_frame(p)?,
        TetradKind::HyperbRadial => {
            let tb = hyperboloid_normal(p)?;
            let [_, _, e1, e2] = null_frame(p)?;
            let r = p.r();
            let tau = ((p.t - r) * (p.t + r)).sqrt();
            let w = p.x.map(|c| c / r);
            let nb = [r / tau, p.t * w[0] / tau, p.t * w[1] / tau, p.t * w[2] / tau];
            [tb, nb, e1, e2]
        }
        TetradKind::HyperbOrthonormal => {
            let tb = hyperboloid_normal(p)?;
            let mut legs = [tb, [0.0; 4], [0.0; 4], [0.0; 4]];
            for i in 1..4 {
                let mut e = [0.0; 4];
                e[0] = tb[i];
                for j in 1..4 {
                    e[j] = if i == j { 1.0 } else { 0.0 } + tb[i] * tb[j] / (1.0 + tb[0]);
                }
                legs[i] = e;
            }
            legs
        }
    };
    Ok(Tetrad { kind, legs })
}

/// `ε_{AB} = ½ ε(L̄, L, e_A, e_B)` on the sphere frame of the null tetrad.
pub fn sphere_epsilon(frame: &[Vec4; 4]) -> [[f64; 2]; 2] {
    let [l, lb, e1, e2] = frame;
    let vol = |a: &Vec4, b: &Vec4, c: &Vec4, d: &Vec4| {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for m in 0..4 {
                        let e = levi_civita(i, j, k, m);
                        if e != 0.0 {
                            s += e * a[i] * b[j] * c[k] * d[m];
                        }
                    }
                }
            }
        }
        s
    };
    let es = [e1, e2];
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = 0.5 * vol(lb, l, es[a], es[b]);
        }
    }
    out
}

/// Maximum violation of the metric relations expected for the tetrad kind.
pub fn tetrad_defect(t: &Tetrad) -> f64 {
    let g = |i: usize, j: usize| mdot(&t.legs[i], &t.legs[j]);
    let want: [[f64; 4]; 4] = match t.kind {
        TetradKind::Null => [
            [0.0, -2.0, 0.0, 0.0],
            [-2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        _ => [
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((g(i, j) - want[i][j]).abs());
        }
    }
    m
}

/// Poincaré generators and the scaling field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorId {
    /// `∂_mu`
    Translation(usize),
    /// `Ω_{0a}`, `a ∈ 1..=3`
    Boost(usize),
    /// `Ω_{ij}`, `1 ≤ i < j ≤ 3`
    Rotation(usize, usize),
    /// `S = x^mu ∂_mu`
    Scaling,
}

impl GeneratorId {
    /// The ten Killing generators, in a fixed order.
    pub fn poincare() -> Vec<GeneratorId> {
        let mut v: Vec<_> = (0..4).map(GeneratorId::Translation).collect();
        v.extend((1..4).map(GeneratorId::Boost));
        v.extend([(1, 2), (1, 3), (2, 3)].map(|(i, j)| GeneratorId::Rotation(i, j)));
        v
    }

    pub fn all() -> Vec<GeneratorId> {
        let mut v = Self::poincare();
        v.push(GeneratorId::Scaling);
        v
    }

    /// `Ω_{mu nu} = x_mu ∂_nu − x_nu ∂_mu` with `x_mu = m_{mu nu} x^nu`.
    pub fn field(&self) -> AffineField {
        let mut z = AffineField::ZERO;
        let omega = |z: &mut AffineField, mu: usize, nu: usize| {
            z.lin[nu][mu] += ETA[mu];
            z.lin[mu][nu] -= ETA[nu];
        };
        match *self {
            GeneratorId::Translation(mu) => z.c[mu] = 1.0,
            GeneratorId::Boost(a) => omega(&mut z, 0, a),
            GeneratorId::Rotation(i, j) => omega(&mut z, i, j),
            GeneratorId::Scaling => {
                for mu in 0..4 {
                    z.lin[mu][mu] = 1.0;
                }
            }
        }
        z
    }

    pub fn at(&self, p: &Point4) -> Vec4 {
        self.field().at(p.as_array())
    }

    /// Signature: −1 for translations, 0 for boosts and rotations.
    pub fn zeta(&self) -> Option<i32> {
        match self {
            GeneratorId::Translation(_) => Some(-1),
            GeneratorId::Boost(_) | GeneratorId::Rotation(..) => Some(0),
            GeneratorId::Scaling => None,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            GeneratorId::Translation(mu) => format!("d{mu}"),
            GeneratorId::Boost(a) => format!("O0{a}"),
            GeneratorId::Rotation(i, j) => format!("O{i}{j}"),
            GeneratorId::Scaling => "S".into(),
        }
    }

    pub fn is_translation(&self) -> bool {
        matches!(self, GeneratorId::Translation(_))
    }
}

/// Ordered commutation index of length at most 2, without `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex(Vec<GeneratorId>);

impl MultiIndex {
    pub fn new(ids: Vec<GeneratorId>) -> Result<Self> {
        if ids.len() > 2 {
            return Err(Error::Unsupported("commutation index longer than 2".into()));
        }
        if ids.contains(&GeneratorId::Scaling) {
            return Err(Error::Unsupported("S in a commutation index".into()));
        }
        Ok(MultiIndex(ids))
    }

    pub fn ids(&self) -> &[GeneratorId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zeta(&self) -> i32 {
        self.0.iter().filter_map(|g| g.zeta()).sum()
    }
}

/// Commutation classes summed over in energy functionals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorClass {
    Translations,
    Lorentz,
    Poincare,
}

impl GeneratorClass {
    pub fn members(&self) -> Vec<GeneratorId> {
        GeneratorId::poincare()
            .into_iter()
            .filter(|g| match self {
                GeneratorClass::Translations => g.is_translation(),
                GeneratorClass::Lorentz => !g.is_translation(),
                GeneratorClass::Poincare => true,
            })
            .collect()
    }

    /// All multi-indices of exactly length `k`.
    pub fn indices(&self, k: usize) -> Vec<MultiIndex> {
        let m = self.members();
        match k {
            0 => vec![MultiIndex(vec![])],
            1 => m.iter().map(|&g| MultiIndex(vec![g])).collect(),
            2 => m
                .iter()
                .flat_map(|&a| m.iter().map(move |&b| MultiIndex(vec![a, b])))
                .collect(),
            _ => vec![],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorClass::Translations => "T",
            GeneratorClass::Lorentz => "Omega",
            GeneratorClass::Poincare => "P",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlicePart {
    Whole,
    Interior,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionSpec {
    /// Truncated hyperboloid `H_τ ∩ {t − t0 ≥ r − R}`.
    Hyperboloid { tau: f64 },
    /// Piece of the initial cone between two hyperboloids.
    ConeC0 { tau_lo: f64, tau_hi: f64 },
    /// Outgoing null piece `H_u^v`: fixed `u`, `v` in `[v_lo, v_hi]`.
    OutNull { u: f64, v_lo: f64, v_hi: f64 },
    /// Incoming null piece `H̄_v^u`: fixed `v`, `u` in `[u_lo, u_hi]`.
    InNull { v: f64, u_lo: f64, u_hi: f64 },
    /// Constant-time slice restricted to `r ∈ [r_lo, r_hi]`.
    Slice { t: f64, r_lo: f64, r_hi: f64, part: SlicePart },
    /// `D^τ`: hyperboloids between `τ0` and `τ`.
    Domain { tau: f64 },
    /// Exterior domain `D_u^v` bounded by `u' ≤ u`, `v' ≤ v`, `t ≥ t0`.
    ExteriorDomain { u: f64, v: f64 },
}

const MEMBERSHIP_TOL: f64 = 1e-12;

fn interior(p: &Point4) -> bool {
    p.t - T0 >= p.r() - R - MEMBERSHIP_TOL
}

fn exterior(p: &Point4) -> bool {
    p.t - T0 <= p.r() - R + MEMBERSHIP_TOL
}

pub fn region_contains(spec: &RegionSpec, p: &Point4) -> bool {
    let oc = optical_coords(p);
    let r = oc.r;
    let scale = 1.0 + p.t.abs() + r;
    match *spec {
        RegionSpec::Hyperboloid { tau } => {
            (p.t * p.t - r * r - tau * tau).abs() <= MEMBERSHIP_TOL * scale * scale
                && p.t > 0.0
                && interior(p)
        }
        RegionSpec::ConeC0 { tau_lo, tau_hi } => {
            (p.t - T0 - (r - R)).abs() <= MEMBERSHIP_TOL * scale
                && p.t >= T0 - MEMBERSHIP_TOL
                && oc
                    .tau
                    .is_some_and(|t| t >= tau_lo - MEMBERSHIP_TOL && t <= tau_hi + MEMBERSHIP_TOL)
        }
        RegionSpec::OutNull { u, v_lo, v_hi } => {
            (oc.u - u).abs() <= MEMBERSHIP_TOL * scale
                && oc.v >= v_lo - MEMBERSHIP_TOL
                && oc.v <= v_hi + MEMBERSHIP_TOL
        }
        RegionSpec::InNull { v, u_lo, u_hi } => {
            (oc.v - v).abs() <= MEMBERSHIP_TOL * scale
                && oc.u >= u_lo - MEMBERSHIP_TOL
                && oc.u <= u_hi + MEMBERSHIP_TOL
        }
        RegionSpec::Slice { t, r_lo, r_hi, part } => {
            (p.t - t).abs() <= MEMBERSHIP_TOL * scale
                && r >= r_lo
                && r <= r_hi
                && match part {
                    SlicePart::Whole => true,
                    SlicePart::Interior => interior(p),
                    SlicePart::Exterior => exterior(p),
                }
        }
        RegionSpec::Domain { tau } => {
            interior(p)
                && oc
                    .tau
                    .is_some_and(|s| s >= TAU0 - MEMBERSHIP_TOL && s <= tau + MEMBERSHIP_TOL)
        }
        RegionSpec::ExteriorDomain { u, v } => {
            exterior(p)
                && p.t >= T0 - MEMBERSHIP_TOL
                && oc.u <= u + MEMBERSHIP_TOL
                && oc.v <= v + MEMBERSHIP_TOL
        }
    }
}

/// Radius where `H_τ` meets the initial cone.
pub fn truncation_radius(tau: f64) -> f64 {
    ((tau * tau - R * R) / (2.0 * R)).max(0.0)
}

/// Time at which the initial cone meets `H_τ`.
pub fn cone_time(tau: f64) -> f64 {
    truncation_radius(tau) + T0 - R
}

/// Resolution of a surface mesh: nodes along the radial (or time)
/// parameter and on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSpec {
    pub n_radial: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub rule: Rule,
}

impl MeshSpec {
    pub fn new(n_radial: usize, n_theta: usize, n_phi: usize, rule: Rule) -> Self {
        MeshSpec {
            n_radial,
            n_theta,
            n_phi,
            rule,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceNode {
    pub p: Point4,
    pub weight: f64,
}

/// Quadrature nodes on a surface with its natural measure: `(τ/t) dx` on
/// hyperboloids, `r² dω dt` on the cone, `r² dω dv` (or `du`) on null
/// pieces and `dx` on slices. Volumetric regions yield no mesh.
pub fn surface_mesh(spec: &RegionSpec, mesh: &MeshSpec) -> Vec<SurfaceNode> {
    let sph = quadrature::sphere(mesh.rule, mesh.n_theta, mesh.n_phi);
    let mut out = Vec::new();
    let push_shell = |t: f64, r: f64, w: f64, out: &mut Vec<SurfaceNode>| {
        for (n, ws) in &sph {
            out.push(SurfaceNode {
                p: Point4::polar(t, r, *n),
                weight: w * ws,
            });
        }
    };
    match *spec {
        RegionSpec::Hyperboloid { tau } => {
            let rc = truncation_radius(tau);
            if rc <= 0.0 {
                return out;
            }
            for (r, w) in quadrature::nodes(mesh.rule, mesh.n_radial, 0.0, rc) {
                let t = (tau * tau + r * r).sqrt();
                push_shell(t, r, w * r * r * tau / t, &mut out);
            }
        }
        RegionSpec::ConeC0 { tau_lo, tau_hi } => {
            let (a, b) = (cone_time(tau_lo.max(TAU0)), cone_time(tau_hi));
            if b <= a {
                return out;
            }
            for (t, w) in quadrature::nodes(mesh.rule, mesh.n_radial, a, b) {
                let r = t - T0 + R;
                push_shell(t, r, w * r * r, &mut out);
            }
        }
        RegionSpec::OutNull { u, v_lo, v_hi } => {
            let lo = v_lo.max(u);
            if v_hi <= lo {
                return out;
            }
            for (v, w) in quadrature::nodes(mesh.rule, mesh.n_radial, lo, v_hi) {
                let r = v - u;
                push_shell(T0 + u + v, r, w * r * r, &mut out);
            }
        }
        RegionSpec::InNull { v, u_lo, u_hi } => {
            let hi = u_hi.min(v);
            if hi <= u_lo {
                return out;
            }
            for (u, w) in quadrature::nodes(mesh.rule, mesh.n_radial, u_lo, hi) {
                let r = v - u;
                push_shell(T0 + u + v, r, w * r * r, &mut out);
            }
        }
        RegionSpec::Slice { t, r_lo, r_hi, part } => {
            let edge = t - T0 + R;
            let (a, b) = match part {
                SlicePart::Whole => (r_lo, r_hi),
                SlicePart::Interior => (r_lo, r_hi.min(edge)),
                SlicePart::Exterior => (r_lo.max(edge), r_hi),
            };
            let a = a.max(0.0);
            if b <= a {
                return out;
            }
            for (r, w) in quadrature::nodes(mesh.rule, mesh.n_radial, a, b) {
                push_shell(t, r, w * r * r, &mut out);
            }
        }
        RegionSpec::Domain { .. } | RegionSpec::ExteriorDomain { .. } => {}
    }
    out
}

/// Closed-form `∫_{H_τ ∩ {r ≤ ρ}} dH_τ = 4π ∫_0^ρ (τ/√(τ²+r²)) r² dr`.
pub fn hyperboloid_cap_measure(tau: f64, rho: f64) -> f64 {
    let s = (tau * tau + rho * rho).sqrt();
    4.0 * PI * tau * 0.5 * (rho * s - tau * tau * (rho / tau).asinh())
}
