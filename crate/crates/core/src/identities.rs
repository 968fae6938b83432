//! The exact-identity suite: frame relations, component conversions,
//! stress-tensor expansions, Coulomb Lie formulas and the commutator
//! calculus, each evaluated on random points, plus optional grid
//! convergence studies of the commutators.
//!
//! Residuals are relative to the size of the terms involved, so the same
//! tolerance applies whatever the weights at the sampled point.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{eb_of, form_from_eb, form_max_diff, hodge_with, TwoForm, Vec4, EPS0123};
use crate::calculus::JetCalc;
use crate::decaylab::checks::{boost_identity_check, vector_decomposition_checks};
use crate::energies::stress::{density_expansion_residual, expansion_s, expansion_t0, maxwell_trace, PointFields};
use crate::error::Result;
use crate::exec::Exec;
use crate::fields::components::{em_decompose, frame_convert, h_norm2, hyperb_radial_direct, null_decompose, null_reassemble};
use crate::geometry::{tetrad_at, tetrad_defect, GeneratorId, Point4, TetradKind};
use crate::solver::config::IdentityConfig;
use crate::symmetries::commutators::{kg_commutator_residual, lie_current_residual};
use crate::symmetries::manufactured::{FieldRecipe, GaussFields, PolyFields};
use crate::symmetries::null_lie::coulomb_lie_identities;
use crate::symmetries::refinement::{refinement_study, ResidualKind};

/// Tolerance of every pointwise identity.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Required observed order of the grid commutator residuals.
pub const CONVERGENCE_ORDER: f64 = 3.5;
/// Charge of the Coulomb field in the Lie identities.
const COULOMB_Q0: f64 = 0.8;
/// Base points for the analytic commutator checks; pairs of generators
/// make each point cost about a hundred evaluations.
const COMMUTATOR_POINTS: usize = 6;
/// Grid size of the convergence studies.
pub const CONVERGENCE_N: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Residual must stay below the tolerance.
    Residual,
    /// Observed convergence order must reach the tolerance.
    Order,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResult {
    pub identity_id: String,
    pub kind: CheckKind,
    pub samples: usize,
    /// Worst residual, or the observed order for convergence checks.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Whether the check depends on the orientation sign of the dual.
    pub dual_sensitive: bool,
}

pub const IDENTITY_HEADER: [&str; 7] = ["identity_id", "kind", "samples", "value", "tolerance", "passed", "dual_sensitive"];

#[derive(Default)]
struct Worst {
    value: f64,
    samples: usize,
}

impl Worst {
    fn add(&mut self, v: f64) {
        // NaN must fail, so it wins over any finite residual.
        self.value = if v.is_nan() || self.value.is_nan() { f64::NAN } else { self.value.max(v) };
        self.samples += 1;
    }
}

struct Tally {
    ids: Vec<(&'static str, bool)>,
    worst: Vec<Worst>,
}

impl Tally {
    fn new() -> Self {
        Tally { ids: Vec::new(), worst: Vec::new() }
    }

    fn slot(&mut self, id: &'static str, dual: bool) -> &mut Worst {
        let k = match self.ids.iter().position(|(i, _)| *i == id) {
            Some(k) => k,
            None => {
                self.ids.push((id, dual));
                self.worst.push(Worst::default());
                self.ids.len() - 1
            }
        };
        &mut self.worst[k]
    }

    fn add(&mut self, id: &'static str, dual: bool, v: f64) {
        self.slot(id, dual).add(v);
    }

    fn merge(mut self, o: Tally) -> Tally {
        for ((id, dual), w) in o.ids.into_iter().zip(o.worst) {
            let s = self.slot(id, dual);
            s.add(w.value);
            s.samples += w.samples - 1;
        }
        self
    }

    fn results(self) -> Vec<IdentityResult> {
        self.ids
            .into_iter()
            .zip(self.worst)
            .map(|((id, dual), w)| IdentityResult {
                identity_id: id.to_string(),
                kind: CheckKind::Residual,
                samples: w.samples,
                value: w.value,
                tolerance: IDENTITY_TOL,
                passed: w.value <= IDENTITY_TOL,
                dual_sensitive: dual,
            })
            .collect()
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn form_size(g: &TwoForm) -> f64 {
    g.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn random_form(rng: &mut ChaCha8Rng) -> TwoForm {
    form_from_eb(std::array::from_fn(|_| rng.random_range(-1.0..1.0)), std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let ph = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    [s * ph.cos(), s * ph.sin(), z]
}

/// A point strictly inside the future light cone, with `t ∈ [1, 10]`.
fn interior_point(rng: &mut ChaCha8Rng) -> Point4 {
    let t = rng.random_range(1.0..10.0);
    let r = rng.random_range(0.01..0.99) * t;
    Point4::polar(t, r, unit_vector(rng))
}

/// A point where the Coulomb cutoff is fully active.
fn coulomb_point(rng: &mut ChaCha8Rng) -> Point4 {
    let t = rng.random_range(0.5..10.0);
    let lo = (t - crate::geometry::T0 + 0.5 * crate::geometry::R).max(0.2);
    let r = rng.random_range(lo..lo + 10.0);
    Point4::polar(t, r, unit_vector(rng))
}

/// Checks that involve the Hodge dual, evaluated with the orientation sign
/// `eps`. Against the conventions used throughout, a wrong sign breaks them.
fn dual_checks(t: &mut Tally, g: &TwoForm, p: &Point4, eps: f64) -> Result<()> {
    let d = hodge_with(g, eps);
    let s = form_size(g);
    let (e, b) = eb_of(g);
    let (de, db) = eb_of(&d);
    let em = (0..3).fold(0.0f64, |m, i| m.max((de[i] - b[i]).abs()).max((db[i] + e[i]).abs()));
    t.add("dual-electric-magnetic", true, rel(em, s));
    let n = null_decompose(g, p)?;
    let m = null_decompose(&d, p)?;
    let nd = [
        m.rho - n.sigma,
        m.sigma + n.rho,
        m.alpha[0] + n.alpha[1],
        m.alpha[1] - n.alpha[0],
        m.alphab[0] - n.alphab[1],
        m.alphab[1] + n.alphab[0],
    ];
    t.add("dual-null-components", true, rel(nd.iter().fold(0.0f64, |a, v| a.max(v.abs())), n.max_abs()));
    Ok(())
}

/// Pointwise checks at one interior point.
fn interior_checks(t: &mut Tally, rng: &mut ChaCha8Rng, p: &Point4, eps: f64) -> Result<()> {
    let w: Vec4 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    for (_, v) in vector_decomposition_checks(p, &w)? {
        t.add("frame-relations", false, v);
    }
    for kind in [TetradKind::Null, TetradKind::HyperbRadial, TetradKind::HyperbOrthonormal, TetradKind::Cartesian] {
        t.add("tetrad-orthonormality", false, tetrad_defect(&tetrad_at(p, kind)?));
    }
    t.add("boost-identity", false, rel(boost_identity_check(p)?, p.t * p.t));

    let g = random_form(rng);
    let n = null_decompose(&g, p)?;
    let a = frame_convert(&n, p)?;
    let b = hyperb_radial_direct(&g, p)?;
    let d = [a.tn - b.tn, a.te[0] - b.te[0], a.te[1] - b.te[1], a.ne[0] - b.ne[0], a.ne[1] - b.ne[1], a.sigma - b.sigma];
    let scale = [b.tn, b.te[0], b.te[1], b.ne[0], b.ne[1], b.sigma].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    t.add("hyperboloidal-null-conversion", false, rel(d.iter().fold(0.0f64, |m, v| m.max(v.abs())), scale));
    t.add("null-reconstruction", false, rel(form_max_diff(&null_reassemble(&n, p)?, &g), form_size(&g)));

    let em = em_decompose(&g, p)?;
    let h2 = h_norm2(&g, p)?;
    let pyth: f64 = em.e.iter().chain(&em.h).map(|v| v * v).sum();
    t.add("electric-magnetic-pythagoras", false, rel((h2 - pyth).abs(), h2));
    t.add("maxwell-trace", false, rel(maxwell_trace(&g).abs(), form_size(&g).powi(2)));

    let pf = PointFields {
        f: random_c64(rng),
        df: std::array::from_fn(|_| random_c64(rng)),
        g,
    };
    let (r0, rs) = density_expansion_residual(&pf, p)?;
    t.add("density-expansion-t0", false, rel(r0.abs(), expansion_t0(&pf, p)?.abs()));
    t.add("density-expansion-s", false, rel(rs.abs(), expansion_s(&g, p)?.abs()));

    dual_checks(t, &g, p, eps)
}

fn coulomb_checks(t: &mut Tally, p: &Point4) -> Result<()> {
    for y in GeneratorId::poincare() {
        let (computed, closed) = coulomb_lie_identities(COULOMB_Q0, y, p)?;
        t.add("coulomb-lie", false, rel(computed.sub(&closed).max_abs(), closed.max_abs()));
    }
    Ok(())
}

/// Analytic commutator residuals at one base point, at orders 1 and 2.
fn commutator_checks(t: &mut Tally, seed: u64, base: [f64; 4]) {
    let rec = PolyFields::random(seed, base);
    let c = JetCalc::new(4, base);
    let phi = rec.phi(&c);
    let a = rec.potential(&c);
    let gens = GeneratorId::poincare();
    let norm = |v: &crate::jet::Jet| if v.valid_order() < 0 { f64::NAN } else { v.value().norm() };
    for x in &gens {
        let zs = [x.field()];
        t.add("kg-commutator-order1", false, norm(&kg_commutator_residual(&c, &phi, &a, &zs)));
        for v in lie_current_residual(&c, &phi, &a, &zs) {
            t.add("lie-current-order1", false, norm(&v));
        }
        for y in &gens {
            let zs = [x.field(), y.field()];
            t.add("kg-commutator-order2", false, norm(&kg_commutator_residual(&c, &phi, &a, &zs)));
            for v in lie_current_residual(&c, &phi, &a, &zs) {
                t.add("lie-current-order2", false, norm(&v));
            }
        }
    }
}

/// Grid-path convergence of the commutator residuals on `n³` and the same
/// box at half the spacing.
pub fn convergence_checks(seed: u64, n: usize, exec: Exec) -> Vec<IdentityResult> {
    let rec = GaussFields::random(seed, 1.0, 2.0);
    let dx = 6.0 / n as f64;
    let one = [GeneratorId::Boost(2).field()];
    let two = [GeneratorId::Boost(1).field(), GeneratorId::Rotation(1, 2).field()];
    let cases: [(&str, ResidualKind, &[_]); 4] = [
        ("kg-commutator-order1-grid", ResidualKind::KleinGordon, &one),
        ("kg-commutator-order2-grid", ResidualKind::KleinGordon, &two),
        ("lie-current-order1-grid", ResidualKind::Current, &one),
        ("lie-current-order2-grid", ResidualKind::Current, &two),
    ];
    cases
        .iter()
        .map(|(id, kind, zs)| {
            let r = refinement_study(&rec, *kind, zs, n, dx, 2.0, exec);
            let order = r.order();
            IdentityResult {
                identity_id: id.to_string(),
                kind: CheckKind::Order,
                samples: 2,
                value: order,
                tolerance: CONVERGENCE_ORDER,
                passed: order >= CONVERGENCE_ORDER && r.norm[0] > 0.0,
                dual_sensitive: false,
            }
        })
        .collect()
}

/// Runs the pointwise suite, and the convergence studies if requested.
pub fn run_identity_suite(cfg: &IdentityConfig, exec: Exec) -> Result<Vec<IdentityResult>> {
    let eps = if cfg.flip_epsilon { -EPS0123 } else { EPS0123 };
    // A fixed chunk count keeps the random streams, and so the output,
    // independent of the thread count.
    let chunks = 16;
    let per = cfg.points.div_ceil(chunks);
    let parts: Vec<Result<Tally>> = exec.map(chunks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1)));
        let mut t = Tally::new();
        let lo = k * per;
        for _ in lo..(lo + per).min(cfg.points) {
            let p = interior_point(&mut rng);
            interior_checks(&mut t, &mut rng, &p, eps)?;
            let q = coulomb_point(&mut rng);
            coulomb_checks(&mut t, &q)?;
        }
        Ok(t)
    });
    let mut tally = Tally::new();
    for p in parts {
        tally = tally.merge(p?);
    }
    let bases: Vec<Tally> = exec.map(COMMUTATOR_POINTS, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 + k as u64));
        let base = interior_point(&mut rng).as_array();
        let mut t = Tally::new();
        commutator_checks(&mut t, cfg.seed.wrapping_add(k as u64), base);
        t
    });
    for b in bases {
        tally = tally.merge(b);
    }
    let mut out = tally.results();
    if cfg.convergence {
        out.extend(convergence_checks(cfg.seed, CONVERGENCE_N, exec));
    }
    Ok(out)
}

pub fn write_identities(path: &std::path::Path, rows: &[IdentityResult]) -> Result<()> {
    crate::decaylab::report::write_csv(path, &IDENTITY_HEADER, rows)
}
