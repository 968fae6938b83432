//! Exact frame identities behind the boost and vector-field comparisons.

use crate::algebra::{lincomb, mdot, Vec4};
use crate::error::{Error, Result};
use crate::geometry::{null_frame, optical_coords, tetrad_at, GeneratorId, Point4, TetradKind};

fn require_interior(p: &Point4) -> Result<()> {
    if p.r() <= 1e-9 || p.t <= p.r() {
        return Err(Error::Degenerate {
            point: p.as_array(),
            reason: "needs t > r > 0",
        });
    }
    Ok(())
}

/// Max-norm of `Σ_a Ω_{0a}^μ Ω_{0a}^ν − t² Π^{μν} − τ² N̄^μ N̄^ν`, with `Π`
/// the projection onto the sphere through `p`.
pub fn boost_identity_check(p: &Point4) -> Result<f64> {
    require_interior(p)?;
    let [_, _, e1, e2] = null_frame(p)?;
    let nb = tetrad_at(p, TetradKind::HyperbRadial)?.legs[1];
    let o = optical_coords(p);
    let om: Vec<Vec4> = (1..4).map(|a| GeneratorId::Boost(a).at(p)).collect();
    let mut res = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            let lhs: f64 = om.iter().map(|v| v[mu] * v[nu]).sum();
            let pi = e1[mu] * e1[nu] + e2[mu] * e2[nu];
            let rhs = p.t * p.t * pi + o.tau_plus * o.tau_minus * nb[mu] * nb[nu];
            res = res.max((lhs - rhs).abs());
        }
    }
    Ok(res)
}

/// Named residuals of the vector relations between the Cartesian, null and
/// hyperboloidal frames, each tested on `w` through `m(w, ·)`, plus the
/// reconstruction of `w` from its hyperboloidal-radial frame components.
/// Residuals are relative to `|w|` (Euclidean).
pub fn vector_decomposition_checks(p: &Point4, w: &Vec4) -> Result<Vec<(&'static str, f64)>> {
    require_interior(p)?;
    let o = optical_coords(p);
    let (t, r) = (p.t, p.r());
    let tau = (o.tau_plus * o.tau_minus).sqrt();
    let [l, lb, e1, e2] = null_frame(p)?;
    let legs = tetrad_at(p, TetradKind::HyperbRadial)?.legs;
    let (tb, nb) = (legs[0], legs[1]);
    let t0: Vec4 = [1.0, 0.0, 0.0, 0.0];
    let n: Vec4 = [0.0, p.x[0] / r, p.x[1] / r, p.x[2] / r];
    let relations: [(&'static str, Vec4, Vec4); 6] = [
        ("tbar-from-t0-n", lincomb(&[(tau, &tb)]), lincomb(&[(t, &t0), (r, &n)])),
        ("nbar-from-t0-n", lincomb(&[(tau, &nb)]), lincomb(&[(r, &t0), (t, &n)])),
        ("tbar-from-null", lincomb(&[(2.0 * tau, &tb)]), lincomb(&[(o.tau_plus, &l), (o.tau_minus, &lb)])),
        ("nbar-from-null", lincomb(&[(2.0 * tau, &nb)]), lincomb(&[(o.tau_plus, &l), (-o.tau_minus, &lb)])),
        ("t0-from-hyperb", lincomb(&[(tau, &t0)]), lincomb(&[(t, &tb), (-r, &nb)])),
        ("n-from-hyperb", lincomb(&[(tau, &n)]), lincomb(&[(t, &nb), (-r, &tb)])),
    ];
    let scale = w.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut out: Vec<(&'static str, f64)> = relations
        .iter()
        .map(|(id, a, b)| {
            let d: Vec4 = std::array::from_fn(|k| a[k] - b[k]);
            let vec_res = d.iter().fold(0.0f64, |m, v| m.max(v.abs())) / tau.max(1.0);
            (*id, vec_res.max(mdot(w, &d).abs() / (scale * tau.max(1.0))))
        })
        .collect();
    let rebuilt = lincomb(&[(-mdot(w, &tb), &tb), (mdot(w, &nb), &nb), (mdot(w, &e1), &e1), (mdot(w, &e2), &e2)]);
    let rec = (0..4).fold(0.0f64, |m, k| m.max((rebuilt[k] - w[k]).abs())) / scale;
    out.push(("frame-reconstruction", rec));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn boost_identity_example() {
        let p = Point4::polar(5.0, 3.0, [0.0, 0.6, 0.8]);
        assert!(boost_identity_check(&p).unwrap() <= 1e-12);
    }

    #[test]
    fn origin_and_exterior_are_degenerate() {
        assert!(boost_identity_check(&Point4::new(3.0, [0.0; 3])).is_err());
        assert!(boost_identity_check(&Point4::new(1.0, [2.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn random_points_and_vectors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let t = rng.random_range(1.0..10.0);
            let r = rng.random_range(0.01..0.99) * t;
            let z: f64 = rng.random_range(-1.0..1.0);
            let ph = rng.random_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            let p = Point4::polar(t, r, [s * ph.cos(), s * ph.sin(), z]);
            let b = boost_identity_check(&p).unwrap();
            assert!(b <= 1e-12, "{b:e} at {p:?}");
            let w: Vec4 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            for (id, v) in vector_decomposition_checks(&p, &w).unwrap() {
                assert!(v <= 1e-12, "{id} {v:e}");
            }
        }
    }

    #[test]
    fn t0_and_l_decompose_exactly() {
        let p = Point4::polar(4.0, 1.5, [1.0, 0.0, 0.0]);
        for w in [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]] {
            assert!(vector_decomposition_checks(&p, &w).unwrap().iter().all(|(_, v)| *v < 1e-14));
        }
    }
}
