//! Smooth manufactured `(φ, A)` pairs that evaluate under any calculus.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{re, Calculus, I};
use crate::fields::ops::Potential;

pub trait FieldRecipe {
    fn phi<C: Calculus>(&self, c: &C) -> C::F;
    fn potential<C: Calculus>(&self, c: &C) -> Potential<C::F>;
}

/// Random cubic `φ` and quadratic real `A_mu` around a centre point.
#[derive(Clone, Debug)]
pub struct PolyFields {
    pub centre: [f64; 4],
    phi: Vec<([usize; 4], C64)>,
    a: [Vec<([usize; 4], f64)>; 4],
}

fn monomials(max_deg: usize) -> Vec<[usize; 4]> {
    let mut v = Vec::new();
    for a in 0..=max_deg {
        for b in 0..=max_deg - a {
            for c in 0..=max_deg - a - b {
                for d in 0..=max_deg - a - b - c {
                    v.push([a, b, c, d]);
                }
            }
        }
    }
    v
}

impl PolyFields {
    pub fn random(seed: u64, centre: [f64; 4]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = monomials(3)
            .into_iter()
            .map(|m| (m, C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))))
            .collect();
        let a = std::array::from_fn(|_| {
            monomials(2)
                .into_iter()
                .map(|m| (m, rng.random_range(-0.5..0.5)))
                .collect()
        });
        PolyFields { centre, phi, a }
    }

    fn eval<C: Calculus>(&self, c: &C, terms: &[([usize; 4], C64)]) -> C::F {
        let shifted: [C::F; 4] = std::array::from_fn(|mu| c.sub(&c.coord(mu), &c.constant(re(self.centre[mu]))));
        let parts: Vec<C::F> = terms
            .iter()
            .map(|(m, coef)| {
                let mut f = c.constant(*coef);
                for (mu, &p) in m.iter().enumerate() {
                    for _ in 0..p {
                        f = c.mul(&f, &shifted[mu]);
                    }
                }
                f
            })
            .collect();
        c.sum(&parts)
    }
}

impl FieldRecipe for PolyFields {
    fn phi<C: Calculus>(&self, c: &C) -> C::F {
        self.eval(c, &self.phi)
    }

    fn potential<C: Calculus>(&self, c: &C) -> Potential<C::F> {
        std::array::from_fn(|mu| {
            let t: Vec<_> = self.a[mu].iter().map(|(m, v)| (*m, re(*v))).collect();
            self.eval(c, &t)
        })
    }
}

/// Modulated Gaussians: `φ = a exp(−|x−c|²/2w² + i k·x + (s + iω)(t − t1))`,
/// `A_mu = b_mu exp(−|x−c_mu|²/2w² − (t − t1)²/2w²)`.
#[derive(Clone, Debug)]
pub struct GaussFields {
    pub width: f64,
    pub t1: f64,
    amp: C64,
    centre: [f64; 3],
    k: [f64; 3],
    growth: C64,
    a_amp: [f64; 4],
    a_centre: [[f64; 3]; 4],
}

impl GaussFields {
    pub fn random(seed: u64, width: f64, t1: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v3 = |s: f64| -> [f64; 3] { std::array::from_fn(|_| rng.random_range(-s..s)) };
        let centre = v3(0.3 * width);
        let k = v3(1.0 / width);
        let a_centre = std::array::from_fn(|_| v3(0.3 * width));
        GaussFields {
            width,
            t1,
            amp: C64::new(rng.random_range(0.5..1.0), rng.random_range(-0.5..0.5)),
            centre,
            k,
            growth: C64::new(rng.random_range(-0.2..0.2), rng.random_range(-1.0..1.0)),
            a_amp: std::array::from_fn(|_| rng.random_range(-0.8..0.8)),
            a_centre,
        }
    }

    fn radial_arg<C: Calculus>(&self, c: &C, centre: &[f64; 3]) -> C::F {
        let s = -0.5 / (self.width * self.width);
        let parts: Vec<C::F> = (0..3)
            .map(|i| {
                let d = c.sub(&c.coord(i + 1), &c.constant(re(centre[i])));
                c.scale(&c.mul(&d, &d), re(s))
            })
            .collect();
        c.sum(&parts)
    }
}

impl FieldRecipe for GaussFields {
    fn phi<C: Calculus>(&self, c: &C) -> C::F {
        let dt = c.sub(&c.coord(0), &c.constant(re(self.t1)));
        let mut parts = vec![self.radial_arg(c, &self.centre), c.scale(&dt, self.growth)];
        for i in 0..3 {
            parts.push(c.scale(&c.coord(i + 1), I * self.k[i]));
        }
        c.scale(&c.exp(&c.sum(&parts)), self.amp)
    }

    fn potential<C: Calculus>(&self, c: &C) -> Potential<C::F> {
        std::array::from_fn(|mu| {
            let dt = c.sub(&c.coord(0), &c.constant(re(self.t1)));
            let s = -0.5 / (self.width * self.width);
            let arg = c.add(&self.radial_arg(c, &self.a_centre[mu]), &c.scale(&c.mul(&dt, &dt), re(s)));
            c.scale(&c.exp(&arg), re(self.a_amp[mu]))
        })
    }
}
