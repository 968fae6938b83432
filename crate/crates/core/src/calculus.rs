//! A small algebra of differentiable fields.
//!
//! Every differential identity in the crate is written once against the
//! [`Calculus`] trait and then evaluated two ways: with [`JetCalc`] (Taylor
//! jets at a point, exact derivatives) and with the grid calculus in
//! [`crate::grid`] (stencil derivatives in space, exact Taylor levels in time).

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::jet::{Jet, JetSpace};

/// Minkowski metric diagonal, signature (−,+,+,+).
pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

pub const I: C64 = C64::new(0.0, 1.0);

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub trait Calculus {
    type F: Clone;

    fn constant(&self, c: C64) -> Self::F;
    /// The coordinate function `x^mu` (`x^0 = t`).
    fn coord(&self, mu: usize) -> Self::F;
    fn add(&self, a: &Self::F, b: &Self::F) -> Self::F;
    fn sub(&self, a: &Self::F, b: &Self::F) -> Self::F;
    fn mul(&self, a: &Self::F, b: &Self::F) -> Self::F;
    fn scale(&self, a: &Self::F, s: C64) -> Self::F;
    fn conj(&self, a: &Self::F) -> Self::F;
    fn deriv(&self, a: &Self::F, mu: usize) -> Self::F;
    fn exp(&self, a: &Self::F) -> Self::F;

    /// `f · (c0 + lin·x)`.
    fn affine_mul(&self, f: &Self::F, c0: f64, lin: [f64; 4]) -> Self::F {
        let mut w = self.constant(re(c0));
        for (mu, &l) in lin.iter().enumerate() {
            if l != 0.0 {
                w = self.add(&w, &self.scale(&self.coord(mu), re(l)));
            }
        }
        self.mul(f, &w)
    }

    fn zero(&self) -> Self::F {
        self.constant(re(0.0))
    }

    fn neg(&self, a: &Self::F) -> Self::F {
        self.scale(a, re(-1.0))
    }

    fn re_part(&self, a: &Self::F) -> Self::F {
        self.scale(&self.add(a, &self.conj(a)), re(0.5))
    }

    fn im_part(&self, a: &Self::F) -> Self::F {
        self.scale(&self.sub(a, &self.conj(a)), C64::new(0.0, -0.5))
    }

    fn abs2(&self, a: &Self::F) -> Self::F {
        self.mul(a, &self.conj(a))
    }

    fn sum(&self, terms: &[Self::F]) -> Self::F {
        let mut it = terms.iter();
        match it.next() {
            None => self.zero(),
            Some(first) => it.fold(first.clone(), |acc, t| self.add(&acc, t)),
        }
    }
}

/// Jet evaluation at a fixed base point.
#[derive(Clone, Debug)]
pub struct JetCalc {
    space: Arc<JetSpace>,
    base: [f64; 4],
}

impl JetCalc {
    pub fn new(order: usize, base: [f64; 4]) -> Self {
        JetCalc {
            space: JetSpace::spacetime(order),
            base,
        }
    }

    pub fn with_space(space: Arc<JetSpace>, base: [f64; 4]) -> Self {
        JetCalc { space, base }
    }

    pub fn base(&self) -> [f64; 4] {
        self.base
    }
}

impl Calculus for JetCalc {
    type F = Jet;

    fn constant(&self, c: C64) -> Jet {
        Jet::constant(&self.space, c)
    }
    fn coord(&self, mu: usize) -> Jet {
        Jet::variable(&self.space, mu, self.base[mu])
    }
    fn add(&self, a: &Jet, b: &Jet) -> Jet {
        a.add(b)
    }
    fn sub(&self, a: &Jet, b: &Jet) -> Jet {
        a.sub(b)
    }
    fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        a.mul(b)
    }
    fn scale(&self, a: &Jet, s: C64) -> Jet {
        a.scale(s)
    }
    fn conj(&self, a: &Jet) -> Jet {
        a.conj()
    }
    fn deriv(&self, a: &Jet, mu: usize) -> Jet {
        a.deriv(mu)
    }
    fn exp(&self, a: &Jet) -> Jet {
        a.exp()
    }
}

/// A vector field with affine components `Z^mu(x) = c[mu] + Σ_nu lin[mu][nu] x^nu`.
/// Every Poincaré generator and the scaling field are of this form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineField {
    pub c: [f64; 4],
    pub lin: [[f64; 4]; 4],
}

impl AffineField {
    pub const ZERO: AffineField = AffineField {
        c: [0.0; 4],
        lin: [[0.0; 4]; 4],
    };

    pub fn at(&self, x: [f64; 4]) -> [f64; 4] {
        let mut v = self.c;
        for (mu, vm) in v.iter_mut().enumerate() {
            for (nu, &xn) in x.iter().enumerate() {
                *vm += self.lin[mu][nu] * xn;
            }
        }
        v
    }

    /// `∂_nu Z^mu`, constant in spacetime.
    pub fn jacobian(&self) -> [[f64; 4]; 4] {
        self.lin
    }

    /// Lie bracket `[X, Y]^mu = X(Y^mu) − Y(X^mu)`.
    pub fn bracket(&self, y: &AffineField) -> AffineField {
        let x = self;
        let mut out = AffineField::ZERO;
        for mu in 0..4 {
            for nu in 0..4 {
                out.c[mu] += x.c[nu] * y.lin[mu][nu] - y.c[nu] * x.lin[mu][nu];
                for a in 0..4 {
                    out.lin[mu][a] += x.lin[nu][a] * y.lin[mu][nu] - y.lin[nu][a] * x.lin[mu][nu];
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> AffineField {
        AffineField {
            c: self.c.map(|v| v * s),
            lin: self.lin.map(|r| r.map(|v| v * s)),
        }
    }

    /// Divergence `∂_mu Z^mu`.
    pub fn divergence(&self) -> f64 {
        (0..4).map(|m| self.lin[m][m]).sum()
    }

    /// The directional derivative `Z(f) = Z^mu ∂_mu f`.
    pub fn apply<C: Calculus>(&self, c: &C, f: &C::F) -> C::F {
        self.contract(c, |mu| c.deriv(f, mu))
    }

    /// `Z^mu v_mu` for a covector given by its components.
    pub fn contract<C: Calculus>(&self, c: &C, mut v: impl FnMut(usize) -> C::F) -> C::F {
        let mut acc: Option<C::F> = None;
        for mu in 0..4 {
            if self.c[mu] == 0.0 && self.lin[mu].iter().all(|&l| l == 0.0) {
                continue;
            }
            let term = c.affine_mul(&v(mu), self.c[mu], self.lin[mu]);
            acc = Some(match acc {
                None => term,
                Some(a) => c.add(&a, &term),
            });
        }
        acc.unwrap_or_else(|| c.zero())
    }
}

/// Component index pairs of a 2-form, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Storage slot and sign of `G_{mu nu}`; `None` on the diagonal.
pub fn pair_slot(mu: usize, nu: usize) -> Option<(usize, f64)> {
    if mu == nu {
        return None;
    }
    let (a, b, s) = if mu < nu { (mu, nu, 1.0) } else { (nu, mu, -1.0) };
    PAIRS.iter().position(|&p| p == (a, b)).map(|i| (i, s))
}

/// A 2-form with lower indices, stored as its six independent components.
#[derive(Clone, Debug)]
pub struct Form2<F> {
    pub comp: [F; 6],
}

impl<F: Clone> Form2<F> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> F) -> Self {
        Form2 {
            comp: PAIRS.map(|(a, b)| f(a, b)),
        }
    }

    pub fn get<C: Calculus<F = F>>(&self, c: &C, mu: usize, nu: usize) -> F {
        match pair_slot(mu, nu) {
            None => c.zero(),
            Some((i, s)) if s > 0.0 => self.comp[i].clone(),
            Some((i, _)) => c.neg(&self.comp[i]),
        }
    }

    pub fn map<G: Clone>(&self, f: impl FnMut(&F) -> G) -> Form2<G> {
        Form2 {
            comp: self.comp.each_ref().map(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_of_rotation_and_translation() {
        // Z = x^1 ∂_2 − x^2 ∂_1, [∂_1, Z] = ∂_2.
        let mut rot = AffineField::ZERO;
        rot.lin[2][1] = 1.0;
        rot.lin[1][2] = -1.0;
        let mut d1 = AffineField::ZERO;
        d1.c[1] = 1.0;
        let b = d1.bracket(&rot);
        assert_eq!(b.c, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(b.lin, [[0.0; 4]; 4]);
    }

    #[test]
    fn apply_matches_jets() {
        let jc = JetCalc::new(3, [0.5, 0.1, -0.2, 0.3]);
        let mut z = AffineField::ZERO;
        z.c = [1.0, 0.0, 0.5, 0.0];
        z.lin[1][0] = 2.0;
        let x1 = jc.coord(1);
        let f = jc.mul(&x1, &jc.coord(0));
        // Z(f) = 1·x1 + (2t)·t at (t, x1) = (0.5, 0.1)
        let v = z.apply(&jc, &f).value();
        assert!((v - re(0.1 + 2.0 * 0.25)).norm() < 1e-14);
    }

    #[test]
    fn pair_slots_are_antisymmetric() {
        for mu in 0..4 {
            assert!(pair_slot(mu, mu).is_none());
            for nu in 0..4 {
                if mu != nu {
                    let (i, s) = pair_slot(mu, nu).unwrap();
                    let (j, t) = pair_slot(nu, mu).unwrap();
                    assert_eq!(i, j);
                    assert_eq!(s, -t);
                }
            }
        }
    }
}
