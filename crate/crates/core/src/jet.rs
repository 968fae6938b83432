//! Truncated multivariate Taylor jets in the spacetime coordinates.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α` of a complex function
//! around a base point, `f(x0 + h) = Σ c_α h^α` for `|α| ≤ K`. Derivatives
//! of closed-form fields come out exact up to rounding, which is what the
//! analytic identity checks rely on.
//!
//! Each jet tracks how many orders are trustworthy: differentiation loses
//! one order, products and sums keep the minimum.

use std::sync::Arc;

use num_complex::Complex64 as C64;

/// Index tables shared by all jets of one order and variable set.
#[derive(Debug)]
pub struct JetSpace {
    order: usize,
    active: [bool; 4],
    exps: Vec<[u8; 4]>,
    lookup: Vec<u32>,
    products: Vec<(u32, u32, u32)>,
    derivs: [Vec<(u32, u32, f64)>; 4],
}

const NONE: u32 = u32::MAX;

impl JetSpace {
    /// Jets of total order `order` in the variables flagged by `active`.
    pub fn new(order: usize, active: [bool; 4]) -> Arc<Self> {
        let k = order;
        let side = k + 1;
        let mut exps = Vec::new();
        for deg in 0..=k {
            for a0 in 0..=deg {
                for a1 in 0..=deg - a0 {
                    for a2 in 0..=deg - a0 - a1 {
                        let a3 = deg - a0 - a1 - a2;
                        let e = [a0, a1, a2, a3];
                        if (0..4).all(|m| active[m] || e[m] == 0) {
                            exps.push([a0 as u8, a1 as u8, a2 as u8, a3 as u8]);
                        }
                    }
                }
            }
        }
        let flat = |e: [usize; 4]| ((e[0] * side + e[1]) * side + e[2]) * side + e[3];
        let mut lookup = vec![NONE; side.pow(4)];
        for (i, e) in exps.iter().enumerate() {
            lookup[flat(e.map(usize::from))] = i as u32;
        }
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                let s = [0, 1, 2, 3].map(|m| a[m] as usize + b[m] as usize);
                if s.iter().sum::<usize>() <= k {
                    products.push((i as u32, j as u32, lookup[flat(s)]));
                }
            }
        }
        let derivs = [0, 1, 2, 3].map(|mu| {
            let mut d = Vec::new();
            if active[mu] {
                for (dst, e) in exps.iter().enumerate() {
                    let mut s = e.map(usize::from);
                    s[mu] += 1;
                    if s.iter().sum::<usize>() <= k {
                        d.push((dst as u32, lookup[flat(s)], s[mu] as f64));
                    }
                }
            }
            d
        });
        Arc::new(JetSpace {
            order,
            active,
            exps,
            lookup,
            products,
            derivs,
        })
    }

    /// Jets in all four spacetime variables.
    pub fn spacetime(order: usize) -> Arc<Self> {
        Self::new(order, [true; 4])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[[u8; 4]] {
        &self.exps
    }

    fn index_of(&self, e: [usize; 4]) -> Option<usize> {
        let side = self.order + 1;
        if e.iter().sum::<usize>() > self.order {
            return None;
        }
        let i = self.lookup[((e[0] * side + e[1]) * side + e[2]) * side + e[3]];
        (i != NONE).then_some(i as usize)
    }
}

#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    c: Vec<C64>,
    valid: i32,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, v: C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); space.len()];
        c[0] = v;
        Jet {
            valid: space.order as i32,
            space: space.clone(),
            c,
        }
    }

    /// The coordinate function `x^mu` expanded around a point where it equals `at`.
    pub fn variable(space: &Arc<JetSpace>, mu: usize, at: f64) -> Self {
        assert!(space.active[mu], "variable {mu} is not active in this jet space");
        let mut j = Jet::constant(space, C64::new(at, 0.0));
        let mut e = [0; 4];
        e[mu] = 1;
        if let Some(i) = space.index_of(e) {
            j.c[i] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, c: Vec<C64>) -> Self {
        assert_eq!(c.len(), space.len());
        Jet {
            valid: space.order as i32,
            space: space.clone(),
            c,
        }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    /// Number of trustworthy orders; negative once more derivatives were
    /// taken than the jet carries.
    pub fn valid_order(&self) -> i32 {
        self.valid
    }

    pub fn value(&self) -> C64 {
        debug_assert!(self.valid >= 0, "jet differentiated beyond its order");
        self.c[0]
    }

    /// Partial derivative `∂^α f` at the base point.
    pub fn partial(&self, alpha: [usize; 4]) -> C64 {
        let n: usize = alpha.iter().sum();
        debug_assert!(n as i32 <= self.valid);
        match self.space.index_of(alpha) {
            Some(i) => {
                let fact: f64 = alpha.iter().map(|&a| factorial(a)).product();
                self.c[i] * fact
            }
            None => C64::new(0.0, 0.0),
        }
    }

    fn zip(&self, o: &Jet, f: impl Fn(C64, C64) -> C64) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &o.space));
        Jet {
            space: self.space.clone(),
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| f(a, b)).collect(),
            valid: self.valid.min(o.valid),
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|&a| a * s).collect(),
            valid: self.valid,
        }
    }

    pub fn add_const(&self, s: C64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn conj(&self) -> Jet {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|a| a.conj()).collect(),
            valid: self.valid,
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &o.space));
        let mut c = vec![C64::new(0.0, 0.0); self.c.len()];
        for &(i, j, k) in &self.space.products {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet {
            space: self.space.clone(),
            c,
            valid: self.valid.min(o.valid),
        }
    }

    pub fn deriv(&self, mu: usize) -> Jet {
        assert!(self.space.active[mu], "derivative along inactive variable {mu}");
        let mut c = vec![C64::new(0.0, 0.0); self.c.len()];
        for &(dst, src, f) in &self.space.derivs[mu] {
            c[dst as usize] = self.c[src as usize] * f;
        }
        Jet {
            space: self.space.clone(),
            c,
            valid: self.valid - 1,
        }
    }

    /// `Σ_n g[n] (f − f(x0))^n` by Horner's rule.
    fn compose(&self, g: &[C64]) -> Jet {
        let mut h = self.clone();
        h.c[0] = C64::new(0.0, 0.0);
        let mut acc = Jet::constant(&self.space, g[g.len() - 1]);
        acc.valid = self.valid;
        for &gn in g[..g.len() - 1].iter().rev() {
            acc = acc.mul(&h).add_const(gn);
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let e0 = self.c[0].exp();
        let g: Vec<C64> = (0..=self.space.order)
            .map(|n| e0 / factorial(n))
            .collect();
        self.compose(&g)
    }

    /// `f^a` on the principal branch; needs `f(x0) ≠ 0`.
    pub fn powf(&self, a: f64) -> Jet {
        let c0 = self.c[0];
        let mut g = Vec::with_capacity(self.space.order + 1);
        let mut binom = 1.0;
        for n in 0..=self.space.order {
            g.push(c0.powf(a - n as f64) * binom);
            binom *= (a - n as f64) / (n as f64 + 1.0);
        }
        self.compose(&g)
    }

    pub fn recip(&self) -> Jet {
        let c0 = self.c[0];
        let g: Vec<C64> = (0..=self.space.order)
            .map(|n| {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                s / c0.powi(n as i32 + 1)
            })
            .collect();
        self.compose(&g)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn ln(&self) -> Jet {
        let c0 = self.c[0];
        let g: Vec<C64> = (0..=self.space.order)
            .map(|n| {
                if n == 0 {
                    c0.ln()
                } else {
                    let s = if n % 2 == 1 { 1.0 } else { -1.0 };
                    s / (n as f64 * c0.powi(n as i32))
                }
            })
            .collect();
        self.compose(&g)
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn table_sizes() {
        let s = JetSpace::spacetime(4);
        assert_eq!(s.len(), 70);
        let t = JetSpace::new(5, [true, false, false, false]);
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        let s = JetSpace::spacetime(4);
        let x = Jet::variable(&s, 1, 0.7);
        let y = Jet::variable(&s, 2, -1.3);
        // f = x^3 y^2
        let f = x.mul(&x).mul(&x).mul(&y).mul(&y);
        let fxy = f.partial([0, 1, 1, 0]);
        assert!((fxy - c(6.0 * 0.49 * -1.3)).norm() < 1e-13);
        let fxxyy = f.deriv(1).deriv(1).deriv(2).deriv(2).value();
        assert!((fxxyy - c(6.0 * 0.7 * 2.0)).norm() < 1e-13);
    }

    #[test]
    fn elementary_functions() {
        let s = JetSpace::spacetime(5);
        let x = Jet::variable(&s, 0, 0.3);
        let e = x.exp();
        for n in 0..=5 {
            let d = e.partial([n, 0, 0, 0]);
            assert!((d - c(0.3f64.exp())).norm() < 1e-13);
        }
        let r = x.add_const(c(1.0)).recip();
        // d^3/dx^3 1/(1+x) = -6/(1+x)^4
        let want = -6.0 / 1.3f64.powi(4);
        assert!((r.partial([3, 0, 0, 0]) - c(want)).norm() < 1e-12);
        let q = x.sqrt().mul(&x.sqrt()).sub(&x);
        assert!(q.coeffs().iter().all(|v| v.norm() < 1e-13));
        let l = x.ln().exp().sub(&x);
        assert!(l.coeffs().iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn valid_order_tracking() {
        let s = JetSpace::spacetime(2);
        let x = Jet::variable(&s, 3, 1.0);
        let d = x.deriv(3).deriv(3);
        assert_eq!(d.valid_order(), 0);
        assert_eq!(d.mul(&x).valid_order(), 0);
    }

    #[test]
    fn complex_exponential_is_periodic_wave() {
        let s = JetSpace::spacetime(3);
        let x = Jet::variable(&s, 1, 0.4);
        let k = 1.7;
        let w = x.scale(C64::new(0.0, k)).exp();
        let d = w.deriv(1).deriv(1).deriv(1).value();
        let want = C64::new(0.0, k).powi(3) * C64::new(0.0, k * 0.4).exp();
        assert!((d - want).norm() < 1e-12);
    }
}
