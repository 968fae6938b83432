//! Grid evaluation of the field algebra.
//!
//! A [`GField`] is a truncated Taylor series in `s = t − t_ref` whose
//! coefficients are grid arrays. Time derivatives shift coefficients
//! exactly; spatial derivatives use the fourth-order stencils of
//! [`crate::grid`]. Constant levels are kept symbolic, so coordinate and
//! constant factors never allocate.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::calculus::{re, Calculus};
use crate::exec::Exec;
use crate::grid::{self, GridSpec};

#[derive(Clone, Debug)]
pub enum Level {
    Zero,
    Const(C64),
    Array(Arc<Vec<C64>>),
}

impl Level {
    fn get(&self, i: usize) -> C64 {
        match self {
            Level::Zero => C64::new(0.0, 0.0),
            Level::Const(c) => *c,
            Level::Array(a) => a[i],
        }
    }
}

/// Time-Taylor levels `0..=valid`; the level count shrinks under `∂_t`.
#[derive(Clone, Debug)]
pub struct GField {
    pub levels: Vec<Level>,
}

impl GField {
    pub fn valid_order(&self) -> i32 {
        self.levels.len() as i32 - 1
    }

    /// Level-0 values (the field at `t_ref`) as an array.
    pub fn values(&self, g: &GridSpec) -> Vec<C64> {
        match self.levels.first() {
            None => panic!("grid field differentiated beyond its time order"),
            Some(Level::Array(a)) => a.as_ref().clone(),
            Some(l) => vec![l.get(0); g.len()],
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridCalc {
    pub grid: GridSpec,
    pub t_ref: f64,
    pub order: usize,
    pub exec: Exec,
}

impl GridCalc {
    pub fn new(grid: GridSpec, t_ref: f64, order: usize, exec: Exec) -> Self {
        GridCalc {
            grid,
            t_ref,
            order,
            exec,
        }
    }

    /// A time-independent field from level-0 values.
    pub fn from_values(&self, v: Vec<C64>) -> GField {
        let mut levels = vec![Level::Array(Arc::new(v))];
        levels.resize(self.order + 1, Level::Zero);
        GField { levels }
    }

    /// A field from explicit Taylor levels.
    pub fn from_levels(&self, levels: Vec<Vec<C64>>) -> GField {
        GField {
            levels: levels.into_iter().map(|v| Level::Array(Arc::new(v))).collect(),
        }
    }

    fn zip(&self, a: &Level, b: &Level, f: impl Fn(C64, C64) -> C64 + Sync + Send) -> Level {
        match (a, b) {
            (Level::Array(_), _) | (_, Level::Array(_)) => {
                let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
                self.exec.fill(&mut out, |i| f(a.get(i), b.get(i)));
                Level::Array(Arc::new(out))
            }
            _ => Level::Const(f(a.get(0), b.get(0))),
        }
    }

    fn level_add(&self, a: &Level, b: &Level) -> Level {
        match (a, b) {
            (Level::Zero, x) | (x, Level::Zero) => x.clone(),
            _ => self.zip(a, b, |x, y| x + y),
        }
    }

    fn level_mul(&self, a: &Level, b: &Level) -> Level {
        match (a, b) {
            (Level::Zero, _) | (_, Level::Zero) => Level::Zero,
            _ => self.zip(a, b, |x, y| x * y),
        }
    }

    fn level_map(&self, a: &Level, f: impl Fn(C64) -> C64 + Sync + Send) -> Level {
        match a {
            Level::Zero => {
                let z = f(C64::new(0.0, 0.0));
                if z == C64::new(0.0, 0.0) {
                    Level::Zero
                } else {
                    Level::Const(z)
                }
            }
            Level::Const(c) => Level::Const(f(*c)),
            Level::Array(v) => {
                let mut out = vec![C64::new(0.0, 0.0); v.len()];
                self.exec.fill(&mut out, |i| f(v[i]));
                Level::Array(Arc::new(out))
            }
        }
    }

    fn zip_fields(&self, a: &GField, b: &GField, f: impl Fn(&Level, &Level) -> Level) -> GField {
        let n = a.levels.len().min(b.levels.len());
        GField {
            levels: (0..n).map(|k| f(&a.levels[k], &b.levels[k])).collect(),
        }
    }
}

impl Calculus for GridCalc {
    type F = GField;

    fn constant(&self, c: C64) -> GField {
        let mut levels = vec![Level::Const(c)];
        levels.resize(self.order + 1, Level::Zero);
        GField { levels }
    }

    fn coord(&self, mu: usize) -> GField {
        let mut levels = Vec::with_capacity(self.order + 1);
        if mu == 0 {
            levels.push(Level::Const(re(self.t_ref)));
            if self.order > 0 {
                levels.push(Level::Const(re(1.0)));
            }
        } else {
            let g = self.grid;
            let v = grid::sample(&g, self.exec, |x| re(x[mu - 1]));
            levels.push(Level::Array(Arc::new(v)));
        }
        levels.resize(self.order + 1, Level::Zero);
        GField { levels }
    }

    fn add(&self, a: &GField, b: &GField) -> GField {
        self.zip_fields(a, b, |x, y| self.level_add(x, y))
    }

    fn sub(&self, a: &GField, b: &GField) -> GField {
        self.zip_fields(a, b, |x, y| match (x, y) {
            (_, Level::Zero) => x.clone(),
            _ => self.zip(x, y, |p, q| p - q),
        })
    }

    fn mul(&self, a: &GField, b: &GField) -> GField {
        let n = a.levels.len().min(b.levels.len());
        let levels = (0..n)
            .map(|k| {
                let mut acc = Level::Zero;
                for j in 0..=k {
                    let p = self.level_mul(&a.levels[j], &b.levels[k - j]);
                    acc = self.level_add(&acc, &p);
                }
                acc
            })
            .collect();
        GField { levels }
    }

    fn scale(&self, a: &GField, s: C64) -> GField {
        GField {
            levels: a.levels.iter().map(|l| self.level_map(l, |x| x * s)).collect(),
        }
    }

    fn conj(&self, a: &GField) -> GField {
        GField {
            levels: a.levels.iter().map(|l| self.level_map(l, |x| x.conj())).collect(),
        }
    }

    fn deriv(&self, a: &GField, mu: usize) -> GField {
        if mu == 0 {
            let levels = (1..a.levels.len())
                .map(|k| self.level_map(&a.levels[k], |x| x * k as f64))
                .collect();
            return GField { levels };
        }
        let levels = a
            .levels
            .iter()
            .map(|l| match l {
                Level::Array(v) => Level::Array(Arc::new(grid::deriv(&self.grid, v, mu, self.exec))),
                _ => Level::Zero,
            })
            .collect();
        GField { levels }
    }

    fn exp(&self, a: &GField) -> GField {
        let n = a.levels.len();
        if n == 0 {
            return GField { levels: vec![] };
        }
        let mut g = vec![self.level_map(&a.levels[0], |x| x.exp())];
        for m in 1..n {
            let mut acc = Level::Zero;
            for k in 1..=m {
                let kf = self.level_map(&a.levels[k], |x| x * (k as f64 / m as f64));
                acc = self.level_add(&acc, &self.level_mul(&kf, &g[m - k]));
            }
            g.push(acc);
        }
        GField { levels: g }
    }

    fn affine_mul(&self, f: &GField, c0: f64, lin: [f64; 4]) -> GField {
        // w = (c0 + lin0·t_ref + lin·x) + lin0·s
        let w0c = c0 + lin[0] * self.t_ref;
        let spatial = lin[1] != 0.0 || lin[2] != 0.0 || lin[3] != 0.0;
        let g = self.grid;
        let scale0 = |l: &Level| -> Level {
            if !spatial {
                return if w0c == 0.0 { Level::Zero } else { self.level_map(l, |x| x * w0c) };
            }
            match l {
                Level::Zero => Level::Zero,
                _ => {
                    let mut out = vec![C64::new(0.0, 0.0); g.len()];
                    self.exec.fill(&mut out, |i| {
                        let x = g.position(i);
                        let w = w0c + lin[1] * x[0] + lin[2] * x[1] + lin[3] * x[2];
                        l.get(i) * w
                    });
                    Level::Array(Arc::new(out))
                }
            }
        };
        let levels = (0..f.levels.len())
            .map(|k| {
                let a = scale0(&f.levels[k]);
                if k > 0 && lin[0] != 0.0 {
                    let b = self.level_map(&f.levels[k - 1], |x| x * lin[0]);
                    self.level_add(&a, &b)
                } else {
                    a
                }
            })
            .collect();
        GField { levels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::JetCalc;

    /// A smooth spacetime test function built from the calculus primitives.
    fn bump<C: Calculus>(c: &C) -> C::F {
        let t = c.coord(0);
        let x = c.coord(1);
        let y = c.coord(2);
        let arg = c.add(
            &c.scale(&c.mul(&x, &x), re(-0.5)),
            &c.add(&c.scale(&c.mul(&t, &y), C64::new(0.3, 0.2)), &c.scale(&t, re(0.1))),
        );
        c.exp(&arg)
    }

    #[test]
    fn time_levels_match_jets() {
        let g = GridSpec::periodic(8, 0.4);
        let gc = GridCalc::new(g, 1.5, 4, Exec::Parallel);
        let f = bump(&gc);
        let ftt = gc.deriv(&gc.deriv(&f, 0), 0).values(&g);
        for idx in [0, 77, 300, 511] {
            let x = g.position(idx);
            let jc = JetCalc::new(4, [1.5, x[0], x[1], x[2]]);
            let want = bump(&jc).partial([2, 0, 0, 0]);
            assert!((ftt[idx] - want).norm() < 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn affine_mul_matches_generic_path() {
        let g = GridSpec::periodic(6, 0.5);
        let gc = GridCalc::new(g, 0.7, 3, Exec::Sequential);
        let f = bump(&gc);
        let lin = [0.5, -1.0, 0.0, 2.0];
        let fast = gc.affine_mul(&f, 0.25, lin);
        let mut w = gc.constant(re(0.25));
        for (mu, &l) in lin.iter().enumerate() {
            w = gc.add(&w, &gc.scale(&gc.coord(mu), re(l)));
        }
        let slow = gc.mul(&f, &w);
        for k in 0..=3 {
            for i in 0..g.len() {
                let d = fast.levels[k].get(i) - slow.levels[k].get(i);
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spatial_derivative_converges() {
        let err = |n: usize| {
            let g = GridSpec::periodic(n, 12.0 / n as f64);
            let gc = GridCalc::new(g, 0.0, 1, Exec::Parallel);
            let d = gc.deriv(&bump(&gc), 1).values(&g);
            let mut m: f64 = 0.0;
            for (idx, v) in d.iter().enumerate() {
                let x = g.position(idx);
                if x[0].abs() < 2.0 {
                    let jc = JetCalc::new(1, [0.0, x[0], x[1], x[2]]);
                    m = m.max((v - bump(&jc).partial([0, 1, 0, 0])).norm());
                }
            }
            m
        };
        assert!((err(24) / err(48)).log2() > 3.7);
    }
}
