//! Uniform cell-centred grids on a centred cube and fourth-order stencils.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Periodic,
    /// One-sided fourth-order closures at the faces.
    Outflow,
}

/// `n³` nodes `x = −L + i·dx`, `L = n·dx/2`, with linear index `(i·n + j)·n + k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub dx: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

/// Stencil half-width.
pub const HALO: usize = 2;

impl GridSpec {
    pub fn new(n: usize, dx: f64, boundary: Boundary) -> Self {
        GridSpec { n, dx, boundary }
    }

    pub fn periodic(n: usize, dx: f64) -> Self {
        Self::new(n, dx, Boundary::Periodic)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.n as f64 * self.dx
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width() + i as f64 * self.dx
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unindex(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        self.unindex(idx).map(|i| self.coord(i))
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dx * self.dx
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 2 * HALO + 1 {
            return Err(Error::HaloUnderflow { n: self.n });
        }
        if !(self.dx > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {}", self.dx)));
        }
        Ok(())
    }

    /// Stride of axis `a ∈ {1, 2, 3}` in the linear index.
    fn stride(&self, axis: usize) -> usize {
        match axis {
            1 => self.n * self.n,
            2 => self.n,
            3 => 1,
            _ => panic!("spatial axis must be 1, 2 or 3, got {axis}"),
        }
    }
}

/// Scalar types the stencils operate on.
pub trait Elem:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}
impl Elem for f64 {}
impl Elem for C64 {}

const ONE_SIDED: [[f64; 5]; 2] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
];

/// `∂_axis src` with the fourth-order centred stencil
/// `(f[i−2] − 8f[i−1] + 8f[i+1] − f[i+2]) / 12dx`.
pub fn deriv<T: Elem>(g: &GridSpec, src: &[T], axis: usize, exec: Exec) -> Vec<T> {
    let mut out = vec![T::default(); src.len()];
    deriv_into(g, src, axis, &mut out, exec);
    out
}

pub fn deriv_into<T: Elem>(g: &GridSpec, src: &[T], axis: usize, out: &mut [T], exec: Exec) {
    assert_eq!(src.len(), g.len());
    let n = g.n;
    let s = g.stride(axis);
    let inv = 1.0 / (12.0 * g.dx);
    let periodic = g.boundary == Boundary::Periodic;
    let n_i = n as isize;
    exec.for_chunks(out, n, |line, row| {
        // `line` enumerates rows along axis 3; recover the start index.
        let base = line * n;
        for (k, o) in row.iter_mut().enumerate() {
            let idx = base + k;
            let pos = ((idx / s) % n) as isize;
            let at = |off: isize| -> T {
                let q = pos + off;
                let q = if periodic { q.rem_euclid(n_i) } else { q };
                src[(idx as isize + (q - pos) * s as isize) as usize]
            };
            *o = if periodic || (pos >= 2 && pos < n_i - 2) {
                (at(-2) - at(2) + (at(1) - at(-1)) * 8.0) * inv
            } else {
                let (row_c, sign, dir) = if pos < 2 {
                    (ONE_SIDED[pos as usize], 1.0, 1)
                } else {
                    (ONE_SIDED[(n_i - 1 - pos) as usize], -1.0, -1)
                };
                let mut acc = T::default();
                for (m, &c) in row_c.iter().enumerate() {
                    let off = (m as isize - if dir > 0 { pos } else { n_i - 1 - pos }) * dir;
                    acc = acc + at(off) * c;
                }
                acc * (sign * inv)
            };
        }
    });
}

/// Composed second difference `∂_axis ∂_axis`, consistent with [`deriv`].
pub fn second_deriv<T: Elem>(g: &GridSpec, src: &[T], axis: usize, exec: Exec) -> Vec<T> {
    let d = deriv(g, src, axis, exec);
    deriv(g, &d, axis, exec)
}

pub fn laplacian<T: Elem>(g: &GridSpec, src: &[T], exec: Exec) -> Vec<T> {
    let mut out = second_deriv(g, src, 1, exec);
    for axis in 2..4 {
        let d = second_deriv(g, src, axis, exec);
        out.iter_mut().zip(&d).for_each(|(o, v)| *o = *o + *v);
    }
    out
}

pub fn divergence(g: &GridSpec, v: [&[f64]; 3], exec: Exec) -> Vec<f64> {
    let mut out = deriv(g, v[0], 1, exec);
    for a in 1..3 {
        let d = deriv(g, v[a], a + 1, exec);
        out.iter_mut().zip(&d).for_each(|(o, x)| *o += x);
    }
    out
}

pub fn curl(g: &GridSpec, v: [&[f64]; 3], exec: Exec) -> [Vec<f64>; 3] {
    let d = |c: usize, axis: usize| deriv(g, v[c], axis, exec);
    let sub = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>();
    [sub(d(2, 2), d(1, 3)), sub(d(0, 3), d(2, 1)), sub(d(1, 1), d(0, 2))]
}

pub fn gradient(g: &GridSpec, f: &[f64], exec: Exec) -> [Vec<f64>; 3] {
    [1, 2, 3].map(|a| deriv(g, f, a, exec))
}

/// Samples a function of position on the grid.
pub fn sample<T: Send>(g: &GridSpec, exec: Exec, f: impl Fn([f64; 3]) -> T + Sync + Send) -> Vec<T> {
    exec.map(g.len(), |idx| f(g.position(idx)))
}

/// Indices of nodes whose distance to every face is at least `margin` nodes.
pub fn interior_mask(g: &GridSpec, margin: usize) -> impl Fn(usize) -> bool + '_ {
    move |idx| {
        let n = g.n;
        g.unindex(idx).iter().all(|&i| i >= margin && i + margin < n)
    }
}

/// `(Σ f² dx³)^{1/2}`.
pub fn l2_norm(g: &GridSpec, f: &[f64], exec: Exec) -> f64 {
    (exec.sum(f.len(), |i| f[i] * f[i]) * g.cell_volume()).sqrt()
}

pub fn max_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(errs: (f64, f64)) -> f64 {
        (errs.0 / errs.1).log2()
    }

    #[test]
    fn periodic_derivative_is_fourth_order() {
        let err = |n: usize| {
            let g = GridSpec::periodic(n, 2.0 * std::f64::consts::PI / n as f64);
            let f = sample(&g, Exec::Sequential, |x| x[1].sin());
            let d = deriv(&g, &f, 2, Exec::Parallel);
            let want = sample(&g, Exec::Sequential, |x| x[1].cos());
            d.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        assert!(order_of((err(16), err(32))) > 3.9);
    }

    #[test]
    fn outflow_closure_is_exact_on_quartics() {
        let g = GridSpec::new(9, 0.25, Boundary::Outflow);
        let f = sample(&g, Exec::Sequential, |x| x[0].powi(4) - 2.0 * x[0]);
        let d = deriv(&g, &f, 1, Exec::Sequential);
        for (idx, v) in d.iter().enumerate() {
            let x = g.position(idx)[0];
            assert!((v - (4.0 * x.powi(3) - 2.0)).abs() < 1e-11, "at x={x}");
        }
    }

    #[test]
    fn axes_are_independent() {
        let g = GridSpec::periodic(8, 0.5);
        let f = sample(&g, Exec::Sequential, |x| x[2]);
        let d1 = deriv(&g, &f, 1, Exec::Sequential);
        assert!(max_norm(&d1) < 1e-14);
        let d3 = deriv(&g, &f, 3, Exec::Sequential);
        let m = interior_mask(&g, 2);
        for (idx, v) in d3.iter().enumerate() {
            if m(idx) || g.unindex(idx)[2] >= 2 && g.unindex(idx)[2] < 6 {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_gradient_has_no_curl() {
        let g = GridSpec::periodic(12, 0.5);
        let phi = sample(&g, Exec::Sequential, |x| (x[0] * 0.5).sin() * (x[1] * 1.3).cos() + x[2].sin());
        let gr = gradient(&g, &phi, Exec::Sequential);
        let c = curl(&g, [&gr[0], &gr[1], &gr[2]], Exec::Sequential);
        for comp in &c {
            assert!(max_norm(comp) < 1e-13);
        }
    }

    #[test]
    fn too_small_grid_is_rejected() {
        assert!(matches!(GridSpec::periodic(4, 1.0).check(), Err(Error::HaloUnderflow { n: 4 })));
    }
}
