//! Charge parts and the divergence-free / curl-free splitting of the
//! electric field.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::algebra::{form_add, form_from_eb, form_scale, TwoForm};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Point4, R, T0};
use crate::grid::{self, Boundary, GridSpec};

/// Coulomb 2-form `q0 r⁻² dt∧dr`, i.e. `E = q0 x / r³`, `B = 0`.
pub fn coulomb_form(q0: f64, p: &Point4) -> TwoForm {
    let r = p.r();
    let s = q0 / (r * r * r);
    form_from_eb(p.x.map(|c| s * c), [0.0; 3])
}

/// Whether `p` lies in the support `{t − t0 + R/2 ≤ r}` of the subtracted
/// Coulomb part.
pub fn in_charge_cutoff(p: &Point4) -> bool {
    p.t - T0 + 0.5 * R <= p.r()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chargeless {
    pub form: TwoForm,
    /// The point lies in `r < R/2`, where the chargeless part is left equal
    /// to the input.
    pub inner_ball: bool,
}

/// `F̌ = F̃ − q0 r⁻² χ_{t − t0 + R/2 ≤ r} dt∧dr` (sharp cutoff).
pub fn chargeless_subtract(g: &TwoForm, q0: f64, p: &Point4) -> Chargeless {
    if p.r() < 0.5 * R {
        return Chargeless { form: *g, inner_ball: true };
    }
    let form = if q0 != 0.0 && in_charge_cutoff(p) {
        form_add(g, &form_scale(&coulomb_form(q0, p), -1.0))
    } else {
        *g
    };
    Chargeless { form, inner_ball: false }
}

/// Three-dimensional FFT on the grid's periodic box.
pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn pass(&self, data: &mut [C64], stride: usize, inverse: bool, exec: Exec) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        // Lines along the axis with the given stride; gather, transform, scatter.
        let lines: Vec<usize> = (0..n * n * n)
            .filter(|&idx| (idx / stride) % n == 0)
            .collect();
        let out = exec.map(lines.len(), |li| {
            let start = lines[li];
            let mut buf: Vec<C64> = (0..n).map(|m| data[start + m * stride]).collect();
            plan.process(&mut buf);
            buf
        });
        for (li, buf) in out.into_iter().enumerate() {
            let start = lines[li];
            for (m, v) in buf.into_iter().enumerate() {
                data[start + m * stride] = v;
            }
        }
    }

    pub fn forward(&self, data: &mut [C64], exec: Exec) {
        let n = self.n;
        for stride in [n * n, n, 1] {
            self.pass(data, stride, false, exec);
        }
    }

    /// Inverse transform including the `1/n³` normalization.
    pub fn inverse(&self, data: &mut [C64], exec: Exec) {
        let n = self.n;
        for stride in [n * n, n, 1] {
            self.pass(data, stride, true, exec);
        }
        let s = 1.0 / (n * n * n) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

/// Symbol of the fourth-order centred first derivative at integer mode `m`:
/// `D e^{ikx} = i k̃ e^{ikx}`, `k̃ = (8 sin kh − sin 2kh) / 6h`.
pub fn stencil_wavenumber(m: usize, n: usize, dx: f64) -> f64 {
    let m = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
    let kh = 2.0 * std::f64::consts::PI * m / n as f64;
    (8.0 * kh.sin() - (2.0 * kh).sin()) / (6.0 * dx)
}

/// Solves `div grad Φ = src` on the periodic grid, where `div` and `grad`
/// are the fourth-order stencils. Components the discrete operator cannot
/// reach get `Φ̂ = 0`; a nonzero mean is rejected.
pub fn solve_poisson(g: &GridSpec, src: &[f64], exec: Exec) -> Result<Vec<f64>> {
    if g.boundary != Boundary::Periodic {
        return Err(Error::Unsupported("spectral Poisson solve on a non-periodic grid".into()));
    }
    let n = g.n;
    let mean = exec.sum(src.len(), |i| src[i]) / src.len() as f64;
    let scale = src.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if mean.abs() > 1e-10 * scale.max(1e-300) && mean.abs() > 1e-14 {
        return Err(Error::NonzeroMean { mean });
    }
    let fft = Fft3::new(n);
    let mut data: Vec<C64> = src.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft.forward(&mut data, exec);
    let kt: Vec<f64> = (0..n).map(|m| stencil_wavenumber(m, n, g.dx)).collect();
    let rhs = data.clone();
    exec.fill(&mut data, |idx| {
        let [i, j, k] = g.unindex(idx);
        let k2 = kt[i] * kt[i] + kt[j] * kt[j] + kt[k] * kt[k];
        if k2 > 1e-12 * (1.0 / (g.dx * g.dx)) {
            -rhs[idx] / k2
        } else {
            C64::default()
        }
    });
    fft.inverse(&mut data, exec);
    Ok(data.into_iter().map(|v| v.re).collect())
}

pub type Vector3 = [Vec<f64>; 3];

/// `E = E^df + E^cf` with `E^cf = ∇Φ`, `ΔΦ = source`.
pub fn hodge_split(g: &GridSpec, e: &Vector3, source: &[f64], exec: Exec) -> Result<(Vector3, Vector3)> {
    let phi = solve_poisson(g, source, exec)?;
    let ecf = grid::gradient(g, &phi, exec);
    let edf = [0, 1, 2].map(|a| e[a].iter().zip(&ecf[a]).map(|(x, y)| x - y).collect());
    Ok((edf, ecf))
}

/// Split against the field's own divergence.
pub fn hodge_split_self(g: &GridSpec, e: &Vector3, exec: Exec) -> Result<(Vector3, Vector3)> {
    let div = grid::divergence(g, [&e[0], &e[1], &e[2]], exec);
    hodge_split(g, e, &div, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{max_norm, sample};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::periodic(16, 0.5)
    }

    #[test]
    fn fft_round_trip() {
        let n = 8;
        let fft = Fft3::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let orig: Vec<C64> = (0..n * n * n).map(|_| C64::new(rng.random(), rng.random())).collect();
        let mut d = orig.clone();
        fft.forward(&mut d, Exec::Parallel);
        fft.inverse(&mut d, Exec::Sequential);
        assert!(d.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    #[test]
    fn poisson_inverts_discrete_laplacian() {
        let g = grid();
        let w = 2.0 * std::f64::consts::PI / (g.n as f64 * g.dx);
        let phi = sample(&g, Exec::Sequential, |x| (w * x[0]).sin() * (2.0 * w * x[1]).cos() + (w * x[2]).cos());
        let lap = grid::laplacian(&g, &phi, Exec::Sequential);
        let back = solve_poisson(&g, &lap, Exec::Parallel).unwrap();
        let err = back.iter().zip(&phi).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12);
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let g = grid();
        let src = vec![1.0; g.len()];
        assert!(matches!(solve_poisson(&g, &src, Exec::Sequential), Err(Error::NonzeroMean { .. })));
    }

    #[test]
    fn random_field_split() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e: Vector3 = [0, 1, 2].map(|_| (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect());
        let (df, cf) = hodge_split_self(&g, &e, Exec::Parallel).unwrap();
        let div = grid::divergence(&g, [&df[0], &df[1], &df[2]], Exec::Sequential);
        assert!(max_norm(&div) < 1e-10);
        let curl = grid::curl(&g, [&cf[0], &cf[1], &cf[2]], Exec::Sequential);
        assert!(curl.iter().all(|c| max_norm(c) < 1e-12));
        let dot: f64 = (0..3).map(|a| df[a].iter().zip(&cf[a]).map(|(x, y)| x * y).sum::<f64>()).sum();
        let norm: f64 = (0..3).map(|a| e[a].iter().map(|x| x * x).sum::<f64>()).sum();
        assert!(dot.abs() < 1e-10 * norm);
        for a in 0..3 {
            for i in 0..g.len() {
                assert!((df[a][i] + cf[a][i] - e[a][i]).abs() < 1e-13);
            }
        }
        // Idempotent: splitting the divergence-free part again leaves it alone.
        let (df2, cf2) = hodge_split_self(&g, &df, Exec::Sequential).unwrap();
        assert!(cf2.iter().all(|c| max_norm(c) < 1e-10));
        assert!((0..3).all(|a| df2[a].iter().zip(&df[a]).all(|(x, y)| (x - y).abs() < 1e-10)));
    }

    #[test]
    fn gradient_and_curl_fields() {
        let g = grid();
        let w = 2.0 * std::f64::consts::PI / (g.n as f64 * g.dx);
        let pot = sample(&g, Exec::Sequential, |x| (w * x[0]).cos() * (w * x[2]).sin());
        let gr = grid::gradient(&g, &pot, Exec::Sequential);
        let (df, _) = hodge_split_self(&g, &gr, Exec::Sequential).unwrap();
        assert!(df.iter().all(|c| max_norm(c) < 1e-11));
        let c = grid::curl(&g, [&gr[1], &pot, &gr[0]], Exec::Sequential);
        let (_, cf) = hodge_split_self(&g, &c, Exec::Sequential).unwrap();
        assert!(cf.iter().all(|v| max_norm(v) < 1e-11));
    }

    #[test]
    fn chargeless_part() {
        let p = Point4::new(2.0, [3.0, 0.0, 0.0]);
        let c = chargeless_subtract(&coulomb_form(0.4, &p), 0.4, &p);
        assert!(!c.inner_ball && c.form.iter().flatten().all(|v| v.abs() < 1e-16));
        let g = coulomb_form(0.4, &p);
        assert_eq!(chargeless_subtract(&g, 0.0, &p).form, g);
        let inside = Point4::new(2.0, [0.2, 0.0, 0.0]);
        assert!(chargeless_subtract(&g, 0.4, &inside).inner_ball);
    }
}
