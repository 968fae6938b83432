//! Weighted Sobolev norms of initial data.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{self, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataNormParams {
    pub gamma0: f64,
    #[serde(default = "default_order")]
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Recorded only; nothing asserts against these bounds.
    #[serde(default)]
    pub m0: Option<f64>,
    #[serde(default)]
    pub eps0: Option<f64>,
}

fn default_order() -> usize {
    2
}

impl Default for DataNormParams {
    fn default() -> Self {
        DataNormParams {
            gamma0: 1.5,
            k: 2,
            epsilon: 0.1,
            delta: 0.2,
            m0: None,
            eps0: None,
        }
    }
}

impl DataNormParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 1.0 && self.gamma0 < 2.0) {
            return Err(Error::Config(format!("gamma0 = {} must lie in (1, 2)", self.gamma0)));
        }
        if self.k > 2 {
            return Err(Error::Config(format!("norm order k = {} exceeds 2", self.k)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5 * (1.0 - self.epsilon)) {
            return Err(Error::Config(format!(
                "delta = {} must lie in (0, (1 - epsilon)/2] with epsilon = {}",
                self.delta, self.epsilon
            )));
        }
        Ok(())
    }
}

/// Initial data on `{t = t0}`: scalar pair, spatial potential for the
/// covariant derivatives, divergence-free electric part and magnetic field.
pub struct InitialData<'a> {
    pub phi0: &'a [C64],
    pub phi1: &'a [C64],
    pub a: [&'a [f64]; 3],
    pub edf: [&'a [f64]; 3],
    pub h: [&'a [f64]; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    /// `(1 + r)^{γ0 + 2l}`.
    Radial,
    /// Weight 1 at every order.
    Unit,
}

/// Accumulates `Σ_{|β| = j} |D̄^β f|²` into `acc[j]` for `j ≤ depth`,
/// walking the ordered derivative tree depth first.
fn accumulate(g: &GridSpec, f: &[C64], a: Option<[&[f64]; 3]>, depth: usize, level: usize, acc: &mut [Vec<f64>], exec: Exec) {
    {
        let out = &mut acc[level];
        exec.for_chunks(out, 4096, |ci, chunk| {
            for (o, v) in chunk.iter_mut().enumerate() {
                *v += f[ci * 4096 + o].norm_sqr();
            }
        });
    }
    if level == depth {
        return;
    }
    for axis in 1..=3 {
        let mut d = grid::deriv(g, f, axis, exec);
        if let Some(a) = a {
            let ai = a[axis - 1];
            exec.for_chunks(&mut d, 4096, |ci, chunk| {
                for (o, v) in chunk.iter_mut().enumerate() {
                    let i = ci * 4096 + o;
                    *v += C64::new(0.0, ai[i]) * f[i];
                }
            });
        }
        accumulate(g, &d, a, depth, level + 1, acc, exec);
    }
}

fn levels(g: &GridSpec, f: &[C64], a: Option<[&[f64]; 3]>, depth: usize, exec: Exec) -> Vec<Vec<f64>> {
    let mut acc = vec![vec![0.0; g.len()]; depth + 1];
    accumulate(g, f, a, depth, 0, &mut acc, exec);
    acc
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// `(M_{k,γ0}, E_{k,γ0})` by grid quadrature.
pub fn weighted_data_norms(g: &GridSpec, data: &InitialData, params: &DataNormParams, weight: Weight, exec: Exec) -> Result<(f64, f64)> {
    if params.k > 2 {
        return Err(Error::Config(format!("norm order k = {} exceeds 2", params.k)));
    }
    let k = params.k;
    let n = g.len();
    let wl = |l: usize, idx: usize| -> f64 {
        match weight {
            Weight::Unit => 1.0,
            Weight::Radial => {
                let x = g.position(idx);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                (1.0 + r).powf(params.gamma0 + 2.0 * l as f64)
            }
        }
    };

    let mut maxwell = vec![vec![0.0; n]; k + 1];
    for c in data.edf.iter().chain(data.h.iter()) {
        let lv = levels(g, &real(c), None, k, exec);
        for (m, l) in maxwell.iter_mut().zip(lv) {
            m.iter_mut().zip(l).for_each(|(x, y)| *x += y);
        }
    }
    let m_norm: f64 = (0..=k)
        .map(|l| exec.sum(n, |i| wl(l, i) * maxwell[l][i]))
        .sum::<f64>()
        * g.cell_volume();

    // φ0 enters at orders l and l + 1 with the order-l weight.
    let p0 = levels(g, data.phi0, Some(data.a), k + 1, exec);
    let p1 = levels(g, data.phi1, Some(data.a), k, exec);
    let e_norm: f64 = (0..=k)
        .map(|l| exec.sum(n, |i| wl(l, i) * (p0[l + 1][i] + p1[l][i] + p0[l][i])))
        .sum::<f64>()
        * g.cell_volume();
    Ok((m_norm, e_norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::split::stencil_wavenumber;
    use crate::grid::sample;
    use std::f64::consts::PI;

    struct Owned {
        phi0: Vec<C64>,
        phi1: Vec<C64>,
        a: [Vec<f64>; 3],
        edf: [Vec<f64>; 3],
        h: [Vec<f64>; 3],
    }

    impl Owned {
        fn view(&self) -> InitialData<'_> {
            InitialData {
                phi0: &self.phi0,
                phi1: &self.phi1,
                a: [&self.a[0], &self.a[1], &self.a[2]],
                edf: [&self.edf[0], &self.edf[1], &self.edf[2]],
                h: [&self.h[0], &self.h[1], &self.h[2]],
            }
        }
    }

    fn zeros(n: usize) -> Owned {
        Owned {
            phi0: vec![C64::default(); n],
            phi1: vec![C64::default(); n],
            a: std::array::from_fn(|_| vec![0.0; n]),
            edf: std::array::from_fn(|_| vec![0.0; n]),
            h: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    #[test]
    fn zero_data() {
        let g = GridSpec::periodic(8, 0.5);
        let d = zeros(g.len());
        let p = DataNormParams::default();
        assert_eq!(weighted_data_norms(&g, &d.view(), &p, Weight::Radial, Exec::Parallel).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn single_mode_parseval() {
        // E^df = a sin(k x1) ŷ: Σ_l ∫|∇^l E|² = (a² V / 2) Σ_l k̃^{2l}.
        let g = GridSpec::periodic(16, 0.5);
        let len = g.n as f64 * g.dx;
        let w = 2.0 * PI * 2.0 / len;
        let amp = 0.7;
        let mut d = zeros(g.len());
        d.edf[1] = sample(&g, Exec::Sequential, |x| amp * (w * x[0]).sin());
        let kt = stencil_wavenumber(2, g.n, g.dx);
        for k in 0..=2 {
            let p = DataNormParams { k, ..Default::default() };
            let (m, e) = weighted_data_norms(&g, &d.view(), &p, Weight::Unit, Exec::Parallel).unwrap();
            let want: f64 = (0..=k).map(|l| kt.powi(2 * l as i32)).sum::<f64>() * amp * amp * len.powi(3) / 2.0;
            assert!((m - want).abs() < 1e-10 * want, "k={k}: {m} vs {want}");
            assert_eq!(e, 0.0);
        }
    }

    #[test]
    fn homogeneity() {
        let g = GridSpec::new(10, 0.4, crate::grid::Boundary::Outflow);
        let mut d = zeros(g.len());
        d.phi0 = sample(&g, Exec::Sequential, |x| C64::new((-x[0] * x[0] - x[1] * x[1]).exp(), x[2] * 0.1));
        d.phi1 = sample(&g, Exec::Sequential, |x| C64::new(0.0, (-x[2] * x[2]).exp()));
        d.a[0] = sample(&g, Exec::Sequential, |x| 0.2 * x[1]);
        d.h[2] = sample(&g, Exec::Sequential, |x| (x[0] - x[1]).cos());
        let p = DataNormParams::default();
        let (m1, e1) = weighted_data_norms(&g, &d.view(), &p, Weight::Radial, Exec::Sequential).unwrap();
        let lam = 3.0;
        d.phi0.iter_mut().chain(d.phi1.iter_mut()).for_each(|v| *v *= lam);
        d.h[2].iter_mut().for_each(|v| *v *= lam);
        let (m2, e2) = weighted_data_norms(&g, &d.view(), &p, Weight::Radial, Exec::Parallel).unwrap();
        assert!((m2 - 9.0 * m1).abs() < 1e-10 * m2);
        assert!((e2 - 9.0 * e1).abs() < 1e-10 * e2);
    }

    #[test]
    fn parameter_ranges() {
        assert!(DataNormParams::default().validate().is_ok());
        let bad = DataNormParams { gamma0: 2.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = DataNormParams { delta: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
