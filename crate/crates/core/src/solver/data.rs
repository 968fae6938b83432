//! Initial-data recipes.
//!
//! Every recipe produces the scalar pair `(φ0, φ1)`, a spatial potential
//! `V` with `B = curl V`, and a divergence-free electric part built as a
//! discrete curl. The curl-free electric part is solved from the charge
//! density, so Gauss's law holds to the accuracy of the Poisson solve.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::config::{Engine, SimConfig};
use super::mmkg::MmkgState;
use super::maxwell::MaxwellState;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fields::split::hodge_split;
use crate::fields::state::{GaugeState, ScalarState};
use crate::geometry::T0;
use crate::grid::{self, Boundary, GridSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneMode {
    /// Integer wave numbers on the periodic box.
    pub m: [i32; 3],
    /// Polarization; the component along the wave vector is removed.
    pub pol: [f64; 3],
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataRecipe {
    Zero,
    /// `φ0 = a e^{−|x−c|²/w²} e^{ik·x}`, `φ1 = (μ + iλ) φ0`. When neutral, a
    /// mirrored copy at `−c` with `φ1 = (μ − iλ) φ0` cancels the charge.
    GaussianScalar {
        #[serde(default)]
        center: [f64; 3],
        width: f64,
        amplitude: f64,
        #[serde(default)]
        k: [f64; 3],
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default)]
        mu: f64,
        #[serde(default = "yes")]
        neutral: bool,
    },
    /// Real `φ0 = a (1 + r²)^{−γ/2}` cut off smoothly before the box edge.
    PowerTailScalar {
        gamma: f64,
        amplitude: f64,
        /// Cutoff radius as a fraction of the box half-width.
        #[serde(default = "default_cutoff")]
        cutoff: f64,
    },
    /// `E = curl(ψ h_l e_3)`, `B = curl(ψ h_l e_1)` with the solid harmonic
    /// `h_l = Re (x1 + i x2)^l` and a Gaussian or power-law profile `ψ`.
    MultipoleMaxwell {
        l: u32,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        tail: Option<f64>,
    },
    /// Point charge `q0`, smeared over a Gaussian core. Needs an open grid.
    CoulombAnalytic {
        q0: f64,
        #[serde(default = "default_core")]
        core: f64,
    },
    /// Periodic bump `a exp(κ Σ (cos(2π x_i / P) − 1))`, `φ1 = −iλ φ0`.
    PeriodicBump {
        kappa: f64,
        amplitude: f64,
        #[serde(default)]
        lambda: f64,
    },
    /// Superposition of source-free plane waves on the periodic box.
    PlaneMaxwell { modes: Vec<PlaneMode> },
    /// Radial engine only: `φ0 = a exp(1 − 1/(1 − (r/ρ)²))` for `r < ρ`,
    /// `φ1 = −iλ φ0`.
    RadialBump {
        amplitude: f64,
        radius: f64,
        #[serde(default = "one")]
        lambda: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_cutoff() -> f64 {
    0.8
}

fn default_core() -> f64 {
    0.5
}

impl DataRecipe {
    pub fn id(&self) -> &'static str {
        match self {
            DataRecipe::Zero => "zero",
            DataRecipe::GaussianScalar { .. } => "gaussian-scalar",
            DataRecipe::PowerTailScalar { .. } => "power-tail-scalar",
            DataRecipe::MultipoleMaxwell { .. } => "multipole-maxwell",
            DataRecipe::CoulombAnalytic { .. } => "coulomb-analytic",
            DataRecipe::PeriodicBump { .. } => "periodic-bump",
            DataRecipe::PlaneMaxwell { .. } => "plane-maxwell",
            DataRecipe::RadialBump { .. } => "radial-bump",
        }
    }
}

/// Raw recipe output before the constraint solve.
#[derive(Clone, Debug)]
pub struct RawData {
    pub phi0: Vec<C64>,
    pub phi1: Vec<C64>,
    /// Spatial potential; `B = curl V`.
    pub v: [Vec<f64>; 3],
    /// Divergence-free electric part.
    pub edf: [Vec<f64>; 3],
}

impl RawData {
    fn zeros(len: usize) -> Self {
        RawData {
            phi0: vec![C64::default(); len],
            phi1: vec![C64::default(); len],
            v: std::array::from_fn(|_| vec![0.0; len]),
            edf: std::array::from_fn(|_| vec![0.0; len]),
        }
    }
}

/// Minimum-image displacement on a periodic box of side `2L`.
fn wrap(d: f64, l: f64) -> f64 {
    let p = 2.0 * l;
    d - p * (d / p).round()
}

/// `C^∞` step from 0 at `x ≤ 0` to 1 at `x ≥ 1`.
pub fn smooth_step(x: f64) -> f64 {
    let f = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let (a, b) = (f(x), f(1.0 - x));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

fn solid_harmonic(l: u32, x: &[f64; 3]) -> f64 {
    C64::new(x[0], x[1]).powu(l).re
}

fn curl_of(g: &GridSpec, w: &[Vec<f64>; 3], exec: Exec) -> [Vec<f64>; 3] {
    grid::curl(g, [&w[0], &w[1], &w[2]], exec)
}

/// Smeared Coulomb field `E = q0 x/r³ · P(r)` where `P` is the charge
/// fraction of a Gaussian of width `core` inside radius `r`.
pub fn smeared_coulomb(q0: f64, core: f64, x: &[f64; 3]) -> [f64; 3] {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r < 1e-300 {
        return [0.0; 3];
    }
    let s = r / core;
    let frac = statrs::function::erf::erf(s) - 2.0 / PI.sqrt() * s * (-s * s).exp();
    let k = q0 * frac / (r * r * r);
    x.map(|c| k * c)
}

pub fn raw_data(recipe: &DataRecipe, g: &GridSpec, exec: Exec) -> Result<RawData> {
    let n = g.len();
    let l = g.half_width();
    let mut d = RawData::zeros(n);
    match *recipe {
        DataRecipe::Zero => {}
        DataRecipe::GaussianScalar { center, width, amplitude, k, lambda, mu, neutral } => {
            if !(width > 0.0) {
                return Err(Error::Config("gaussian-scalar: width must be positive".into()));
            }
            let blob = |x: &[f64; 3], c: [f64; 3]| -> C64 {
                let r2: f64 = (0..3).map(|i| wrap(x[i] - c[i], l).powi(2)).sum();
                let ph: f64 = (0..3).map(|i| k[i] * x[i]).sum();
                C64::from_polar(amplitude * (-r2 / (width * width)).exp(), ph)
            };
            let mirror = center.map(|c| -c);
            let pairs: Vec<(C64, C64)> = grid::sample(g, exec, |x| {
                let a = blob(&x, center);
                let mut p0 = a;
                let mut p1 = a * C64::new(mu, lambda);
                if neutral {
                    let b = blob(&x, mirror);
                    p0 += b;
                    p1 += b * C64::new(mu, -lambda);
                }
                (p0, p1)
            });
            (d.phi0, d.phi1) = pairs.into_iter().unzip();
        }
        DataRecipe::PowerTailScalar { gamma, amplitude, cutoff } => {
            if !(gamma > 0.0 && cutoff > 0.0 && cutoff <= 1.0) {
                return Err(Error::Config("power-tail-scalar: need gamma > 0 and cutoff in (0, 1]".into()));
            }
            let r2 = cutoff * l;
            let r1 = 0.7 * r2;
            d.phi0 = grid::sample(g, exec, |x| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let chi = 1.0 - smooth_step((r - r1) / (r2 - r1));
                C64::new(amplitude * (1.0 + r * r).powf(-0.5 * gamma) * chi, 0.0)
            });
        }
        DataRecipe::MultipoleMaxwell { l: ell, width, amplitude, tail } => {
            if !(width > 0.0) {
                return Err(Error::Config("multipole-maxwell: width must be positive".into()));
            }
            let profile = move |x: &[f64; 3]| -> f64 {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let base = match tail {
                    None => (-r2 / (width * width)).exp(),
                    Some(p) => {
                        let r = r2.sqrt();
                        let chi = 1.0 - smooth_step((r - 0.6 * l) / (0.3 * l));
                        (1.0 + r2 / (width * width)).powf(-0.5 * p) * chi
                    }
                };
                amplitude * base * solid_harmonic(ell, x)
            };
            let psi = grid::sample(g, exec, |x| profile(&x));
            let zero = vec![0.0; n];
            d.edf = curl_of(g, &[zero.clone(), zero.clone(), psi.clone()], exec);
            d.v = [psi, zero.clone(), zero];
        }
        DataRecipe::CoulombAnalytic { q0, core } => {
            if g.boundary == Boundary::Periodic {
                return Err(Error::NonzeroCharge { q0 });
            }
            let e: Vec<[f64; 3]> = grid::sample(g, exec, |x| smeared_coulomb(q0, core, &x));
            // The Coulomb field is curl free; it is stored in the electric
            // slot because there is no scalar to source it.
            d.edf = [0, 1, 2].map(|a| e.iter().map(|v| v[a]).collect());
        }
        DataRecipe::PeriodicBump { kappa, amplitude, lambda } => {
            let w = PI / l;
            d.phi0 = grid::sample(g, exec, |x| {
                let s: f64 = x.iter().map(|c| (w * c).cos() - 1.0).sum();
                C64::new(amplitude * (kappa * s).exp(), 0.0)
            });
            d.phi1 = d.phi0.iter().map(|p| p * C64::new(0.0, -lambda)).collect();
        }
        DataRecipe::PlaneMaxwell { ref modes } => {
            for m in modes {
                let (e, a) = plane_mode_fields(m, l);
                let vals: Vec<([f64; 3], [f64; 3])> = grid::sample(g, exec, |x| (e(&x, T0), a(&x, T0)));
                for c in 0..3 {
                    d.edf[c].iter_mut().zip(&vals).for_each(|(o, v)| *o += v.0[c]);
                    d.v[c].iter_mut().zip(&vals).for_each(|(o, v)| *o += v.1[c]);
                }
            }
        }
        DataRecipe::RadialBump { .. } => {
            return Err(Error::Unsupported("radial-bump data on a three-dimensional grid".into()));
        }
    }
    Ok(d)
}

/// Exact fields of a plane mode: `E = ε cos(k·x − |k|(t − t0) + θ)` and the
/// potential `A = −ε sin(…)/|k|` with `B = curl A`.
#[allow(clippy::type_complexity)]
pub fn plane_mode_fields(m: &PlaneMode, l: f64) -> (impl Fn(&[f64; 3], f64) -> [f64; 3], impl Fn(&[f64; 3], f64) -> [f64; 3]) {
    let k = m.m.map(|v| PI * v as f64 / l);
    let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let kd: f64 = (0..3).map(|i| m.pol[i] * k[i]).sum::<f64>() / (kn * kn).max(1e-300);
    let eps: [f64; 3] = std::array::from_fn(|i| m.amplitude * (m.pol[i] - kd * k[i]));
    let (amp, theta) = (eps, m.phase);
    let phase = move |x: &[f64; 3], t: f64| k[0] * x[0] + k[1] * x[1] + k[2] * x[2] - kn * (t - T0) + theta;
    let e = move |x: &[f64; 3], t: f64| {
        let c = phase(x, t).cos();
        amp.map(|v| v * c)
    };
    let a = move |x: &[f64; 3], t: f64| {
        let s = phase(x, t).sin();
        amp.map(|v| -v * s / kn)
    };
    (e, a)
}

/// Charge density `Im(φ0 · conj φ1)`.
pub fn charge_density(phi0: &[C64], phi1: &[C64], exec: Exec) -> Vec<f64> {
    exec.map(phi0.len(), |i| (phi0[i] * phi1[i].conj()).im)
}

/// Constructed initial state for the configured engine.
#[derive(Clone, Debug)]
pub enum InitialState {
    Mmkg(MmkgState),
    Maxwell(MaxwellState),
}

/// Builds admissible data at `t0`: `A_0 = 0`, `A_i = V_i`,
/// `∂_t A_i = E_i`, `∂_t A_0 = div A` (Lorenz residual zero), `π = φ1`.
pub fn make_initial_data(cfg: &SimConfig, exec: Exec) -> Result<InitialState> {
    let g = cfg.grid;
    let raw = raw_data(&cfg.data, &g, exec)?;
    match cfg.run.engine {
        Engine::LinearMaxwell => {
            let b = curl_of(&g, &raw.v, exec);
            Ok(InitialState::Maxwell(MaxwellState::new(T0, raw.edf, b)))
        }
        Engine::Radial => Err(Error::Unsupported("three-dimensional data for the radial engine".into())),
        Engine::Mmkg | Engine::LinearKg => {
            let n = g.len();
            let coupled = cfg.run.engine == Engine::Mmkg;
            let mut e = raw.edf;
            if coupled {
                let rho = charge_density(&raw.phi0, &raw.phi1, exec);
                let (_, ecf) = hodge_split(&g, &[vec![0.0; n], vec![0.0; n], vec![0.0; n]], &rho, exec)?;
                for a in 0..3 {
                    e[a].iter_mut().zip(&ecf[a]).for_each(|(x, y)| *x += y);
                }
            } else if e.iter().chain(raw.v.iter()).any(|c| c.iter().any(|&v| v != 0.0)) {
                return Err(Error::Config(format!(
                    "engine linear-kg carries no gauge field but recipe {} has one",
                    cfg.data.id()
                )));
            }
            let [v1, v2, v3] = raw.v;
            let div_a = grid::divergence(&g, [&v1, &v2, &v3], exec);
            let [e1, e2, e3] = e;
            let gauge = GaugeState {
                a: [vec![0.0; n], v1, v2, v3],
                da: [div_a, e1, e2, e3],
            };
            let scalar = ScalarState { phi: raw.phi0, pi: raw.phi1 };
            Ok(InitialState::Mmkg(MmkgState::new(T0, scalar, gauge, coupled)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::state::{charge, charge_from_field};
    use crate::grid::max_norm;
    use crate::solver::monitor::constraint_report;

    fn cfg(recipe: DataRecipe, n: usize, dx: f64) -> SimConfig {
        SimConfig {
            grid: GridSpec::periodic(n, dx),
            time: super::super::config::TimeConfig { cfl: 0.5, t_end: 2.5, snap_every: 1 },
            data: recipe,
            norms: Default::default(),
            run: Default::default(),
            radial: None,
            identities: Default::default(),
            diagnose: Default::default(),
        }
    }

    fn gaussian() -> DataRecipe {
        DataRecipe::GaussianScalar {
            center: [1.0, 0.5, 0.0],
            width: 1.0,
            amplitude: 0.1,
            k: [0.5, 0.0, 0.0],
            lambda: 1.0,
            mu: 0.0,
            neutral: true,
        }
    }

    #[test]
    fn zero_recipe_is_vacuum() {
        let c = cfg(DataRecipe::Zero, 12, 0.5);
        let InitialState::Mmkg(s) = make_initial_data(&c, Exec::Sequential).unwrap() else { panic!() };
        let r = constraint_report(&c.grid, &s, None, Exec::Sequential);
        assert_eq!(r.max_residual(), 0.0);
        assert!(s.scalar.phi.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn real_scalar_data_has_no_curl_free_part() {
        let rec = DataRecipe::GaussianScalar {
            center: [0.0; 3],
            width: 1.0,
            amplitude: 0.3,
            k: [0.0; 3],
            lambda: 0.0,
            mu: 1.0,
            neutral: false,
        };
        let c = cfg(rec, 16, 0.5);
        let InitialState::Mmkg(s) = make_initial_data(&c, Exec::Sequential).unwrap() else { panic!() };
        for a in 1..4 {
            assert_eq!(max_norm(&s.gauge.da[a]), 0.0);
        }
    }

    #[test]
    fn gauss_law_holds_after_poisson_solve() {
        let c = cfg(gaussian(), 64, 0.25);
        let InitialState::Mmkg(s) = make_initial_data(&c, Exec::Parallel).unwrap() else { panic!() };
        let r = constraint_report(&c.grid, &s, None, Exec::Parallel);
        assert!(r.gauss.max <= 1e-8, "{r:?}");
        assert!(r.lorenz.max <= 1e-14 && r.bianchi.max <= 1e-14, "{r:?}");
        assert!(charge(&c.grid, &s.scalar, Exec::Parallel).abs() < 1e-12);
        let e = [1, 2, 3].map(|a| s.gauge.da[a].clone());
        assert!(charge_from_field(&c.grid, &e, Exec::Parallel).abs() < 1e-12);
        assert!(max_norm(&e[0]) > 1e-4);
    }

    #[test]
    fn charged_gaussian_is_rejected_on_a_torus() {
        let rec = match gaussian() {
            DataRecipe::GaussianScalar { center, width, amplitude, k, lambda, mu, .. } => {
                DataRecipe::GaussianScalar { center, width, amplitude, k, lambda, mu, neutral: false }
            }
            _ => unreachable!(),
        };
        let c = cfg(rec, 16, 0.5);
        assert!(matches!(make_initial_data(&c, Exec::Sequential), Err(Error::NonzeroMean { .. })));
        let c = cfg(DataRecipe::CoulombAnalytic { q0: 1.0, core: 0.5 }, 16, 0.5);
        assert!(matches!(make_initial_data(&c, Exec::Sequential), Err(Error::NonzeroCharge { .. })));
    }

    #[test]
    fn maxwell_recipes_are_divergence_free() {
        let recipes = [
            DataRecipe::MultipoleMaxwell { l: 2, width: 1.0, amplitude: 1.0, tail: None },
            DataRecipe::MultipoleMaxwell { l: 1, width: 1.0, amplitude: 1.0, tail: Some(3.0) },
            DataRecipe::PlaneMaxwell {
                modes: vec![PlaneMode { m: [1, 2, 0], pol: [0.0, 0.0, 1.0], amplitude: 1.0, phase: 0.3 }],
            },
        ];
        for rec in recipes {
            let mut c = cfg(rec, 24, 0.4);
            c.run.engine = Engine::LinearMaxwell;
            let InitialState::Maxwell(s) = make_initial_data(&c, Exec::Sequential).unwrap() else { panic!() };
            let de = grid::divergence(&c.grid, [&s.e[0], &s.e[1], &s.e[2]], Exec::Sequential);
            let db = grid::divergence(&c.grid, [&s.b[0], &s.b[1], &s.b[2]], Exec::Sequential);
            assert!(max_norm(&de) < 1e-12 && max_norm(&db) < 1e-12);
            assert!(max_norm(&s.e[0]) + max_norm(&s.e[2]) > 1e-3);
        }
    }

    #[test]
    fn smeared_coulomb_charge_is_recovered() {
        let g = GridSpec::new(48, 0.25, Boundary::Outflow);
        let e: Vec<[f64; 3]> = grid::sample(&g, Exec::Sequential, |x| smeared_coulomb(0.7, 0.5, &x));
        let e = [0, 1, 2].map(|a| e.iter().map(|v| v[a]).collect());
        let q = charge_from_field(&g, &e, Exec::Sequential);
        assert!((q - 0.7).abs() < 1e-3 * 0.7, "{q}");
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }
}
