//! Spherically symmetric Klein–Gordon for `u = r φ` in a static external
//! potential `A_0 = q erf(r/r_c)/r`:
//!
//! `u_tt = u_rr − m² u − 2i A_0 u_t + A_0² u`.
//!
//! `u` is extended oddly through the origin. An absorbing layer over the
//! outer tenth of the interval damps outgoing waves; the run is refused if
//! anything reflected from that layer could reach the observation radius
//! before the end time.

use num_complex::Complex64 as C64;

use super::config::RadialConfig;
use super::data::DataRecipe;
use super::rk4::{axpy_complex, rk4_step, OdeState};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::T0;

#[derive(Clone)]
struct Vars {
    u: Vec<C64>,
    v: Vec<C64>,
}

impl OdeState for Vars {
    fn axpy(&mut self, a: f64, x: &Self, exec: Exec) {
        axpy_complex(&mut self.u, a, &x.u, exec);
        axpy_complex(&mut self.v, a, &x.v, exec);
    }
}

/// Radial history at the observation radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialHistory {
    pub r_obs: f64,
    pub t: Vec<f64>,
    /// `φ(t, r_obs)`.
    pub phi: Vec<C64>,
    /// `max_{r ≤ r_obs} |φ|` at each sample.
    pub interior_max: Vec<f64>,
}

pub struct RadialEngine {
    pub cfg: RadialConfig,
    pub mass: f64,
    pub t: f64,
    r: Vec<f64>,
    a0: Vec<f64>,
    sponge: Vec<f64>,
    y: Vars,
    support: f64,
}

fn bump(r: f64, radius: f64) -> f64 {
    let s = r / radius;
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// `u_t = −iλ (m² − ∂_r²)^{1/2} u` with the symbol of the fourth-order
/// second difference, applied to the odd periodic extension. For `λ = 1`
/// this selects the positive-frequency free solution.
fn positive_frequency_velocity(u: &[C64], dr: f64, mass: f64, lambda: f64) -> Vec<C64> {
    let n = u.len();
    let m = 2 * (n - 1);
    let mut ext = vec![C64::default(); m];
    ext[..n].copy_from_slice(u);
    for j in 1..n - 1 {
        ext[m - j] = -u[j];
    }
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut ext);
    for (k, v) in ext.iter_mut().enumerate() {
        let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let sym = (30.0 - 32.0 * th.cos() + 2.0 * (2.0 * th).cos()) / (12.0 * dr * dr);
        *v *= C64::new(0.0, -lambda * (mass * mass + sym).sqrt() / m as f64);
    }
    planner.plan_fft_inverse(m).process(&mut ext);
    let mut out = ext[..n].to_vec();
    out[0] = C64::default();
    out
}

impl RadialEngine {
    pub fn new(cfg: RadialConfig, mass: f64, data: &DataRecipe) -> Result<Self> {
        let DataRecipe::RadialBump { amplitude, radius, lambda } = *data else {
            return Err(Error::Unsupported(format!("recipe {} for the radial engine", data.id())));
        };
        if !(radius > 0.0 && radius < cfg.r_obs.max(cfg.r_max)) {
            return Err(Error::Config("radial-bump: radius must be positive and inside the interval".into()));
        }
        let n = (cfg.r_max / cfg.dr).round() as usize + 1;
        let r: Vec<f64> = (0..n).map(|j| j as f64 * cfg.dr).collect();
        let a0 = r
            .iter()
            .map(|&r| {
                if r == 0.0 {
                    cfg.q * 2.0 / (std::f64::consts::PI.sqrt() * cfg.r_core)
                } else {
                    cfg.q * statrs::function::erf::erf(r / cfg.r_core) / r
                }
            })
            .collect();
        let start = 0.9 * cfg.r_max;
        let sponge = r
            .iter()
            .map(|&r| if r <= start { 0.0 } else { 2.0 * ((r - start) / (cfg.r_max - start)).powi(2) })
            .collect();
        let u: Vec<C64> = r.iter().map(|&r| C64::new(amplitude * r * bump(r, radius), 0.0)).collect();
        let v = positive_frequency_velocity(&u, cfg.dr, mass, lambda);
        Ok(RadialEngine {
            cfg,
            mass,
            t: T0,
            r,
            a0,
            sponge,
            y: Vars { u, v },
            support: radius,
        })
    }

    /// Earliest time a reflection from the absorbing layer can reach `r_obs`.
    pub fn reflection_time(&self) -> f64 {
        let start = 0.9 * self.cfg.r_max;
        T0 + (start - self.support) + (start - self.cfg.r_obs)
    }

    fn rhs(&self, y: &Vars) -> Vars {
        let n = y.u.len();
        let h2 = self.cfg.dr * self.cfg.dr;
        let m2 = self.mass * self.mass;
        // Odd extension at the origin, zero beyond the outer edge.
        let at = |j: isize| -> C64 {
            if j < 0 {
                -y.u[(-j) as usize]
            } else if (j as usize) < n {
                y.u[j as usize]
            } else {
                C64::default()
            }
        };
        let mut v_t = vec![C64::default(); n];
        for j in 1..n {
            let ji = j as isize;
            let urr = (-at(ji - 2) + at(ji - 1) * 16.0 - at(ji) * 30.0 + at(ji + 1) * 16.0 - at(ji + 2)) / (12.0 * h2);
            let a = self.a0[j];
            v_t[j] = urr - y.u[j] * (m2 - a * a) - C64::new(0.0, 2.0 * a) * y.v[j] - y.v[j] * self.sponge[j];
        }
        let mut u_t = y.v.clone();
        u_t[0] = C64::default();
        Vars { u: u_t, v: v_t }
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let mut y = std::mem::replace(&mut self.y, Vars { u: Vec::new(), v: Vec::new() });
        rk4_step(&mut y, dt, Exec::Sequential, |s| Ok(self.rhs(s)))?;
        self.y = y;
        self.t += dt;
        Ok(())
    }

    /// `φ = u/r` at radius `r > 0` by cubic interpolation.
    pub fn phi_at(&self, r: f64) -> C64 {
        let h = self.cfg.dr;
        let j = ((r / h).floor() as usize).clamp(1, self.r.len() - 3);
        let s = r / h - j as f64;
        let idx = [j - 1, j, j + 1, j + 2];
        let nodes = [-1.0, 0.0, 1.0, 2.0];
        let mut u = C64::default();
        for (a, &ia) in idx.iter().enumerate() {
            let w: f64 = (0..4).filter(|&b| b != a).map(|b| (s - nodes[b]) / (nodes[a] - nodes[b])).product();
            u += self.y.u[ia] * w;
        }
        u / r
    }

    /// `max |φ|` over the nodes with `0 < r ≤ r_in`.
    pub fn interior_max(&self, r_in: f64) -> f64 {
        self.r
            .iter()
            .zip(&self.y.u)
            .skip(1)
            .take_while(|(r, _)| **r <= r_in)
            .map(|(r, u)| u.norm() / r)
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.y.u.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Evolves from `t0` to `t_end`, recording the observation series every
/// `every` steps.
pub fn radial_evolve(cfg: RadialConfig, mass: f64, data: &DataRecipe, cfl: f64, t_end: f64, every: usize) -> Result<RadialHistory> {
    if !(cfl > 0.0 && cfl <= 0.5) {
        return Err(Error::Cfl { dt: cfl * cfg.dr, max: 0.5 * cfg.dr });
    }
    let mut eng = RadialEngine::new(cfg, mass, data)?;
    let tr = eng.reflection_time();
    if tr < t_end {
        return Err(Error::Reflection(format!(
            "reflections from r = {:.1} reach r_obs = {} at t = {tr:.1} < t_end = {t_end}; enlarge r_max",
            0.9 * cfg.r_max,
            cfg.r_obs
        )));
    }
    let steps = ((t_end - T0) / (cfl * cfg.dr)).ceil().max(1.0) as usize;
    let dt = (t_end - T0) / steps as f64;
    let mut hist = RadialHistory { r_obs: cfg.r_obs, t: Vec::new(), phi: Vec::new(), interior_max: Vec::new() };
    let every = every.max(1);
    for k in 0..=steps {
        if k > 0 {
            eng.step(dt)?;
        }
        if k % every == 0 || k == steps {
            if !eng.is_finite() {
                return Err(Error::NonFinite { field: "u".into(), step: k });
            }
            hist.t.push(eng.t);
            hist.phi.push(eng.phi_at(cfg.r_obs));
            hist.interior_max.push(eng.interior_max(cfg.r_obs));
        }
    }
    Ok(hist)
}

/// Upper envelope: for every window of width `span` lying inside the data,
/// the maximum of `|v|` placed at the time it is attained. Repeated maxima
/// are reported once.
pub fn sliding_max(t: &[f64], v: &[f64], span: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    let (lo_t, hi_t) = match (t.first(), t.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return (ts, vs),
    };
    let mut lo = 0;
    let mut hi = 0;
    for i in 0..t.len() {
        if t[i] - 0.5 * span < lo_t || t[i] + 0.5 * span > hi_t {
            continue;
        }
        while t[lo] < t[i] - 0.5 * span {
            lo += 1;
        }
        while hi + 1 < t.len() && t[hi + 1] <= t[i] + 0.5 * span {
            hi += 1;
        }
        let (arg, best) = (lo..=hi).fold((lo, -1.0), |(a, m): (usize, f64), j| if v[j].abs() > m { (j, v[j].abs()) } else { (a, m) });
        if ts.last() != Some(&t[arg]) {
            ts.push(t[arg]);
            vs.push(best);
        }
    }
    (ts, vs)
}
