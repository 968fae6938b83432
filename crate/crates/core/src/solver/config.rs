//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::data::DataRecipe;
use crate::error::{Error, Result};
use crate::fields::norms::DataNormParams;
use crate::grid::{Boundary, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// `dt = cfl · dx`, at most 0.5.
    pub cfl: f64,
    pub t_end: f64,
    /// Steps between stored snapshots.
    #[serde(default = "one")]
    pub snap_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Nonlinear system in Lorenz gauge.
    #[default]
    Mmkg,
    /// Klein–Gordon with the charge coupling switched off.
    LinearKg,
    /// Source-free Maxwell in curl form.
    LinearMaxwell,
    /// Spherically symmetric Klein–Gordon for `rψ` on a half line.
    Radial,
}

impl Engine {
    pub fn id(&self) -> &'static str {
        match self {
            Engine::Mmkg => "mmkg",
            Engine::LinearKg => "linear-kg",
            Engine::LinearMaxwell => "linear-maxwell",
            Engine::Radial => "radial",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ceilings {
    #[serde(default = "big")]
    pub gauss: f64,
    #[serde(default = "big")]
    pub lorenz: f64,
    #[serde(default = "big")]
    pub bianchi: f64,
    #[serde(default = "big")]
    pub charge_drift: f64,
}

fn big() -> f64 {
    1e-2
}

impl Default for Ceilings {
    fn default() -> Self {
        Ceilings {
            gauss: big(),
            lorenz: big(),
            bianchi: big(),
            charge_drift: big(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub engine: Engine,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub residual_ceilings: Ceilings,
    #[serde(default = "default_mass")]
    pub mass: f64,
    /// Write snapshot files when evolving from the command line.
    #[serde(default = "yes")]
    pub write_snapshots: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_mass() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: Engine::default(),
            out_dir: default_out(),
            residual_ceilings: Ceilings::default(),
            mass: 1.0,
            write_snapshots: true,
        }
    }
}

/// Settings of the radial engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    pub r_max: f64,
    pub dr: f64,
    /// Observation radius.
    pub r_obs: f64,
    /// Strength of the external potential `A_0 = q erf(r/r_c)/r`.
    #[serde(default)]
    pub q: f64,
    #[serde(default = "default_core")]
    pub r_core: f64,
}

fn default_core() -> f64 {
    0.5
}

/// Switches for the identity suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityConfig {
    /// Runs the suite with the Levi-Civita sign flipped; dual-based checks
    /// are then expected to fail.
    #[serde(default)]
    pub flip_epsilon: bool,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub seed: u64,
    /// Also run the grid convergence studies.
    #[serde(default = "yes")]
    pub convergence: bool,
}

fn default_points() -> usize {
    10_000
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig { flip_epsilon: false, points: default_points(), seed: 0, convergence: true }
    }
}

/// Diagnostics requested from `diagnose`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    /// Hyperboloid parameters for energies and sup-norms.
    #[serde(default)]
    pub taus: Vec<f64>,
    #[serde(default)]
    pub k_max: usize,
    #[serde(default = "default_mesh")]
    pub mesh: [usize; 3],
    /// Number of randomized fields per Sobolev inequality.
    #[serde(default)]
    pub sobolev_fields: usize,
    /// Hyperboloid on which the Sobolev ratios are evaluated.
    #[serde(default = "default_sobolev_tau")]
    pub sobolev_tau: f64,
    /// Slice times for the exterior sup-norms.
    #[serde(default)]
    pub slices: Vec<f64>,
    /// Fit window `[lo, hi]`; by default the first 20% of samples are dropped.
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
}

fn default_sobolev_tau() -> f64 {
    3.0
}

impl DiagnoseConfig {
    pub fn validate(&self) -> Result<()> {
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&self.taus) || self.taus.iter().any(|&t| t < crate::geometry::TAU0) {
            return Err(Error::Config(format!(
                "diagnose.taus must increase and start at or after {}",
                crate::geometry::TAU0
            )));
        }
        if !increasing(&self.slices) {
            return Err(Error::Config("diagnose.slices must increase".into()));
        }
        if self.mesh.contains(&0) {
            return Err(Error::Config("diagnose.mesh entries must be positive".into()));
        }
        if let Some([lo, hi]) = self.fit_window {
            if !(lo < hi) {
                return Err(Error::Config(format!("diagnose.fit_window [{lo}, {hi}] is empty")));
            }
        }
        if !(self.sobolev_tau > crate::geometry::TAU0) {
            return Err(Error::Config(format!("diagnose.sobolev_tau must exceed {}", crate::geometry::TAU0)));
        }
        Ok(())
    }
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            taus: Vec::new(),
            k_max: 0,
            mesh: default_mesh(),
            sobolev_fields: 0,
            sobolev_tau: default_sobolev_tau(),
            slices: Vec::new(),
            fit_window: None,
        }
    }
}

fn default_mesh() -> [usize; 3] {
    [16, 8, 16]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub time: TimeConfig,
    pub data: DataRecipe,
    #[serde(default)]
    pub norms: DataNormParams,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub radial: Option<RadialConfig>,
    #[serde(default)]
    pub identities: IdentityConfig,
    #[serde(default)]
    pub diagnose: DiagnoseConfig,
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn dt(&self) -> f64 {
        let h = match (self.run.engine, &self.radial) {
            (Engine::Radial, Some(r)) => r.dr,
            _ => self.grid.dx,
        };
        self.time.cfl * h
    }

    pub fn validate(&self) -> Result<()> {
        self.norms.validate()?;
        if !(self.time.cfl > 0.0 && self.time.cfl <= 0.5) {
            return Err(Error::Cfl {
                dt: self.time.cfl * self.grid.dx,
                max: 0.5 * self.grid.dx,
            });
        }
        if self.time.snap_every == 0 {
            return Err(Error::Config("time.snap_every must be at least 1".into()));
        }
        if !(self.time.t_end >= crate::geometry::T0) {
            return Err(Error::Config(format!("time.t_end = {} precedes t0", self.time.t_end)));
        }
        match self.run.engine {
            Engine::Radial => {
                let r = self
                    .radial
                    .ok_or_else(|| Error::Config("engine radial needs a [radial] section".into()))?;
                if !(r.dr > 0.0 && r.r_max > r.r_obs && r.r_obs > 0.0) {
                    return Err(Error::Config("radial: need 0 < r_obs < r_max and dr > 0".into()));
                }
            }
            _ => {
                self.grid.check()?;
                // The Coulomb recipe is only ever evaluated, never evolved.
                let analytic = matches!(self.data, DataRecipe::CoulombAnalytic { .. });
                if self.grid.boundary != Boundary::Periodic && !analytic {
                    return Err(Error::Unsupported("evolution on a non-periodic box".into()));
                }
            }
        }
        self.diagnose.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[grid]
n = 16
dx = 0.25

[time]
cfl = 0.5
t_end = 2.5

[data]
recipe = "zero"
"#;

    #[test]
    fn minimal_config_parses() {
        let c = SimConfig::from_toml(BASE).unwrap();
        assert_eq!(c.grid.n, 16);
        assert_eq!(c.run.engine, Engine::Mmkg);
        assert!((c.dt() - 0.125).abs() < 1e-15);
        let back = SimConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn missing_and_unknown_keys_are_reported() {
        let missing = BASE.replace("t_end = 2.5\n", "");
        match SimConfig::from_toml(&missing) {
            Err(Error::Config(m)) => assert!(m.contains("t_end"), "{m}"),
            other => panic!("{other:?}"),
        }
        let unknown = BASE.replace("cfl = 0.5", "cfl = 0.5\nstep = 3");
        match SimConfig::from_toml(&unknown) {
            Err(Error::Config(m)) => assert!(m.contains("step") && m.contains("line"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cfl_bound_enforced() {
        let bad = BASE.replace("cfl = 0.5", "cfl = 0.7");
        assert!(matches!(SimConfig::from_toml(&bad), Err(Error::Cfl { .. })));
    }
}
