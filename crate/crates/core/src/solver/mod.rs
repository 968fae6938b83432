//! Evolution engines, initial data and constraint monitoring.

pub mod config;
pub mod data;
pub mod maxwell;
pub mod mmkg;
pub mod monitor;
pub mod radial;
pub mod rk4;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fields::snapshot::FieldSnapshot;

use config::{Engine, SimConfig};
use data::InitialState;
use monitor::{constraint_report, maxwell_report, ChargeRef, ConstraintReport};

/// Outcome of a grid evolution.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub steps: usize,
    pub dt: f64,
    pub t_final: f64,
    /// One report per step, the initial state included.
    pub reports: Vec<ConstraintReport>,
}

/// Step count and the uniform step that lands exactly on `t_end`.
pub fn schedule(cfg: &SimConfig, t_start: f64) -> (usize, f64) {
    let span = cfg.time.t_end - t_start;
    let steps = (span / cfg.dt() - 1e-9).ceil().max(1.0) as usize;
    (steps, span / steps as f64)
}

/// Evolves a grid state to `t_end`, checking the constraint ceilings after
/// every step and handing every `snap_every`-th state (and the last) to
/// `sink`. Snapshots are built only when the sink is called.
pub fn evolve(
    cfg: &SimConfig,
    init: InitialState,
    exec: Exec,
    mut sink: impl FnMut(&FieldSnapshot) -> Result<()>,
) -> Result<RunSummary> {
    let g = cfg.grid;
    let ceilings = cfg.run.residual_ceilings;
    let every = cfg.time.snap_every;
    match init {
        InitialState::Mmkg(mut s) => {
            if !matches!(cfg.run.engine, Engine::Mmkg | Engine::LinearKg) {
                return Err(Error::Config(format!("scalar state given to engine {}", cfg.run.engine.id())));
            }
            let (steps, dt) = schedule(cfg, s.t);
            let reference = ChargeRef::of(&g, &s, exec);
            let mut reports = Vec::with_capacity(steps + 1);
            for k in 0..=steps {
                if k > 0 {
                    s.step(&g, dt, cfg.run.mass, exec)?;
                }
                let r = constraint_report(&g, &s, Some(reference), exec);
                r.check(&ceilings)?;
                reports.push(r);
                if k % every == 0 || k == steps {
                    sink(&s.snapshot(&g, exec))?;
                }
            }
            Ok(RunSummary { steps, dt, t_final: s.t, reports })
        }
        InitialState::Maxwell(mut s) => {
            if cfg.run.engine != Engine::LinearMaxwell {
                return Err(Error::Config(format!("form state given to engine {}", cfg.run.engine.id())));
            }
            let (steps, dt) = schedule(cfg, s.t);
            let mut reports = Vec::with_capacity(steps + 1);
            for k in 0..=steps {
                if k > 0 {
                    s.step(&g, dt, exec)?;
                }
                let r = maxwell_report(&g, &s, exec);
                if !r.is_finite() {
                    return Err(Error::NonFinite { field: "E, B".into(), step: k });
                }
                r.check(&ceilings)?;
                reports.push(r);
                if k % every == 0 || k == steps {
                    sink(&s.snapshot(&g))?;
                }
            }
            Ok(RunSummary { steps, dt, t_final: s.t, reports })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::config::{SimConfig, TimeConfig};
    use super::data::{make_initial_data, DataRecipe};
    use super::*;
    use crate::grid::GridSpec;

    fn cfg(n: usize, dx: f64, t_end: f64, data: DataRecipe) -> SimConfig {
        SimConfig {
            grid: GridSpec::periodic(n, dx),
            time: TimeConfig { cfl: 0.5, t_end, snap_every: 2 },
            data,
            norms: Default::default(),
            run: Default::default(),
            radial: None,
            identities: Default::default(),
            diagnose: Default::default(),
        }
    }

    fn gaussian(amplitude: f64) -> DataRecipe {
        DataRecipe::GaussianScalar {
            center: [0.8, 0.0, 0.3],
            width: 1.2,
            amplitude,
            k: [0.0; 3],
            lambda: 1.0,
            mu: 0.0,
            neutral: true,
        }
    }

    #[test]
    fn snapshots_follow_the_cadence() {
        let c = cfg(12, 0.5, 3.0, DataRecipe::Zero);
        let init = make_initial_data(&c, Exec::Sequential).unwrap();
        let mut times = Vec::new();
        let sum = evolve(&c, init, Exec::Sequential, |s| {
            times.push(s.t);
            Ok(())
        })
        .unwrap();
        assert_eq!(sum.steps, 4);
        assert_eq!(sum.reports.len(), 5);
        assert_eq!(times.len(), 3);
        assert!((sum.t_final - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coupled_run_keeps_constraints() {
        let c = cfg(24, 0.4, 4.0, gaussian(0.2));
        let init = make_initial_data(&c, Exec::Parallel).unwrap();
        let sum = evolve(&c, init, Exec::Parallel, |_| Ok(())).unwrap();
        let last = sum.reports.last().unwrap();
        assert!(last.charge_drift < 1e-6, "{last:?}");
        assert!(last.gauss.max < 1e-3 && last.lorenz.max < 1e-3, "{last:?}");
    }

    #[test]
    fn ceiling_breach_is_named() {
        let mut c = cfg(16, 0.4, 3.0, gaussian(0.5));
        c.run.residual_ceilings.lorenz = 1e-14;
        let init = make_initial_data(&c, Exec::Parallel).unwrap();
        match evolve(&c, init, Exec::Parallel, |_| Ok(())) {
            Err(Error::ConstraintBreach { name, step, .. }) => {
                assert_eq!(name, "lorenz");
                assert!(step >= 1);
            }
            other => panic!("{other:?}"),
        }
    }
}
