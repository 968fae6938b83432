use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate frame at {point:?}: {reason}")]
    Degenerate { point: [f64; 4], reason: &'static str },
    #[error("grid of {n} cells per axis is too small for a stencil of half-width 2")]
    HaloUnderflow { n: usize },
    #[error("incompatible grids")]
    GridMismatch,
    #[error("periodic source has nonzero mean {mean:e}; use the analytic Coulomb path for charged data")]
    NonzeroMean { mean: f64 },
    #[error("periodic data carries charge {q0:e}; only neutral data are supported on a torus")]
    NonzeroCharge { q0: f64 },
    #[error("{0} is not supported")]
    Unsupported(String),
    #[error("surface needs history on t in [{need_lo}, {need_hi}] but snapshots cover [{have_lo}, {have_hi}]")]
    OutOfHistory {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },
    #[error("snapshot cadence too coarse: {0}")]
    Cadence(String),
    #[error("time step {dt} exceeds the stability bound {max}")]
    Cfl { dt: f64, max: f64 },
    #[error("non-finite value in {field} at step {step}")]
    NonFinite { field: String, step: usize },
    #[error("{name} residual {value:e} exceeds ceiling {ceiling:e} at step {step}")]
    ConstraintBreach {
        name: String,
        value: f64,
        ceiling: f64,
        step: usize,
    },
    #[error("boundary reflection detected: {0}")]
    Reflection(String),
    #[error("config: {0}")]
    Config(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("impossible state: {0}")]
    Impossible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
