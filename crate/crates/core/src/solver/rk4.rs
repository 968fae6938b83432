//! Classical fourth-order Runge–Kutta over vector-space states.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::exec::Exec;

const CHUNK: usize = 8192;

pub trait OdeState: Clone + Send + Sync {
    /// `self += a · x`.
    fn axpy(&mut self, a: f64, x: &Self, exec: Exec);
}

pub(crate) fn axpy_real(y: &mut [f64], a: f64, x: &[f64], exec: Exec) {
    exec.for_chunks(y, CHUNK, |ci, c| {
        let off = ci * CHUNK;
        c.iter_mut().zip(&x[off..]).for_each(|(v, w)| *v += a * w);
    });
}

pub(crate) fn axpy_complex(y: &mut [C64], a: f64, x: &[C64], exec: Exec) {
    exec.for_chunks(y, CHUNK, |ci, c| {
        let off = ci * CHUNK;
        c.iter_mut().zip(&x[off..]).for_each(|(v, w)| *v += w * a);
    });
}

/// Advances `y` by one step of an autonomous system `y' = f(y)`.
pub fn rk4_step<S: OdeState>(y: &mut S, dt: f64, exec: Exec, f: impl Fn(&S) -> Result<S>) -> Result<()> {
    let k1 = f(y)?;
    let mut tmp = y.clone();
    tmp.axpy(0.5 * dt, &k1, exec);
    let k2 = f(&tmp)?;
    let mut acc = k1;
    acc.axpy(2.0, &k2, exec);
    tmp.clone_from(y);
    tmp.axpy(0.5 * dt, &k2, exec);
    let k3 = f(&tmp)?;
    acc.axpy(2.0, &k3, exec);
    tmp.clone_from(y);
    tmp.axpy(dt, &k3, exec);
    let k4 = f(&tmp)?;
    acc.axpy(1.0, &k4, exec);
    y.axpy(dt / 6.0, &acc, exec);
    Ok(())
}
