//! Interpolation of a streamed history at arbitrary spacetime points.
//!
//! Snapshots arrive in time order and only the last four are kept. Each
//! query is answered once its time falls inside the span the ring can
//! serve: cubic Lagrange in `t` across the four levels, quartic Lagrange in
//! each spatial axis on the five nearest nodes. Spatial first and second
//! derivatives come from differentiating the same quartic.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;

use crate::algebra::{form_from_eb, TwoForm};
use crate::energies::stress::PointFields;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fields::snapshot::FieldSnapshot;
use crate::geometry::Point4;
use crate::grid::{Boundary, GridSpec};

const LEVELS: usize = 4;
const TIME_TOL: f64 = 1e-9;

/// Which fields a sampler reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// `φ`, `π = D_0 φ`, `A_mu`, `E`, `B` (14 real components).
    Scalar,
    /// `E`, `B` only.
    Form,
}

impl Channel {
    pub fn width(&self) -> usize {
        match self {
            Channel::Scalar => 14,
            Channel::Form => 6,
        }
    }

    fn extract(&self, s: &FieldSnapshot) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.width());
        if *self == Channel::Scalar {
            if s.scalar.phi.is_empty() || s.gauge.a[0].is_empty() {
                return Err(Error::Format(format!("snapshot at t = {} carries no scalar field", s.t)));
            }
            out.push(s.scalar.phi.iter().map(|v| v.re).collect());
            out.push(s.scalar.phi.iter().map(|v| v.im).collect());
            out.push(s.scalar.pi.iter().map(|v| v.re).collect());
            out.push(s.scalar.pi.iter().map(|v| v.im).collect());
            out.extend(s.gauge.a.iter().cloned());
        }
        out.extend(s.form.e.iter().cloned());
        out.extend(s.form.b.iter().cloned());
        let n = s.grid.len();
        if out.iter().any(|v| v.len() != n) {
            return Err(Error::Format(format!("snapshot at t = {} has arrays of the wrong length", s.t)));
        }
        Ok(out)
    }
}

/// Value, gradient and Hessian of one real component at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpatialJet {
    pub v: f64,
    pub d: [f64; 3],
    pub dd: [[f64; 3]; 3],
}

impl SpatialJet {
    fn axpy(&mut self, a: f64, x: &SpatialJet) {
        self.v += a * x.v;
        for i in 0..3 {
            self.d[i] += a * x.d[i];
            for j in 0..3 {
                self.dd[i][j] += a * x.dd[i][j];
            }
        }
    }
}

/// Interpolated fields at one point, components in [`Channel`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub p: Point4,
    pub channel: Channel,
    pub comps: Vec<SpatialJet>,
}

impl Sample {
    fn eb_offset(&self) -> usize {
        self.channel.width() - 6
    }

    /// Spatial jets of `E` and `B`.
    pub fn eb(&self) -> ([SpatialJet; 3], [SpatialJet; 3]) {
        let o = self.eb_offset();
        (
            std::array::from_fn(|i| self.comps[o + i]),
            std::array::from_fn(|i| self.comps[o + 3 + i]),
        )
    }

    pub fn form(&self) -> TwoForm {
        let (e, b) = self.eb();
        form_from_eb(e.map(|j| j.v), b.map(|j| j.v))
    }

    /// `φ`, `D_mu φ` and `F`; the scalar part is zero on the form channel.
    /// Needs first spatial derivatives.
    pub fn point_fields(&self) -> PointFields {
        let g = self.form();
        if self.channel == Channel::Form {
            return PointFields::form(g);
        }
        let c = &self.comps;
        let phi = C64::new(c[0].v, c[1].v);
        let pi = C64::new(c[2].v, c[3].v);
        let mut df = [pi; 4];
        for i in 0..3 {
            let grad = C64::new(c[0].d[i], c[1].d[i]);
            df[i + 1] = grad + C64::new(0.0, c[5 + i].v) * phi;
        }
        PointFields { f: phi, df, g }
    }
}

/// Lagrange weights on `nodes` at `x` for the value and its first two
/// derivatives.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> [Vec<f64>; 3] {
    let n = nodes.len();
    let mut w = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for j in 0..n {
        // Monomial coefficients of ℓ_j around x: ℓ_j(x + h) = Σ c_k h^k.
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        for (m, &xm) in nodes.iter().enumerate() {
            if m == j {
                continue;
            }
            let s = 1.0 / (nodes[j] - xm);
            let a = (x - xm) * s;
            for k in (0..n).rev() {
                let lower = if k > 0 { c[k - 1] * s } else { 0.0 };
                c[k] = c[k] * a + lower;
            }
        }
        w[0][j] = c[0];
        w[1][j] = if n > 1 { c[1] } else { 0.0 };
        w[2][j] = if n > 2 { 2.0 * c[2] } else { 0.0 };
    }
    w
}

/// Quartic interpolation stencil along one axis: node indices and weights
/// already scaled by the spacing.
fn axis_stencil(g: &GridSpec, x: f64) -> Option<([usize; 5], [[f64; 5]; 3])> {
    let s = (x + g.half_width()) / g.dx;
    let i0 = s.round();
    let delta = s - i0;
    let i0 = i0 as i64;
    let n = g.n as i64;
    let mut idx = [0usize; 5];
    for (o, slot) in idx.iter_mut().enumerate() {
        let i = i0 + o as i64 - 2;
        *slot = match g.boundary {
            Boundary::Periodic => i.rem_euclid(n) as usize,
            Boundary::Outflow if (0..n).contains(&i) => i as usize,
            Boundary::Outflow => return None,
        };
    }
    let w = lagrange_weights(&[-2.0, -1.0, 0.0, 1.0, 2.0], delta);
    let scale = [1.0, 1.0 / g.dx, 1.0 / (g.dx * g.dx)];
    let out = std::array::from_fn(|d| std::array::from_fn(|k| w[d][k] * scale[d]));
    Some((idx, out))
}

/// Spatial jets of several arrays at one point, up to derivative `order`.
pub fn interpolate(g: &GridSpec, arrays: &[Vec<f64>], x: [f64; 3], order: usize) -> Result<Vec<SpatialJet>> {
    let outside = || Error::Config(format!("point {x:?} lies outside the grid"));
    let (ia, wa) = axis_stencil(g, x[0]).ok_or_else(outside)?;
    let (ib, wb) = axis_stencil(g, x[1]).ok_or_else(outside)?;
    let (ic, wc) = axis_stencil(g, x[2]).ok_or_else(outside)?;
    // (dx, dy, dz) derivative counts for each requested output.
    let mut terms: Vec<[usize; 3]> = vec![[0, 0, 0]];
    if order >= 1 {
        terms.extend([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    }
    if order >= 2 {
        terms.extend([[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]]);
    }
    let mut out = vec![SpatialJet::default(); arrays.len()];
    let mut acc = vec![0.0; terms.len()];
    for (f, jet) in arrays.iter().zip(out.iter_mut()) {
        acc.iter_mut().for_each(|v| *v = 0.0);
        for a in 0..5 {
            for b in 0..5 {
                let row = g.index(ia[a], ib[b], 0);
                for c in 0..5 {
                    let v = f[row + ic[c]];
                    for (slot, d) in terms.iter().enumerate() {
                        acc[slot] += wa[d[0]][a] * wb[d[1]][b] * wc[d[2]][c] * v;
                    }
                }
            }
        }
        jet.v = acc[0];
        if order >= 1 {
            jet.d = [acc[1], acc[2], acc[3]];
        }
        if order >= 2 {
            jet.dd = [[acc[4], acc[7], acc[8]], [acc[7], acc[5], acc[9]], [acc[8], acc[9], acc[6]]];
        }
    }
    Ok(out)
}

struct Level {
    t: f64,
    grid: GridSpec,
    arrays: Vec<Vec<f64>>,
}

/// Streaming sampler over a time-ordered sequence of snapshots.
pub struct StreamSampler {
    channel: Channel,
    order: usize,
    points: Vec<Point4>,
    by_time: Vec<usize>,
    next: usize,
    ring: VecDeque<Level>,
    first_t: Option<f64>,
    out: Vec<Option<Sample>>,
    exec: Exec,
}

impl StreamSampler {
    /// `order` is the highest spatial derivative needed (0, 1 or 2).
    pub fn new(channel: Channel, order: usize, points: Vec<Point4>, exec: Exec) -> Self {
        let mut by_time: Vec<usize> = (0..points.len()).collect();
        by_time.sort_by(|&a, &b| points[a].t.total_cmp(&points[b].t));
        let out = vec![None; points.len()];
        StreamSampler {
            channel,
            order: order.min(2),
            points,
            by_time,
            next: 0,
            ring: VecDeque::with_capacity(LEVELS + 1),
            first_t: None,
            out,
            exec,
        }
    }

    /// Earliest and latest query times.
    pub fn time_range(&self) -> Option<(f64, f64)> {
        let first = self.by_time.first()?;
        let last = self.by_time.last()?;
        Some((self.points[*first].t, self.points[*last].t))
    }

    /// Whether every query has been answered.
    pub fn is_done(&self) -> bool {
        self.next == self.by_time.len()
    }

    pub fn push(&mut self, snap: &FieldSnapshot) -> Result<()> {
        if let Some(last) = self.ring.back() {
            if snap.t <= last.t {
                return Err(Error::Cadence(format!("snapshot times must increase ({} after {})", snap.t, last.t)));
            }
            if snap.grid != last.grid {
                return Err(Error::GridMismatch);
            }
        }
        if self.first_t.is_none() {
            self.first_t = Some(snap.t);
            if let Some((lo, hi)) = self.time_range() {
                if lo < snap.t - TIME_TOL {
                    return Err(self.out_of_history(lo, hi, snap.t, snap.t));
                }
            }
        }
        self.ring.push_back(Level {
            t: snap.t,
            grid: snap.grid,
            arrays: self.channel.extract(snap)?,
        });
        if self.ring.len() > LEVELS {
            self.ring.pop_front();
        }
        if self.ring.len() == LEVELS {
            let limit = self.ring[2].t;
            self.answer_until(limit)?;
        }
        Ok(())
    }

    /// Answers what the last levels can serve and returns the samples in
    /// query order.
    pub fn finish(mut self) -> Result<Vec<Sample>> {
        if !self.is_done() {
            if self.ring.len() < LEVELS {
                return Err(Error::Cadence(format!(
                    "interpolation needs at least {LEVELS} snapshots, got {}",
                    self.ring.len()
                )));
            }
            let limit = self.ring[LEVELS - 1].t + TIME_TOL;
            self.answer_until(limit)?;
        }
        if !self.is_done() {
            let (_, hi) = self.time_range().unwrap_or_default();
            let lo = self.points[self.by_time[self.next]].t;
            let have_hi = self.ring.back().map_or(f64::NAN, |l| l.t);
            return Err(self.out_of_history(lo, hi, self.first_t.unwrap_or(f64::NAN), have_hi));
        }
        Ok(self.out.into_iter().map(|s| s.expect("every query answered")).collect())
    }

    fn out_of_history(&self, need_lo: f64, need_hi: f64, have_lo: f64, have_hi: f64) -> Error {
        Error::OutOfHistory { need_lo, need_hi, have_lo, have_hi }
    }

    fn answer_until(&mut self, limit: f64) -> Result<()> {
        let start = self.next;
        let mut end = start;
        while end < self.by_time.len() && self.points[self.by_time[end]].t <= limit {
            end += 1;
        }
        if end == start {
            return Ok(());
        }
        let ring: Vec<&Level> = self.ring.iter().collect();
        let times: Vec<f64> = ring.iter().map(|l| l.t).collect();
        let (channel, order) = (self.channel, self.order);
        let ids = &self.by_time[start..end];
        let points = &self.points;
        let answers: Vec<Result<Sample>> = self.exec.map(ids.len(), |k| {
            let p = points[ids[k]];
            let w = lagrange_weights(&times, p.t.clamp(times[0], times[LEVELS - 1]));
            let mut comps = vec![SpatialJet::default(); channel.width()];
            for (lvl, wt) in ring.iter().zip(&w[0]) {
                let jets = interpolate(&lvl.grid, &lvl.arrays, p.x, order)?;
                for (acc, j) in comps.iter_mut().zip(&jets) {
                    acc.axpy(*wt, j);
                }
            }
            Ok(Sample { p, channel, comps })
        });
        for (k, s) in answers.into_iter().enumerate() {
            self.out[ids[k]] = Some(s?);
        }
        self.next = end;
        Ok(())
    }
}

/// Samples an in-memory sequence of snapshots.
pub fn sample_history<'a>(
    snapshots: impl IntoIterator<Item = &'a FieldSnapshot>,
    channel: Channel,
    order: usize,
    points: Vec<Point4>,
    exec: Exec,
) -> Result<Vec<Sample>> {
    let mut s = StreamSampler::new(channel, order, points, exec);
    for snap in snapshots {
        s.push(snap)?;
    }
    s.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::state::{FormTag, GaugeState, ScalarState, TwoFormField};
    use crate::grid;

    fn form_snapshot(g: GridSpec, t: f64, f: impl Fn([f64; 3], f64) -> [f64; 6] + Sync + Send) -> FieldSnapshot {
        let vals: Vec<[f64; 6]> = grid::sample(&g, Exec::Sequential, |x| f(x, t));
        let col = |c: usize| vals.iter().map(|v| v[c]).collect::<Vec<f64>>();
        FieldSnapshot {
            grid: g,
            t,
            scalar: ScalarState::zeros(0),
            gauge: GaugeState::zeros(0),
            form: TwoFormField {
                e: [col(0), col(1), col(2)],
                b: [col(3), col(4), col(5)],
                tag: FormTag::Linear,
            },
        }
    }

    fn gaussian(x: [f64; 3], t: f64) -> f64 {
        let r2 = (x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2) + x[2] * x[2];
        (-r2 / 1.5).exp() * (1.0 + 0.2 * t)
    }

    #[test]
    fn lagrange_weights_reproduce_cubics() {
        let nodes = [0.0, 0.7, 1.1, 2.0];
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let w = lagrange_weights(&nodes, 1.3);
        let v = |k: usize| nodes.iter().zip(&w[k]).map(|(x, w)| w * f(*x)).sum::<f64>();
        assert!((v(0) - f(1.3)).abs() < 1e-13);
        assert!((v(1) - (-2.0 + 1.5 * 1.69)).abs() < 1e-12);
        assert!((v(2) - 3.0 * 1.3).abs() < 1e-11);
    }

    #[test]
    fn constant_field_is_exact() {
        let g = GridSpec::periodic(10, 0.5);
        let snaps: Vec<_> = (0..5).map(|k| form_snapshot(g, 2.0 + 0.1 * k as f64, |_, _| [1.5, 0.0, -2.0, 0.0, 3.0, 0.0])).collect();
        let pts = vec![Point4::new(2.25, [0.13, -1.7, 2.2]), Point4::new(2.0, [0.0; 3])];
        let s = sample_history(&snaps, Channel::Form, 2, pts, Exec::Sequential).unwrap();
        for smp in &s {
            let (e, b) = smp.eb();
            assert!((e[0].v - 1.5).abs() < 1e-14 && (e[2].v + 2.0).abs() < 1e-14 && (b[1].v - 3.0).abs() < 1e-14);
            assert!(e[0].d.iter().chain(e[0].dd.iter().flatten()).all(|v| v.abs() < 1e-12));
        }
    }

    fn max_error(n: usize, dx: f64) -> [f64; 3] {
        let g = GridSpec::periodic(n, dx);
        let dt = 0.5 * dx;
        let snaps: Vec<_> = (0..6)
            .map(|k| form_snapshot(g, 2.0 + dt * k as f64, |x, t| [gaussian(x, t), 0.0, 0.0, 0.0, 0.0, 0.0]))
            .collect();
        let pts: Vec<Point4> = (0..40)
            .map(|i| {
                let s = i as f64 / 40.0;
                Point4::new(2.0 + 4.0 * dt * s, [1.1 * s - 0.4, 0.77 - s, 0.35 * s])
            })
            .collect();
        let out = sample_history(&snaps, Channel::Form, 2, pts, Exec::Sequential).unwrap();
        let h = 1e-4;
        let mut err = [0.0f64; 3];
        for s in &out {
            let j = s.comps[0];
            let x = s.p.x;
            let f = |dx: [f64; 3]| gaussian([x[0] + dx[0], x[1] + dx[1], x[2] + dx[2]], s.p.t);
            err[0] = err[0].max((j.v - f([0.0; 3])).abs());
            let d0 = (f([h, 0.0, 0.0]) - f([-h, 0.0, 0.0])) / (2.0 * h);
            err[1] = err[1].max((j.d[0] - d0).abs());
            let d01 = (f([h, h, 0.0]) - f([h, -h, 0.0]) - f([-h, h, 0.0]) + f([-h, -h, 0.0])) / (4.0 * h * h);
            err[2] = err[2].max((j.dd[0][1] - d01).abs());
        }
        err
    }

    #[test]
    fn gaussian_error_falls_with_resolution() {
        let a = max_error(24, 0.4);
        let b = max_error(48, 0.2);
        // Values converge at fourth order or better (time interpolation is
        // exact here since the field is linear in t).
        assert!((a[0] / b[0]).log2() > 3.5, "{a:?} {b:?}");
        assert!((a[1] / b[1]).log2() > 3.5, "{a:?} {b:?}");
        assert!((a[2] / b[2]).log2() > 2.5, "{a:?} {b:?}");
        assert!(b[0] < 2e-4, "{b:?}");
    }

    #[test]
    fn queries_outside_history_fail() {
        let g = GridSpec::periodic(8, 0.5);
        let snaps: Vec<_> = (0..4).map(|k| form_snapshot(g, 2.0 + 0.25 * k as f64, |_, _| [0.0; 6])).collect();
        let late = vec![Point4::new(3.5, [0.0; 3])];
        let err = sample_history(&snaps, Channel::Form, 0, late, Exec::Sequential).unwrap_err();
        assert!(matches!(err, Error::OutOfHistory { .. }), "{err}");
        let early = vec![Point4::new(1.5, [0.0; 3])];
        let err = sample_history(&snaps, Channel::Form, 0, early, Exec::Sequential).unwrap_err();
        assert!(matches!(err, Error::OutOfHistory { .. }), "{err}");
        let few = vec![Point4::new(2.1, [0.0; 3])];
        let err = sample_history(&snaps[..3], Channel::Form, 0, few, Exec::Sequential).unwrap_err();
        assert!(matches!(err, Error::Cadence(_)), "{err}");
    }

    #[test]
    fn scalar_channel_builds_covariant_derivatives() {
        let g = GridSpec::periodic(12, 0.5);
        let n = g.len();
        let snaps: Vec<FieldSnapshot> = (0..4)
            .map(|k| {
                let phi = grid::sample(&g, Exec::Sequential, |x| C64::new(x[0], 2.0));
                let mut gauge = GaugeState::zeros(n);
                gauge.a[1] = vec![0.5; n];
                FieldSnapshot {
                    grid: g,
                    t: 2.0 + 0.2 * k as f64,
                    scalar: ScalarState { phi, pi: vec![C64::new(0.0, 1.0); n] },
                    gauge,
                    form: TwoFormField::zeros(n, FormTag::Full),
                }
            })
            .collect();
        let s = sample_history(&snaps, Channel::Scalar, 1, vec![Point4::new(2.3, [0.4, 0.1, -0.2])], Exec::Sequential).unwrap();
        let pf = s[0].point_fields();
        assert!((pf.f - C64::new(0.4, 2.0)).norm() < 1e-13);
        assert!((pf.df[0] - C64::new(0.0, 1.0)).norm() < 1e-13);
        assert!((pf.df[1] - C64::new(1.0, 0.0) - C64::new(0.0, 0.5) * pf.f).norm() < 1e-12);
    }
}
