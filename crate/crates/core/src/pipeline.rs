//! End-to-end stages behind the command line: data construction,
//! evolution into an on-disk history, diagnostics over that history and
//! batch fitting of decay files.
//!
//! A history directory holds either numbered grid snapshots with an
//! `index.csv` of their times, or a single `radial.csv` from the radial
//! engine.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decaylab::phat::{phat_density, phat_on_surface};
use crate::decaylab::report::{write_csv, write_decay, write_fits, write_sobolev, read_decay};
use crate::decaylab::sampler::{Channel, Sample, StreamSampler};
use crate::decaylab::sobolev::{empirical_constants, EmpiricalConstant, TestField};
use crate::decaylab::supnorms::{weighted_supnorms, Family, Weights};
use crate::decaylab::DecaySeries;
use crate::energies::stress::{stress_energy, Multiplier, PointFields};
use crate::energies::surfaces::{coulomb_shell_energy, energy_density, integrate, surface_energy, surface_label, EnergyReport};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fields::components::null_decompose;
use crate::fields::norms::{weighted_data_norms, InitialData, Weight};
use crate::fields::snapshot::FieldSnapshot;
use crate::fields::split::coulomb_form;
use crate::geometry::{surface_mesh, MeshSpec, Point4, RegionSpec, SlicePart, SurfaceNode, T0};
use crate::grid::{self, Boundary};
use crate::quadrature::{self, Rule};
use crate::solver::config::{Engine, SimConfig};
use crate::solver::data::{make_initial_data, raw_data, smeared_coulomb, DataRecipe, InitialState};
use crate::solver::monitor::ConstraintReport;
use crate::solver::radial::{radial_evolve, sliding_max};
use crate::solver::{evolve, RunSummary};

pub const HISTORY_DIR: &str = "history";
pub const INDEX_FILE: &str = "index.csv";
pub const RADIAL_FILE: &str = "radial.csv";

pub const INDEX_HEADER: [&str; 3] = ["index", "t", "file"];
pub const RADIAL_HEADER: [&str; 5] = ["t", "phi_re", "phi_im", "abs_phi", "interior_max"];
pub const CONSTRAINT_HEADER: [&str; 10] =
    ["step", "t", "gauss_l2", "gauss_max", "lorenz_l2", "lorenz_max", "bianchi_l2", "bianchi_max", "charge", "charge_drift"];
pub const ENERGY_HEADER: [&str; 8] = ["surface", "multiplier", "class", "k", "tau_or_u", "value", "quad_nodes", "dx"];
pub const PHAT_HEADER: [&str; 3] = ["tau", "k", "value"];
pub const DATA_NORMS_HEADER: [&str; 5] = ["weight", "k", "gamma0", "m_norm", "e_norm"];
pub const COULOMB_HEADER: [&str; 4] = ["check_id", "value", "reference", "error"];
pub const SOBOLEV_CONSTANTS_HEADER: [&str; 4] = ["ineq_id", "c_coarse", "c_fine", "variation"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub index: usize,
    pub t: f64,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialRow {
    pub t: f64,
    pub phi_re: f64,
    pub phi_im: f64,
    pub abs_phi: f64,
    pub interior_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct ConstraintRow {
    step: usize,
    t: f64,
    gauss_l2: f64,
    gauss_max: f64,
    lorenz_l2: f64,
    lorenz_max: f64,
    bianchi_l2: f64,
    bianchi_max: f64,
    charge: f64,
    charge_drift: f64,
}

impl From<&ConstraintReport> for ConstraintRow {
    fn from(r: &ConstraintReport) -> Self {
        ConstraintRow {
            step: r.step,
            t: r.t,
            gauss_l2: r.gauss.l2,
            gauss_max: r.gauss.max,
            lorenz_l2: r.lorenz.l2,
            lorenz_max: r.lorenz.max,
            bianchi_l2: r.bianchi.l2,
            bianchi_max: r.bianchi.max,
            charge: r.charge,
            charge_drift: r.charge_drift,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub surface: String,
    pub multiplier: String,
    pub class: String,
    pub k: usize,
    pub tau_or_u: f64,
    pub value: f64,
    pub quad_nodes: usize,
    pub dx: Option<f64>,
}

impl From<&EnergyReport> for EnergyRow {
    fn from(r: &EnergyReport) -> Self {
        EnergyRow {
            surface: r.surface.clone(),
            multiplier: r.multiplier.name().into(),
            class: r.class.map(|c| c.name().to_string()).unwrap_or_default(),
            k: r.k,
            tau_or_u: r.tau_or_u,
            value: r.value,
            quad_nodes: r.quad_nodes,
            dx: r.dx,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhatRow {
    pub tau: f64,
    pub k: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoulombRow {
    pub check_id: String,
    pub value: f64,
    pub reference: f64,
    /// Absolute error for quantities that vanish, relative otherwise.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct DataNormRow {
    weight: &'static str,
    k: usize,
    gamma0: f64,
    m_norm: f64,
    e_norm: f64,
}

/// Files written by a stage, plus remarks worth showing the user.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StageOutput {
    pub artifacts: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl StageOutput {
    fn wrote(&mut self, p: PathBuf) {
        self.artifacts.push(p);
    }
}

pub fn history_dir(out: &Path) -> PathBuf {
    out.join(HISTORY_DIR)
}

fn snapshot_name(k: usize) -> String {
    format!("snap-{k:06}.bin")
}

/// Initial data on disk: the starting snapshot and its weighted norms.
pub fn make_data(cfg: &SimConfig, out: &Path, exec: Exec) -> Result<StageOutput> {
    if cfg.run.engine == Engine::Radial {
        return Err(Error::Unsupported("the radial engine builds its data during evolve".into()));
    }
    std::fs::create_dir_all(out)?;
    let mut res = StageOutput::default();
    let g = cfg.grid;
    let raw = raw_data(&cfg.data, &g, exec)?;
    let h = grid::curl(&g, [&raw.v[0], &raw.v[1], &raw.v[2]], exec);
    let data = InitialData {
        phi0: &raw.phi0,
        phi1: &raw.phi1,
        a: [&raw.v[0], &raw.v[1], &raw.v[2]],
        edf: [&raw.edf[0], &raw.edf[1], &raw.edf[2]],
        h: [&h[0], &h[1], &h[2]],
    };
    let rows = [(Weight::Radial, "radial"), (Weight::Unit, "unit")]
        .into_iter()
        .map(|(w, name)| {
            let (m, e) = weighted_data_norms(&g, &data, &cfg.norms, w, exec)?;
            Ok(DataNormRow { weight: name, k: cfg.norms.k, gamma0: cfg.norms.gamma0, m_norm: m, e_norm: e })
        })
        .collect::<Result<Vec<_>>>()?;
    let norms = out.join("data_norms.csv");
    write_csv(&norms, &DATA_NORMS_HEADER, &rows)?;
    res.wrote(norms);
    if matches!(cfg.data, DataRecipe::CoulombAnalytic { .. }) {
        res.notes.push("coulomb-analytic data is evaluated in closed form; no snapshot written".into());
        return Ok(res);
    }
    let snap = match make_initial_data(cfg, exec)? {
        InitialState::Mmkg(s) => s.snapshot(&g, exec),
        InitialState::Maxwell(s) => s.snapshot(&g),
    };
    let path = out.join("initial.bin");
    snap.save(&path)?;
    res.wrote(path);
    Ok(res)
}

/// Evolves the configured engine, writing the history and the per-step
/// constraint residuals. A ceiling breach aborts with the breach error
/// after the residuals seen so far are on disk.
pub fn run_evolve(cfg: &SimConfig, out: &Path, exec: Exec) -> Result<StageOutput> {
    let hist = history_dir(out);
    std::fs::create_dir_all(&hist)?;
    let mut res = StageOutput::default();
    if cfg.run.engine == Engine::Radial {
        let rc = cfg.radial.ok_or_else(|| Error::Config("engine radial needs a [radial] section".into()))?;
        let h = radial_evolve(rc, cfg.run.mass, &cfg.data, cfg.time.cfl, cfg.time.t_end, cfg.time.snap_every)?;
        let rows: Vec<RadialRow> = (0..h.t.len())
            .map(|i| RadialRow {
                t: h.t[i],
                phi_re: h.phi[i].re,
                phi_im: h.phi[i].im,
                abs_phi: h.phi[i].norm(),
                interior_max: h.interior_max[i],
            })
            .collect();
        let p = hist.join(RADIAL_FILE);
        write_csv(&p, &RADIAL_HEADER, &rows)?;
        res.wrote(p);
        return Ok(res);
    }
    if cfg.grid.boundary != Boundary::Periodic {
        return Err(Error::Unsupported(format!("evolving {} data on a non-periodic box", cfg.data.id())));
    }
    let init = make_initial_data(cfg, exec)?;
    let mut index = Vec::new();
    let write = cfg.run.write_snapshots;
    let outcome = evolve(cfg, init, exec, |s| {
        if write {
            let name = snapshot_name(index.len());
            s.save(&hist.join(&name))?;
            index.push(IndexRow { index: index.len(), t: s.t, file: name });
        }
        Ok(())
    });
    let summary = match outcome {
        Ok(s) => s,
        Err(e) => {
            write_csv(&hist.join(INDEX_FILE), &INDEX_HEADER, &index)?;
            return Err(e);
        }
    };
    let ip = hist.join(INDEX_FILE);
    write_csv(&ip, &INDEX_HEADER, &index)?;
    res.artifacts.extend(index.iter().map(|r| hist.join(&r.file)));
    res.wrote(ip);
    res.wrote(write_constraints(out, &summary)?);
    Ok(res)
}

fn write_constraints(out: &Path, s: &RunSummary) -> Result<PathBuf> {
    let p = out.join("constraints.csv");
    let rows: Vec<ConstraintRow> = s.reports.iter().map(ConstraintRow::from).collect();
    write_csv(&p, &CONSTRAINT_HEADER, &rows)?;
    Ok(p)
}

pub fn read_index(history: &Path) -> Result<Vec<IndexRow>> {
    let p = history.join(INDEX_FILE);
    if !p.exists() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no snapshot index at {}", p.display()),
        )));
    }
    let mut r = csv::Reader::from_path(&p)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<IndexRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} lists no snapshots", p.display()),
        )));
    }
    Ok(rows)
}

pub fn read_radial(history: &Path) -> Result<Vec<RadialRow>> {
    let mut r = csv::Reader::from_path(history.join(RADIAL_FILE))?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<RadialRow>, _>>()?)
}

fn mesh_of(cfg: &SimConfig, scale: usize) -> MeshSpec {
    let m = cfg.diagnose.mesh;
    MeshSpec::new(m[0] * scale, m[1] * scale, m[2] * scale, Rule::GaussLegendre)
}

fn weights_of(cfg: &SimConfig) -> Weights {
    let q0 = match cfg.data {
        DataRecipe::CoulombAnalytic { q0, .. } => q0,
        _ => 0.0,
    };
    Weights { eps: cfg.norms.epsilon, gamma0: cfg.norms.gamma0, q0 }
}

fn fit_window(cfg: &SimConfig) -> Option<(f64, f64)> {
    cfg.diagnose.fit_window.map(|[a, b]| (a, b))
}

/// Fits every series that admits a fit; the others are noted.
fn fit_all(series: &mut [DecaySeries], window: Option<(f64, f64)>, notes: &mut Vec<String>) {
    for s in series {
        if let Err(e) = s.fit(window) {
            notes.push(format!("series {} not fitted: {e}", s.id));
        }
    }
}

/// Everything `diagnose` writes, kept in memory for callers that want the
/// numbers rather than the files.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub energies: Vec<EnergyRow>,
    pub phat: Vec<PhatRow>,
    pub series: Vec<DecaySeries>,
    pub sobolev: Vec<crate::decaylab::sobolev::SobolevCheck>,
    pub constants: Vec<EmpiricalConstant>,
    pub coulomb: Vec<CoulombRow>,
    pub notes: Vec<String>,
}

/// Diagnostics for the configured run. Grid histories are streamed one
/// snapshot at a time; the Coulomb recipe needs no history.
pub fn compute_diagnostics(cfg: &SimConfig, history: &Path, exec: Exec) -> Result<Diagnostics> {
    let mut d = Diagnostics::default();
    if let DataRecipe::CoulombAnalytic { q0, core } = cfg.data {
        coulomb_diagnostics(cfg, q0, core, &mut d, exec)?;
    } else if cfg.run.engine == Engine::Radial {
        radial_diagnostics(cfg, history, &mut d)?;
    } else {
        grid_diagnostics(cfg, history, &mut d, exec)?;
    }
    if cfg.diagnose.sobolev_fields > 0 {
        let tau = cfg.diagnose.sobolev_tau;
        let fields: Vec<TestField> = (0..cfg.diagnose.sobolev_fields as u64)
            .map(|s| TestField::random(cfg.identities.seed.wrapping_add(s), tau))
            .collect();
        let (checks, consts) = empirical_constants(&fields, tau, [mesh_of(cfg, 1), mesh_of(cfg, 2)], exec)?;
        d.sobolev = checks;
        d.constants = consts;
    }
    Ok(d)
}

/// Writes the diagnostics; every file exists afterwards, possibly with a
/// header only.
pub fn write_diagnostics(d: &Diagnostics, out: &Path) -> Result<StageOutput> {
    std::fs::create_dir_all(out)?;
    let mut res = StageOutput { notes: d.notes.clone(), ..Default::default() };
    let p = out.join("energy.csv");
    write_csv(&p, &ENERGY_HEADER, &d.energies)?;
    res.wrote(p);
    let p = out.join("phat.csv");
    write_csv(&p, &PHAT_HEADER, &d.phat)?;
    res.wrote(p);
    let p = out.join("decay.csv");
    write_decay(&p, &d.series)?;
    res.wrote(p);
    let p = out.join("fits.csv");
    write_fits(&p, &d.series)?;
    res.wrote(p);
    let p = out.join("sobolev.csv");
    write_sobolev(&p, &d.sobolev)?;
    res.wrote(p);
    let p = out.join("sobolev_constants.csv");
    write_csv(&p, &SOBOLEV_CONSTANTS_HEADER, &d.constants)?;
    res.wrote(p);
    if !d.coulomb.is_empty() {
        let p = out.join("coulomb.csv");
        write_csv(&p, &COULOMB_HEADER, &d.coulomb)?;
        res.wrote(p);
    }
    Ok(res)
}

pub fn run_diagnose(cfg: &SimConfig, history: &Path, out: &Path, exec: Exec) -> Result<StageOutput> {
    let d = compute_diagnostics(cfg, history, exec)?;
    write_diagnostics(&d, out)
}

/// Upper envelope of `|φ(t, r_obs)|` over one oscillation period, fitted
/// against the time since the data, `t − t0`.
fn radial_diagnostics(cfg: &SimConfig, history: &Path, d: &mut Diagnostics) -> Result<()> {
    let rows = read_radial(history)?;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let v: Vec<f64> = rows.iter().map(|r| r.abs_phi).collect();
    let span = if cfg.run.mass > 0.0 { 2.0 * PI / cfg.run.mass } else { 1.0 };
    let (ts, vs) = sliding_max(&t, &v, span);
    let r_obs = cfg.radial.map_or(0.0, |r| r.r_obs);
    let mut s = DecaySeries::new("radial_abs_phi", &format!("|phi(t, r = {r_obs})| envelope against t - t0"));
    for (x, y) in ts.into_iter().zip(vs) {
        s.push(x - T0, y)?;
    }
    d.series.push(s);
    fit_all(&mut d.series, fit_window(cfg), &mut d.notes);
    Ok(())
}

struct Surface {
    x: f64,
    spec: RegionSpec,
    nodes: Vec<SurfaceNode>,
    start: usize,
}

fn grid_diagnostics(cfg: &SimConfig, history: &Path, d: &mut Diagnostics, exec: Exec) -> Result<()> {
    let dc = &cfg.diagnose;
    let mesh = mesh_of(cfg, 1);
    let g = cfg.grid;
    let r_hi = g.half_width() - 3.0 * g.dx;
    let specs: Vec<(f64, RegionSpec)> = dc
        .taus
        .iter()
        .map(|&tau| (tau, RegionSpec::Hyperboloid { tau }))
        .chain(dc.slices.iter().map(|&t| (t, RegionSpec::Slice { t, r_lo: 0.0, r_hi, part: SlicePart::Exterior })))
        .collect();
    if specs.is_empty() {
        d.notes.push("no surfaces requested".into());
        return Ok(());
    }
    let index = read_index(history)?;
    let (t_lo, t_hi) = (index[0].t, index[index.len() - 1].t);
    let mut surfaces = Vec::new();
    let mut points = Vec::new();
    for (x, spec) in specs {
        let nodes = surface_mesh(&spec, &mesh);
        let (lo, hi) = nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), n| (a.min(n.p.t), b.max(n.p.t)));
        let r_max = nodes.iter().fold(0.0f64, |m, n| m.max(n.p.r()));
        if nodes.is_empty() || lo < t_lo - 1e-9 || hi > t_hi + 1e-9 {
            d.notes.push(format!("{} skipped: needs t in [{lo:.3}, {hi:.3}], history covers [{t_lo:.3}, {t_hi:.3}]", surface_label(&spec)));
            continue;
        }
        if r_max > r_hi + 1e-9 {
            d.notes.push(format!("{} reaches r = {r_max:.2}, within three cells of the box edge", surface_label(&spec)));
        }
        let start = points.len();
        points.extend(nodes.iter().map(|n| n.p));
        surfaces.push(Surface { x, spec, nodes, start });
    }
    if surfaces.is_empty() {
        return Ok(());
    }
    let form_only = cfg.run.engine == Engine::LinearMaxwell;
    let channel = if form_only { Channel::Form } else { Channel::Scalar };
    let order = match (form_only, dc.k_max) {
        (true, 0) => 0,
        (true, _) => 2,
        (false, _) => 1,
    };
    let mut sampler = StreamSampler::new(channel, order, points, exec);
    for row in &index {
        if sampler.is_done() {
            break;
        }
        sampler.push(&FieldSnapshot::load(&history.join(&row.file), g.boundary)?)?;
    }
    let samples = sampler.finish()?;
    let w = weights_of(cfg);
    let mut hyper: Vec<(f64, Vec<(Point4, PointFields)>)> = Vec::new();
    let mut slices: Vec<(f64, Vec<(Point4, PointFields)>)> = Vec::new();
    for s in &surfaces {
        let smp: &[Sample] = &samples[s.start..s.start + s.nodes.len()];
        let pfs: Vec<(Point4, PointFields)> = smp.iter().map(|x| (x.p, x.point_fields())).collect();
        if let RegionSpec::Hyperboloid { tau } = s.spec {
            let multipliers: &[Multiplier] = if form_only { &[Multiplier::T0, Multiplier::S] } else { &[Multiplier::T0] };
            for &m in multipliers {
                let dens = pfs.iter().map(|(p, pf)| energy_density(&s.spec, m, pf, p)).collect::<Result<Vec<f64>>>()?;
                d.energies.push(EnergyRow {
                    surface: surface_label(&s.spec),
                    multiplier: m.name().into(),
                    class: String::new(),
                    k: 0,
                    tau_or_u: tau,
                    value: integrate(&s.nodes, &dens),
                    quad_nodes: s.nodes.len(),
                    dx: Some(g.dx),
                });
            }
            if form_only {
                let eps = cfg.norms.epsilon;
                let vals = if dc.k_max == 0 {
                    let dens = pfs.iter().map(|(p, pf)| phat_density(&pf.g, p, eps)).collect::<Result<Vec<f64>>>()?;
                    [integrate(&s.nodes, &dens), 0.0, 0.0]
                } else {
                    phat_on_surface(&s.nodes, smp, eps, exec)?
                };
                for (k, v) in vals.iter().enumerate().take(dc.k_max.min(2) + 1) {
                    d.phat.push(PhatRow { tau, k, value: *v });
                }
            }
            hyper.push((s.x, pfs));
        } else {
            slices.push((s.x, pfs));
        }
    }
    let families: &[Family] = match cfg.run.engine {
        Engine::LinearMaxwell => &[Family::Linear],
        Engine::Mmkg => &[Family::Scalar, Family::Form],
        _ => &[Family::Scalar],
    };
    if !hyper.is_empty() {
        for f in families {
            d.series.extend(weighted_supnorms(*f, &hyper, &w)?);
        }
    }
    if !slices.is_empty() {
        d.series.extend(weighted_supnorms(Family::Exterior, &slices, &w)?);
    }
    fit_all(&mut d.series, fit_window(cfg), &mut d.notes);
    Ok(())
}

fn rel_err(v: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        v.abs()
    } else {
        ((v - reference) / reference).abs()
    }
}

/// Closed-form checks of the Coulomb field: null components and energy
/// density pointwise, the charge from `div E` on the grid and from the
/// flux through a sphere, and the shell energy against its integral.
fn coulomb_diagnostics(cfg: &SimConfig, q0: f64, core: f64, d: &mut Diagnostics, exec: Exec) -> Result<()> {
    let mesh = mesh_of(cfg, 1);
    let times: Vec<f64> = if cfg.diagnose.slices.is_empty() { vec![T0] } else { cfg.diagnose.slices.clone() };
    let (a, b) = (1.0, 5.0);
    let mut rho = 0.0f64;
    let mut others = 0.0f64;
    let mut density = 0.0f64;
    for &t in &times {
        let spec = RegionSpec::Slice { t, r_lo: a, r_hi: b, part: SlicePart::Whole };
        for n in surface_mesh(&spec, &mesh) {
            let g = coulomb_form(q0, &n.p);
            let c = null_decompose(&g, &n.p)?;
            let r = n.p.r();
            rho = rho.max(rel_err(c.rho, q0 / (r * r)));
            others = others.max(c.alpha[0].abs().max(c.alpha[1].abs()).max(c.alphab[0].abs()).max(c.alphab[1].abs()).max(c.sigma.abs()));
            let t00 = stress_energy(&PointFields::form(g), &[1.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]);
            density = density.max(rel_err(t00, q0 * q0 / (2.0 * r.powi(4))));
        }
    }
    let row = |id: &str, value: f64, reference: f64, error: f64| CoulombRow { check_id: id.into(), value, reference, error };
    d.coulomb.push(row("rho-inverse-square", rho, 0.0, rho));
    d.coulomb.push(row("alpha-alphab-sigma-vanish", others, 0.0, others));
    d.coulomb.push(row("energy-density", density, 0.0, density));

    let flux: f64 = quadrature::sphere(Rule::GaussLegendre, mesh.n_theta, mesh.n_phi)
        .iter()
        .map(|(n, w)| {
            let e = smeared_coulomb(q0, core, &[b * n[0], b * n[1], b * n[2]]);
            w * b * b * (0..3).map(|i| e[i] * n[i]).sum::<f64>()
        })
        .sum();
    let q = flux / (4.0 * PI);
    d.coulomb.push(row("charge-from-flux", q, q0, rel_err(q, q0)));
    let g = cfg.grid;
    if g.boundary != Boundary::Periodic {
        let raw = raw_data(&cfg.data, &g, exec)?;
        let div = grid::divergence(&g, [&raw.edf[0], &raw.edf[1], &raw.edf[2]], exec);
        let q = exec.sum(g.len(), |i| div[i]) * g.cell_volume() / (4.0 * PI);
        d.coulomb.push(row("charge-from-div-e", q, q0, rel_err(q, q0)));
    } else {
        d.notes.push("charge from div E needs an outflow grid; skipped".into());
    }
    let shell = surface_energy(
        &RegionSpec::Slice { t: T0, r_lo: a, r_hi: b, part: SlicePart::Whole },
        Multiplier::T0,
        None,
        0,
        &mesh,
        |pts, _| Ok(pts.iter().map(|p| PointFields::form(coulomb_form(q0, p))).collect()),
    )?;
    let want = coulomb_shell_energy(q0, a, b);
    d.coulomb.push(row("shell-energy", shell.value, want, rel_err(shell.value, want)));
    d.energies.push(EnergyRow::from(&shell));

    let slice_specs: Vec<(f64, Vec<(Point4, PointFields)>)> = times
        .iter()
        .map(|&t| {
            let spec = RegionSpec::Slice { t, r_lo: 0.0, r_hi: t + 5.0, part: SlicePart::Exterior };
            let pts = surface_mesh(&spec, &mesh)
                .into_iter()
                .map(|n| (n.p, PointFields::form(coulomb_form(q0, &n.p))))
                .collect();
            (t, pts)
        })
        .collect();
    d.series.extend(weighted_supnorms(Family::Exterior, &slice_specs, &weights_of(cfg))?);
    Ok(())
}

/// Refits every series of a decay file with the configured window.
pub fn run_fit(cfg: &SimConfig, decay_csv: &Path, out: &Path) -> Result<StageOutput> {
    let mut series = read_decay(decay_csv)?;
    let window = fit_window(cfg);
    for s in &mut series {
        let id = s.id.clone();
        s.fit(window).map_err(|e| Error::Fit(format!("series {id}: {e}")))?;
    }
    std::fs::create_dir_all(out)?;
    let p = out.join("fits.csv");
    write_fits(&p, &series)?;
    Ok(StageOutput { artifacts: vec![p], notes: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maxwell(extra: &str) -> SimConfig {
        SimConfig::from_toml(&format!(
            r#"
[grid]
n = 16
dx = 0.5

[time]
cfl = 0.4
t_end = 2.6

[data]
recipe = "multipole-maxwell"
l = 1
width = 0.8
amplitude = 0.1

[run]
engine = "linear-maxwell"

[diagnose]
mesh = [6, 4, 6]
{extra}
"#
        ))
        .unwrap()
    }

    #[test]
    fn maxwell_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = maxwell("taus = [2.0]");
        let made = make_data(&cfg, dir.path(), Exec::Sequential).unwrap();
        assert!(made.artifacts.iter().all(|p| p.exists()));
        let ev = run_evolve(&cfg, dir.path(), Exec::Sequential).unwrap();
        let index = read_index(&history_dir(dir.path())).unwrap();
        assert!(index.last().unwrap().t >= 2.5);
        assert!(ev.artifacts.iter().all(|p| p.exists()));
        let d = compute_diagnostics(&cfg, &history_dir(dir.path()), Exec::Sequential).unwrap();
        assert_eq!(d.energies.len(), 2);
        assert!(d.energies.iter().all(|e| e.value > 0.0 && e.value.is_finite()));
        assert_eq!(d.phat.len(), 1);
        assert!(d.phat[0].value > 0.0);
        let out = write_diagnostics(&d, dir.path()).unwrap();
        for name in ["energy.csv", "phat.csv", "decay.csv", "fits.csv", "sobolev.csv"] {
            assert!(out.artifacts.contains(&dir.path().join(name)), "{name}");
        }
    }

    #[test]
    fn surfaces_beyond_the_history_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = maxwell("taus = [2.0, 4.0]");
        run_evolve(&cfg, dir.path(), Exec::Sequential).unwrap();
        let d = compute_diagnostics(&cfg, &history_dir(dir.path()), Exec::Sequential).unwrap();
        assert!(d.energies.iter().all(|e| e.tau_or_u == 2.0));
        assert!(d.notes.iter().any(|n| n.contains("skipped")), "{:?}", d.notes);
    }

    #[test]
    fn missing_history_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = maxwell("taus = [2.0]");
        let e = run_diagnose(&cfg, &dir.path().join("nowhere"), dir.path(), Exec::Sequential);
        assert!(matches!(e, Err(Error::Io(_))), "{e:?}");
    }

    #[test]
    fn empty_request_writes_header_only_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_diagnose(&maxwell(""), dir.path(), dir.path(), Exec::Sequential).unwrap();
        let text = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(out.notes.iter().any(|n| n.contains("no surfaces")));
    }

    #[test]
    fn coulomb_checks_are_tight() {
        let cfg = SimConfig::from_toml(
            r#"
[grid]
n = 48
dx = 0.5
boundary = "outflow"

[time]
cfl = 0.4
t_end = 3.0

[data]
recipe = "coulomb-analytic"
q0 = 0.8
core = 0.5

[diagnose]
mesh = [24, 12, 24]
slices = [2.0, 4.0, 8.0]
"#,
        )
        .unwrap();
        let d = compute_diagnostics(&cfg, Path::new("unused"), Exec::Parallel).unwrap();
        let get = |id: &str| d.coulomb.iter().find(|r| r.check_id == id).unwrap_or_else(|| panic!("{id}"));
        for id in ["rho-inverse-square", "alpha-alphab-sigma-vanish", "energy-density"] {
            assert!(get(id).error <= 1e-12, "{:?}", get(id));
        }
        assert!(get("charge-from-flux").error <= 1e-3, "{:?}", get("charge-from-flux"));
        assert!(get("shell-energy").error <= 1e-3, "{:?}", get("shell-energy"));
        assert!(get("charge-from-div-e").error <= 1e-3, "{:?}", get("charge-from-div-e"));
        assert!(!d.series.is_empty());
    }

    #[test]
    fn radial_history_is_fitted() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SimConfig::from_toml(
            r#"
[grid]
n = 8
dx = 1.0

[time]
cfl = 0.5
t_end = 60.0
snap_every = 4

[data]
recipe = "radial-bump"
amplitude = 1.0
radius = 2.0

[run]
engine = "radial"

[radial]
r_max = 120.0
dr = 0.1
r_obs = 3.0

[diagnose]
fit_window = [10.0, 50.0]
"#,
        )
        .unwrap();
        assert!(matches!(make_data(&cfg, dir.path(), Exec::Sequential), Err(Error::Unsupported(_))));
        run_evolve(&cfg, dir.path(), Exec::Sequential).unwrap();
        let out = run_diagnose(&cfg, &history_dir(dir.path()), dir.path(), Exec::Sequential).unwrap();
        assert!(out.notes.is_empty(), "{:?}", out.notes);
        let fits = crate::decaylab::report::read_fits(&dir.path().join("fits.csv")).unwrap();
        assert_eq!(fits.len(), 1);
        assert!(fits[0].exponent < 0.0, "{:?}", fits[0]);

        let refit = run_fit(&cfg, &dir.path().join("decay.csv"), &dir.path().join("refit")).unwrap();
        assert!(refit.artifacts[0].exists());
        let mut far = cfg.clone();
        far.diagnose.fit_window = Some([100.0, 200.0]);
        assert!(matches!(run_fit(&far, &dir.path().join("decay.csv"), dir.path()), Err(Error::Fit(_))));
    }
}
