//! `mmkg-lab`: runs the laboratory pipeline from a TOML config.
//!
//! Every numerical parameter lives in the config file; flags only choose
//! files, the thread count and the seed of the randomized suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use mmkg_core::exec::{init_threads, Exec};
use mmkg_core::identities::{run_identity_suite, write_identities};
use mmkg_core::pipeline::{self, StageOutput};
use mmkg_core::solver::config::{IdentityConfig, SimConfig};
use mmkg_core::Error;

/// Exit codes besides success; clap itself uses 2 for usage errors.
mod code {
    pub const OTHER: u8 = 1;
    pub const CONFIG: u8 = 3;
    pub const BREACH: u8 = 4;
    pub const IDENTITY: u8 = 5;
    pub const IO: u8 = 6;
}

#[derive(Parser, Debug)]
#[command(name = "mmkg-lab", version, about = "Massive Maxwell-Klein-Gordon numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; defaults to `run.out_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs every kernel sequentially.
    #[arg(long, env = "MMKG_THREADS")]
    threads: Option<usize>,
    /// Seed of the randomized suites, overriding `identities.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact frame, commutator and convergence identities.
    VerifyIdentities(Common),
    /// Builds and stores the constrained initial data.
    MakeData(Common),
    /// Evolves the configured engine into `<out>/history`.
    Evolve(Common),
    /// Energies, decay series, fits and Sobolev ratios over a history.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// History directory; defaults to `<out>/history`.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Refits a decay file.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        decay: PathBuf,
    },
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_hash: String,
    engine: String,
    out_dir: PathBuf,
    threads: usize,
    seed: u64,
    artifacts: Vec<PathBuf>,
    notes: Vec<String>,
    wall_time_s: f64,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_)
            | Error::Cfl { .. }
            | Error::Unsupported(_)
            | Error::NonzeroCharge { .. }
            | Error::NonzeroMean { .. }
            | Error::HaloUnderflow { .. }
            | Error::GridMismatch => code::CONFIG,
            Error::ConstraintBreach { .. } | Error::NonFinite { .. } | Error::Reflection(_) => code::BREACH,
            Error::Io(_) | Error::Csv(_) | Error::Format(_) | Error::OutOfHistory { .. } => code::IO,
            _ => code::OTHER,
        };
        Failure { code, err: e.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: code::IO, err: e.into() }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Context {
    cfg: Option<SimConfig>,
    out: PathBuf,
    threads: usize,
    exec: Exec,
}

impl Context {
    fn new(c: &Common, needs_config: bool) -> Result<Self, Failure> {
        let cfg = match &c.config {
            Some(p) => Some(SimConfig::load(p)?),
            None if needs_config => return Err(Error::Config("--config is required".into()).into()),
            None => None,
        };
        let mut cfg = cfg;
        if let (Some(cfg), Some(seed)) = (cfg.as_mut(), c.seed) {
            cfg.identities.seed = seed;
        }
        let out = c
            .out
            .clone()
            .or_else(|| cfg.as_ref().map(|c| c.run.out_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("out"));
        let threads = c.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        init_threads(threads);
        Ok(Context { cfg, out, threads, exec: Exec::for_threads(threads) })
    }

    fn cfg(&self) -> &SimConfig {
        self.cfg.as_ref().expect("config checked at construction")
    }

    /// Hash of the normalized config, so formatting and comments do not
    /// change it.
    fn config_hash(&self) -> String {
        match &self.cfg {
            Some(c) => sha256_hex(c.to_toml().as_bytes()),
            None => sha256_hex(b"defaults"),
        }
    }
}

fn write_manifest(ctx: &Context, command: &str, seed: u64, res: &StageOutput, started: Instant) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(&ctx.out)?;
    let m = RunManifest {
        command: command.into(),
        config_hash: ctx.config_hash(),
        engine: ctx.cfg.as_ref().map_or("none", |c| c.run.engine.id()).into(),
        out_dir: ctx.out.clone(),
        threads: ctx.threads,
        seed,
        artifacts: res.artifacts.clone(),
        notes: res.notes.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let path = ctx.out.join(format!("manifest-{command}.toml"));
    let text = toml::to_string(&m).map_err(|e| Failure { code: code::OTHER, err: e.into() })?;
    std::fs::write(&path, text)?;
    Ok(path)
}

fn report(res: &StageOutput) {
    for n in &res.notes {
        eprintln!("note: {n}");
    }
    for a in &res.artifacts {
        if a.extension().is_some_and(|e| e == "csv") {
            println!("wrote {}", a.display());
        }
    }
}

fn verify_identities(c: &Common) -> Result<(), Failure> {
    let started = Instant::now();
    let ctx = Context::new(c, false)?;
    let mut icfg = ctx.cfg.as_ref().map_or_else(IdentityConfig::default, |c| c.identities);
    if let Some(s) = c.seed {
        icfg.seed = s;
    }
    let rows = run_identity_suite(&icfg, ctx.exec)?;
    std::fs::create_dir_all(&ctx.out)?;
    let path = ctx.out.join("identities.csv");
    write_identities(&path, &rows)?;
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    for r in &rows {
        println!(
            "{} {:<40} value {:.3e} tolerance {:.1e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.identity_id,
            r.value,
            r.tolerance
        );
    }
    let res = StageOutput { artifacts: vec![path], notes: Vec::new() };
    write_manifest(&ctx, "verify-identities", icfg.seed, &res, started)?;
    if failed.is_empty() {
        Ok(())
    } else {
        let ids: Vec<&str> = failed.iter().map(|r| r.identity_id.as_str()).collect();
        Err(Failure { code: code::IDENTITY, err: anyhow::anyhow!("{} identities failed: {}", ids.len(), ids.join(", ")) })
    }
}

fn stage(
    c: &Common,
    command: &str,
    run: impl FnOnce(&SimConfig, &Path, Exec) -> mmkg_core::Result<StageOutput>,
) -> Result<(), Failure> {
    let started = Instant::now();
    let ctx = Context::new(c, true)?;
    let res = run(ctx.cfg(), &ctx.out, ctx.exec)?;
    report(&res);
    write_manifest(&ctx, command, ctx.cfg().identities.seed, &res, started)?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::VerifyIdentities(c) => verify_identities(&c),
        Cmd::MakeData(c) => stage(&c, "make-data", pipeline::make_data),
        Cmd::Evolve(c) => stage(&c, "evolve", pipeline::run_evolve),
        Cmd::Diagnose { common, history } => stage(&common, "diagnose", |cfg, out, exec| {
            let h = history.clone().unwrap_or_else(|| pipeline::history_dir(out));
            pipeline::run_diagnose(cfg, &h, out, exec)
        }),
        Cmd::Fit { common, decay } => stage(&common, "fit", |cfg, out, _| pipeline::run_fit(cfg, &decay, out)),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
