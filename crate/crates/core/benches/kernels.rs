//! Sequential against parallel execution of the main kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;

use mmkg_core::exec::Exec;
use mmkg_core::grid::{self, GridSpec};
use mmkg_core::identities::run_identity_suite;
use mmkg_core::solver::config::{IdentityConfig, SimConfig};
use mmkg_core::solver::data::{make_initial_data, InitialState};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn stencils(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian-64");
    group.sample_size(10);
    let g = GridSpec::periodic(64, 0.1);
    let f: Vec<C64> = grid::sample(&g, Exec::Parallel, |x| C64::new((-x[0] * x[0]).exp(), x[1].sin()));
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| grid::laplacian(&g, &f, e)));
    }
    group.finish();
}

fn mmkg_step(c: &mut Criterion) {
    let cfg = SimConfig::from_toml(
        r#"
[grid]
n = 32
dx = 0.25

[time]
cfl = 0.25
t_end = 3.0

[data]
recipe = "gaussian-scalar"
center = [1.0, 0.0, 0.0]
width = 0.8
amplitude = 0.3
"#,
    )
    .unwrap();
    let InitialState::Mmkg(state) = make_initial_data(&cfg, Exec::Parallel).unwrap() else {
        unreachable!("scalar data gives a coupled state")
    };
    let mut group = c.benchmark_group("mmkg-rk4-step-32");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| {
                let mut s = state.clone();
                s.step(&cfg.grid, cfg.dt(), cfg.run.mass, e).unwrap();
                s
            })
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let cfg = IdentityConfig { points: 2000, convergence: false, ..IdentityConfig::default() };
    let mut group = c.benchmark_group("identity-suite-2000");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| run_identity_suite(&cfg, e).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, stencils, mmkg_step, identities);
criterion_main!(benches);
