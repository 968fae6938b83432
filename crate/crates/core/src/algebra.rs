//! Pointwise tensor algebra on Minkowski space.
//!
//! Vectors carry upper indices, covectors and 2-forms lower indices. The
//! volume form is fixed by `ε_{0123} = +1`; [`hodge_with`] accepts the sign
//! explicitly so the convention can be flipped in negative tests.

use num_complex::Complex64 as C64;

use crate::calculus::{ETA, PAIRS};

pub type Vec4 = [f64; 4];
pub type TwoForm = [[f64; 4]; 4];

/// Sign of `ε_{0123}` used throughout.
pub const EPS0123: f64 = 1.0;

pub fn mdot(a: &Vec4, b: &Vec4) -> f64 {
    (0..4).map(|m| ETA[m] * a[m] * b[m]).sum()
}

/// Index lowering (or raising; the metric is its own inverse).
pub fn lower(v: &Vec4) -> Vec4 {
    [0, 1, 2, 3].map(|m| ETA[m] * v[m])
}

pub fn add(a: &Vec4, b: &Vec4) -> Vec4 {
    [0, 1, 2, 3].map(|m| a[m] + b[m])
}

pub fn scale(a: &Vec4, s: f64) -> Vec4 {
    a.map(|v| v * s)
}

pub fn lincomb(terms: &[(f64, &Vec4)]) -> Vec4 {
    let mut out = [0.0; 4];
    for (s, v) in terms {
        for m in 0..4 {
            out[m] += s * v[m];
        }
    }
    out
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Levi-Civita symbol with `ε_{0123} = 1`.
pub fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = [i, j, k, l];
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] == p[b] {
                return 0.0;
            }
        }
    }
    let mut s = 1.0;
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] > p[b] {
                s = -s;
            }
        }
    }
    s
}

pub fn zero_form() -> TwoForm {
    [[0.0; 4]; 4]
}

/// Builds an antisymmetric 2-form from its six independent components.
pub fn form_from_pairs(c: &[f64; 6]) -> TwoForm {
    let mut g = zero_form();
    for (i, &(a, b)) in PAIRS.iter().enumerate() {
        g[a][b] = c[i];
        g[b][a] = -c[i];
    }
    g
}

pub fn form_pairs(g: &TwoForm) -> [f64; 6] {
    PAIRS.map(|(a, b)| g[a][b])
}

/// `E_i = G_{0i}`, `B_i = (*G)_{0i} = ½ ε_{ijk} G_{jk}`.
pub fn form_from_eb(e: [f64; 3], b: [f64; 3]) -> TwoForm {
    let mut g = zero_form();
    for i in 0..3 {
        g[0][i + 1] = e[i];
        g[i + 1][0] = -e[i];
    }
    g[1][2] = b[2];
    g[2][1] = -b[2];
    g[2][3] = b[0];
    g[3][2] = -b[0];
    g[3][1] = b[1];
    g[1][3] = -b[1];
    g
}

pub fn eb_of(g: &TwoForm) -> ([f64; 3], [f64; 3]) {
    ([g[0][1], g[0][2], g[0][3]], [g[2][3], g[3][1], g[1][2]])
}

/// `*G_{mu nu} = ½ ε_{mu nu}^{a b} G_{a b}` with `ε_{0123} = eps`.
pub fn hodge_with(g: &TwoForm, eps: f64) -> TwoForm {
    let mut out = zero_form();
    for mu in 0..4 {
        for nu in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    s += levi_civita(mu, nu, a, b) * ETA[a] * ETA[b] * g[a][b];
                }
            }
            out[mu][nu] = 0.5 * eps * s;
        }
    }
    out
}

pub fn hodge(g: &TwoForm) -> TwoForm {
    hodge_with(g, EPS0123)
}

/// `G(X, Y) = X^mu Y^nu G_{mu nu}`.
pub fn contract(g: &TwoForm, x: &Vec4, y: &Vec4) -> f64 {
    let mut s = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            s += x[mu] * y[nu] * g[mu][nu];
        }
    }
    s
}

/// The covector `G(X, ·)_nu = X^mu G_{mu nu}`.
pub fn interior(g: &TwoForm, x: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for nu in 0..4 {
        for mu in 0..4 {
            out[nu] += x[mu] * g[mu][nu];
        }
    }
    out
}

/// Full contraction `G_{mu nu} H^{mu nu}`.
pub fn form_dot(g: &TwoForm, h: &TwoForm) -> f64 {
    let mut s = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            s += ETA[mu] * ETA[nu] * g[mu][nu] * h[mu][nu];
        }
    }
    s
}

/// Applies a covector (lower components) to a vector.
pub fn pair(cov: &Vec4, v: &Vec4) -> f64 {
    (0..4).map(|m| cov[m] * v[m]).sum()
}

/// Complex covector applied to a real vector.
pub fn cpair(cov: &[C64; 4], v: &Vec4) -> C64 {
    (0..4).map(|m| cov[m] * v[m]).sum()
}

pub fn form_max_diff(a: &TwoForm, b: &TwoForm) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

pub fn form_scale(g: &TwoForm, s: f64) -> TwoForm {
    g.map(|r| r.map(|v| v * s))
}

pub fn form_add(a: &TwoForm, b: &TwoForm) -> TwoForm {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += b[i][j];
        }
    }
    out
}
