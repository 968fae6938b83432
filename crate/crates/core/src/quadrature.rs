//! One-dimensional rules and the spherical product rule used by the
//! surface meshes.

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    #[default]
    Midpoint,
    GaussLegendre,
}

/// Nodes and weights on `[a, b]`.
pub fn nodes(rule: Rule, n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    match rule {
        Rule::Midpoint => {
            let h = (b - a) / n as f64;
            (0..n).map(|i| (a + (i as f64 + 0.5) * h, h)).collect()
        }
        Rule::GaussLegendre => gauss_legendre(n)
            .into_iter()
            .map(|(x, w)| (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w))
            .collect(),
    }
}

/// Gauss–Legendre nodes on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` (or midpoint),
/// uniform in `φ`. Returns `(unit vector, weight)` with weights summing to 4π.
pub fn sphere(rule: Rule, n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    let dphi = 2.0 * PI / n_phi as f64;
    for (ct, w) in nodes(rule, n_theta, -1.0, 1.0) {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for j in 0..n_phi {
            let ph = (j as f64 + 0.5) * dphi;
            out.push(([st * ph.cos(), st * ph.sin(), ct], w * dphi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..12 {
            let q = nodes(Rule::GaussLegendre, n, 0.5, 2.0);
            for deg in 0..2 * n {
                let s: f64 = q.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                let d = deg as f64 + 1.0;
                let want = (2.0f64.powf(d) - 0.5f64.powf(d)) / d;
                assert!((s - want).abs() < 1e-12 * want.max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn midpoint_is_second_order() {
        let e = |n| {
            let s: f64 = nodes(Rule::Midpoint, n, 0.0, 1.0)
                .iter()
                .map(|(x, w)| w * x.exp())
                .sum();
            (s - (1f64.exp() - 1.0)).abs()
        };
        let order = (e(20) / e(40)).log2();
        assert!((order - 2.0).abs() < 0.05);
    }

    #[test]
    fn sphere_area_and_moments() {
        let q = sphere(Rule::GaussLegendre, 8, 16);
        let area: f64 = q.iter().map(|(_, w)| w).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let z2: f64 = q.iter().map(|(n, w)| w * n[2] * n[2]).sum();
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
    }
}
