//! Power-law fits by least squares in log-log coordinates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Fraction of leading samples dropped when no window is given.
pub const DEFAULT_SKIP: f64 = 0.2;
const MIN_POINTS: usize = 6;
/// Half a decade.
const MIN_SPAN: f64 = 3.162_277_660_168_379_5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub n: usize,
    pub exponent: f64,
    /// 95% confidence interval of the exponent.
    pub ci: (f64, f64),
    /// RMS residual in `ln v`.
    pub residual: f64,
}

impl DecayFit {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci.1 - self.ci.0)
    }
}

/// The default window: everything after the first 20% of the samples.
pub fn default_window(x: &[f64]) -> Option<(f64, f64)> {
    let skip = (DEFAULT_SKIP * x.len() as f64).floor() as usize;
    Some((*x.get(skip)?, *x.last()?))
}

/// Slope of `ln v` against `ln x` over the samples with `x` in `window`
/// (inclusive), with a Student-t 95% interval.
pub fn fit_decay(x: &[f64], v: &[f64], window: Option<(f64, f64)>) -> Result<DecayFit> {
    if x.len() != v.len() {
        return Err(Error::Fit(format!("{} abscissae but {} values", x.len(), v.len())));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Fit("abscissae must increase strictly".into()));
    }
    let (lo, hi) = match window {
        Some(w) => w,
        None => default_window(x).ok_or_else(|| Error::Fit("empty series".into()))?,
    };
    if !(lo < hi) {
        return Err(Error::Fit(format!("empty window [{lo}, {hi}]")));
    }
    let sel: Vec<(f64, f64)> = x
        .iter()
        .zip(v)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(x, v)| (*x, *v))
        .collect();
    if sel.len() < MIN_POINTS {
        return Err(Error::Fit(format!("{} points in [{lo}, {hi}]; at least {MIN_POINTS} are needed", sel.len())));
    }
    if let Some(&(xb, vb)) = sel.iter().find(|(x, v)| !(*x > 0.0 && *v > 0.0)) {
        return Err(Error::Fit(format!("nonpositive sample ({xb}, {vb}) in the window")));
    }
    let (x0, x1) = (sel[0].0, sel[sel.len() - 1].0);
    if x1 / x0 < MIN_SPAN * (1.0 - 1e-12) {
        return Err(Error::Fit(format!("window [{x0}, {x1}] spans less than half a decade")));
    }
    let lx: Vec<f64> = sel.iter().map(|p| p.0.ln()).collect();
    let lv: Vec<f64> = sel.iter().map(|p| p.1.ln()).collect();
    let n = sel.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let mv = lv.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxv: f64 = lx.iter().zip(&lv).map(|(a, b)| (a - mx) * (b - mv)).sum();
    let slope = sxv / sxx;
    let icpt = mv - slope * mx;
    let ss: f64 = lx.iter().zip(&lv).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let dof = n - 2.0;
    let se = (ss / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(DecayFit {
        window: (x0, x1),
        n: sel.len(),
        exponent: slope,
        ci: (slope - t * se, slope + t * se),
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn exact_power_law() {
        let x = grid(30, 2.0, 200.0);
        let v: Vec<f64> = x.iter().map(|t| 4.0 * t.powf(-1.5)).collect();
        let f = fit_decay(&x, &v, None).unwrap();
        assert!((f.exponent + 1.5).abs() < 1e-12);
        assert!(f.half_width() < 1e-12);
        assert_eq!(f.n, 24);
    }

    #[test]
    fn modulated_power_law() {
        let x = grid(200, 10.0, 1000.0);
        let v: Vec<f64> = x.iter().map(|t| t.powf(-1.5) * (1.0 + 0.05 * t.sin())).collect();
        let f = fit_decay(&x, &v, Some((10.0, 1000.0))).unwrap();
        assert!((f.exponent + 1.5).abs() < 0.05, "{f:?}");
        assert!(f.ci.0 < -1.5 && f.ci.1 > -1.5, "{f:?}");
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let x = grid(10, 1.0, 10.0);
        let f = fit_decay(&x, &[2.5; 10], Some((1.0, 10.0))).unwrap();
        assert!(f.exponent.abs() < 1e-14);
    }

    #[test]
    fn rejections() {
        let x = grid(10, 1.0, 10.0);
        let mut v = vec![1.0; 10];
        v[7] = 0.0;
        assert!(fit_decay(&x, &v, Some((1.0, 10.0))).is_err());
        assert!(fit_decay(&x, &[1.0; 10], Some((20.0, 30.0))).is_err());
        assert!(fit_decay(&x, &[1.0; 10], Some((1.0, 2.0))).is_err());
        let short = grid(10, 1.0, 2.5);
        assert!(fit_decay(&short, &[1.0; 10], Some((1.0, 2.5))).is_err());
    }

    proptest! {
        #[test]
        fn recovers_any_exponent(p in -4.0..2.0f64, c in 0.1..10.0f64) {
            let x = grid(12, 1.0, 50.0);
            let v: Vec<f64> = x.iter().map(|t| c * t.powf(p)).collect();
            let f = fit_decay(&x, &v, Some((1.0, 50.0))).unwrap();
            prop_assert!((f.exponent - p).abs() < 1e-12);
        }
    }
}
