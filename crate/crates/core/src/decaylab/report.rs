//! CSV outputs. Every file has a fixed header, written even when there
//! are no rows, and rows keep the order they are given in.

use std::path::Path;

use serde::Serialize;

use super::fit::DecayFit;
use super::sobolev::SobolevCheck;
use super::DecaySeries;
use crate::error::{Error, Result};

pub const DECAY_HEADER: [&str; 4] = ["series_id", "weight_desc", "abscissa", "value"];
pub const FITS_HEADER: [&str; 6] = ["series_id", "window_lo", "window_hi", "exponent", "ci_lo", "ci_hi"];
pub const SOBOLEV_HEADER: [&str; 6] = ["ineq_id", "field_id", "dx", "lhs", "rhs", "ratio"];

/// Writes `rows` under `header`; rows must serialize to as many fields.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct DecayRow {
    pub series_id: String,
    pub weight_desc: String,
    pub abscissa: f64,
    pub value: f64,
}

#[derive(Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct FitRow {
    pub series_id: String,
    pub window_lo: f64,
    pub window_hi: f64,
    pub exponent: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl FitRow {
    pub fn new(id: &str, f: &DecayFit) -> Self {
        FitRow {
            series_id: id.into(),
            window_lo: f.window.0,
            window_hi: f.window.1,
            exponent: f.exponent,
            ci_lo: f.ci.0,
            ci_hi: f.ci.1,
        }
    }
}

pub fn write_decay(path: &Path, series: &[DecaySeries]) -> Result<()> {
    let rows: Vec<DecayRow> = series
        .iter()
        .flat_map(|s| {
            s.points.iter().map(|&(x, v)| DecayRow {
                series_id: s.id.clone(),
                weight_desc: s.weight.clone(),
                abscissa: x,
                value: v,
            })
        })
        .collect();
    write_csv(path, &DECAY_HEADER, &rows)
}

/// Groups the rows of a decay file back into series, in first-seen order.
pub fn read_decay(path: &Path) -> Result<Vec<DecaySeries>> {
    let mut r = csv::Reader::from_path(path)?;
    let head: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if head != DECAY_HEADER {
        return Err(Error::Format(format!("{} does not have the decay columns {DECAY_HEADER:?}", path.display())));
    }
    let mut out: Vec<DecaySeries> = Vec::new();
    for row in r.deserialize() {
        let row: DecayRow = row?;
        let pos = match out.iter().position(|s| s.id == row.series_id) {
            Some(i) => i,
            None => {
                out.push(DecaySeries::new(&row.series_id, &row.weight_desc));
                out.len() - 1
            }
        };
        out[pos].push(row.abscissa, row.value)?;
    }
    Ok(out)
}

/// One row per fitted series; unfitted series are skipped.
pub fn write_fits(path: &Path, series: &[DecaySeries]) -> Result<()> {
    let rows: Vec<FitRow> = series.iter().filter_map(|s| s.fit.as_ref().map(|f| FitRow::new(&s.id, f))).collect();
    write_csv(path, &FITS_HEADER, &rows)
}

pub fn read_fits(path: &Path) -> Result<Vec<FitRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_sobolev(path: &Path, checks: &[SobolevCheck]) -> Result<()> {
    write_csv(path, &SOBOLEV_HEADER, checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decaylab::fit::fit_decay;

    #[test]
    fn empty_inputs_give_header_only_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("decay.csv");
        write_decay(&p, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "series_id,weight_desc,abscissa,value\n");
        let f = dir.path().join("fits.csv");
        write_fits(&f, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&f).unwrap().lines().count(), 1);
        let s = dir.path().join("sobolev.csv");
        write_sobolev(&s, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&s).unwrap(), "ineq_id,field_id,dx,lhs,rhs,ratio\n");
    }

    #[test]
    fn decay_round_trip_and_fixed_columns() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("decay.csv");
        let mut a = DecaySeries::new("a", "t^1.5 |phi|");
        let mut b = DecaySeries::new("b", "w, with comma");
        for k in 1..=8 {
            let x = k as f64;
            a.push(x, x.powf(-1.5)).unwrap();
            b.push(x, 2.0).unwrap();
        }
        a.fit = Some(fit_decay(&a.abscissae(), &a.values(), Some((1.0, 8.0))).unwrap());
        write_decay(&p, &[a.clone(), b.clone()]).unwrap();
        let back = read_decay(&p).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].points, a.points);
        assert_eq!(back[1].weight, b.weight);
        let text = std::fs::read_to_string(&p).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert!(r.records().all(|rec| rec.unwrap().len() == 4));
        let f = dir.path().join("fits.csv");
        write_fits(&f, &[a, b]).unwrap();
        let rows = read_fits(&f).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].exponent + 1.5).abs() < 1e-12);
    }
}
