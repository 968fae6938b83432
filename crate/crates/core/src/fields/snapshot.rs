//! Binary snapshot files.
//!
//! Layout: magic `MMKG1`, `u32` N, `f64` dx, `f64` t, `u32` field count,
//! then per field a `u16` name length and UTF-8 name, then each field's
//! N³ row-major `f64` values. Everything little endian.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use super::state::{FormTag, GaugeState, ScalarState, TwoFormField};
use crate::error::{Error, Result};
use crate::grid::{Boundary, GridSpec};

const MAGIC: &[u8; 5] = b"MMKG1";

pub const FIELD_NAMES: [&str; 18] = [
    "phi.re", "phi.im", "pi.re", "pi.im", "A0", "A1", "A2", "A3", "dtA0", "dtA1", "dtA2", "dtA3", "E1", "E2", "E3",
    "B1", "B2", "B3",
];

/// Named arrays as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSnapshot {
    pub n: usize,
    pub dx: f64,
    pub t: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl RawSnapshot {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let len = self.n * self.n * self.n;
        w.write_all(MAGIC)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.dx.to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        w.write_all(&(self.fields.len() as u32).to_le_bytes())?;
        for (name, _) in &self.fields {
            w.write_all(&(name.len() as u16).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
        }
        let mut buf = Vec::with_capacity(len * 8);
        for (name, v) in &self.fields {
            if v.len() != len {
                return Err(Error::Format(format!("field {name} has {} values, expected {len}", v.len())));
            }
            buf.clear();
            v.iter().for_each(|x| buf.extend_from_slice(&x.to_le_bytes()));
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 5];
        read_exact(r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let n = u32::from_le_bytes(read_array(r)?) as usize;
        let dx = f64::from_le_bytes(read_array(r)?);
        let t = f64::from_le_bytes(read_array(r)?);
        let count = u32::from_le_bytes(read_array(r)?) as usize;
        if n == 0 || n > 4096 || count > 1024 {
            return Err(Error::Format(format!("implausible header n={n}, fields={count}")));
        }
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let l = u16::from_le_bytes(read_array(r)?) as usize;
            let mut b = vec![0u8; l];
            read_exact(r, &mut b)?;
            names.push(String::from_utf8(b).map_err(|_| Error::Format("field name is not UTF-8".into()))?);
        }
        let len = n * n * n;
        let mut bytes = vec![0u8; len * 8];
        let mut fields = Vec::with_capacity(count);
        for name in names {
            read_exact(r, &mut bytes)?;
            let v = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect();
            fields.push((name, v));
        }
        Ok(RawSnapshot { n, dx, t, fields })
    }
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated snapshot".into()),
        _ => Error::Io(e),
    })
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    read_exact(r, &mut b)?;
    Ok(b)
}

/// Full gridded state at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub grid: GridSpec,
    pub t: f64,
    pub scalar: ScalarState,
    pub gauge: GaugeState,
    pub form: TwoFormField,
}

impl FieldSnapshot {
    pub fn to_raw(&self) -> RawSnapshot {
        let s = &self.scalar;
        let mut arrays: Vec<Vec<f64>> = vec![
            s.phi.iter().map(|v| v.re).collect(),
            s.phi.iter().map(|v| v.im).collect(),
            s.pi.iter().map(|v| v.re).collect(),
            s.pi.iter().map(|v| v.im).collect(),
        ];
        arrays.extend(self.gauge.a.iter().cloned());
        arrays.extend(self.gauge.da.iter().cloned());
        arrays.extend(self.form.e.iter().cloned());
        arrays.extend(self.form.b.iter().cloned());
        RawSnapshot {
            n: self.grid.n,
            dx: self.grid.dx,
            t: self.t,
            // Form-only snapshots leave the scalar and potential arrays empty.
            fields: FIELD_NAMES
                .iter()
                .map(|s| s.to_string())
                .zip(arrays)
                .filter(|(_, v)| !v.is_empty())
                .collect(),
        }
    }

    /// The boundary is not stored on disk and must be supplied.
    pub fn from_raw(raw: &RawSnapshot, boundary: Boundary) -> Result<Self> {
        let get = |name: &str| {
            raw.get(name)
                .map(|v| v.to_vec())
                .ok_or_else(|| Error::Format(format!("missing field {name}")))
        };
        let cplx = |re: Vec<f64>, im: Vec<f64>| -> Vec<C64> { re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect() };
        let scalar = if raw.get("phi.re").is_some() {
            ScalarState {
                phi: cplx(get("phi.re")?, get("phi.im")?),
                pi: cplx(get("pi.re")?, get("pi.im")?),
            }
        } else {
            ScalarState::zeros(0)
        };
        let gauge = if raw.get("A0").is_some() {
            GaugeState {
                a: [get("A0")?, get("A1")?, get("A2")?, get("A3")?],
                da: [get("dtA0")?, get("dtA1")?, get("dtA2")?, get("dtA3")?],
            }
        } else {
            GaugeState::zeros(0)
        };
        let form = TwoFormField {
            e: [get("E1")?, get("E2")?, get("E3")?],
            b: [get("B1")?, get("B2")?, get("B3")?],
            tag: FormTag::Full,
        };
        Ok(FieldSnapshot {
            grid: GridSpec::new(raw.n, raw.dx, boundary),
            t: raw.t,
            scalar,
            gauge,
            form,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.to_raw().write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path, boundary: Boundary) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::from_raw(&RawSnapshot::read_from(&mut r)?, boundary)
    }
}
