//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                                            |
//! |--------|------|----------------------------------------------------|
//! | 0      | 4    | magic `b"HMSF"`                                    |
//! | 4      | 4    | `u32` format version (1)                           |
//! | 8      | 1    | `u8` kind: 0 = spectral coefficients, 1 = samples  |
//! | 9      | 1    | `u8` bytes per real number: 4 (f32) or 8 (f64)     |
//! | 10     | 2    | reserved, zero                                     |
//! | 12     | 4    | `u32` n_per_axis                                   |
//! | 16     | 4    | `u32` component count                              |
//! | 20     | 8    | `f64` box_length                                   |
//! | 28     | 8    | `f64` time                                         |
//! | 36     | 8    | `f64` dealias_fraction                             |
//! | 44     | ...  | data block                                         |
//!
//! The data block stores each component in turn, every component as `n³`
//! entries in row-major grid order (`idx = (i·n + j)·n + l`). Spectral
//! entries use FFT ordering along each axis (index `i` ↔ mode `i` for
//! `i < n/2`, `i - n` otherwise) and are written as `(re, im)` pairs, so a
//! spectral entry is a complex64 or complex128. Sample entries are single
//! reals at `x = (L/n)·(i, j, l)`.
//!
//! A [`SolenoidalState`] is written as six spectral components
//! `u₁ u₂ u₃ B₁ B₂ B₃`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{PhysicalField, SolenoidalState, SpectralField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"HMSF";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 44;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    fn bytes(self) -> u8 {
        match self {
            Precision::Single => 4,
            Precision::Double => 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Spectral,
    Physical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub kind: Kind,
    pub precision: Precision,
    pub grid: GridSpec,
    pub components: usize,
    pub time: f64,
}

fn write_header<W: Write>(w: &mut W, h: &Header) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[
        match h.kind {
            Kind::Spectral => 0,
            Kind::Physical => 1,
        },
        h.precision.bytes(),
        0,
        0,
    ])?;
    w.write_all(&(h.grid.n_per_axis as u32).to_le_bytes())?;
    w.write_all(&(h.components as u32).to_le_bytes())?;
    w.write_all(&h.grid.box_length.to_le_bytes())?;
    w.write_all(&h.time.to_le_bytes())?;
    w.write_all(&h.grid.dealias_fraction.to_le_bytes())?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_header<R: Read>(r: &mut R) -> Result<Header> {
    let magic: [u8; 4] = read_array(r)?;
    if magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let flags: [u8; 4] = read_array(r)?;
    let kind = match flags[0] {
        0 => Kind::Spectral,
        1 => Kind::Physical,
        k => return Err(Error::Format(format!("unknown kind {k}"))),
    };
    let precision = match flags[1] {
        4 => Precision::Single,
        8 => Precision::Double,
        p => return Err(Error::Format(format!("unsupported precision {p}"))),
    };
    let n = u32::from_le_bytes(read_array(r)?) as usize;
    let components = u32::from_le_bytes(read_array(r)?) as usize;
    let box_length = f64::from_le_bytes(read_array(r)?);
    let time = f64::from_le_bytes(read_array(r)?);
    let dealias_fraction = f64::from_le_bytes(read_array(r)?);
    let grid = GridSpec::with_dealias(n, box_length, dealias_fraction)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(Header {
        kind,
        precision,
        grid,
        components,
        time,
    })
}

fn write_real<W: Write>(w: &mut W, x: f64, p: Precision) -> Result<()> {
    match p {
        Precision::Single => w.write_all(&(x as f32).to_le_bytes())?,
        Precision::Double => w.write_all(&x.to_le_bytes())?,
    }
    Ok(())
}

fn read_real<R: Read>(r: &mut R, p: Precision) -> Result<f64> {
    Ok(match p {
        Precision::Single => f32::from_le_bytes(read_array(r)?) as f64,
        Precision::Double => f64::from_le_bytes(read_array(r)?),
    })
}

/// Writes spectral components sharing one grid.
pub fn write_spectral<W: Write>(
    w: &mut W,
    grid: &GridSpec,
    time: f64,
    comps: &[&[Complex64]],
    precision: Precision,
) -> Result<()> {
    for c in comps {
        if c.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: c.len(),
            });
        }
    }
    let h = Header {
        kind: Kind::Spectral,
        precision,
        grid: *grid,
        components: comps.len(),
        time,
    };
    write_header(w, &h)?;
    for c in comps {
        for z in c.iter() {
            write_real(w, z.re, precision)?;
            write_real(w, z.im, precision)?;
        }
    }
    Ok(())
}

pub fn read_spectral<R: Read>(r: &mut R) -> Result<(Header, Vec<Vec<Complex64>>)> {
    let h = read_header(r)?;
    if h.kind != Kind::Spectral {
        return Err(Error::Format("expected spectral snapshot".into()));
    }
    let mut comps = Vec::with_capacity(h.components);
    for _ in 0..h.components {
        let mut c = Vec::with_capacity(h.grid.len());
        for _ in 0..h.grid.len() {
            let re = read_real(r, h.precision)?;
            let im = read_real(r, h.precision)?;
            c.push(Complex64::new(re, im));
        }
        comps.push(c);
    }
    Ok((h, comps))
}

/// Writes physical-space samples in the same layout with real entries.
pub fn write_physical<W: Write>(
    w: &mut W,
    grid: &GridSpec,
    time: f64,
    comps: &[&[f64]],
    precision: Precision,
) -> Result<()> {
    for c in comps {
        if c.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: c.len(),
            });
        }
    }
    let h = Header {
        kind: Kind::Physical,
        precision,
        grid: *grid,
        components: comps.len(),
        time,
    };
    write_header(w, &h)?;
    for c in comps {
        for &x in c.iter() {
            write_real(w, x, precision)?;
        }
    }
    Ok(())
}

pub fn read_physical<R: Read>(r: &mut R) -> Result<(Header, Vec<Vec<f64>>)> {
    let h = read_header(r)?;
    if h.kind != Kind::Physical {
        return Err(Error::Format("expected physical snapshot".into()));
    }
    let mut comps = Vec::with_capacity(h.components);
    for _ in 0..h.components {
        let c = (0..h.grid.len())
            .map(|_| read_real(r, h.precision))
            .collect::<Result<Vec<_>>>()?;
        comps.push(c);
    }
    Ok((h, comps))
}

pub fn save_state(path: &Path, state: &SolenoidalState, precision: Precision) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let comps: Vec<&[Complex64]> = (0..3)
        .map(|a| state.u.component(a))
        .chain((0..3).map(|a| state.b.component(a)))
        .collect();
    write_spectral(&mut w, state.grid(), state.time, &comps, precision)?;
    w.flush()?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<SolenoidalState> {
    let mut r = BufReader::new(File::open(path)?);
    let (h, mut comps) = read_spectral(&mut r)?;
    if comps.len() != 6 {
        return Err(Error::Format(format!(
            "state snapshot needs 6 components, found {}",
            comps.len()
        )));
    }
    let b = comps.split_off(3);
    let to3 = |v: Vec<Vec<Complex64>>| -> [Vec<Complex64>; 3] {
        let mut it = v.into_iter();
        [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
    };
    SolenoidalState::new(
        SpectralField::from_components(h.grid, to3(comps))?,
        SpectralField::from_components(h.grid, to3(b))?,
        h.time,
    )
}

pub fn save_physical(path: &Path, field: &PhysicalField, time: f64, precision: Precision) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let comps: Vec<&[f64]> = (0..3).map(|a| field.component(a)).collect();
    write_physical(&mut w, field.grid(), time, &comps, precision)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_is_forty_four_bytes() {
        let grid = GridSpec::new(2, 1.5).unwrap();
        let mut buf = Vec::new();
        let c = vec![Complex64::new(1.0, -2.0); 8];
        write_spectral(&mut buf, &grid, 0.25, &[&c], Precision::Double).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 8 * 16);
        assert_eq!(&buf[..4], b"HMSF");
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(buf[28..36].try_into().unwrap()), 0.25);
        assert_eq!(f64::from_le_bytes(buf[44..52].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(buf[52..60].try_into().unwrap()), -2.0);
    }

    #[test]
    fn rejects_garbage() {
        let mut bytes: &[u8] = b"NOPE00000000000000000000000000000000000000000";
        assert!(matches!(read_spectral(&mut bytes), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn spectral_roundtrip_is_exact_in_double(vals in proptest::collection::vec(-1e6f64..1e6, 128), t in 0.0f64..100.0) {
            let grid = GridSpec::new(4, 3.0).unwrap();
            let c: Vec<Complex64> = vals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            let mut buf = Vec::new();
            write_spectral(&mut buf, &grid, t, &[&c], Precision::Double).unwrap();
            let (h, back) = read_spectral(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(h.time, t);
            prop_assert_eq!(h.grid, grid);
            prop_assert_eq!(&back[0], &c);
        }

        #[test]
        fn single_precision_rounds_like_f32(vals in proptest::collection::vec(-1e3f64..1e3, 8)) {
            let grid = GridSpec::new(2, 1.0).unwrap();
            let mut buf = Vec::new();
            write_physical(&mut buf, &grid, 0.0, &[&vals], Precision::Single).unwrap();
            let (_, back) = read_physical(&mut buf.as_slice()).unwrap();
            for (a, b) in vals.iter().zip(&back[0]) {
                prop_assert_eq!(*a as f32 as f64, *b);
            }
        }
    }
}
