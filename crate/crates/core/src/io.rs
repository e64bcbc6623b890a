//! Binary field and coefficient files.
//!
//! All integers are `u32` and all reals IEEE-754 `f64`, little-endian.
//!
//! Field file (`VF3T`):
//!
//! ```text
//! magic "VF3T" | version = 1 | n | flags (bit 0 set: vector) | samples
//! ```
//!
//! Samples are x-fastest; a vector field stores its x, y and z grids one after
//! the other.
//!
//! Coefficient file (`HWC1`):
//!
//! ```text
//! magic "HWC1" | n | jMax | Sigma+ block | Sigma- block | D block | harmonic x, y, z
//! ```
//!
//! Each block holds one record `j, eps, lx, ly, lz (u32), re, im (f64)` per
//! wavelet index, sorted lexicographically by `(j, eps, lx, ly, lz)`.
//!
//! Writes go to a temporary file in the destination directory that is then
//! renamed over the target, so readers never see a partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::fourier::{check_grid_size, GridScalarField, GridVectorField};
use crate::helical::Polarity;
use crate::helical_wavelet::HelicalWaveletCoeffs;
use crate::meyer::{check_level, WaveletIndex};

pub const FIELD_MAGIC: &[u8; 4] = b"VF3T";
pub const FIELD_VERSION: u32 = 1;
pub const COEFF_MAGIC: &[u8; 4] = b"HWC1";
const FLAG_VECTOR: u32 = 1;
const FIELD_HEADER: usize = 16;
const COEFF_HEADER: usize = 12;
const RECORD: usize = 5 * 4 + 2 * 8;

/// Contents of a field file.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Scalar(GridScalarField),
    Vector(GridVectorField),
}

impl FieldData {
    pub fn n(&self) -> usize {
        match self {
            FieldData::Scalar(f) => f.n(),
            FieldData::Vector(u) => u.n(),
        }
    }

    /// The field as a vector; a scalar becomes the x component.
    pub fn into_vector(self) -> GridVectorField {
        match self {
            FieldData::Vector(u) => u,
            FieldData::Scalar(f) => {
                let z = GridScalarField::zeros(f.n()).expect("valid grid size");
                GridVectorField::new(f, z.clone(), z).expect("matching sizes")
            }
        }
    }
}

impl From<GridVectorField> for FieldData {
    fn from(u: GridVectorField) -> Self {
        FieldData::Vector(u)
    }
}

impl From<GridScalarField> for FieldData {
    fn from(f: GridScalarField) -> Self {
        FieldData::Scalar(f)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("unexpected end of data".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )))
        }
    }
}

fn grid_size(n: u32) -> Result<usize> {
    let n = n as usize;
    check_grid_size(n)
        .map_err(|_| Error::Format(format!("grid size {n} is not a power of two >= 4")))?;
    Ok(n)
}

pub fn encode_field(field: &FieldData) -> Vec<u8> {
    let n = field.n();
    let grids: Vec<&GridScalarField> = match field {
        FieldData::Scalar(f) => vec![f],
        FieldData::Vector(u) => u.components().iter().collect(),
    };
    let mut out = Vec::with_capacity(FIELD_HEADER + grids.len() * n * n * n * 8);
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    let flags = if grids.len() == 3 { FLAG_VECTOR } else { 0 };
    out.extend_from_slice(&flags.to_le_bytes());
    for g in grids {
        for v in g.samples() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<FieldData> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != FIELD_MAGIC {
        return Err(Error::Format("not a field file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != FIELD_VERSION {
        return Err(Error::Format(format!(
            "unsupported field file version {version}"
        )));
    }
    let n = grid_size(r.u32()?)?;
    let flags = r.u32()?;
    if flags & !FLAG_VECTOR != 0 {
        return Err(Error::Format(format!("unknown flags {flags:#x}")));
    }
    let count = if flags & FLAG_VECTOR != 0 { 3 } else { 1 };
    let expected = FIELD_HEADER + count * n * n * n * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload size mismatch: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let mut grids = Vec::with_capacity(count);
    for _ in 0..count {
        let samples = (0..n * n * n)
            .map(|_| r.f64())
            .collect::<Result<Vec<_>>>()?;
        grids.push(GridScalarField::new(n, samples)?);
    }
    r.finish()?;
    Ok(if count == 3 {
        let uz = grids.pop().expect("three grids");
        let uy = grids.pop().expect("three grids");
        let ux = grids.pop().expect("three grids");
        FieldData::Vector(GridVectorField::new(ux, uy, uz)?)
    } else {
        FieldData::Scalar(grids.pop().expect("one grid"))
    })
}

pub fn encode_coeffs(coeffs: &HelicalWaveletCoeffs) -> Vec<u8> {
    let records = coeffs.plus.len() - 1;
    let mut out = Vec::with_capacity(COEFF_HEADER + 3 * records * RECORD + 24);
    out.extend_from_slice(COEFF_MAGIC);
    out.extend_from_slice(&(coeffs.n() as u32).to_le_bytes());
    out.extend_from_slice(&coeffs.j_max().to_le_bytes());
    for s in Polarity::ALL {
        for (idx, c) in coeffs.part(s).iter() {
            out.extend_from_slice(&idx.level.to_le_bytes());
            out.extend_from_slice(&u32::from(idx.species.value()).to_le_bytes());
            for l in idx.loc {
                out.extend_from_slice(&l.to_le_bytes());
            }
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    for h in coeffs.harmonic {
        out.extend_from_slice(&h.to_le_bytes());
    }
    out
}

pub fn decode_coeffs(bytes: &[u8]) -> Result<HelicalWaveletCoeffs> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != COEFF_MAGIC {
        return Err(Error::Format("not a coefficient file (bad magic)".into()));
    }
    let n = grid_size(r.u32()?)?;
    let j_max = r.u32()?;
    check_level(j_max, n).map_err(|e| Error::Format(e.to_string()))?;
    let mut out = HelicalWaveletCoeffs::zeros(n, j_max)?;
    let records = out.plus.len() - 1;
    let expected = COEFF_HEADER + 3 * records * RECORD + 24;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "coefficient file size mismatch: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    for s in Polarity::ALL {
        for want in WaveletIndex::enumerate(j_max) {
            let level = r.u32()?;
            let eps = r.u32()?;
            let loc = [r.u32()?, r.u32()?, r.u32()?];
            if level != want.level || eps != u32::from(want.species.value()) || loc != want.loc {
                return Err(Error::Format(format!(
                    "{s} block: record (j={level}, eps={eps}, loc={loc:?}) out of order, expected {want:?}"
                )));
            }
            let c = Complex64::new(r.f64()?, r.f64()?);
            out.set(s, &want, c)?;
        }
    }
    out.harmonic = [r.f64()?, r.f64()?, r.f64()?];
    r.finish()?;
    Ok(out)
}

/// Writes `bytes` to `path` through a temporary file and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_field(path: &Path, field: &FieldData) -> Result<()> {
    write_atomic(path, &encode_field(field))
}

pub fn read_field(path: &Path) -> Result<FieldData> {
    decode_field(&fs::read(path)?)
}

pub fn write_coeffs(path: &Path, coeffs: &HelicalWaveletCoeffs) -> Result<()> {
    write_atomic(path, &encode_coeffs(coeffs))
}

pub fn read_coeffs(path: &Path) -> Result<HelicalWaveletCoeffs> {
    decode_coeffs(&fs::read(path)?)
}
