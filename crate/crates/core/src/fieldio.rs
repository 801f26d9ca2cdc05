//! Binary field files: `GPF1` magic, little-endian `u32` header length, JSON
//! header, then raw little-endian `f64` samples (complex interleaved).

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::GridSpec;

const MAGIC: &[u8; 4] = b"GPF1";
pub const LAYOUT: &str = "row-major-x1-fastest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub kind: FieldKind,
    pub layout: String,
}

impl FieldHeader {
    fn new(grid: &GridSpec, kind: FieldKind) -> Self {
        FieldHeader { nx: grid.nx, ny: grid.ny, lx: grid.lx, ly: grid.ly, kind, layout: LAYOUT.to_string() }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.nx, self.ny, self.lx, self.ly)
    }
}

/// A field of either kind as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Real(RealField),
    Complex(ComplexField),
}

fn encode(header: &FieldHeader, samples: impl Iterator<Item = f64>) -> Result<Vec<u8>> {
    let json = serde_json::to_vec(header).map_err(|e| Error::Format { path: None, reason: e.to_string() })?;
    let mut out = Vec::with_capacity(8 + json.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for v in samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn check_finite(values: impl Iterator<Item = f64>) -> Result<()> {
    for (index, value) in values.enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
    }
    Ok(())
}

pub fn encode_real(f: &RealField) -> Result<Vec<u8>> {
    check_finite(f.values.iter().copied())?;
    encode(&FieldHeader::new(&f.grid, FieldKind::Real), f.values.iter().copied())
}

pub fn encode_complex(u: &ComplexField) -> Result<Vec<u8>> {
    check_finite(u.values.iter().flat_map(|z| [z.re, z.im]))?;
    encode(&FieldHeader::new(&u.grid, FieldKind::Complex), u.values.iter().flat_map(|z| [z.re, z.im]))
}

pub fn decode(bytes: &[u8]) -> Result<AnyField> {
    let fail = |reason: String| Error::Format { path: None, reason };
    if bytes.len() < 8 {
        return Err(fail(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fail(format!("bad magic {:?}", String::from_utf8_lossy(&bytes[0..4]))));
    }
    let hlen = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = 8usize.checked_add(hlen).filter(|&e| e <= bytes.len()).ok_or_else(|| fail("truncated header".into()))?;
    let header: FieldHeader = serde_json::from_slice(&bytes[8..body]).map_err(|e| fail(format!("header: {e}")))?;
    if header.layout != LAYOUT {
        return Err(fail(format!("unsupported layout {:?}", header.layout)));
    }
    let grid = header.grid()?;
    let per = match header.kind {
        FieldKind::Real => 1,
        FieldKind::Complex => 2,
    };
    let expected = grid.len() * per * 8;
    let payload = &bytes[body..];
    if payload.len() != expected {
        return Err(fail(format!("payload has {} bytes, header implies {expected}", payload.len())));
    }
    let raw: Vec<f64> = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(match header.kind {
        FieldKind::Real => AnyField::Real(RealField { grid, values: raw }),
        FieldKind::Complex => AnyField::Complex(ComplexField {
            grid,
            values: raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        }),
    })
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Format { reason, .. } => Error::Format { path: Some(path.to_path_buf()), reason },
        other => other,
    }
}

pub fn write_real(f: &RealField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), encode_real(f)?)?;
    Ok(())
}

pub fn write_complex(u: &ComplexField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), encode_complex(u)?)?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<AnyField> {
    let path = path.as_ref();
    decode(&fs::read(path)?).map_err(|e| with_path(e, path))
}

pub fn read_real(path: impl AsRef<Path>) -> Result<RealField> {
    match read_field(path)? {
        AnyField::Real(f) => Ok(f),
        AnyField::Complex(_) => Err(Error::KindMismatch { expected: "real", found: FieldKind::Complex.name().into() }),
    }
}

pub fn read_complex(path: impl AsRef<Path>) -> Result<ComplexField> {
    match read_field(path)? {
        AnyField::Complex(u) => Ok(u),
        AnyField::Real(_) => Err(Error::KindMismatch { expected: "complex", found: FieldKind::Real.name().into() }),
    }
}
