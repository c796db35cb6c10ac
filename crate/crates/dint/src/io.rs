//! On-disk formats.
//!
//! `GRDF` holds a field, `GRDS` a summed-area table (cumulative values plus
//! origin). Both are little-endian:
//!
//! ```text
//! magic[4] version:u16 dtype:u8 ndim:u8 extents:u32×ndim [origin:u32×ndim] values
//! ```
//!
//! `dtype` is 0 for `i64` and 1 for `f64`; values are row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use dint_core::detach::{DetachError, DetachmentReport, SampledFunction, Sign};
use dint_core::green::{GreenError, RectilinearDomain, Vertex};
use dint_core::grid::{GridError, GridField, LatticeBox, Scalar, MAX_NDIM};
use dint_core::sat::{SatError, SummedAreaTable};
use dint_core::slant::{LatticeCurve, SlantError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub const FIELD_MAGIC: &[u8; 4] = b"GRDF";
pub const TABLE_MAGIC: &[u8; 4] = b"GRDS";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Stream(#[from] std::io::Error),
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u16),
    #[error("unsupported dtype {0}")]
    Dtype(u8),
    #[error("unsupported ndim {0}")]
    UnsupportedNdim(usize),
    #[error("truncated {0}")]
    Truncated(&'static str),
    #[error("value count mismatch: header needs {expected}, file holds {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Slant(#[from] SlantError),
    #[error(transparent)]
    Detach(#[from] DetachError),
}

/// Scalars with a fixed wire encoding.
pub trait Wire: Scalar {
    const DTYPE: u8;
    fn put(self, out: &mut Vec<u8>);
    fn take(bytes: [u8; 8]) -> Self;
}

impl Wire for i64 {
    const DTYPE: u8 = 0;
    fn put(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn take(bytes: [u8; 8]) -> Self {
        i64::from_le_bytes(bytes)
    }
}

impl Wire for f64 {
    const DTYPE: u8 = 1;
    fn put(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn take(bytes: [u8; 8]) -> Self {
        f64::from_le_bytes(bytes)
    }
}

/// A field of either element type.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(GridField<i64>),
    Float(GridField<f64>),
}

impl Field {
    pub fn extents(&self) -> &[usize] {
        match self {
            Field::Int(f) => f.extents(),
            Field::Float(f) => f.extents(),
        }
    }

    pub fn to_float(&self) -> GridField<f64> {
        match self {
            Field::Int(f) => f.map(|v| v as f64),
            Field::Float(f) => f.clone(),
        }
    }

    /// Integer view; fails unless every value is integral and fits `i64`.
    pub fn to_int(&self) -> Result<GridField<i64>, FormatError> {
        match self {
            Field::Int(f) => Ok(f.clone()),
            Field::Float(f) => {
                let bad = f
                    .values()
                    .iter()
                    .find(|v| v.fract() != 0.0 || v.abs() >= 9.2e18);
                match bad {
                    Some(v) => Err(FormatError::Invalid(format!(
                        "value {v} is not an exact integer"
                    ))),
                    None => Ok(f.map(|v| v as i64)),
                }
            }
        }
    }
}

/// A summed-area table of either element type.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Int(SummedAreaTable<i64>),
    Float(SummedAreaTable<f64>),
}

fn header(
    magic: &[u8; 4],
    dtype: u8,
    extents: &[usize],
    origin: Option<&[usize]>,
) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::new();
    out.extend_from_slice(magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(dtype);
    out.push(extents.len() as u8);
    for &e in extents.iter().chain(origin.unwrap_or(&[])) {
        let e = u32::try_from(e)
            .map_err(|_| FormatError::Invalid(format!("extent {e} exceeds u32")))?;
        out.extend_from_slice(&e.to_le_bytes());
    }
    Ok(out)
}

pub fn encode_field<T: Wire>(field: &GridField<T>) -> Result<Vec<u8>, FormatError> {
    let mut out = header(FIELD_MAGIC, T::DTYPE, field.extents(), None)?;
    field.values().iter().for_each(|v| v.put(&mut out));
    Ok(out)
}

pub fn encode_table<T: Wire>(sat: &SummedAreaTable<T>) -> Result<Vec<u8>, FormatError> {
    let mut out = header(TABLE_MAGIC, T::DTYPE, sat.extents(), Some(sat.origin()))?;
    sat.cumulative().iter().for_each(|v| v.put(&mut out));
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        if self.bytes.len() < n {
            return Err(FormatError::Truncated(what));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn axes(&mut self, ndim: usize, what: &'static str) -> Result<Vec<usize>, FormatError> {
        (0..ndim)
            .map(|_| Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()) as usize))
            .collect()
    }
}

struct Decoded {
    dtype: u8,
    extents: Vec<usize>,
    origin: Option<Vec<usize>>,
    payload: Vec<[u8; 8]>,
}

fn decode(bytes: &[u8], magic: &[u8; 4]) -> Result<Decoded, FormatError> {
    let mut c = Cursor { bytes };
    let m: [u8; 4] = c.take(4, "magic")?.try_into().unwrap();
    if &m != magic {
        return Err(FormatError::BadMagic(m));
    }
    let version = u16::from_le_bytes(c.take(2, "version")?.try_into().unwrap());
    if version != VERSION {
        return Err(FormatError::Version(version));
    }
    let dtype = c.take(1, "dtype")?[0];
    if dtype > 1 {
        return Err(FormatError::Dtype(dtype));
    }
    let ndim = c.take(1, "ndim")?[0] as usize;
    if !(1..=MAX_NDIM).contains(&ndim) {
        return Err(FormatError::UnsupportedNdim(ndim));
    }
    let extents = c.axes(ndim, "extents")?;
    let origin = if magic == TABLE_MAGIC {
        Some(c.axes(ndim, "origin")?)
    } else {
        None
    };
    let expected = extents
        .iter()
        .try_fold(1usize, |n, &e| n.checked_mul(e))
        .ok_or(GridError::Overflow)?;
    if !c.bytes.len().is_multiple_of(8) {
        return Err(FormatError::Truncated("values"));
    }
    let found = c.bytes.len() / 8;
    if found != expected {
        return Err(FormatError::ValueCount { expected, found });
    }
    let payload = c
        .bytes
        .chunks_exact(8)
        .map(|b| b.try_into().unwrap())
        .collect();
    Ok(Decoded {
        dtype,
        extents,
        origin,
        payload,
    })
}

fn values<T: Wire>(payload: &[[u8; 8]]) -> Vec<T> {
    payload.iter().map(|&b| T::take(b)).collect()
}

pub fn decode_field(bytes: &[u8]) -> Result<Field, FormatError> {
    let d = decode(bytes, FIELD_MAGIC)?;
    Ok(match d.dtype {
        0 => Field::Int(GridField::new(d.extents, values(&d.payload))?),
        _ => Field::Float(GridField::new(d.extents, values(&d.payload))?),
    })
}

pub fn decode_table(bytes: &[u8]) -> Result<Table, FormatError> {
    let d = decode(bytes, TABLE_MAGIC)?;
    let origin = d.origin.unwrap_or_default();
    Ok(match d.dtype {
        0 => Table::Int(SummedAreaTable::from_cumulative(
            d.extents,
            origin,
            values(&d.payload),
        )?),
        _ => Table::Float(SummedAreaTable::from_cumulative(
            d.extents,
            origin,
            values(&d.payload),
        )?),
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, FormatError> {
    let mut buf = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(buf)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Loads a field from `.grdf` or a 2-D `.csv`.
pub fn load_field(path: &Path) -> Result<Field, FormatError> {
    let bytes = read_bytes(path)?;
    if is_csv(path) {
        parse_field_csv(&bytes).map(Field::Float)
    } else {
        decode_field(&bytes)
    }
}

pub fn load_table(path: &Path) -> Result<Table, FormatError> {
    decode_table(&read_bytes(path)?)
}

fn csv_rows(bytes: &[u8]) -> Result<Vec<Vec<f64>>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 1;
        let rec = rec.map_err(|e| FormatError::Csv {
            line,
            msg: e.to_string(),
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| FormatError::Csv {
                    line,
                    msg: format!("not a number: {s:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Rows run along axis 0; no header.
pub fn parse_field_csv(bytes: &[u8]) -> Result<GridField<f64>, FormatError> {
    let rows = csv_rows(bytes)?;
    let width = rows.first().map_or(0, Vec::len);
    if let Some(k) = rows.iter().position(|r| r.len() != width) {
        return Err(FormatError::Csv {
            line: k + 1,
            msg: format!("expected {width} columns, got {}", rows[k].len()),
        });
    }
    Ok(GridField::new(vec![rows.len(), width], rows.concat())?)
}

/// Two columns `x,y`; no header.
pub fn parse_samples_csv(bytes: &[u8]) -> Result<SampledFunction, FormatError> {
    let rows = csv_rows(bytes)?;
    if let Some(k) = rows.iter().position(|r| r.len() != 2) {
        return Err(FormatError::Csv {
            line: k + 1,
            msg: format!("expected 2 columns, got {}", rows[k].len()),
        });
    }
    let (xs, ys) = rows.iter().map(|r| (r[0], r[1])).unzip();
    Ok(SampledFunction::new(xs, ys)?)
}

pub fn load_samples(path: &Path) -> Result<SampledFunction, FormatError> {
    parse_samples_csv(&read_bytes(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: [usize; 2],
    pub hi: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub boxes: Vec<BoxSpec>,
}

impl DomainSpec {
    pub fn to_domain(&self, extents: [usize; 2]) -> Result<RectilinearDomain, FormatError> {
        let boxes = self
            .boxes
            .iter()
            .map(|b| LatticeBox::new(b.lo.to_vec(), b.hi.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RectilinearDomain::from_boxes(extents, &boxes)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub orientation: i8,
    #[serde(default)]
    pub closed: bool,
    pub vertices: Vec<Vertex>,
}

impl CurveSpec {
    /// A closed curve may omit the repeated start vertex.
    pub fn to_curve(&self) -> Result<LatticeCurve, FormatError> {
        let mut vs = self.vertices.clone();
        if self.closed {
            if vs.len() > 1 && vs.first() != vs.last() {
                vs.push(vs[0]);
            }
            Ok(LatticeCurve::closed(vs, self.orientation)?)
        } else {
            Ok(LatticeCurve::open(vs, self.orientation)?)
        }
    }
}

pub fn load_domain(path: &Path) -> Result<DomainSpec, FormatError> {
    Ok(serde_json::from_slice(&read_bytes(path)?)?)
}

pub fn load_curve(path: &Path) -> Result<CurveSpec, FormatError> {
    Ok(serde_json::from_slice(&read_bytes(path)?)?)
}

fn sign_json(s: Option<Sign>) -> Value {
    s.map_or(Value::Null, |s| json!(s.as_i8()))
}

/// Classification record; `x` is rendered by the caller.
pub fn report_json(r: &DetachmentReport, x: Value) -> Value {
    json!({
        "x": x,
        "sup_plus": r.sup_plus.as_i8(),
        "inf_plus": r.inf_plus.as_i8(),
        "sup_minus": r.sup_minus.as_i8(),
        "inf_minus": r.inf_minus.as_i8(),
        "detachment": sign_json(r.detachment),
        "signposted": sign_json(r.signposted),
        "types": r.types,
        "tendency": sign_json(r.tendency),
        "monotony": r.monotony.as_set(),
    })
}
