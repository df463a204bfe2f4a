//! JSON output with a fixed float format, and serde helpers for complex data.

use std::io;

use num_complex::Complex64 as C64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::ser::Formatter;

use crate::cmv::CMat;

/// Writes every float with 17 significant digits (`{:.16e}`), so equal
/// inputs give byte-identical output. Non-finite values become `null`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedFloat;

impl FixedFloat {
    fn write<W: ?Sized + io::Write>(w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
}

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        Self::write(w, v)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        Self::write(w, v as f64)
    }
}

/// Serialize to compact JSON with [`FixedFloat`].
pub fn to_json<T: Serialize>(v: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    v.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn ser_complex<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn ser_complex_vec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

pub fn ser_complex_rows<S: Serializer>(v: &[Vec<C64>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = v.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
    rows.serialize(s)
}

/// Row-major list of rows of `[re, im]` pairs.
pub fn ser_matrix<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    rows.serialize(s)
}
