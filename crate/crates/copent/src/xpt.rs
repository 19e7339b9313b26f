//! Reader for SAS transport (XPORT version 5) files.
//!
//! The file is a sequence of 80-byte card images: a library header, one
//! member header per dataset, a block of 140-byte variable descriptors
//! ("namestrs") and then fixed-width observation records. Numbers are IBM
//! System/370 hexadecimal floats, stored big-endian and possibly truncated to
//! fewer than 8 bytes. Only the first member is read.

use std::path::Path;

use copent_core::{Column, Dataset};

use crate::error::{Error, Result};

const RECORD: usize = 80;
const LIBRARY_TAG: &[u8] = b"HEADER RECORD*******LIBRARY HEADER RECORD!!!!!!!";
const LIBV8_TAG: &[u8] = b"HEADER RECORD*******LIBV8   HEADER RECORD!!!!!!!";
const MEMBER_TAG: &[u8] = b"HEADER RECORD*******MEMBER  HEADER RECORD!!!!!!!";
const MEMBV8_TAG: &[u8] = b"HEADER RECORD*******MEMBV8  HEADER RECORD!!!!!!!";
const DSCRPTR_TAG: &[u8] = b"HEADER RECORD*******DSCRPTR HEADER RECORD!!!!!!!";
const NAMESTR_TAG: &[u8] = b"HEADER RECORD*******NAMESTR HEADER RECORD!!!!!!!";
const OBS_TAG: &[u8] = b"HEADER RECORD*******OBS     HEADER RECORD!!!!!!!";

/// Decodes an 8-byte IBM hexadecimal double.
///
/// Returns `None` for SAS missing values: a first byte of `.`, `_` or `A`–`Z`
/// followed by seven zero bytes. The 56-bit IBM fraction is truncated toward
/// zero to the 53-bit IEEE significand. Every IBM exponent maps to a normal
/// IEEE double, so no overflow or underflow can occur.
pub fn ibm_to_ieee(bytes: &[u8; 8]) -> Option<f64> {
    let first = bytes[0];
    if bytes[1..].iter().all(|&b| b == 0) && (first == b'.' || first == b'_' || first.is_ascii_uppercase()) {
        return None;
    }
    let negative = first & 0x80 != 0;
    let exponent = i64::from(first & 0x7f) - 64;
    let fraction = u64::from_be_bytes(*bytes) & 0x00ff_ffff_ffff_ffff;
    if fraction == 0 {
        return Some(if negative { -0.0 } else { 0.0 });
    }
    // value = fraction · 2^-56 · 16^exponent
    let lz = i64::from(fraction.leading_zeros()) - 8;
    let significand = (fraction << lz) >> 3;
    let unbiased = 4 * exponent - 1 - lz;
    let bits = (u64::from(negative) << 63) | (((unbiased + 1023) as u64) << 52) | (significand & ((1 << 52) - 1));
    Some(f64::from_bits(bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    Numeric,
    Character,
}

/// One variable descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub label: String,
    pub var_type: VarType,
    /// Width in bytes within an observation record.
    pub length: usize,
    /// Byte offset within an observation record.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XptData {
    pub member_name: String,
    pub variables: Vec<Variable>,
    /// Character variables appear as all-missing columns.
    pub dataset: Dataset,
    pub warnings: Vec<String>,
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).trim_end_matches([' ', '\0']).to_string()
}

fn ascii_number(bytes: &[u8], what: &str) -> Result<usize> {
    std::str::from_utf8(bytes)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Malformed(format!("unreadable {what} field {:?}", String::from_utf8_lossy(bytes))))
}

fn be16(b: &[u8]) -> usize {
    u16::from_be_bytes([b[0], b[1]]) as usize
}

fn be32(b: &[u8]) -> usize {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::Malformed(format!("file ends inside the {what}")));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn header(&mut self, tag: &[u8], what: &str) -> Result<&'a [u8]> {
        let rec = self.take(RECORD, what)?;
        if !rec.starts_with(tag) {
            return Err(Error::Malformed(format!(
                "expected {what} at byte {}",
                self.pos - RECORD
            )));
        }
        Ok(rec)
    }
}

fn parse_namestr(b: &[u8], index: usize) -> Result<Variable> {
    let var_type = match be16(&b[0..2]) {
        1 => VarType::Numeric,
        2 => VarType::Character,
        other => {
            return Err(Error::Malformed(format!(
                "variable {} has unknown type code {other}",
                index + 1
            )));
        }
    };
    let var = Variable {
        var_type,
        length: be16(&b[4..6]),
        name: text(&b[8..16]),
        label: text(&b[16..56]),
        position: be32(&b[84..88]),
    };
    if var.var_type == VarType::Numeric && !(2..=8).contains(&var.length) {
        return Err(Error::Malformed(format!(
            "numeric variable {:?} has length {} (allowed 2 to 8)",
            var.name, var.length
        )));
    }
    Ok(var)
}

/// Positions must tile `[0, stride)` without gaps or overlaps.
fn record_stride(vars: &[Variable]) -> Result<usize> {
    let mut spans: Vec<(usize, usize, &str)> = vars.iter().map(|v| (v.position, v.length, v.name.as_str())).collect();
    spans.sort_unstable();
    let mut expected = 0;
    for (pos, len, name) in spans {
        if pos != expected {
            return Err(Error::StrideMismatch(format!(
                "variable {name:?} starts at byte {pos}, expected {expected}"
            )));
        }
        expected += len;
    }
    Ok(expected)
}

fn decode_numeric(field: &[u8]) -> Option<f64> {
    let mut buf = [0u8; 8];
    buf[..field.len()].copy_from_slice(field);
    ibm_to_ieee(&buf)
}

/// Parses the first member of a transport file.
pub fn parse_xpt(bytes: &[u8]) -> Result<XptData> {
    if bytes.len() >= LIBV8_TAG.len() && bytes.starts_with(LIBV8_TAG) {
        return Err(Error::Unsupported(
            "XPORT version 8 (LIBV8) files are not supported; only version 5 is".into(),
        ));
    }
    if !bytes.starts_with(LIBRARY_TAG) {
        return Err(Error::BadSignature);
    }
    let mut cur = Cursor { bytes, pos: 0 };
    cur.take(3 * RECORD, "library header")?;
    let member = cur.take(RECORD, "member header")?;
    if member.starts_with(MEMBV8_TAG) {
        return Err(Error::Unsupported("version 8 member header".into()));
    }
    if !member.starts_with(MEMBER_TAG) {
        return Err(Error::Malformed("expected member header at byte 240".into()));
    }
    let namestr_len = ascii_number(&member[74..78], "descriptor length")?;
    if namestr_len != 140 && namestr_len != 136 {
        return Err(Error::Malformed(format!("descriptor length {namestr_len}")));
    }
    cur.header(DSCRPTR_TAG, "descriptor header")?;
    let member_desc = cur.take(RECORD, "member descriptor")?;
    let member_name = text(&member_desc[8..16]);
    cur.take(RECORD, "member descriptor")?;
    let nh = cur.header(NAMESTR_TAG, "variable header")?;
    let n_vars = ascii_number(&nh[54..58], "variable count")?;
    let block = n_vars * namestr_len;
    let padded = block.div_ceil(RECORD) * RECORD;
    let raw = cur.take(padded, "variable descriptors")?;
    let mut variables = Vec::with_capacity(n_vars);
    for i in 0..n_vars {
        let mut b = [0u8; 140];
        b[..namestr_len].copy_from_slice(&raw[i * namestr_len..(i + 1) * namestr_len]);
        variables.push(parse_namestr(&b, i)?);
    }
    cur.header(OBS_TAG, "observation header")?;

    let rest = &bytes[cur.pos..];
    // A second member would start on a record boundary with its own header.
    let end = (0..rest.len() / RECORD)
        .map(|r| r * RECORD)
        .find(|&o| rest[o..].starts_with(MEMBER_TAG) || rest[o..].starts_with(MEMBV8_TAG))
        .unwrap_or(rest.len());
    let data = &rest[..end];

    let stride = record_stride(&variables)?;
    let n_obs = observation_count(data, stride)?;

    let mut warnings = Vec::new();
    let mut columns = Vec::with_capacity(n_vars);
    for (i, v) in variables.iter().enumerate() {
        match v.var_type {
            VarType::Character => {
                warnings.push(format!(
                    "character variable {:?} (column {}) loaded as missing",
                    v.name,
                    i + 1
                ));
                columns.push(Column::all_missing(v.name.clone(), n_obs));
            }
            VarType::Numeric => columns.push(Column::from_options(
                v.name.clone(),
                (0..n_obs).map(|r| {
                    let start = r * stride + v.position;
                    decode_numeric(&data[start..start + v.length])
                }),
            )),
        }
    }
    if end < rest.len() {
        warnings.push("file holds more than one member; only the first was read".into());
    }
    Ok(XptData {
        member_name,
        dataset: Dataset::with_rows(n_obs, columns)?,
        variables,
        warnings,
    })
}

/// Number of observation records, after discarding the blank padding that
/// fills the last 80-byte card.
fn observation_count(data: &[u8], stride: usize) -> Result<usize> {
    let blank = |b: &[u8]| b.iter().all(|&c| c == b' ');
    if stride == 0 {
        return if blank(data) {
            Ok(0)
        } else {
            Err(Error::StrideMismatch("observations present but no variables".into()))
        };
    }
    let mut n = data.len() / stride;
    let tail = data.len() % stride;
    if !blank(&data[n * stride..]) {
        return Err(Error::TruncatedRecord(tail));
    }
    let mut padding = tail;
    while n > 0 && padding + stride < RECORD && blank(&data[(n - 1) * stride..n * stride]) {
        n -= 1;
        padding += stride;
    }
    Ok(n)
}

pub fn read_xpt(path: impl AsRef<Path>) -> Result<XptData> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_xpt(&bytes)
}
