//! Test-side transport writer. The IBM encoder scales by powers of 16 in
//! floating point, independently of the bit-level decoder it checks.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Smallest and one past the largest magnitude an IBM double can hold.
pub const IBM_MIN: f64 =
    1.0 / (1u128 << 65) as f64 / (1u128 << 65) as f64 / (1u128 << 65) as f64 / (1u128 << 65) as f64;
pub const IBM_LIMIT: f64 = (1u128 << 126) as f64 * (1u128 << 126) as f64;

/// Encodes `v` (None for missing `.`) as an 8-byte IBM float. `v` must be 0
/// or have magnitude in `[IBM_MIN, IBM_LIMIT)`.
pub fn ibm_encode(v: Option<f64>) -> [u8; 8] {
    let Some(v) = v else {
        return [b'.', 0, 0, 0, 0, 0, 0, 0];
    };
    if v == 0.0 {
        return if v.is_sign_negative() {
            [0x80, 0, 0, 0, 0, 0, 0, 0]
        } else {
            [0; 8]
        };
    }
    assert!(v.abs() >= IBM_MIN && v.abs() < IBM_LIMIT, "{v} outside IBM range");
    let mut f = v.abs();
    let mut exp: i32 = 0;
    while f >= 1.0 {
        f /= 16.0;
        exp += 1;
    }
    while f < 1.0 / 16.0 {
        f *= 16.0;
        exp -= 1;
    }
    let fraction = (f * (1u64 << 56) as f64) as u64;
    assert_eq!(fraction as f64, f * (1u64 << 56) as f64);
    let mut out = fraction.to_be_bytes();
    out[0] = (exp + 64) as u8 | if v < 0.0 { 0x80 } else { 0 };
    out
}

fn card(s: &str) -> Vec<u8> {
    let mut b = s.as_bytes().to_vec();
    assert!(b.len() <= 80);
    b.resize(80, b' ');
    b
}

fn padded(s: &str, n: usize) -> Vec<u8> {
    let mut b = s.as_bytes().to_vec();
    b.resize(n, b' ');
    b
}

/// A single-member version 5 transport file with 8-byte numeric columns.
/// With `pad` the observations are blank-filled to a multiple of 80 bytes.
pub fn build_xpt(member: &str, names: &[&str], rows: &[Vec<Option<f64>>], pad: bool) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend(card(
        "HEADER RECORD*******LIBRARY HEADER RECORD!!!!!!!000000000000000000000000000000",
    ));
    out.extend(card(
        "SAS     SAS     SASLIB  6.06    testos                          01JAN26:00:00:00",
    ));
    out.extend(card("01JAN26:00:00:00"));
    out.extend(card(
        "HEADER RECORD*******MEMBER  HEADER RECORD!!!!!!!000000000000000001600000000140",
    ));
    out.extend(card(
        "HEADER RECORD*******DSCRPTR HEADER RECORD!!!!!!!000000000000000000000000000000",
    ));
    out.extend(card(&format!(
        "SAS     {:<8}SASDATA 6.06    testos                          01JAN26:00:00:00",
        member
    )));
    out.extend(card("01JAN26:00:00:00"));
    out.extend(card(&format!(
        "HEADER RECORD*******NAMESTR HEADER RECORD!!!!!!!000000{:04}00000000000000000000",
        names.len()
    )));
    let mut block = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let mut ns = Vec::with_capacity(140);
        ns.extend(1u16.to_be_bytes());
        ns.extend(0u16.to_be_bytes());
        ns.extend(8u16.to_be_bytes());
        ns.extend((i as u16 + 1).to_be_bytes());
        ns.extend(padded(name, 8));
        ns.extend(padded("", 40));
        ns.extend(padded("", 8));
        ns.extend([0u8; 8]);
        ns.extend(padded("", 8));
        ns.extend([0u8; 4]);
        ns.extend((8 * i as u32).to_be_bytes());
        ns.resize(140, 0);
        block.extend(ns);
    }
    block.resize(block.len().div_ceil(80) * 80, b' ');
    out.extend(block);
    out.extend(card(
        "HEADER RECORD*******OBS     HEADER RECORD!!!!!!!000000000000000000000000000000",
    ));
    let start = out.len();
    for row in rows {
        for &v in row {
            out.extend(ibm_encode(v));
        }
    }
    if pad {
        let len = out.len() - start;
        out.resize(start + len.div_ceil(80) * 80, b' ');
    }
    out
}
